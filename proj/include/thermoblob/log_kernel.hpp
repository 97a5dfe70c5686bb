#ifndef THERMOBLOB_LOG_KERNEL_HPP
#define THERMOBLOB_LOG_KERNEL_HPP

#include "thermoblob/frame.hpp"

namespace thermo {

/// Parameters of a generalized (anisotropic, oriented) Laplacian-of-Gaussian
/// detector. The symmetric case is sigma_x == sigma_y with theta = 0.
struct LoGParams {
    double sigma_x = 2.0;          ///< pixels, > 0
    double sigma_y = 2.0;          ///< pixels, > 0
    double theta = 0.0;            ///< radians in [0, pi)
    double alpha = 1.0;            ///< eccentricity-control exponent, > 0
    double truncation_radius = 4.0; ///< kernel half-extent in multiples of max(sigma)

    /// Odd side length: 2*ceil(truncation_radius*max(sigma_x, sigma_y)) + 1.
    int kernel_size() const;
};

/// Quadratic-form coefficients of the oriented Gaussian envelope:
///   a = cos^2(t)/(2 sx^2) + sin^2(t)/(2 sy^2)
///   b = -sin(2t)/(4 sx^2) + sin(2t)/(4 sy^2)
///   c = sin^2(t)/(2 sx^2) + cos^2(t)/(2 sy^2)
struct ShapeCoefficients {
    double a;
    double b;
    double c;
};

ShapeCoefficients shape_coefficients(const LoGParams& params);

/// Eccentricity-controlled normalization A = (1 + ln(sx)^alpha)(1 + ln(sy)^alpha).
/// Requires sigma >= 1 on both axes: below 1 the log is negative and a
/// fractional alpha would leave the reals.
double normalization_factor(const LoGParams& params);

/// Sample the generalized LoG at integer offsets from the center, negate so
/// a hot blob on a cooler background yields a positive response, then
/// mean-subtract so the discrete weights sum to zero and constants map to
/// zero response.
///
/// The normalization A is applied only to anisotropic kernels; when
/// sigma_x == sigma_y it is a global scale and is skipped, which keeps
/// sub-pixel symmetric sigmas valid.
Kernel build_log_kernel(const LoGParams& params);

/// Detector scale for a blob of radius s pixels: sigma = (s - 1) / 3.
/// Requires s > 1.
double sigma_from_radius(double s);

} // namespace thermo

#endif
