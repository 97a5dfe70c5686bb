#include "thermoblob/log_kernel.hpp"

#include <cmath>
#include <string>

namespace thermo {

namespace {

constexpr int kMaxKernelSize = 513;

void check_params(const LoGParams& p) {
    if (!(p.sigma_x > 0.0) || !(p.sigma_y > 0.0))
        throw InvalidInput("LoG sigmas must be > 0");
    if (!(p.alpha > 0.0))
        throw InvalidInput("LoG alpha must be > 0");
    if (!(p.truncation_radius > 0.0))
        throw InvalidInput("LoG truncation radius must be > 0");
    if (!std::isfinite(p.theta))
        throw InvalidInput("LoG theta must be finite");
}

// Neumaier-compensated sum; keeps the zero-sum correction tight.
double compensated_sum(const std::vector<double>& values) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

} // namespace

int LoGParams::kernel_size() const {
    const double s = std::max(sigma_x, sigma_y);
    return 2 * static_cast<int>(std::ceil(truncation_radius * s)) + 1;
}

ShapeCoefficients shape_coefficients(const LoGParams& params) {
    check_params(params);
    const double ct = std::cos(params.theta);
    const double st = std::sin(params.theta);
    const double s2t = std::sin(2.0 * params.theta);
    const double sx2 = params.sigma_x * params.sigma_x;
    const double sy2 = params.sigma_y * params.sigma_y;
    return ShapeCoefficients{
        ct * ct / (2.0 * sx2) + st * st / (2.0 * sy2),
        -s2t / (4.0 * sx2) + s2t / (4.0 * sy2),
        st * st / (2.0 * sx2) + ct * ct / (2.0 * sy2),
    };
}

double normalization_factor(const LoGParams& params) {
    check_params(params);
    if (params.sigma_x < 1.0 || params.sigma_y < 1.0)
        throw InvalidInput(
            "normalization factor needs sigma >= 1 on both axes; ln(sigma)^alpha "
            "leaves the reals below 1 for fractional alpha");
    const double lx = std::log(params.sigma_x);
    const double ly = std::log(params.sigma_y);
    return (1.0 + std::pow(lx, params.alpha)) * (1.0 + std::pow(ly, params.alpha));
}

Kernel build_log_kernel(const LoGParams& params) {
    check_params(params);
    const int size = params.kernel_size();
    if (size > kMaxKernelSize)
        throw InvalidInput("LoG kernel side length " + std::to_string(size) +
                           " exceeds the configured maximum of " +
                           std::to_string(kMaxKernelSize));

    // A is a global scale; it matters only when the kernel is anisotropic.
    const bool symmetric = params.sigma_x == params.sigma_y;
    const double amp = symmetric ? 1.0 : normalization_factor(params);

    const ShapeCoefficients sc = shape_coefficients(params);
    const int r = (size - 1) / 2;
    std::vector<double> w(static_cast<std::size_t>(size) * size);

    // d2G/dx2 + d2G/dy2 of the oriented Gaussian, negated so hot blobs come
    // out positive (the raw Laplacian is negative at the center of a bright blob).
    std::size_t i = 0;
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x, ++i) {
            const double gx = 2.0 * sc.a * x + 2.0 * sc.b * y;
            const double gy = 2.0 * sc.b * x + 2.0 * sc.c * y;
            const double env =
                std::exp(-(sc.a * x * x + 2.0 * sc.b * x * y + sc.c * y * y));
            const double lap =
                amp * ((gx * gx - 2.0 * sc.a) + (gy * gy - 2.0 * sc.c)) * env;
            w[i] = -lap;
        }
    }

    // Two mean-subtraction passes pull the discrete sum to within a few ulps
    // of zero, so constant inputs produce (numerically) zero response.
    const double n = static_cast<double>(w.size());
    for (int pass = 0; pass < 2; ++pass) {
        const double mean = compensated_sum(w) / n;
        for (double& v : w)
            v -= mean;
    }

    return Kernel(size, std::move(w));
}

double sigma_from_radius(double s) {
    if (!(s > 1.0))
        throw InvalidInput("blob radius must be > 1 pixel; sigma = (s-1)/3 "
                           "degenerates otherwise");
    return (s - 1.0) / 3.0;
}

} // namespace thermo
