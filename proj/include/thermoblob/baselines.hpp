#ifndef THERMOBLOB_BASELINES_HPP
#define THERMOBLOB_BASELINES_HPP

#include <cstdint>
#include <vector>

#include "thermoblob/frame.hpp"

namespace thermo {

/// mask = frame >= cutoff.
BinaryMask hard_threshold(const ThermalFrame& frame, double cutoff_temperature);

/// clamp((frame - sound_temperature) / expected_delta, 0, 1). The caller
/// supplies the sound-area temperature and the expected defect-vs-sound
/// delta for the time window.
ThermalFrame contrast_reconstruct(const ThermalFrame& frame,
                                  double sound_temperature, double expected_delta);

struct KMeansResult {
    std::vector<int> labels;       ///< per pixel, centroid index after sorting
    std::vector<double> centroids; ///< ascending
    double inertia = 0.0;          ///< sum of squared distances to assigned centroid
    int iterations = 0;
};

/// Lloyd's algorithm on scalar temperatures with k-means++ seeding driven by
/// a caller-supplied seed; fully deterministic. Centroids are sorted
/// ascending so labels are reproducible. Stops when every centroid moves
/// less than 1e-9 or after 300 iterations. Requires 2 <= k <= number of
/// distinct values.
KMeansResult kmeans_cluster(const ThermalFrame& frame, int k, std::uint64_t seed);

/// Per-frequency-bin phase and amplitude maps from the per-pixel DFT of the
/// temporally mean-centered series. Bins run 0..floor(N/2); the mapping to
/// physical frequency is f_k = k / (N * dt). Bin 0 is kept for completeness
/// but carries no phase information after mean removal.
class PhaseStack {
public:
    PhaseStack(int width, int height, int series_length, double dt,
               std::vector<std::vector<double>> phase_bins,
               std::vector<std::vector<double>> amplitude_bins);

    int width() const { return width_; }
    int height() const { return height_; }
    int series_length() const { return series_length_; }
    double dt() const { return dt_; }
    std::size_t bin_count() const { return phase_bins_.size(); }
    double bin_frequency(std::size_t k) const {
        return static_cast<double>(k) / (series_length_ * dt_);
    }
    double nyquist() const { return 0.5 / dt_; }

    const std::vector<double>& phase_bin(std::size_t k) const { return phase_bins_.at(k); }
    const std::vector<double>& amplitude_bin(std::size_t k) const {
        return amplitude_bins_.at(k);
    }

private:
    int width_;
    int height_;
    int series_length_;
    double dt_;
    std::vector<std::vector<double>> phase_bins_;
    std::vector<std::vector<double>> amplitude_bins_;
};

/// Requires >= 4 frames. Phase is atan2(Im, Re) per bin; bins whose
/// amplitude falls below 1e-12 report phase 0.
PhaseStack ppt_transform(const ThermalSequence& seq);

struct PhaseSelection {
    ThermalFrame phase;    ///< radians in (-pi, pi]
    std::size_t bin;
    double bin_frequency;  ///< Hz of the selected bin
};

/// Nearest-bin selection for a target frequency in (0, Nyquist]; ties
/// between two bins break toward the lower bin.
PhaseSelection ppt_phase_at(const PhaseStack& stack, double target_frequency);

/// Principal-component score maps of a sequence, ordered by descending
/// singular value. Components below numerical rank are not materialized:
/// `components` may be shorter than `singular_values`.
struct ComponentStack {
    std::vector<ThermalFrame> components; ///< orthonormal spatial maps
    std::vector<double> singular_values;  ///< one per requested component, descending
};

/// SVD of the N x P matrix of temporally mean-centered pixel series (rows =
/// time). Spatial singular vectors come back reshaped to frames; each
/// component is sign-fixed so its maximal-|value| pixel is positive.
/// Requires N >= 2 and n_components <= min(N, pixels). An all-constant
/// sequence yields all-zero singular values and no component maps.
ComponentStack pct_transform(const ThermalSequence& seq, int n_components);

} // namespace thermo

#endif
