#ifndef THERMOBLOB_DETECT_HPP
#define THERMOBLOB_DETECT_HPP

#include <vector>

#include "thermoblob/frame.hpp"
#include "thermoblob/log_kernel.hpp"

namespace thermo {

/// Multiscale detection configuration. Defaults: symmetric sigma 2 detector
/// summed over pyramid levels 1..4, rectified, replicate border.
struct DetectConfig {
    LoGParams log_params{};
    std::vector<int> levels{1, 2, 3, 4}; ///< non-empty, >= 0, strictly increasing, max <= 8
    bool rectify = true;
    BorderPolicy border = BorderPolicy::Replicate;
};

/// Frame-shaped grid of filter responses with the levels that produced it.
struct DetectionMap {
    ThermalFrame responses;          ///< dimensionless, level-0 dims
    std::vector<int> level_provenance;
    bool rectified = false;
};

/// Elementwise max(0, x); idempotent.
DetectionMap rectify(const DetectionMap& map);

/// reduce i times, convolve with the configured LoG kernel, expand back to
/// the input dims. Unrectified. Throws InvalidInput when the level-i frame
/// is too small for the kernel.
DetectionMap detect_single_level(const ThermalFrame& frame,
                                 const DetectConfig& config, int level);

/// Elementwise sum of detect_single_level over config.levels (in level
/// order), rectified afterward when config.rectify is set.
DetectionMap detect_multiscale(const ThermalFrame& frame,
                               const DetectConfig& config);

/// Per-level report for the stopping heuristic: deep levels whose response
/// is dominated by a global 2nd-order trend usually reflect the heating
/// source, not defects.
struct LevelReport {
    int level = 0;
    double energy_fraction = 0.0; ///< share of total rectified response
    double trend_r2 = 0.0;        ///< variance share explained by a 2D quadratic fit
    bool trend_flagged = false;   ///< trend_r2 > 0.5
};

struct LevelDiagnostic {
    std::vector<LevelReport> levels;
    int first_trend_level = -1; ///< -1 when no level is flagged
};

/// Advisory only; never truncates the pipeline automatically.
LevelDiagnostic level_diagnostic(const ThermalFrame& frame,
                                 const DetectConfig& config, int max_level);

} // namespace thermo

#endif
