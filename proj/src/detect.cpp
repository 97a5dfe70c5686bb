#include "thermoblob/detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "thermoblob/pyramid.hpp"

namespace thermo {

namespace {

void check_levels(const std::vector<int>& levels) {
    if (levels.empty())
        throw InvalidInput("detection needs at least one pyramid level");
    int prev = -1;
    for (int l : levels) {
        if (l < 0 || l > 8)
            throw InvalidInput("pyramid levels must be in [0, 8]");
        if (l <= prev)
            throw InvalidInput("pyramid levels must be strictly increasing");
        prev = l;
    }
}

// Least-squares fit of {1, x, y, x^2, xy, y^2} via normal equations; returns
// the fraction of variance explained. Coordinates are centered and scaled to
// [-1, 1] to keep the 6x6 system well conditioned.
double quadratic_trend_r2(const ThermalFrame& f) {
    const int w = f.width();
    const int h = f.height();
    const double n = static_cast<double>(w) * h;

    double mean = 0.0;
    for (double v : f.data())
        mean += v;
    mean /= n;

    double ss_tot = 0.0;
    for (double v : f.data())
        ss_tot += (v - mean) * (v - mean);
    if (ss_tot < 1e-30)
        return 0.0; // constant map: no structure, no trend

    const double sx = w > 1 ? 2.0 / (w - 1) : 1.0;
    const double sy = h > 1 ? 2.0 / (h - 1) : 1.0;

    std::array<double, 36> ata{};
    std::array<double, 6> atb{};
    for (int yi = 0; yi < h; ++yi) {
        const double y = yi * sy - 1.0;
        for (int xi = 0; xi < w; ++xi) {
            const double x = xi * sx - 1.0;
            const std::array<double, 6> phi{1.0, x, y, x * x, x * y, y * y};
            const double v = f.at(xi, yi);
            for (int i = 0; i < 6; ++i) {
                atb[i] += phi[i] * v;
                for (int j = 0; j < 6; ++j)
                    ata[i * 6 + j] += phi[i] * phi[j];
            }
        }
    }

    // Gaussian elimination with partial pivoting on the 6x6 system.
    std::array<double, 6> coef{};
    {
        std::array<double, 42> m{};
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j)
                m[i * 7 + j] = ata[i * 6 + j];
            m[i * 7 + 6] = atb[i];
        }
        for (int col = 0; col < 6; ++col) {
            int piv = col;
            for (int r = col + 1; r < 6; ++r)
                if (std::abs(m[r * 7 + col]) > std::abs(m[piv * 7 + col]))
                    piv = r;
            if (std::abs(m[piv * 7 + col]) < 1e-14)
                return 0.0; // degenerate fit (tiny frames)
            if (piv != col)
                for (int j = 0; j < 7; ++j)
                    std::swap(m[col * 7 + j], m[piv * 7 + j]);
            for (int r = 0; r < 6; ++r) {
                if (r == col)
                    continue;
                const double factor = m[r * 7 + col] / m[col * 7 + col];
                for (int j = col; j < 7; ++j)
                    m[r * 7 + j] -= factor * m[col * 7 + j];
            }
        }
        for (int i = 0; i < 6; ++i)
            coef[i] = m[i * 7 + 6] / m[i * 7 + i];
    }

    double ss_res = 0.0;
    for (int yi = 0; yi < h; ++yi) {
        const double y = yi * sy - 1.0;
        for (int xi = 0; xi < w; ++xi) {
            const double x = xi * sx - 1.0;
            const double fit = coef[0] + coef[1] * x + coef[2] * y +
                               coef[3] * x * x + coef[4] * x * y + coef[5] * y * y;
            const double r = f.at(xi, yi) - fit;
            ss_res += r * r;
        }
    }
    return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

} // namespace

DetectionMap rectify(const DetectionMap& map) {
    std::vector<double> out(map.responses.data().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::max(0.0, map.responses.data()[i]);
    return DetectionMap{ThermalFrame(map.responses.width(), map.responses.height(),
                                     std::move(out), map.responses.pixel_pitch()),
                        map.level_provenance, true};
}

DetectionMap detect_single_level(const ThermalFrame& frame,
                                 const DetectConfig& config, int level) {
    if (level < 0 || level > 8)
        throw InvalidInput("pyramid level must be in [0, 8]");
    const Kernel kernel = build_log_kernel(config.log_params);

    ThermalFrame reduced = reduce_n(frame, level);
    if (kernel.size() > 2 * std::min(reduced.width(), reduced.height()) - 1)
        throw InvalidInput("frame too small for level " + std::to_string(level) +
                           ": the " + std::to_string(kernel.size()) +
                           "-px kernel does not fit the reduced dims");
    ThermalFrame filtered = convolve(reduced, kernel, config.border);
    ThermalFrame restored = expand_n(filtered, level, frame.width(), frame.height());
    return DetectionMap{std::move(restored), {level}, false};
}

DetectionMap detect_multiscale(const ThermalFrame& frame, const DetectConfig& config) {
    check_levels(config.levels);

    std::vector<double> sum(frame.data().size(), 0.0);
    for (int level : config.levels) {
        const DetectionMap m = detect_single_level(frame, config, level);
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] += m.responses.data()[i];
    }
    DetectionMap out{ThermalFrame(frame.width(), frame.height(), std::move(sum),
                                  frame.pixel_pitch()),
                     config.levels, false};
    return config.rectify ? thermo::rectify(out) : out;
}

LevelDiagnostic level_diagnostic(const ThermalFrame& frame,
                                 const DetectConfig& config, int max_level) {
    if (max_level < 0 || max_level > 8)
        throw InvalidInput("max_level must be in [0, 8]");

    LevelDiagnostic diag;
    std::vector<double> energies;
    for (int level = 0; level <= max_level; ++level) {
        const DetectionMap m = detect_single_level(frame, config, level);
        double energy = 0.0;
        for (double v : m.responses.data())
            energy += std::max(0.0, v);
        energies.push_back(energy);
        LevelReport report;
        report.level = level;
        report.trend_r2 = quadratic_trend_r2(m.responses);
        report.trend_flagged = report.trend_r2 > 0.5;
        diag.levels.push_back(report);
    }

    double total = 0.0;
    for (double e : energies)
        total += e;
    for (std::size_t i = 0; i < energies.size(); ++i)
        diag.levels[i].energy_fraction = total > 0.0 ? energies[i] / total : 0.0;

    for (const LevelReport& r : diag.levels) {
        if (r.trend_flagged) {
            diag.first_trend_level = r.level;
            break;
        }
    }
    return diag;
}

} // namespace thermo
