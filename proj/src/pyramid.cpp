#include "thermoblob/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thermo {

namespace {

constexpr double kTap[5] = {1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0,
                            1.0 / 16.0};

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Horizontal 5-tap smoothing pass with replicate border.
std::vector<double> smooth_rows(const std::vector<double>& src, int w, int h) {
    std::vector<double> dst(src.size());
    for (int y = 0; y < h; ++y) {
        const double* row = &src[static_cast<std::size_t>(y) * w];
        double* out = &dst[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t)
                acc += kTap[t + 2] * row[clamp_index(x + t, w)];
            out[x] = acc;
        }
    }
    return dst;
}

// Vertical pass of the same kernel.
std::vector<double> smooth_cols(const std::vector<double>& src, int w, int h) {
    std::vector<double> dst(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -2; t <= 2; ++t)
                acc += kTap[t + 2] *
                       src[static_cast<std::size_t>(clamp_index(y + t, h)) * w + x];
            dst[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return dst;
}

// One expand pass along x: out(j) = sum over taps m with j-m even of
// 2*kTap[m] * in((j-m)/2), source index replicated at the borders.
// Equivalent to zero-interleaving followed by the gain-2 filter.
std::vector<double> expand_rows(const std::vector<double>& src, int w, int h,
                                int target_w) {
    std::vector<double> dst(static_cast<std::size_t>(target_w) * h);
    for (int y = 0; y < h; ++y) {
        const double* row = &src[static_cast<std::size_t>(y) * w];
        double* out = &dst[static_cast<std::size_t>(y) * target_w];
        for (int j = 0; j < target_w; ++j) {
            double acc = 0.0;
            for (int m = -2; m <= 2; ++m) {
                if ((j - m) % 2 != 0)
                    continue;
                acc += 2.0 * kTap[m + 2] * row[clamp_index((j - m) / 2, w)];
            }
            out[j] = acc;
        }
    }
    return dst;
}

std::vector<double> expand_cols(const std::vector<double>& src, int w, int h,
                                int target_h) {
    std::vector<double> dst(static_cast<std::size_t>(w) * target_h);
    for (int j = 0; j < target_h; ++j) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int m = -2; m <= 2; ++m) {
                if ((j - m) % 2 != 0)
                    continue;
                acc += 2.0 * kTap[m + 2] *
                       src[static_cast<std::size_t>(clamp_index((j - m) / 2, h)) * w + x];
            }
            dst[static_cast<std::size_t>(j) * w + x] = acc;
        }
    }
    return dst;
}

int ceil_half(int n) { return (n + 1) / 2; }

} // namespace

std::vector<PyramidLevelFrame> build_pyramid(const ThermalFrame& frame,
                                             int max_level) {
    if (max_level < 0)
        throw InvalidInput("pyramid depth must be >= 0");
    std::vector<PyramidLevelFrame> levels;
    levels.reserve(static_cast<std::size_t>(max_level) + 1);
    levels.push_back({0, frame, 1.0});
    for (int l = 1; l <= max_level; ++l)
        levels.push_back({l, reduce(levels.back().frame),
                          static_cast<double>(1 << l)});
    return levels;
}

ThermalFrame reduce(const ThermalFrame& frame) {
    const int w = frame.width();
    const int h = frame.height();
    if (w < 2 || h < 2)
        throw InvalidInput("cannot reduce a frame with a 1-pixel dimension");

    std::vector<double> smoothed = smooth_cols(smooth_rows(frame.data(), w, h), w, h);

    const int ow = ceil_half(w);
    const int oh = ceil_half(h);
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            out[static_cast<std::size_t>(y) * ow + x] =
                smoothed[static_cast<std::size_t>(2 * y) * w + 2 * x];

    return ThermalFrame(ow, oh, std::move(out), frame.pixel_pitch() * 2.0);
}

ThermalFrame expand(const ThermalFrame& frame, int target_width, int target_height) {
    const int w = frame.width();
    const int h = frame.height();
    const auto valid = [](int target, int dim) {
        return target == 2 * dim - 1 || target == 2 * dim;
    };
    if (!valid(target_width, w) || !valid(target_height, h))
        throw InvalidInput("expand target dims must be 2*dim-1 or 2*dim per axis");

    std::vector<double> wide = expand_rows(frame.data(), w, h, target_width);
    std::vector<double> out = expand_cols(wide, target_width, h, target_height);
    return ThermalFrame(target_width, target_height, std::move(out),
                        frame.pixel_pitch() / 2.0);
}

std::vector<std::pair<int, int>> reduce_dims_chain(int width, int height, int levels) {
    if (width < 1 || height < 1 || levels < 0)
        throw InvalidInput("bad arguments to reduce_dims_chain");
    std::vector<std::pair<int, int>> chain;
    chain.reserve(static_cast<std::size_t>(levels) + 1);
    chain.emplace_back(width, height);
    for (int i = 0; i < levels; ++i) {
        auto [w, h] = chain.back();
        if (w < 2 || h < 2)
            throw InvalidInput("frame too small to reduce " +
                               std::to_string(levels) + " times");
        chain.emplace_back(ceil_half(w), ceil_half(h));
    }
    return chain;
}

ThermalFrame reduce_n(const ThermalFrame& frame, int i) {
    if (i < 0)
        throw InvalidInput("reduce count must be >= 0");
    ThermalFrame out = frame;
    for (int l = 0; l < i; ++l)
        out = reduce(out);
    return out;
}

ThermalFrame expand_n(const ThermalFrame& frame, int i, int level0_width,
                      int level0_height) {
    if (i < 0)
        throw InvalidInput("expand count must be >= 0");
    const auto chain = reduce_dims_chain(level0_width, level0_height, i);
    if (frame.width() != chain[i].first || frame.height() != chain[i].second)
        throw InvalidInput("frame dims do not match level-" + std::to_string(i) +
                           " of the given level-0 dims");
    ThermalFrame out = frame;
    for (int l = i; l > 0; --l)
        out = expand(out, chain[l - 1].first, chain[l - 1].second);
    return out;
}

} // namespace thermo
