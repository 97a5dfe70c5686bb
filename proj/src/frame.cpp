#include "thermoblob/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thermo {

namespace {

void check_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v))
            throw InvalidInput(std::string(what) + " contains a non-finite value");
    }
}

int resolve_index(int i, int n, BorderPolicy border) {
    if (i >= 0 && i < n)
        return i;
    switch (border) {
    case BorderPolicy::Replicate:
        return i < 0 ? 0 : n - 1;
    case BorderPolicy::Reflect:
        // single fold is enough because kernel size <= 2n - 1
        return i < 0 ? -i - 1 : 2 * n - 1 - i;
    case BorderPolicy::ZeroPad:
        return -1;
    }
    return -1;
}

} // namespace

ThermalFrame::ThermalFrame(int width, int height, std::vector<double> data,
                           double pixel_pitch)
    : width_(width), height_(height), pixel_pitch_(pixel_pitch),
      data_(std::move(data)) {
    if (width_ < 1 || height_ < 1)
        throw InvalidInput("frame dimensions must be >= 1");
    if (data_.size() != static_cast<std::size_t>(width_) * height_)
        throw InvalidInput("frame data length must equal width * height");
    check_finite(data_, "frame");
}

ThermalFrame ThermalFrame::constant(int width, int height, double value,
                                    double pixel_pitch) {
    if (width < 1 || height < 1)
        throw InvalidInput("frame dimensions must be >= 1");
    return ThermalFrame(width, height,
                        std::vector<double>(static_cast<std::size_t>(width) * height, value),
                        pixel_pitch);
}

ThermalSequence::ThermalSequence(std::vector<ThermalFrame> frames, double dt_seconds)
    : frames_(std::move(frames)), dt_(dt_seconds) {
    if (frames_.empty())
        throw InvalidInput("sequence needs at least one frame");
    if (!(dt_ > 0.0))
        throw InvalidInput("sequence dt must be > 0");
    const int w = frames_.front().width();
    const int h = frames_.front().height();
    for (const ThermalFrame& f : frames_) {
        if (f.width() != w || f.height() != h)
            throw InvalidInput("all frames in a sequence must share dimensions");
    }
}

Kernel::Kernel(int size, std::vector<double> weights)
    : size_(size), weights_(std::move(weights)) {
    if (size_ < 1 || size_ % 2 == 0)
        throw InvalidInput("kernel size must be a positive odd integer");
    if (weights_.size() != static_cast<std::size_t>(size_) * size_)
        throw InvalidInput("kernel weight count must equal size * size");
    check_finite(weights_, "kernel");
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(
        std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

ThermalFrame convolve(const ThermalFrame& frame, const Kernel& kernel,
                      BorderPolicy border) {
    const int w = frame.width();
    const int h = frame.height();
    const int k = kernel.size();
    if (k > 2 * std::min(w, h) - 1)
        throw InvalidInput("kernel size exceeds 2*min(width, height) - 1");

    const int r = kernel.radius();
    const std::vector<double>& src = frame.data();
    const std::vector<double>& wts = kernel.weights();
    std::vector<double> out(static_cast<std::size_t>(w) * h);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            std::size_t wi = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int sy = resolve_index(y + dy, h, border);
                if (sy < 0) {
                    wi += static_cast<std::size_t>(k);
                    continue;
                }
                const double* row = &src[static_cast<std::size_t>(sy) * w];
                for (int dx = -r; dx <= r; ++dx, ++wi) {
                    const int sx = resolve_index(x + dx, w, border);
                    if (sx < 0)
                        continue;
                    acc += wts[wi] * row[sx];
                }
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return ThermalFrame(w, h, std::move(out), frame.pixel_pitch());
}

FrameStats frame_stats(const ThermalFrame& frame) {
    const std::vector<double>& v = frame.data();
    const double n = static_cast<double>(v.size());

    double mn = v[0], mx = v[0], sum = 0.0;
    for (double x : v) {
        mn = std::min(mn, x);
        mx = std::max(mx, x);
        sum += x;
    }
    const double mean = sum / n;

    double ss = 0.0;
    for (double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    return FrameStats{mn, mx, mean, std::sqrt(ss / n)};
}

ThermalFrame subtract(const ThermalFrame& a, const ThermalFrame& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw InvalidInput("subtract requires identical frame dimensions");
    std::vector<double> out(a.data().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = a.data()[i] - b.data()[i];
    return ThermalFrame(a.width(), a.height(), std::move(out), a.pixel_pitch());
}

} // namespace thermo
