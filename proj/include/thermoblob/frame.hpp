#ifndef THERMOBLOB_FRAME_HPP
#define THERMOBLOB_FRAME_HPP

#include <cstdint>
#include <vector>

#include "thermoblob/errors.hpp"

namespace thermo {

/// How samples outside the frame are produced during convolution.
enum class BorderPolicy {
    Replicate, ///< clamp to the nearest edge pixel
    Reflect,   ///< mirror about the edge, edge pixel repeated (.. c b a | a b c ..)
    ZeroPad    ///< outside samples are zero
};

/// One 2D grid of surface temperatures (degrees C), row-major.
///
/// Values are stored as 64-bit reals and must be finite. Frames are
/// immutable after construction and safe to share across threads.
class ThermalFrame {
public:
    /// Throws InvalidInput if dims are < 1, data length mismatches, or any
    /// value is non-finite.
    ThermalFrame(int width, int height, std::vector<double> data,
                 double pixel_pitch = 0.0);

    static ThermalFrame constant(int width, int height, double value,
                                 double pixel_pitch = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }

    /// Meters per pixel; 0 means unknown.
    double pixel_pitch() const { return pixel_pitch_; }

    double at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    const std::vector<double>& data() const { return data_; }

private:
    int width_;
    int height_;
    double pixel_pitch_;
    std::vector<double> data_;
};

/// Time-ordered stack of frames with a uniform sampling interval.
class ThermalSequence {
public:
    /// Throws InvalidInput unless there is >= 1 frame, all frames share
    /// dimensions and dt > 0.
    ThermalSequence(std::vector<ThermalFrame> frames, double dt_seconds);

    const std::vector<ThermalFrame>& frames() const { return frames_; }
    const ThermalFrame& frame(std::size_t i) const { return frames_.at(i); }
    std::size_t size() const { return frames_.size(); }
    double dt() const { return dt_; }
    int width() const { return frames_.front().width(); }
    int height() const { return frames_.front().height(); }

private:
    std::vector<ThermalFrame> frames_;
    double dt_;
};

/// Small square grid of filter weights with odd side length, immutable.
class Kernel {
public:
    /// Throws InvalidInput for even or non-positive size, weight count
    /// mismatch, or non-finite weights.
    Kernel(int size, std::vector<double> weights);

    int size() const { return size_; }
    int radius() const { return (size_ - 1) / 2; }

    /// Weight at offset (dx, dy) from the center anchor, each in [-radius, radius].
    double at_offset(int dx, int dy) const {
        const int r = radius();
        return weights_[static_cast<std::size_t>(dy + r) * size_ + (dx + r)];
    }

    const std::vector<double>& weights() const { return weights_; }

private:
    int size_;
    std::vector<double> weights_;
};

/// Per-pixel boolean grid (defect masks, threshold output).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // 0 or 1, row-major

    bool at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x] != 0;
    }
    std::size_t count() const;
};

struct FrameStats {
    double min;
    double max;
    double mean;
    double std; // population convention (divide by N)
};

/// "Same"-size kernel-weighted neighborhood sum. The summation order over
/// the kernel window is fixed row-major, so results are reproducible
/// regardless of how callers parallelize over output pixels.
///
/// Requires odd kernel size and kernel size <= 2*min(width, height) - 1.
ThermalFrame convolve(const ThermalFrame& frame, const Kernel& kernel,
                      BorderPolicy border);

FrameStats frame_stats(const ThermalFrame& frame);

/// Elementwise a - b; dimensions must match.
ThermalFrame subtract(const ThermalFrame& a, const ThermalFrame& b);

} // namespace thermo

#endif
