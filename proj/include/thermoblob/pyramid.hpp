#ifndef THERMOBLOB_PYRAMID_HPP
#define THERMOBLOB_PYRAMID_HPP

#include <utility>
#include <vector>

#include "thermoblob/frame.hpp"

namespace thermo {

/// A frame at a pyramid level; level 0 is the raw input, level i has
/// dimensions ceil(level-(i-1) dims / 2).
struct PyramidLevelFrame {
    int level = 0;
    ThermalFrame frame;
    double scale_factor = 1.0; // 2^level
};

/// Levels 0..max_level of the Gaussian pyramid; level 0 is the input.
std::vector<PyramidLevelFrame> build_pyramid(const ThermalFrame& frame,
                                             int max_level);

/// Smooth with the separable binomial 5-tap [1,4,6,4,1]/16 (replicate
/// border), then keep every second sample starting at index 0.
/// Output dims are ceil(in/2) per axis. Requires both dims >= 2.
ThermalFrame reduce(const ThermalFrame& frame);

/// Interpolating upsample: zero-interleave, then apply the same 5-tap kernel
/// with gain 2 per axis so constants are preserved. The border is handled by
/// replicating in the source domain. target per axis must be one of
/// {2*dim - 1, 2*dim}; the caller supplies the value consistent with the
/// reduce chain it is undoing.
ThermalFrame expand(const ThermalFrame& frame, int target_width, int target_height);

/// The dims produced by reducing (width, height) i times (iterated
/// ceil-halving). Entry 0 is the input dims; entry i the level-i dims.
std::vector<std::pair<int, int>> reduce_dims_chain(int width, int height, int levels);

/// i successive reduces. i = 0 is the identity.
ThermalFrame reduce_n(const ThermalFrame& frame, int i);

/// i successive expands that exactly retrace the dimension chain of
/// reduce_n from a level-0 frame of (level0_width, level0_height).
ThermalFrame expand_n(const ThermalFrame& frame, int i, int level0_width,
                      int level0_height);

} // namespace thermo

#endif
