#ifndef THERMOBLOB_IO_HPP
#define THERMOBLOB_IO_HPP

#include <string>
#include <vector>

#include "thermoblob/frame.hpp"
#include "thermoblob/heatsim.hpp"

namespace thermo::io {

/// Shortest round-trip decimal form of a double (17 significant digits),
/// C locale, no thousands separators.
std::string format_double(double v);

/// Atomic replace: content goes to a sibling temp file first, then rename.
/// Nothing partial is left behind on failure.
void write_text_file(const std::string& path, const std::string& content);
void write_bytes_file(const std::string& path, const std::vector<unsigned char>& bytes);

// --- THERMOSEQ/1 binary sequence format -----------------------------------
//
// Text header, one "key value" pair per line in fixed order
//   THERMOSEQ/1
//   width W / height H / frame_count N / dt_seconds D / pixel_pitch P / units U
// then a blank line, then W*H*N IEEE-754 binary64 little-endian values,
// frame-major then row-major. Exactly that many bytes must follow.

struct SequenceHeader {
    int width = 0;
    int height = 0;
    int frame_count = 0;
    double dt_seconds = 1.0;
    double pixel_pitch = 0.0;
    std::string units = "C";
};

void write_sequence(const std::string& path, const ThermalSequence& seq,
                    const std::string& units = "C");
ThermalSequence read_sequence(const std::string& path,
                              SequenceHeader* header = nullptr);

/// True when the file starts with the THERMOSEQ/1 magic.
bool is_sequence_file(const std::string& path);

// --- CSV -------------------------------------------------------------------
// Comma separated, '.' decimal point, values at 17 significant digits, an
// optional single header row is auto-detected on read.

ThermalFrame read_frame_csv(const std::string& path);
void write_frame_csv(const std::string& path, const ThermalFrame& frame);

void write_kernel_csv(const std::string& path, const Kernel& kernel);

/// Integer label grid (0 = background, 1-based inclusion ids).
void write_label_csv(const std::string& path, int width, int height,
                     const std::vector<int>& labels);
std::vector<int> read_label_csv(const std::string& path, int& width, int& height);

/// Two-column (time_s, value) table -> piecewise-constant schedule.
Schedule read_schedule_csv(const std::string& path);

// --- Convenience loaders ----------------------------------------------------

/// Sequence file or single-frame CSV, detected by content. CSV frames get
/// dt 1 s and unknown pixel pitch.
ThermalSequence load_sequence(const std::string& path);

/// One frame out of either format.
ThermalFrame load_frame(const std::string& path, int frame_index = 0);

// --- 8-bit grayscale export -------------------------------------------------

/// Binary PGM, min-max scaled per image; the applied scale goes to a
/// "<path>.scale.txt" sidecar. A constant frame exports as all zeros.
void write_pgm(const std::string& path, const ThermalFrame& frame);

// --- Simulation spec (JSON) -------------------------------------------------

struct SimulationSetup {
    SlabSpec slab;
    BoundarySchedule boundary;
    SimConfig config;
};

/// Human-editable JSON describing slab, boundary and run parameters.
/// Referenced schedule CSV paths resolve relative to the spec file.
SimulationSetup read_simulation_spec(const std::string& path);

} // namespace thermo::io

#endif
