#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "oracles.hpp"
#include "thermoblob/io.hpp"

using namespace thermo;
namespace fs = std::filesystem;

namespace {

std::atomic<int> temp_dir_counter{0};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("thermoblob_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(temp_dir_counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("sequence file round-trips bit-exactly") {
    TempDir dir;
    oracles::Rng rng(1);
    std::vector<ThermalFrame> frames;
    for (int i = 0; i < 3; ++i)
        frames.push_back(oracles::random_frame(7, 5, rng));
    frames[0] = ThermalFrame(7, 5, frames[0].data(), 0.005);
    const ThermalSequence seq(
        {ThermalFrame(7, 5, frames[0].data(), 0.005),
         ThermalFrame(7, 5, frames[1].data(), 0.005),
         ThermalFrame(7, 5, frames[2].data(), 0.005)},
        2.5);

    const std::string path = dir.file("roundtrip.seq");
    io::write_sequence(path, seq, "C");
    CHECK(io::is_sequence_file(path));

    io::SequenceHeader header;
    const ThermalSequence back = io::read_sequence(path, &header);
    CHECK(header.width == 7);
    CHECK(header.height == 5);
    CHECK(header.frame_count == 3);
    CHECK(header.dt_seconds == 2.5);
    CHECK(header.pixel_pitch == 0.005);
    CHECK(header.units == "C");
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(back.frame(i).data() == seq.frame(i).data());

    // writing again produces identical bytes
    const std::string path2 = dir.file("roundtrip2.seq");
    io::write_sequence(path2, back, "C");
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("sequence reader rejects malformed files") {
    TempDir dir;
    const std::string bad_magic = dir.file("bad_magic.seq");
    io::write_text_file(bad_magic, "NOTASEQ/9\nwidth 2\n");
    CHECK_THROWS_AS(io::read_sequence(bad_magic), DataError);
    CHECK_FALSE(io::is_sequence_file(bad_magic));

    // correct header but truncated payload
    oracles::Rng rng(2);
    const ThermalSequence seq(
        std::vector<ThermalFrame>{oracles::random_frame(4, 4, rng)}, 1.0);
    const std::string path = dir.file("trunc.seq");
    io::write_sequence(path, seq);
    std::string content = slurp(path);
    content.resize(content.size() - 8);
    io::write_text_file(dir.file("trunc2.seq"), content);
    CHECK_THROWS_AS(io::read_sequence(dir.file("trunc2.seq")), DataError);

    CHECK_THROWS_AS(io::read_sequence(dir.file("missing.seq")), DataError);
}

TEST_CASE("frame CSV round-trip and header auto-detection") {
    TempDir dir;
    oracles::Rng rng(3);
    const ThermalFrame f = oracles::random_frame(6, 4, rng);

    const std::string path = dir.file("frame.csv");
    io::write_frame_csv(path, f);
    const ThermalFrame back = io::read_frame_csv(path);
    REQUIRE(back.width() == 6);
    REQUIRE(back.height() == 4);
    CHECK(back.data() == f.data()); // %.17g round-trips doubles exactly

    io::write_text_file(dir.file("header.csv"), "col_a,col_b,col_c\n1,2,3\n4,5,6\n");
    const ThermalFrame h = io::read_frame_csv(dir.file("header.csv"));
    CHECK(h.width() == 3);
    CHECK(h.height() == 2);
    CHECK(h.at(2, 1) == 6.0);

    io::write_text_file(dir.file("ragged.csv"), "1,2,3\n4,5\n");
    CHECK_THROWS_AS(io::read_frame_csv(dir.file("ragged.csv")), DataError);

    io::write_text_file(dir.file("text.csv"), "1,2\n3,oops\n");
    CHECK_THROWS_AS(io::read_frame_csv(dir.file("text.csv")), DataError);
}

TEST_CASE("label CSV round-trip") {
    TempDir dir;
    const std::vector<int> labels{0, 1, 1, 0, 2, 0};
    const std::string path = dir.file("labels.csv");
    io::write_label_csv(path, 3, 2, labels);
    int w = 0, h = 0;
    CHECK(io::read_label_csv(path, w, h) == labels);
    CHECK(w == 3);
    CHECK(h == 2);
}

TEST_CASE("kernel CSV dump") {
    TempDir dir;
    const Kernel k(3, {1.0, 2.0, 3.0, 4.0, 5.5, 6.0, 7.0, 8.0, 9.0});
    const std::string path = dir.file("kernel.csv");
    io::write_kernel_csv(path, k);
    const ThermalFrame grid = io::read_frame_csv(path);
    CHECK(grid.width() == 3);
    CHECK(grid.height() == 3);
    CHECK(grid.at(1, 1) == 5.5);
}

TEST_CASE("schedule CSV") {
    TempDir dir;
    io::write_text_file(dir.file("flux.csv"), "time_s,value\n0,600\n13200,0\n");
    const Schedule s = io::read_schedule_csv(dir.file("flux.csv"));
    CHECK(s.value(0.0) == 600.0);
    CHECK(s.value(13200.0) == 0.0);

    io::write_text_file(dir.file("late.csv"), "100,1\n200,2\n");
    CHECK_THROWS_AS(io::read_schedule_csv(dir.file("late.csv")), DataError);

    io::write_text_file(dir.file("cols.csv"), "0,1,2\n");
    CHECK_THROWS_AS(io::read_schedule_csv(dir.file("cols.csv")), DataError);
}

TEST_CASE("load_frame handles both formats and range-checks the index") {
    TempDir dir;
    oracles::Rng rng(4);
    const ThermalFrame f0 = oracles::random_frame(5, 5, rng);
    const ThermalFrame f1 = oracles::random_frame(5, 5, rng);
    io::write_sequence(dir.file("two.seq"), ThermalSequence({f0, f1}, 1.0));

    CHECK(io::load_frame(dir.file("two.seq"), 0).data() == f0.data());
    CHECK(io::load_frame(dir.file("two.seq"), 1).data() == f1.data());
    CHECK_THROWS_AS(io::load_frame(dir.file("two.seq"), 2), DataError);

    io::write_frame_csv(dir.file("one.csv"), f0);
    CHECK(io::load_frame(dir.file("one.csv"), 0).data() == f0.data());
}

TEST_CASE("pgm export: scale sidecar and constant-frame behavior") {
    TempDir dir;
    const ThermalFrame ramp(4, 1, {10.0, 20.0, 30.0, 40.0});
    const std::string path = dir.file("ramp.pgm");
    io::write_pgm(path, ramp);

    const std::string pgm = slurp(path);
    CHECK(pgm.substr(0, 3) == "P5\n");
    const std::string tail = pgm.substr(pgm.size() - 4);
    CHECK(static_cast<unsigned char>(tail[0]) == 0);
    CHECK(static_cast<unsigned char>(tail[1]) == 85);
    CHECK(static_cast<unsigned char>(tail[2]) == 170);
    CHECK(static_cast<unsigned char>(tail[3]) == 255);

    const std::string sidecar = slurp(path + ".scale.txt");
    CHECK(sidecar == "min 10\nmax 40\n");

    io::write_pgm(dir.file("flat.pgm"), ThermalFrame::constant(3, 3, 7.0));
    const std::string flat = slurp(dir.file("flat.pgm"));
    for (std::size_t i = flat.size() - 9; i < flat.size(); ++i)
        CHECK(flat[i] == 0);
}

TEST_CASE("simulation spec JSON") {
    TempDir dir;
    io::write_text_file(dir.file("flux.csv"), "0,600\n13200,0\n");
    io::write_text_file(dir.file("spec.json"), R"({
  "slab": {
    "size_m": [0.6, 0.6, 0.2],
    "grid_spacing_m": 0.005,
    "inclusions": [
      {"rect_m": [0.1, 0.1, 0.1, 0.1], "depth_m": 0.0381, "thickness_m": 0.006}
    ]
  },
  "boundary": {"film_w_m2k": 20.0, "ambient_c": 24.0, "flux_w_m2_csv": "flux.csv"},
  "sim": {"duration_s": 21540, "output_stride": 12, "initial_c": 24.0}
})");

    const io::SimulationSetup setup = io::read_simulation_spec(dir.file("spec.json"));
    CHECK(setup.slab.size_x == 0.6);
    CHECK(setup.slab.grid_spacing == 0.005);
    CHECK(setup.slab.base.conductivity == kConcrete.conductivity);
    REQUIRE(setup.slab.inclusions.size() == 1);
    CHECK(setup.slab.inclusions[0].depth == 0.0381);
    CHECK(setup.slab.inclusions[0].material.conductivity == kFoam.conductivity);
    CHECK(setup.boundary.film_coefficient == 20.0);
    CHECK(setup.boundary.top_flux.value(0.0) == 600.0);
    CHECK(setup.boundary.top_flux.value(20000.0) == 0.0);
    CHECK(setup.config.duration == 21540.0);
    CHECK(setup.config.dt == 0.0); // auto

    io::write_text_file(dir.file("broken.json"), "{ not json");
    CHECK_THROWS_AS(io::read_simulation_spec(dir.file("broken.json")), DataError);

    io::write_text_file(dir.file("nosim.json"), R"({"slab": {"size_m": [1,1,1],
      "grid_spacing_m": 0.1}, "boundary": {"film_w_m2k": 1, "ambient_c": 1,
      "flux_w_m2": 0}})");
    CHECK_THROWS_AS(io::read_simulation_spec(dir.file("nosim.json")), DataError);
}

TEST_CASE("inline schedule tables and mutual exclusion") {
    TempDir dir;
    io::write_text_file(dir.file("spec.json"), R"({
  "slab": {"size_m": [0.1, 0.1, 0.05], "grid_spacing_m": 0.01},
  "boundary": {"film_w_m2k": 20.0,
               "ambient_c_table": [[0, 20.0], [3600, 26.0]],
               "flux_w_m2": 600.0},
  "sim": {"duration_s": 7200, "initial_c": 20.0}
})");
    const io::SimulationSetup setup = io::read_simulation_spec(dir.file("spec.json"));
    CHECK(setup.boundary.ambient.value(0.0) == 20.0);
    CHECK(setup.boundary.ambient.value(3600.0) == 26.0);
    CHECK(setup.config.output_stride == 1); // default

    io::write_text_file(dir.file("both.json"), R"({
  "slab": {"size_m": [0.1, 0.1, 0.05], "grid_spacing_m": 0.01},
  "boundary": {"film_w_m2k": 20.0, "ambient_c": 24.0,
               "flux_w_m2": 600.0, "flux_w_m2_table": [[0, 1.0]]},
  "sim": {"duration_s": 7200, "initial_c": 20.0}
})");
    CHECK_THROWS_AS(io::read_simulation_spec(dir.file("both.json")), DataError);
}

TEST_CASE("atomic writes leave no temp debris") {
    TempDir dir;
    const std::string path = dir.file("out.csv");
    io::write_frame_csv(path, ThermalFrame::constant(2, 2, 1.0));
    CHECK(fs::exists(path));
    CHECK_FALSE(fs::exists(path + ".tmp"));

    // writing into a missing directory fails without partial output
    const std::string bad = (dir.path / "nodir" / "out.csv").string();
    CHECK_THROWS_AS(io::write_frame_csv(bad, ThermalFrame::constant(2, 2, 1.0)),
                    DataError);
    CHECK_FALSE(fs::exists(bad));
}

TEST_CASE("format_double round-trips and is plain") {
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(1.0) == "1");
    const double v = 0.1 + 0.2;
    CHECK(std::stod(io::format_double(v)) == v);
}
