#include "thermoblob/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace thermo::io {

namespace {

constexpr const char* kMagic = "THERMOSEQ/1";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw DataError(path + ": " + what);
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void atomic_write(const std::string& path, const char* data, std::size_t size) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            fail(path, "cannot open for writing");
        }
        out.write(data, static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            fail(path, "write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        fail(path, "rename failed: " + ec.message());
    }
}

bool parse_double(const std::string& token, double& out) {
    if (token.empty())
        return false;
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + token.size();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r')
        s.pop_back();
    return s;
}

// Rectangular numeric grid with optional single auto-detected header row.
std::vector<std::vector<double>> read_csv_grid(const std::string& path) {
    const std::string content = read_all(path);
    std::vector<std::vector<double>> rows;
    std::istringstream in(content);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty())
            continue;
        const std::vector<std::string> tokens = split(line, ',');
        std::vector<double> row;
        row.reserve(tokens.size());
        bool numeric = true;
        for (const std::string& t : tokens) {
            double v;
            if (!parse_double(t, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue; // header row
            }
            fail(path, "non-numeric value in row " + std::to_string(rows.size() + 1));
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            fail(path, "ragged rows: expected " + std::to_string(rows.front().size()) +
                           " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        fail(path, "no numeric rows");
    return rows;
}

void append_le_doubles(std::string& out, const std::vector<double>& values) {
    for (double v : values) {
        const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b)
            out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
    }
}

double read_le_double(const char* p) {
    std::uint64_t u = 0;
    for (int b = 7; b >= 0; --b)
        u = (u << 8) | static_cast<unsigned char>(p[b]);
    return std::bit_cast<double>(u);
}

Material material_from_json(const nlohmann::json& j, const Material& fallback,
                            const std::string& path) {
    if (j.is_null())
        return fallback;
    if (!j.is_object())
        fail(path, "material must be an object");
    Material m = fallback;
    if (j.contains("conductivity"))
        m.conductivity = j.at("conductivity").get<double>();
    if (j.contains("density"))
        m.density = j.at("density").get<double>();
    if (j.contains("specific_heat"))
        m.specific_heat = j.at("specific_heat").get<double>();
    return m;
}

Schedule schedule_from_json(const nlohmann::json& parent, const std::string& scalar_key,
                            const std::string& base_dir, const std::string& path) {
    const std::string csv_key = scalar_key + "_csv";
    const std::string table_key = scalar_key + "_table";
    int given = 0;
    given += parent.contains(scalar_key) ? 1 : 0;
    given += parent.contains(csv_key) ? 1 : 0;
    given += parent.contains(table_key) ? 1 : 0;
    if (given != 1)
        fail(path, "exactly one of '" + scalar_key + "', '" + csv_key + "', '" +
                       table_key + "' is required");
    if (parent.contains(scalar_key))
        return Schedule::constant(parent.at(scalar_key).get<double>());
    if (parent.contains(table_key)) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : parent.at(table_key)) {
            if (!row.is_array() || row.size() != 2)
                fail(path, "'" + table_key + "' rows must be [time_s, value]");
            pts.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        }
        return Schedule(std::move(pts));
    }
    const fs::path csv = fs::path(base_dir) / parent.at(csv_key).get<std::string>();
    return read_schedule_csv(csv.string());
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    atomic_write(path, content.data(), content.size());
}

void write_bytes_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    atomic_write(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void write_sequence(const std::string& path, const ThermalSequence& seq,
                    const std::string& units) {
    std::string out;
    out += kMagic;
    out += '\n';
    out += "width " + std::to_string(seq.width()) + "\n";
    out += "height " + std::to_string(seq.height()) + "\n";
    out += "frame_count " + std::to_string(seq.size()) + "\n";
    out += "dt_seconds " + format_double(seq.dt()) + "\n";
    out += "pixel_pitch " + format_double(seq.frames().front().pixel_pitch()) + "\n";
    out += "units " + units + "\n";
    out += '\n';
    for (const ThermalFrame& f : seq.frames())
        append_le_doubles(out, f.data());
    atomic_write(path, out.data(), out.size());
}

ThermalSequence read_sequence(const std::string& path, SequenceHeader* header) {
    const std::string content = read_all(path);

    std::size_t pos = 0;
    auto next_line = [&](const char* what) -> std::string {
        const std::size_t nl = content.find('\n', pos);
        if (nl == std::string::npos)
            fail(path, std::string("truncated header: missing ") + what);
        std::string line = content.substr(pos, nl - pos);
        pos = nl + 1;
        return strip_cr(std::move(line));
    };

    if (next_line("magic") != kMagic)
        fail(path, "bad magic; expected THERMOSEQ/1");

    SequenceHeader h;
    auto field = [&](const char* key) -> std::string {
        const std::string line = next_line(key);
        const std::string prefix = std::string(key) + " ";
        if (line.rfind(prefix, 0) != 0)
            fail(path, std::string("expected header field '") + key + "'");
        return line.substr(prefix.size());
    };
    try {
        h.width = std::stoi(field("width"));
        h.height = std::stoi(field("height"));
        h.frame_count = std::stoi(field("frame_count"));
    } catch (const std::exception&) {
        fail(path, "non-integer header dimension");
    }
    double tmp;
    if (!parse_double(field("dt_seconds"), tmp))
        fail(path, "bad dt_seconds");
    h.dt_seconds = tmp;
    if (!parse_double(field("pixel_pitch"), tmp))
        fail(path, "bad pixel_pitch");
    h.pixel_pitch = tmp;
    h.units = field("units");
    if (!next_line("separator").empty())
        fail(path, "expected blank line before payload");

    if (h.width < 1 || h.height < 1 || h.frame_count < 1)
        fail(path, "header dimensions must be >= 1");
    if (!(h.dt_seconds > 0.0))
        fail(path, "dt_seconds must be > 0");

    const std::size_t per_frame =
        static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
    const std::size_t expected = per_frame * h.frame_count * 8;
    if (content.size() - pos != expected)
        fail(path, "payload is " + std::to_string(content.size() - pos) +
                       " bytes; header implies exactly " + std::to_string(expected));

    std::vector<ThermalFrame> frames;
    frames.reserve(h.frame_count);
    for (int f = 0; f < h.frame_count; ++f) {
        std::vector<double> data(per_frame);
        for (std::size_t i = 0; i < per_frame; ++i) {
            data[i] = read_le_double(&content[pos]);
            pos += 8;
        }
        try {
            frames.emplace_back(h.width, h.height, std::move(data), h.pixel_pitch);
        } catch (const InvalidInput& e) {
            fail(path, std::string("frame ") + std::to_string(f) + ": " + e.what());
        }
    }
    if (header)
        *header = h;
    return ThermalSequence(std::move(frames), h.dt_seconds);
}

bool is_sequence_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    char buf[16] = {};
    in.read(buf, 11);
    return in.gcount() == 11 && std::memcmp(buf, kMagic, 11) == 0;
}

ThermalFrame read_frame_csv(const std::string& path) {
    const auto rows = read_csv_grid(path);
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.front().size());
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(w) * h);
    for (const auto& row : rows)
        data.insert(data.end(), row.begin(), row.end());
    try {
        return ThermalFrame(w, h, std::move(data));
    } catch (const InvalidInput& e) {
        fail(path, e.what());
    }
}

void write_frame_csv(const std::string& path, const ThermalFrame& frame) {
    std::string out;
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            if (x)
                out += ',';
            out += format_double(frame.at(x, y));
        }
        out += '\n';
    }
    atomic_write(path, out.data(), out.size());
}

void write_kernel_csv(const std::string& path, const Kernel& kernel) {
    std::string out;
    const int n = kernel.size();
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            if (col)
                out += ',';
            out += format_double(kernel.weights()[static_cast<std::size_t>(row) * n + col]);
        }
        out += '\n';
    }
    atomic_write(path, out.data(), out.size());
}

void write_label_csv(const std::string& path, int width, int height,
                     const std::vector<int>& labels) {
    if (labels.size() != static_cast<std::size_t>(width) * height)
        throw InvalidInput("label grid size mismatch");
    std::string out;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (x)
                out += ',';
            out += std::to_string(labels[static_cast<std::size_t>(y) * width + x]);
        }
        out += '\n';
    }
    atomic_write(path, out.data(), out.size());
}

std::vector<int> read_label_csv(const std::string& path, int& width, int& height) {
    const auto rows = read_csv_grid(path);
    height = static_cast<int>(rows.size());
    width = static_cast<int>(rows.front().size());
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(width) * height);
    for (const auto& row : rows)
        for (double v : row)
            labels.push_back(static_cast<int>(v));
    return labels;
}

Schedule read_schedule_csv(const std::string& path) {
    const auto rows = read_csv_grid(path);
    if (rows.front().size() != 2)
        fail(path, "schedule CSV needs exactly two columns (time_s, value)");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(rows.size());
    for (const auto& row : rows)
        pts.emplace_back(row[0], row[1]);
    try {
        return Schedule(std::move(pts));
    } catch (const InvalidInput& e) {
        fail(path, e.what());
    }
}

ThermalSequence load_sequence(const std::string& path) {
    if (is_sequence_file(path))
        return read_sequence(path);
    std::vector<ThermalFrame> one{read_frame_csv(path)};
    return ThermalSequence(std::move(one), 1.0);
}

ThermalFrame load_frame(const std::string& path, int frame_index) {
    const ThermalSequence seq = load_sequence(path);
    if (frame_index < 0 || static_cast<std::size_t>(frame_index) >= seq.size())
        fail(path, "frame index " + std::to_string(frame_index) + " out of range [0, " +
                       std::to_string(seq.size() - 1) + "]");
    return seq.frame(static_cast<std::size_t>(frame_index));
}

void write_pgm(const std::string& path, const ThermalFrame& frame) {
    const FrameStats stats = frame_stats(frame);
    const double range = stats.max - stats.min;

    std::string out = "P5\n" + std::to_string(frame.width()) + " " +
                      std::to_string(frame.height()) + "\n255\n";
    for (double v : frame.data()) {
        const int g = range > 0.0
                          ? static_cast<int>(std::llround((v - stats.min) / range * 255.0))
                          : 0;
        out.push_back(static_cast<char>(g));
    }
    atomic_write(path, out.data(), out.size());

    const std::string sidecar = "min " + format_double(stats.min) + "\nmax " +
                                format_double(stats.max) + "\n";
    write_text_file(path + ".scale.txt", sidecar);
}

SimulationSetup read_simulation_spec(const std::string& path) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(read_all(path));
    } catch (const nlohmann::json::exception& e) {
        fail(path, std::string("JSON parse error: ") + e.what());
    }
    const std::string base_dir = fs::path(path).parent_path().string();

    SimulationSetup setup;
    try {
        const nlohmann::json& slab = root.at("slab");
        const auto size = slab.at("size_m");
        if (!size.is_array() || size.size() != 3)
            fail(path, "slab.size_m must be [x, y, z]");
        setup.slab.size_x = size.at(0).get<double>();
        setup.slab.size_y = size.at(1).get<double>();
        setup.slab.size_z = size.at(2).get<double>();
        setup.slab.grid_spacing = slab.at("grid_spacing_m").get<double>();
        setup.slab.base = material_from_json(slab.value("material", nlohmann::json()),
                                             kConcrete, path);
        if (slab.contains("inclusions")) {
            for (const auto& ij : slab.at("inclusions")) {
                Inclusion inc;
                const auto rect = ij.at("rect_m");
                if (!rect.is_array() || rect.size() != 4)
                    fail(path, "inclusion rect_m must be [x0, y0, width, height]");
                inc.x0 = rect.at(0).get<double>();
                inc.y0 = rect.at(1).get<double>();
                inc.width = rect.at(2).get<double>();
                inc.height = rect.at(3).get<double>();
                inc.depth = ij.at("depth_m").get<double>();
                inc.thickness = ij.at("thickness_m").get<double>();
                inc.material =
                    material_from_json(ij.value("material", nlohmann::json()), kFoam, path);
                setup.slab.inclusions.push_back(inc);
            }
        }

        const nlohmann::json& boundary = root.at("boundary");
        setup.boundary.ambient = schedule_from_json(boundary, "ambient_c", base_dir, path);
        setup.boundary.film_coefficient = boundary.at("film_w_m2k").get<double>();
        setup.boundary.top_flux = schedule_from_json(boundary, "flux_w_m2", base_dir, path);

        const nlohmann::json& sim = root.at("sim");
        setup.config.dt = sim.value("dt_s", 0.0);
        setup.config.duration = sim.at("duration_s").get<double>();
        setup.config.output_stride = sim.value("output_stride", 1);
        setup.config.initial_temperature = sim.at("initial_c").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(path, std::string("spec error: ") + e.what());
    }
    return setup;
}

} // namespace thermo::io
