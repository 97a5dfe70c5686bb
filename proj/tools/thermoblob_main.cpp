// thermoblob: multi-scale LoG filtering for thermograms, comparison
// baselines, and a transient conduction simulator for synthetic sequences.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermoblob/baselines.hpp"
#include "thermoblob/detect.hpp"
#include "thermoblob/heatsim.hpp"
#include "thermoblob/io.hpp"
#include "thermoblob/log_kernel.hpp"
#include "thermoblob/pyramid.hpp"

namespace {

using namespace thermo;

struct DetectFlags {
    double sigma = 2.0;
    double sigma_y = -1.0; // -1: same as sigma
    double theta = 0.0;
    double alpha = 1.0;
    double truncation = 4.0;
    std::vector<int> levels{1, 2, 3, 4};
    bool rectify = true;
    std::string border = "replicate";

    DetectConfig config() const {
        DetectConfig c;
        c.log_params.sigma_x = sigma;
        c.log_params.sigma_y = sigma_y > 0.0 ? sigma_y : sigma;
        c.log_params.theta = theta;
        c.log_params.alpha = alpha;
        c.log_params.truncation_radius = truncation;
        c.levels = levels;
        c.rectify = rectify;
        if (border == "replicate")
            c.border = BorderPolicy::Replicate;
        else if (border == "reflect")
            c.border = BorderPolicy::Reflect;
        else if (border == "zero")
            c.border = BorderPolicy::ZeroPad;
        else
            throw InvalidInput("unknown border policy '" + border +
                               "' (use replicate, reflect or zero)");
        return c;
    }
};

void add_detect_flags(CLI::App* cmd, DetectFlags& flags) {
    cmd->add_option("--sigma", flags.sigma, "detector sigma in pixels (x axis)")
        ->capture_default_str();
    cmd->add_option("--sigma-y", flags.sigma_y,
                    "detector sigma for the y axis (defaults to --sigma)");
    cmd->add_option("--theta", flags.theta, "detector orientation, radians")
        ->capture_default_str();
    cmd->add_option("--alpha", flags.alpha, "eccentricity-control exponent")
        ->capture_default_str();
    cmd->add_option("--truncation", flags.truncation,
                    "kernel half-extent in multiples of max(sigma)")
        ->capture_default_str();
    cmd->add_option("--levels", flags.levels, "pyramid levels to sum, e.g. 1,2,3,4")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_flag("--rectify,!--no-rectify", flags.rectify,
                  "keep only positive responses");
    cmd->add_option("--border", flags.border, "replicate | reflect | zero")
        ->capture_default_str();
}

// Frame sequence or CSV, with the frame index applied.
ThermalFrame load_input_frame(const std::string& input, int frame_index) {
    return io::load_frame(input, frame_index);
}

int run_detect(const std::string& input, int frame_index, const DetectFlags& flags,
               const std::string& out, const std::string& gray) {
    const ThermalSequence seq = io::load_sequence(input);
    if (frame_index < 0 || static_cast<std::size_t>(frame_index) >= seq.size())
        throw InvalidInput("frame index " + std::to_string(frame_index) +
                           " out of range for " + input);
    const DetectionMap map =
        detect_multiscale(seq.frame(static_cast<std::size_t>(frame_index)),
                          flags.config());

    io::write_sequence(out, ThermalSequence({map.responses}, seq.dt()), "response");
    if (!gray.empty())
        io::write_pgm(gray, map.responses);
    return 0;
}

int run_threshold(const std::string& input, int frame_index, double cutoff,
                  const std::string& out) {
    const ThermalFrame frame = load_input_frame(input, frame_index);
    const BinaryMask mask = hard_threshold(frame, cutoff);
    std::vector<int> labels(mask.data.begin(), mask.data.end());
    io::write_label_csv(out, mask.width, mask.height, labels);
    return 0;
}

int run_contrast(const std::string& input, int frame_index, double sound,
                 double delta, const std::string& out) {
    const ThermalFrame frame = load_input_frame(input, frame_index);
    io::write_frame_csv(out, contrast_reconstruct(frame, sound, delta));
    return 0;
}

int run_kmeans(const std::string& input, int frame_index, int k,
               std::uint64_t seed, const std::string& out) {
    const ThermalFrame frame = load_input_frame(input, frame_index);
    const KMeansResult result = kmeans_cluster(frame, k, seed);
    io::write_label_csv(out, frame.width(), frame.height(), result.labels);

    std::string centroids = "label,centroid\n";
    for (std::size_t c = 0; c < result.centroids.size(); ++c)
        centroids += std::to_string(c) + "," + io::format_double(result.centroids[c]) +
                     "\n";
    io::write_text_file(out + ".centroids.csv", centroids);
    std::cout << "k-means: " << result.iterations << " iterations, inertia "
              << io::format_double(result.inertia) << "\n";
    return 0;
}

int run_ppt(const std::string& input, double frequency, const std::string& out) {
    const ThermalSequence seq = io::load_sequence(input);
    if (seq.size() < 4)
        throw InvalidInput("ppt needs a sequence input (>= 4 frames); got " +
                           std::to_string(seq.size()));
    const PhaseStack stack = ppt_transform(seq);
    const PhaseSelection sel = ppt_phase_at(stack, frequency);

    io::write_frame_csv(out, sel.phase);
    io::write_text_file(out + ".freq.txt",
                        "bin " + std::to_string(sel.bin) + "\nfrequency_hz " +
                            io::format_double(sel.bin_frequency) + "\n");
    std::cout << "ppt: selected bin " << sel.bin << " at "
              << io::format_double(sel.bin_frequency) << " Hz (target "
              << io::format_double(frequency) << " Hz)\n";
    return 0;
}

int run_pct(const std::string& input, int components, const std::string& out_stem) {
    const ThermalSequence seq = io::load_sequence(input);
    if (seq.size() < 2)
        throw InvalidInput("pct needs a sequence input (>= 2 frames)");
    const ComponentStack stack = pct_transform(seq, components);

    std::string svs;
    for (double sv : stack.singular_values)
        svs += io::format_double(sv) + "\n";
    io::write_text_file(out_stem + "_singular_values.csv", svs);

    for (std::size_t c = 0; c < stack.components.size(); ++c)
        io::write_frame_csv(out_stem + "_" + std::to_string(c + 1) + ".csv",
                            stack.components[c]);
    std::cout << "pct: wrote " << stack.components.size() << " component maps ("
              << stack.singular_values.size() << " singular values)\n";
    return 0;
}

int run_simulate(const std::string& spec_path, const std::string& out,
                 const std::string& masks_out) {
    const io::SimulationSetup setup = io::read_simulation_spec(spec_path);
    HeatSim sim(build_grid(setup.slab), setup.boundary);

    const VoxelGrid& grid = sim.grid();
    std::cout << "grid: " << grid.nx << " x " << grid.ny << " x " << grid.nz
              << " voxels (" << grid.cells() << " total)\n";
    for (std::size_t a = 0; a < grid.inclusion_voxels.size(); ++a)
        std::cout << "  inclusion " << a + 1 << ": " << grid.inclusion_voxels[a]
                  << " voxels\n";
    std::cout << "stability dt: " << io::format_double(sim.max_stable_dt())
              << " s\n";

    const SimResult result = sim.run(setup.config);
    io::write_sequence(out, result.surface, "C");

    std::vector<int> labels(result.surface.width() * result.surface.height(), 0);
    for (std::size_t m = 0; m < result.defect_masks.size(); ++m) {
        const BinaryMask& mask = result.defect_masks[m];
        for (std::size_t i = 0; i < mask.data.size(); ++i)
            if (mask.data[i])
                labels[i] = static_cast<int>(m) + 1;
    }
    const std::string masks_path = masks_out.empty() ? out + ".masks.csv" : masks_out;
    io::write_label_csv(masks_path, result.surface.width(), result.surface.height(),
                        labels);

    std::cout << "steps: " << result.steps << " at dt "
              << io::format_double(result.dt_used) << " s, frames "
              << result.surface.size() << "\n";
    std::cout << "energy balance: max per-step residual "
              << io::format_double(result.max_energy_residual)
              << " (relative to boundary inflow)\n";
    return 0;
}

int run_profile(const std::string& input, int frame_index,
                const std::string& processed_path, const DetectFlags& flags,
                int row, int col, const std::string& mask_path,
                const std::string& out) {
    const ThermalFrame frame = load_input_frame(input, frame_index);
    if ((row >= 0) == (col >= 0))
        throw InvalidInput("give exactly one of --row or --col");

    const ThermalFrame processed =
        processed_path.empty()
            ? detect_multiscale(frame, flags.config()).responses
            : io::load_frame(processed_path, 0);
    if (processed.width() != frame.width() || processed.height() != frame.height())
        throw InvalidInput("processed map dims do not match the input frame");

    const bool is_row = row >= 0;
    const int index = is_row ? row : col;
    const int limit = is_row ? frame.height() : frame.width();
    if (index >= limit)
        throw InvalidInput("profile index " + std::to_string(index) +
                           " out of range [0, " + std::to_string(limit - 1) + "]");
    const int samples = is_row ? frame.width() : frame.height();

    // defect-center markers: middle pixel of each labeled run along the line
    std::vector<int> markers(samples, 0);
    if (!mask_path.empty()) {
        int mw = 0, mh = 0;
        const std::vector<int> labels = io::read_label_csv(mask_path, mw, mh);
        if (mw != frame.width() || mh != frame.height())
            throw InvalidInput("mask dims do not match the input frame");
        for (int s = 0; s < samples; ++s)
            markers[s] = is_row ? labels[static_cast<std::size_t>(index) * mw + s]
                                : labels[static_cast<std::size_t>(s) * mw + index];
        std::vector<int> centers;
        int s = 0;
        while (s < samples) {
            if (markers[s] > 0) {
                const int label = markers[s];
                int e = s;
                while (e + 1 < samples && markers[e + 1] == label)
                    ++e;
                centers.push_back((s + e) / 2);
                s = e + 1;
            } else {
                ++s;
            }
        }
        std::fill(markers.begin(), markers.end(), 0);
        for (int c : centers)
            markers[c] = 1;
    }

    const double pitch = frame.pixel_pitch();
    std::string csv = pitch > 0.0 ? "position_px,position_m,raw,processed,marker\n"
                                  : "position_px,raw,processed,marker\n";
    for (int s = 0; s < samples; ++s) {
        const int x = is_row ? s : index;
        const int y = is_row ? index : s;
        csv += std::to_string(s);
        if (pitch > 0.0)
            csv += "," + io::format_double(s * pitch);
        csv += "," + io::format_double(frame.at(x, y));
        csv += "," + io::format_double(processed.at(x, y));
        csv += "," + std::to_string(markers[s]);
        csv += "\n";
    }
    io::write_text_file(out, csv);
    return 0;
}

int run_kernel_dump(const DetectFlags& flags, const std::string& out) {
    DetectConfig c = flags.config();
    io::write_kernel_csv(out, build_log_kernel(c.log_params));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-scale thermogram blob detection and baselines"};
    app.require_subcommand(1);

    // detect
    DetectFlags detect_flags;
    std::string detect_input, detect_out, detect_gray;
    int detect_frame = 0;
    CLI::App* detect_cmd =
        app.add_subcommand("detect", "multi-scale LoG detection map");
    detect_cmd->add_option("--input", detect_input, "frame or sequence file")
        ->required();
    detect_cmd->add_option("--frame-index", detect_frame, "frame to process")
        ->capture_default_str();
    add_detect_flags(detect_cmd, detect_flags);
    detect_cmd->add_option("--out", detect_out, "output map (THERMOSEQ)")->required();
    detect_cmd->add_option("--gray", detect_gray, "8-bit grayscale PGM export");

    // baseline group
    CLI::App* baseline_cmd = app.add_subcommand("baseline", "comparison methods");
    baseline_cmd->require_subcommand(1);

    std::string thr_input, thr_out;
    int thr_frame = 0;
    double thr_cutoff = 32.0;
    CLI::App* thr_cmd = baseline_cmd->add_subcommand("threshold", "hard threshold mask");
    thr_cmd->add_option("--input", thr_input)->required();
    thr_cmd->add_option("--frame-index", thr_frame)->capture_default_str();
    thr_cmd->add_option("--cutoff", thr_cutoff, "cutoff temperature, deg C")
        ->required();
    thr_cmd->add_option("--out", thr_out, "mask CSV (0/1)")->required();

    std::string con_input, con_out;
    int con_frame = 0;
    double con_sound = 0.0, con_delta = 0.0;
    CLI::App* con_cmd =
        baseline_cmd->add_subcommand("contrast", "0..1 contrast reconstruction");
    con_cmd->add_option("--input", con_input)->required();
    con_cmd->add_option("--frame-index", con_frame)->capture_default_str();
    con_cmd->add_option("--sound", con_sound, "sound-area temperature, deg C")
        ->required();
    con_cmd->add_option("--delta", con_delta, "expected defect-vs-sound delta, deg C")
        ->required();
    con_cmd->add_option("--out", con_out)->required();

    std::string km_input, km_out;
    int km_frame = 0, km_k = 2;
    std::uint64_t km_seed = 0;
    CLI::App* km_cmd = baseline_cmd->add_subcommand("kmeans", "temperature clustering");
    km_cmd->add_option("--input", km_input)->required();
    km_cmd->add_option("--frame-index", km_frame)->capture_default_str();
    km_cmd->add_option("--k", km_k, "number of clusters")->required();
    km_cmd->add_option("--seed", km_seed, "seeding RNG seed")->capture_default_str();
    km_cmd->add_option("--out", km_out, "label CSV")->required();

    std::string ppt_input, ppt_out;
    double ppt_freq = 0.24e-3;
    CLI::App* ppt_cmd = baseline_cmd->add_subcommand("ppt", "pulse phase image");
    ppt_cmd->add_option("--input", ppt_input, "sequence file")->required();
    ppt_cmd->add_option("--frequency", ppt_freq, "target frequency, Hz")
        ->capture_default_str();
    ppt_cmd->add_option("--out", ppt_out, "phase CSV")->required();

    std::string pct_input, pct_out;
    int pct_components = 3;
    CLI::App* pct_cmd =
        baseline_cmd->add_subcommand("pct", "principal component images");
    pct_cmd->add_option("--input", pct_input, "sequence file")->required();
    pct_cmd->add_option("--components", pct_components)->capture_default_str();
    pct_cmd->add_option("--out", pct_out, "output stem")->required();

    // simulate
    std::string sim_spec, sim_out, sim_masks;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "transient conduction, surface sequence");
    sim_cmd->add_option("--spec", sim_spec, "JSON spec file")->required();
    sim_cmd->add_option("--out", sim_out, "surface sequence (THERMOSEQ)")->required();
    sim_cmd->add_option("--masks-out", sim_masks,
                        "defect label CSV (default: <out>.masks.csv)");

    // profile
    DetectFlags profile_flags;
    std::string prof_input, prof_processed, prof_mask, prof_out;
    int prof_frame = 0, prof_row = -1, prof_col = -1;
    CLI::App* prof_cmd = app.add_subcommand("profile", "line profile CSV");
    prof_cmd->add_option("--input", prof_input)->required();
    prof_cmd->add_option("--frame-index", prof_frame)->capture_default_str();
    prof_cmd->add_option("--processed", prof_processed,
                         "detection map file (computed with the detect flags "
                         "when omitted)");
    add_detect_flags(prof_cmd, profile_flags);
    prof_cmd->add_option("--row", prof_row, "profile along this row");
    prof_cmd->add_option("--col", prof_col, "profile along this column");
    prof_cmd->add_option("--mask", prof_mask, "defect label CSV for center markers");
    prof_cmd->add_option("--out", prof_out)->required();

    // kernel dump
    DetectFlags kernel_flags;
    std::string kernel_out;
    CLI::App* kernel_cmd =
        app.add_subcommand("kernel", "dump the LoG kernel as CSV");
    add_detect_flags(kernel_cmd, kernel_flags);
    kernel_cmd->add_option("--out", kernel_out)->required();

    try {
        app.parse(argc, argv);

        if (detect_cmd->parsed())
            return run_detect(detect_input, detect_frame, detect_flags, detect_out,
                              detect_gray);
        if (thr_cmd->parsed())
            return run_threshold(thr_input, thr_frame, thr_cutoff, thr_out);
        if (con_cmd->parsed())
            return run_contrast(con_input, con_frame, con_sound, con_delta, con_out);
        if (km_cmd->parsed())
            return run_kmeans(km_input, km_frame, km_k, km_seed, km_out);
        if (ppt_cmd->parsed())
            return run_ppt(ppt_input, ppt_freq, ppt_out);
        if (pct_cmd->parsed())
            return run_pct(pct_input, pct_components, pct_out);
        if (sim_cmd->parsed())
            return run_simulate(sim_spec, sim_out, sim_masks);
        if (prof_cmd->parsed())
            return run_profile(prof_input, prof_frame, prof_processed, profile_flags,
                               prof_row, prof_col, prof_mask, prof_out);
        if (kernel_cmd->parsed())
            return run_kernel_dump(kernel_flags, kernel_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const thermo::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const thermo::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const thermo::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
