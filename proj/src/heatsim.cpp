#include "thermoblob/heatsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace thermo {

namespace {

void check_material(const Material& m, const char* what) {
    if (!(m.conductivity > 0.0) || !(m.density > 0.0) || !(m.specific_heat > 0.0))
        throw InvalidInput(std::string(what) + ": material properties must be > 0");
}

bool rects_overlap(const Inclusion& a, const Inclusion& b) {
    return a.x0 < b.x0 + b.width && b.x0 < a.x0 + a.width &&
           a.y0 < b.y0 + b.height && b.y0 < a.y0 + a.height;
}

} // namespace

Schedule Schedule::constant(double value) {
    return Schedule({{0.0, value}});
}

Schedule::Schedule(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
    if (points_.empty())
        throw InvalidInput("schedule needs at least one point");
    if (points_.front().first > 0.0)
        throw InvalidInput("schedule must start at time <= 0 to cover the run");
    min_ = max_ = points_.front().second;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second))
            throw InvalidInput("schedule points must be finite");
        if (i > 0 && points_[i].first <= points_[i - 1].first)
            throw InvalidInput("schedule times must be strictly increasing");
        min_ = std::min(min_, points_[i].second);
        max_ = std::max(max_, points_[i].second);
    }
}

double Schedule::value(double t) const {
    // last point with time <= t
    double v = points_.front().second;
    for (const auto& [time, val] : points_) {
        if (time <= t)
            v = val;
        else
            break;
    }
    return v;
}

VoxelGrid build_grid(const SlabSpec& spec) {
    if (!(spec.grid_spacing > 0.0))
        throw InvalidInput("grid spacing must be > 0");
    if (!(spec.size_x > 0.0) || !(spec.size_y > 0.0) || !(spec.size_z > 0.0))
        throw InvalidInput("slab dimensions must be > 0");
    check_material(spec.base, "slab base");

    const double d = spec.grid_spacing;
    VoxelGrid g;
    g.spacing = d;
    g.nx = static_cast<int>(std::llround(spec.size_x / d));
    g.ny = static_cast<int>(std::llround(spec.size_y / d));
    g.nz = static_cast<int>(std::llround(spec.size_z / d));
    if (g.nx < 1 || g.ny < 1 || g.nz < 1)
        throw InvalidInput("grid spacing too coarse for the slab dimensions");

    for (std::size_t a = 0; a < spec.inclusions.size(); ++a) {
        const Inclusion& inc = spec.inclusions[a];
        check_material(inc.material, "inclusion");
        if (!(inc.width > 0.0) || !(inc.height > 0.0) || !(inc.thickness > 0.0))
            throw InvalidInput("inclusion extents must be > 0");
        if (!(inc.x0 > 0.0) || !(inc.y0 > 0.0) ||
            !(inc.x0 + inc.width < spec.size_x) ||
            !(inc.y0 + inc.height < spec.size_y) || !(inc.depth > 0.0) ||
            !(inc.depth + inc.thickness < spec.size_z))
            throw InvalidInput("inclusion " + std::to_string(a) +
                               " must lie strictly inside the slab");
        for (std::size_t b = a + 1; b < spec.inclusions.size(); ++b) {
            if (rects_overlap(inc, spec.inclusions[b]))
                throw InvalidInput("inclusion footprints " + std::to_string(a) +
                                   " and " + std::to_string(b) + " overlap");
        }
    }

    g.conductivity.assign(g.cells(), spec.base.conductivity);
    g.rho_c.assign(g.cells(), spec.base.volumetric_heat_capacity());
    g.inclusion_id.assign(g.cells(), -1);
    g.inclusion_voxels.assign(spec.inclusions.size(), 0);
    g.inclusions = spec.inclusions;

    for (int k = 0; k < g.nz; ++k) {
        const double z = (k + 0.5) * d; // depth of the voxel center
        for (int j = 0; j < g.ny; ++j) {
            const double y = (j + 0.5) * d;
            for (int i = 0; i < g.nx; ++i) {
                const double x = (i + 0.5) * d;
                for (std::size_t a = 0; a < spec.inclusions.size(); ++a) {
                    const Inclusion& inc = spec.inclusions[a];
                    if (x >= inc.x0 && x < inc.x0 + inc.width && y >= inc.y0 &&
                        y < inc.y0 + inc.height && z >= inc.depth &&
                        z < inc.depth + inc.thickness) {
                        const std::size_t idx = g.index(i, j, k);
                        g.conductivity[idx] = inc.material.conductivity;
                        g.rho_c[idx] = inc.material.volumetric_heat_capacity();
                        g.inclusion_id[idx] = static_cast<int>(a);
                        ++g.inclusion_voxels[a];
                        break; // footprints do not overlap
                    }
                }
            }
        }
    }

    for (std::size_t a = 0; a < g.inclusion_voxels.size(); ++a) {
        if (g.inclusion_voxels[a] == 0)
            throw InvalidInput("inclusion " + std::to_string(a) +
                               " is not resolved by the grid (no voxel center "
                               "falls inside it); refine the spacing");
    }
    return g;
}

HeatSim::HeatSim(VoxelGrid grid, BoundarySchedule boundary)
    : grid_(std::move(grid)), boundary_(std::move(boundary)) {
    if (boundary_.film_coefficient < 0.0)
        throw InvalidInput("film coefficient must be >= 0");
    if (boundary_.top_flux.min_value() < 0.0)
        throw InvalidInput("top flux must be >= 0");

    const double d = grid_.spacing;
    const double area = d * d;
    const double volume = d * d * d;
    const std::size_t n = grid_.cells();
    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;

    // Face conductance between voxel centers: area * k_harmonic / distance.
    auto face = [&](std::size_t l, std::size_t r) {
        const double kl = grid_.conductivity[l];
        const double kr = grid_.conductivity[r];
        return area * (2.0 * kl * kr / (kl + kr)) / d;
    };

    cond_x_.assign(n, 0.0);
    cond_y_.assign(n, 0.0);
    cond_z_.assign(n, 0.0);
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = grid_.index(i, j, k);
                if (i + 1 < nx)
                    cond_x_[c] = face(c, grid_.index(i + 1, j, k));
                if (j + 1 < ny)
                    cond_y_[c] = face(c, grid_.index(i, j + 1, k));
                if (k + 1 < nz)
                    cond_z_[c] = face(c, grid_.index(i, j, k + 1));
            }
        }
    }

    inv_capacity_.resize(n);
    for (std::size_t c = 0; c < n; ++c)
        inv_capacity_[c] = 1.0 / (grid_.rho_c[c] * volume);

    // Top boundary: massless surface node in series between the ambient film
    // and the half-cell conduction path.
    const double h = boundary_.film_coefficient;
    top_conductance_.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    top_flux_factor_.assign(static_cast<std::size_t>(nx) * ny, 1.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double kc = grid_.conductivity[grid_.index(i, j, 0)];
            const double g_half = 2.0 * kc / d; // per area
            const std::size_t t = static_cast<std::size_t>(j) * nx + i;
            if (h > 0.0) {
                top_conductance_[t] = area / (1.0 / h + d / (2.0 * kc));
                top_flux_factor_[t] = g_half / (h + g_half);
            }
        }
    }

    double bound = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = grid_.index(i, j, k);
                double gsum = cond_x_[c] + cond_y_[c] + cond_z_[c];
                if (i > 0)
                    gsum += cond_x_[grid_.index(i - 1, j, k)];
                if (j > 0)
                    gsum += cond_y_[grid_.index(i, j - 1, k)];
                if (k > 0)
                    gsum += cond_z_[grid_.index(i, j, k - 1)];
                if (k == 0)
                    gsum += top_conductance_[static_cast<std::size_t>(j) * nx + i];
                if (gsum > 0.0)
                    bound = std::min(bound, 1.0 / (gsum * inv_capacity_[c]));
            }
        }
    }
    stable_dt_ = 0.9 * bound;
}

SimState HeatSim::initial_state(double t0) {
    if (!std::isfinite(t0))
        throw InvalidInput("initial temperature must be finite");
    guard_low_ = std::min(t0, boundary_.ambient.min_value()) - 50.0;
    guard_high_ = std::max(t0, boundary_.ambient.max_value()) + 500.0;
    guard_armed_ = true;
    return SimState{std::vector<double>(grid_.cells(), t0), 0.0};
}

StepEnergy HeatSim::step(SimState& state, double dt) {
    if (state.temperature.size() != grid_.cells())
        throw InvalidInput("state size does not match the grid");
    if (!(dt > 0.0) || dt > stable_dt_ * (1.0 + 1e-12))
        throw NumericError("dt " + std::to_string(dt) +
                           " violates the stability bound " +
                           std::to_string(stable_dt_));

    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    const double d = grid_.spacing;
    const double area = d * d;
    const double ambient = boundary_.ambient.value(state.time);
    const double flux = boundary_.top_flux.value(state.time);

    const std::vector<double>& t_old = state.temperature;
    std::vector<double> t_new(t_old.size());

    double delta_energy = 0.0;
    double boundary_inflow = 0.0;
    double energy_abs = 0.0;
    double t_min = t_old[0], t_max = t_old[0];

    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = grid_.index(i, j, k);
                const double tc = t_old[c];

                // Face pairs are grouped per axis so mirror-image cells sum
                // bitwise-identically.
                double net = 0.0;
                {
                    double gx = 0.0;
                    if (i + 1 < nx)
                        gx += cond_x_[c] * (t_old[c + 1] - tc);
                    if (i > 0)
                        gx += cond_x_[c - 1] * (t_old[c - 1] - tc);
                    double gy = 0.0;
                    if (j + 1 < ny)
                        gy += cond_y_[c] * (t_old[c + nx] - tc);
                    if (j > 0)
                        gy += cond_y_[c - nx] * (t_old[c - nx] - tc);
                    double gz = 0.0;
                    const std::size_t layer = static_cast<std::size_t>(nx) * ny;
                    if (k + 1 < nz)
                        gz += cond_z_[c] * (t_old[c + layer] - tc);
                    if (k > 0)
                        gz += cond_z_[c - layer] * (t_old[c - layer] - tc);
                    net = gx + gy + gz;
                }
                if (k == 0) {
                    const std::size_t t = static_cast<std::size_t>(j) * nx + i;
                    const double q_top = top_flux_factor_[t] * flux * area +
                                         top_conductance_[t] * (ambient - tc);
                    net += q_top;
                    boundary_inflow += q_top * dt;
                }

                const double updated = tc + dt * net * inv_capacity_[c];
                t_new[c] = updated;

                const double cap = grid_.rho_c[c] * d * d * d;
                delta_energy += cap * (updated - tc);
                energy_abs += cap * std::abs(tc);
                t_min = std::min(t_min, updated);
                t_max = std::max(t_max, updated);
            }
        }
    }

    if (guard_armed_ && (t_min < guard_low_ || t_max > guard_high_))
        throw NumericError(
            "simulation diverged: temperatures reached [" + std::to_string(t_min) +
            ", " + std::to_string(t_max) + "] C outside the guard band [" +
            std::to_string(guard_low_) + ", " + std::to_string(guard_high_) + "]");

    const double tolerance =
        1e-6 * std::max(std::abs(boundary_inflow), 1e-9 * energy_abs);
    if (std::abs(delta_energy - boundary_inflow) > std::max(tolerance, 1e-300))
        throw NumericError("energy balance violated: dE=" +
                           std::to_string(delta_energy) + " J vs boundary inflow " +
                           std::to_string(boundary_inflow) + " J");

    state.temperature = std::move(t_new);
    state.time += dt;
    return StepEnergy{delta_energy, boundary_inflow};
}

ThermalFrame HeatSim::surface_frame(const SimState& state) const {
    const int nx = grid_.nx, ny = grid_.ny;
    const double d = grid_.spacing;
    const double h = boundary_.film_coefficient;
    const double ambient = boundary_.ambient.value(state.time);
    const double flux = boundary_.top_flux.value(state.time);

    std::vector<double> out(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double kc = grid_.conductivity[grid_.index(i, j, 0)];
            const double g_half = 2.0 * kc / d;
            const double tc = state.temperature[grid_.index(i, j, 0)];
            out[static_cast<std::size_t>(j) * nx + i] =
                (flux + h * ambient + g_half * tc) / (h + g_half);
        }
    }
    return ThermalFrame(nx, ny, std::move(out), d);
}

std::vector<BinaryMask> HeatSim::defect_masks() const {
    const int nx = grid_.nx, ny = grid_.ny;
    const double d = grid_.spacing;
    std::vector<BinaryMask> masks;
    for (const Inclusion& inc : grid_.inclusions) {
        BinaryMask m;
        m.width = nx;
        m.height = ny;
        m.data.assign(static_cast<std::size_t>(nx) * ny, 0);
        for (int j = 0; j < ny; ++j) {
            const double y = (j + 0.5) * d;
            for (int i = 0; i < nx; ++i) {
                const double x = (i + 0.5) * d;
                if (x >= inc.x0 && x < inc.x0 + inc.width && y >= inc.y0 &&
                    y < inc.y0 + inc.height)
                    m.data[static_cast<std::size_t>(j) * nx + i] = 1;
            }
        }
        masks.push_back(std::move(m));
    }
    return masks;
}

SimResult HeatSim::run(const SimConfig& config) {
    if (!(config.duration > 0.0))
        throw InvalidInput("simulation duration must be > 0");
    if (config.output_stride < 1)
        throw InvalidInput("output stride must be >= 1");

    double dt = config.dt;
    if (dt == 0.0)
        dt = stable_dt_;
    else if (!(dt > 0.0) || dt > stable_dt_ * (1.0 + 1e-12))
        throw NumericError("configured dt " + std::to_string(dt) +
                           " exceeds the stability bound " +
                           std::to_string(stable_dt_));

    const long steps = static_cast<long>(std::ceil(config.duration / dt - 1e-9));

    SimState state = initial_state(config.initial_temperature);
    std::vector<ThermalFrame> frames;
    frames.push_back(surface_frame(state));

    double max_residual = 0.0;
    for (long s = 1; s <= steps; ++s) {
        const StepEnergy e = step(state, dt);
        const double scale =
            std::max(std::abs(e.boundary_inflow), 1e-300);
        max_residual = std::max(
            max_residual, std::abs(e.delta_energy - e.boundary_inflow) / scale);
        if (s % config.output_stride == 0)
            frames.push_back(surface_frame(state));
    }

    return SimResult{ThermalSequence(std::move(frames), dt * config.output_stride),
                     defect_masks(), dt, steps, max_residual};
}

} // namespace thermo
