#ifndef THERMOBLOB_HEATSIM_HPP
#define THERMOBLOB_HEATSIM_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "thermoblob/frame.hpp"

namespace thermo {

struct Material {
    double conductivity;   ///< W/(m K)
    double density;        ///< kg/m^3
    double specific_heat;  ///< J/(kg K)

    double volumetric_heat_capacity() const { return density * specific_heat; }
};

/// Typical structural concrete; overridable per spec file.
inline constexpr Material kConcrete{1.8, 2300.0, 880.0};
/// Expanded polystyrene stand-in for a delamination air gap.
inline constexpr Material kFoam{0.03, 30.0, 1300.0};

/// Axis-aligned box inclusion: footprint rectangle on the surface plane,
/// buried `depth` meters below the top face, `thickness` meters thick.
struct Inclusion {
    double x0, y0;          ///< footprint origin, meters
    double width, height;   ///< footprint extent, meters
    double depth;           ///< top of the inclusion below the heated face
    double thickness;
    Material material = kFoam;
};

struct SlabSpec {
    double size_x, size_y, size_z; ///< meters; z is depth
    double grid_spacing;           ///< meters per cubic voxel
    Material base = kConcrete;
    std::vector<Inclusion> inclusions;
};

/// Piecewise-constant schedule: value(t) is the value of the last point with
/// time <= t. The first point must sit at time <= 0 so the whole simulated
/// duration is covered.
class Schedule {
public:
    static Schedule constant(double value);
    explicit Schedule(std::vector<std::pair<double, double>> points);

    double value(double t) const;
    double min_value() const { return min_; }
    double max_value() const { return max_; }
    const std::vector<std::pair<double, double>>& points() const { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
    double min_;
    double max_;
};

struct BoundarySchedule {
    Schedule ambient = Schedule::constant(24.0); ///< deg C at the top face
    double film_coefficient = 20.0;              ///< W/(m^2 K), convective, >= 0
    Schedule top_flux = Schedule::constant(0.0); ///< W/m^2 absorbed at the top, >= 0
    // bottom and side faces are adiabatic
};

struct SimConfig {
    double dt = 0.0;          ///< seconds; 0 selects the stability-bound dt
    double duration = 0.0;    ///< seconds
    int output_stride = 1;    ///< steps between stored surface frames
    double initial_temperature = 24.0;
};

/// Uniform voxelization of a slab; each voxel carries exactly one material.
/// Voxels belong to an inclusion when their center lies inside its box.
struct VoxelGrid {
    int nx = 0, ny = 0, nz = 0; ///< z runs downward; k = 0 is the top layer
    double spacing = 0.0;
    std::vector<double> conductivity; ///< per voxel
    std::vector<double> rho_c;        ///< per voxel, density * specific heat
    std::vector<int> inclusion_id;    ///< -1 for base material
    std::vector<std::size_t> inclusion_voxels; ///< voxel count per inclusion
    std::vector<Inclusion> inclusions;

    std::size_t cells() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
};

/// Validates the spec and assigns one material per voxel. Throws on
/// inclusions outside the slab, overlapping footprints, or inclusions the
/// grid fails to resolve with at least one voxel.
VoxelGrid build_grid(const SlabSpec& spec);

struct SimState {
    std::vector<double> temperature; ///< per voxel, deg C
    double time = 0.0;
};

struct StepEnergy {
    double delta_energy = 0.0;    ///< J, change in internal energy this step
    double boundary_inflow = 0.0; ///< J, flux + convection through the top
};

struct SimResult {
    ThermalSequence surface;             ///< top-face temperature frames
    std::vector<BinaryMask> defect_masks; ///< one footprint mask per inclusion
    double dt_used = 0.0;
    long steps = 0;
    double max_energy_residual = 0.0;    ///< max |dE - Q| / tolerance scale
};

/// Explicit finite-volume transient conduction with harmonic-mean face
/// conductances, convective + prescribed-flux top boundary, adiabatic
/// elsewhere. The time loop is sequential; each step is a pure function of
/// the previous state.
class HeatSim {
public:
    HeatSim(VoxelGrid grid, BoundarySchedule boundary);

    const VoxelGrid& grid() const { return grid_; }

    /// Largest usable dt: 0.9 * min over cells of (heat capacity / sum of
    /// face conductances), the explicit-scheme stability bound.
    double max_stable_dt() const { return stable_dt_; }

    /// Uniform state at temperature t0; also arms the divergence guard with
    /// bounds derived from t0 and the ambient schedule.
    SimState initial_state(double t0);

    /// Advances the state in place by one step of length dt, evaluating the
    /// schedules at state.time. Verifies the energy balance (|dE - Q| within
    /// 1e-6 of scale) and the divergence guard; throws NumericError on
    /// violation. Requires dt <= max_stable_dt().
    StepEnergy step(SimState& state, double dt);

    /// Top-face temperature, reconstructed through the half-cell resistance
    /// and the film coefficient at the state's time.
    ThermalFrame surface_frame(const SimState& state) const;

    /// Footprint mask per inclusion, on the surface pixel grid.
    std::vector<BinaryMask> defect_masks() const;

    SimResult run(const SimConfig& config);

private:
    VoxelGrid grid_;
    BoundarySchedule boundary_;
    std::vector<double> cond_x_, cond_y_, cond_z_; ///< face conductances, W/K
    std::vector<double> inv_capacity_;             ///< 1 / (rho c V) per voxel
    std::vector<double> top_conductance_;          ///< W/K to ambient per top cell
    std::vector<double> top_flux_factor_;          ///< fraction of flux entering the cell
    double stable_dt_ = 0.0;
    double guard_low_ = 0.0;
    double guard_high_ = 0.0;
    bool guard_armed_ = false;
};

} // namespace thermo

#endif
