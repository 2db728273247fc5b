// Time-stepping driver on uniform grids: CFL control, boundary handling,
// the unsplit second-order finite volume step for the inviscid and viscous
// modes, and the registry of benchmark problems with their exact or
// reference solutions.
#pragma once

#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "urbgk/bgk_flux.hpp"
#include "urbgk/navier_stokes.hpp"
#include "urbgk/reconstruction.hpp"
#include "urbgk/types.hpp"

namespace urbgk::solver {

enum class Scheme { bgk, bgk_type, kfvs };
enum class Mode { euler, ns };

// Side order: 0 = xmin, 1 = xmax, 2 = ymin, 3 = ymax.
enum class Boundary { periodic, outflow, reflective, jet_inflow, exact, isothermal_wall };

template <int D>
struct ProblemSpec {
    std::string name;
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;
    double t_begin = 0.0;
    double t_end = 1.0;
    Mode mode = Mode::euler;
    std::array<Boundary, 4> bc{Boundary::periodic, Boundary::periodic,
                               Boundary::periodic, Boundary::periodic};
    flux::CollisionParams collision{};
    int default_nx = 100, default_ny = 100;

    // initial primitive field (y ignored in 1D)
    std::function<Primitive<D>(double x, double y)> init;
    // exact or reference solution, null when none exists
    std::function<Primitive<D>(double x, double y, double t)> exact;
    // analytic primitive derivatives of the exact solution (exact boundaries
    // and viscous startup); null when unavailable
    std::function<ns::PrimDerivs<D>(double x, double y, double t)> exact_derivs;
    // initial d(n, u.., T)/dt at t_begin, required by the viscous startup
    std::function<std::array<double, D + 2>(double x, double y)> init_dt;

    Primitive<D> jet_beam{};
    double jet_half_width = 0.5;
    std::array<double, 4> wall_T{};  // isothermal_wall temperatures per side
};

using AnyProblem = std::variant<ProblemSpec<1>, ProblemSpec<2>>;

// Fully populated benchmark description; throws UnknownProblem.
AnyProblem problem_registry(const std::string& name);
std::vector<std::string> problem_names();

template <int D>
struct Diagnostics {
    Vec<D> totals{};  // sum of cell averages times cell volume, per component
    double min_n = 0.0, max_n = 0.0;
    double min_T = 0.0, max_T = 0.0;
    double max_speed = 0.0;
    bool finite() const;
};

template <int D>
struct RunState {
    ProblemSpec<D> prob;
    Scheme scheme = Scheme::bgk;
    recon::Limiter limiter = recon::Limiter::van_leer;
    int nx = 0, ny = 1;
    double dx = 0.0, dy = 1.0;
    double t = 0.0;
    long steps = 0;
    recon::CellField<D> w;                  // conserved cell averages
    std::vector<ns::MomentState<D>> cells;  // viscous mode: interior moment states
    Diagnostics<D> diag;

    double xc(int i) const { return prob.x0 + (i + 0.5) * dx; }
    double yc(int j) const { return prob.y0 + (j + 0.5) * dy; }
    ns::MomentState<D>& cell(int i, int j = 0) { return cells[std::size_t(j) * nx + i]; }
    const ns::MomentState<D>& cell(int i, int j = 0) const {
        return cells[std::size_t(j) * nx + i];
    }
};

// Builds the initial state: cell averages by midpoint sampling of the
// initial field, diagnostics refreshed; viscous mode also creates the
// per-cell moment states with one recorded history level.
template <int D>
RunState<D> make_run_state(const ProblemSpec<D>& prob, Scheme scheme,
                           recon::Limiter lim, int nx, int ny = 1);

// dt = cfl * dx / max spectral radius (1D), or cfl * min(dx,dy) / max over
// cells and axes (2D); clipped so the step lands exactly on t_end.
template <int D>
double cfl_timestep(const RunState<D>& rs, double cfl);

// Fills both ghost layers on every side at the current time.
template <int D>
void apply_boundary(RunState<D>& rs);

// Viscous startup: two sub-steps of 0.5*dt0 and dt0, both taken from the
// initial data with the problem's analytic time derivatives, leaving three
// recorded history levels.  Throws MissingInitialDerivatives when the
// problem supplies no init_dt, and ConfigError outside viscous mode or
// after stepping has begun.
template <int D>
void ns_bootstrap(RunState<D>& rs, double cfl);

// One forward step of size dt (ghost fill, reconstruction, interface
// kinetics, fluxes and viscous sources, update, recovery, diagnostics).
// NonPhysicalState aborts carry the cell index, step and time.
template <int D>
void advance(RunState<D>& rs, double dt);

// Advances with CFL-controlled steps until min(t_stop, t_end), landing
// exactly; runs the viscous startup first when it is still pending.
template <int D>
void run_to_time(RunState<D>& rs, double cfl, double t_stop);

}  // namespace urbgk::solver
