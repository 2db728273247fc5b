#include "urbgk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "urbgk/kinetic.hpp"
#include "urbgk/riemann.hpp"

namespace urbgk::solver {

namespace {

template <int D>
std::string cell_tag(const char* what, int i, int j, long step, double t) {
    char buf[128];
    if constexpr (D == 1)
        std::snprintf(buf, sizeof buf, " [%s %d, step %ld, t=%.9g]", what, i,
                      step, t);
    else
        std::snprintf(buf, sizeof buf, " [%s (%d,%d), step %ld, t=%.9g]", what,
                      i, j, step, t);
    return buf;
}

[[noreturn]] void rethrow(const NonPhysicalState& e, const std::string& tag) {
    throw NonPhysicalState(e.what() + tag);
}

template <int D>
Vec<D> flipped(Vec<D> w, int comp) {
    w[comp] = -w[comp];
    return w;
}

// Monotonized (or central) slope of cell (i,j) along dir, matching the slope
// construction inside recon::interface_trace.
template <int D>
Vec<D> cell_slope(const recon::CellField<D>& w, int i, int j, int dir,
                  recon::Limiter lim, double h) {
    const Vec<D>& wm = (dir == 1) ? w(i - 1, j) : w(i, j - 1);
    const Vec<D>& wc = w(i, j);
    const Vec<D>& wp = (dir == 1) ? w(i + 1, j) : w(i, j + 1);
    if (lim == recon::Limiter::van_leer)
        return recon::characteristic_reconstruct<D>(wm, wc, wp, h, dir);
    Vec<D> s{};
    for (int c = 0; c < D + 2; ++c) s[c] = (wp[c] - wm[c]) / (2.0 * h);
    return s;
}

// Per-cell slope fields over the interior plus one ghost ring; sharing them
// across interfaces avoids re-limiting every cell four times per sweep.
template <int D>
void fill_slopes(const RunState<D>& rs, recon::CellField<D>& sx,
                 recon::CellField<D>& sy) {
    const int jlo = (D == 2) ? -1 : 0;
    const int jhi = (D == 2) ? rs.ny + 1 : 1;
    for (int j = jlo; j < jhi; ++j)
        for (int i = -1; i <= rs.nx; ++i) {
            try {
                sx(i, j) = cell_slope<D>(rs.w, i, j, 1, rs.limiter, rs.dx);
                if constexpr (D == 2)
                    sy(i, j) = cell_slope<D>(rs.w, i, j, 2, rs.limiter, rs.dy);
            } catch (const NonPhysicalState& e) {
                rethrow(e, cell_tag<D>("slope cell", i, j, rs.steps, rs.t));
            }
        }
}

// Assembles the trace of the interface between cells (i-1,j),(i,j) (axis 1)
// or (i,j-1),(i,j) (axis 2) from the precomputed slope fields; equivalent to
// recon::interface_trace on the same data.
template <int D>
recon::InterfaceTrace<D> trace_from_slopes(const recon::CellField<D>& w,
                                           const recon::CellField<D>& sx,
                                           const recon::CellField<D>& sy,
                                           int i, int j, int axis, double dx,
                                           double dy) {
    const int il = (axis == 1) ? i - 1 : i;
    const int jl = (axis == 2) ? j - 1 : j;
    recon::InterfaceTrace<D> t;
    t.wx_l = sx(il, jl);
    t.wx_r = sx(i, j);
    if constexpr (D == 2) {
        t.wy_l = sy(il, jl);
        t.wy_r = sy(i, j);
    }
    const double half = 0.5 * ((axis == 1) ? dx : dy);
    const Vec<D>& sl = (axis == 1) ? t.wx_l : t.wy_l;
    const Vec<D>& sr = (axis == 1) ? t.wx_r : t.wy_r;
    t.wl = w(il, jl) + half * sl;
    t.wr = w(i, j) + (-half) * sr;
    return t;
}

template <int D>
void refresh_diagnostics(RunState<D>& rs) {
    Diagnostics<D> d;
    d.min_n = d.min_T = std::numeric_limits<double>::infinity();
    d.max_n = d.max_T = -std::numeric_limits<double>::infinity();
    const double dv = rs.dx * (D == 2 ? rs.dy : 1.0);
    for (int j = 0; j < rs.ny; ++j)
        for (int i = 0; i < rs.nx; ++i) {
            const Vec<D>& wc = rs.w(i, j);
            for (int c = 0; c < D + 2; ++c) d.totals[c] += dv * wc[c];
            Primitive<D> pr;
            if (rs.prob.mode == Mode::ns) {
                pr = rs.cell(i, j).prim;
            } else {
                try {
                    pr = kinetic::primitive_from_conserved_euler<D>(wc);
                } catch (const NonPhysicalState& e) {
                    rethrow(e, cell_tag<D>("cell", i, j, rs.steps, rs.t));
                }
            }
            d.min_n = std::min(d.min_n, pr.n);
            d.max_n = std::max(d.max_n, pr.n);
            d.min_T = std::min(d.min_T, pr.T);
            d.max_T = std::max(d.max_T, pr.T);
            d.max_speed = std::max(d.max_speed, std::sqrt(pr.usq()));
        }
    rs.diag = d;
}

// ---------------------------------------------------------------- inviscid

template <int D>
void euler_step(RunState<D>& rs, double dt) {
    apply_boundary(rs);
    const int nx = rs.nx, ny = rs.ny;
    const double dx = rs.dx, dy = rs.dy;
    recon::CellField<D> sx(nx, ny), sy(nx, ny);
    fill_slopes(rs, sx, sy);

    const auto& cp = rs.prob.collision;
    std::vector<Vec<D>> FX(std::size_t(nx + 1) * ny);
    std::vector<Vec<D>> FY;
    if constexpr (D == 2) FY.resize(std::size_t(ny + 1) * nx);
    auto fxi = [nx](int i, int j) { return std::size_t(j) * (nx + 1) + i; };
    auto fyi = [nx](int i, int j) { return std::size_t(j) * nx + i; };

    if (rs.scheme != Scheme::bgk) {
        // single pass: the reference closures need only the traced states
        for (int axis = 1; axis <= D; ++axis)
            for (int j = 0; j < ((axis == 2) ? ny + 1 : ny); ++j)
                for (int i = 0; i <= ((axis == 1) ? nx : nx - 1); ++i) {
                    try {
                        const auto tr = trace_from_slopes<D>(rs.w, sx, sy, i,
                                                             j, axis, dx, dy);
                        const auto gl =
                            kinetic::primitive_from_conserved_euler<D>(tr.wl);
                        const auto gr =
                            kinetic::primitive_from_conserved_euler<D>(tr.wr);
                        Vec<D> f;
                        if (rs.scheme == Scheme::kfvs) {
                            f = flux::kfvs_flux<D>(gl, gr, axis);
                        } else {
                            const double tau = flux::collision_time(
                                cp, dt, gl.pressure(), gr.pressure());
                            f = flux::bgk_type_flux<D>(gl, gr, axis, tau, dt);
                        }
                        if (axis == 1)
                            FX[fxi(i, j)] = f;
                        else
                            FY[fyi(i, j)] = f;
                    } catch (const NonPhysicalState& e) {
                        rethrow(e, cell_tag<D>(axis == 1 ? "x-interface"
                                                         : "y-interface",
                                               i, j, rs.steps, rs.t));
                    }
                }
    } else {
        // pass A caches the matched interface equilibria, including the ghost
        // rows/columns whose conserved values feed the tangential slope of
        // the interior interfaces; pass B assembles and integrates.
        {
            const int rlo = (D == 2) ? -1 : 0;
            const int rhi = (D == 2) ? ny + 1 : 1;
            const int NXI = nx + 1;
            std::vector<Vec<D>> w0x(std::size_t(rhi - rlo) * NXI);
            std::vector<recon::InterfaceTrace<D>> trc(std::size_t(ny) * NXI);
            std::vector<Primitive<D>> g0c(std::size_t(ny) * NXI);
            std::vector<double> tauc(std::size_t(ny) * NXI);
            for (int j = rlo; j < rhi; ++j)
                for (int i = 0; i <= nx; ++i) {
                    try {
                        auto tr = trace_from_slopes<D>(rs.w, sx, sy, i, j, 1,
                                                       dx, dy);
                        const auto gl =
                            kinetic::primitive_from_conserved_euler<D>(tr.wl);
                        const auto gr =
                            kinetic::primitive_from_conserved_euler<D>(tr.wr);
                        const double tau = flux::collision_time(
                            cp, dt, gl.pressure(), gr.pressure());
                        const auto g0 =
                            flux::interface_equilibrium<D>(gl, gr, 1);
                        w0x[std::size_t(j - rlo) * NXI + i] =
                            kinetic::conserved_from_primitive<D>(g0);
                        if (j >= 0 && j < ny) {
                            const std::size_t k = std::size_t(j) * NXI + i;
                            trc[k] = tr;
                            g0c[k] = g0;
                            tauc[k] = tau;
                        }
                    } catch (const NonPhysicalState& e) {
                        rethrow(e, cell_tag<D>("x-interface", i, j, rs.steps,
                                               rs.t));
                    }
                }
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i <= nx; ++i) {
                    try {
                        const std::size_t k = std::size_t(j) * NXI + i;
                        const Vec<D> w0n =
                            (1.0 / dx) * (rs.w(i, j) - rs.w(i - 1, j));
                        Vec<D> w0t{};
                        if constexpr (D == 2)
                            w0t = (0.5 / dy) *
                                  (w0x[std::size_t(j + 1 - rlo) * NXI + i] -
                                   w0x[std::size_t(j - 1 - rlo) * NXI + i]);
                        const auto kin = flux::assemble_interface<D>(
                            trc[k], w0n, w0t, 1, tauc[k], dt, true, &g0c[k]);
                        FX[fxi(i, j)] = flux::bgk_interface_flux<D>(kin);
                    } catch (const NonPhysicalState& e) {
                        rethrow(e,
                                cell_tag<D>("x-flux", i, j, rs.steps, rs.t));
                    }
                }
        }
        if constexpr (D == 2) {
            const int NYI = ny + 1;
            std::vector<Vec<D>> w0y(std::size_t(nx + 2) * NYI);
            std::vector<recon::InterfaceTrace<D>> trc(std::size_t(nx) * NYI);
            std::vector<Primitive<D>> g0c(std::size_t(nx) * NYI);
            std::vector<double> tauc(std::size_t(nx) * NYI);
            for (int i = -1; i <= nx; ++i)
                for (int j = 0; j <= ny; ++j) {
                    try {
                        auto tr = trace_from_slopes<D>(rs.w, sx, sy, i, j, 2,
                                                       dx, dy);
                        const auto gl =
                            kinetic::primitive_from_conserved_euler<D>(tr.wl);
                        const auto gr =
                            kinetic::primitive_from_conserved_euler<D>(tr.wr);
                        const double tau = flux::collision_time(
                            cp, dt, gl.pressure(), gr.pressure());
                        const auto g0 =
                            flux::interface_equilibrium<D>(gl, gr, 2);
                        w0y[std::size_t(i + 1) * NYI + j] =
                            kinetic::conserved_from_primitive<D>(g0);
                        if (i >= 0 && i < nx) {
                            const std::size_t k = std::size_t(i) * NYI + j;
                            trc[k] = tr;
                            g0c[k] = g0;
                            tauc[k] = tau;
                        }
                    } catch (const NonPhysicalState& e) {
                        rethrow(e, cell_tag<D>("y-interface", i, j, rs.steps,
                                               rs.t));
                    }
                }
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j <= ny; ++j) {
                    try {
                        const std::size_t k = std::size_t(i) * NYI + j;
                        const Vec<D> w0n =
                            (1.0 / dy) * (rs.w(i, j) - rs.w(i, j - 1));
                        const Vec<D> w0t =
                            (0.5 / dx) * (w0y[std::size_t(i + 2) * NYI + j] -
                                          w0y[std::size_t(i) * NYI + j]);
                        const auto kin = flux::assemble_interface<D>(
                            trc[k], w0n, w0t, 2, tauc[k], dt, true, &g0c[k]);
                        FY[fyi(i, j)] = flux::bgk_interface_flux<D>(kin);
                    } catch (const NonPhysicalState& e) {
                        rethrow(e,
                                cell_tag<D>("y-flux", i, j, rs.steps, rs.t));
                    }
                }
        }
    }

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Vec<D> wn =
                rs.w(i, j) - (dt / dx) * (FX[fxi(i + 1, j)] - FX[fxi(i, j)]);
            if constexpr (D == 2)
                wn = wn - (dt / dy) * (FY[fyi(i, j + 1)] - FY[fyi(i, j)]);
            rs.w(i, j) = wn;
        }
}

// ----------------------------------------------------------------- viscous

template <int D>
using DerivProvider = std::function<ns::TimeDerivs<D>(int, int)>;

// Everything a cell contributes to its interfaces and its own source: the
// recovered state, lab-frame derivatives, the extrapolated time derivative
// of the conserved block, the limited conserved slopes, and the deviation
// coefficient set.
template <int D>
struct NSCell {
    Primitive<D> prim;
    ns::PrimDerivs<D> derivs;
    Vec<D> w0_dot{};
    Vec<D> wsx{}, wsy{};
    ns::CEKineticSet<D> ce;
};

template <int D>
struct NSGrid {
    int nx = 0, ny = 0;
    std::vector<NSCell<D>> cells;  // one ghost ring
    NSGrid(int nx_, int ny_)
        : nx(nx_), ny(ny_), cells(std::size_t(nx_ + 2) * (ny_ + 2)) {}
    NSCell<D>& at(int i, int j) {
        return cells[std::size_t(j + 1) * (nx + 2) + (i + 1)];
    }
    const NSCell<D>& at(int i, int j) const {
        return cells[std::size_t(j + 1) * (nx + 2) + (i + 1)];
    }
};

// Primitive-variable slope from a conserved slope: solves the (non-symmetric)
// equilibrium Jacobian system dW/d(n,u,T) s = ws.
template <int D>
std::array<double, D + 2> primitive_slope(const Primitive<D>& prim,
                                          const Vec<D>& ws) {
    const auto J = ns::conserved_jacobian<D>(prim);
    Eigen::Matrix<double, D + 2, D + 2> A;
    Eigen::Matrix<double, D + 2, 1> b;
    for (int r = 0; r < D + 2; ++r) {
        b(r) = ws[r];
        for (int c = 0; c < D + 2; ++c) A(r, c) = J[r][c];
    }
    const Eigen::Matrix<double, D + 2, 1> x = A.partialPivLu().solve(b);
    std::array<double, D + 2> out{};
    for (int r = 0; r < D + 2; ++r) {
        out[r] = x(r);
        if (!std::isfinite(out[r]))
            throw NonPhysicalState("primitive gradient solve failed");
    }
    return out;
}

template <int D>
ns::CEKineticSet<D> deviation_set(const Primitive<D>& prim,
                                  const ns::PrimDerivs<D>& d) {
    return ns::ce_kinetic_set<D>(
        ns::chapman_enskog_coefficients<D>(prim, ns::ce_gradients<D>(prim, d)));
}

// Conserved vector carrying the first-order dissipative content: the
// particle drift -lambda/h qtilde^0 and the 2 mu sigma^{0 nu} stresses, with
// tau = 5 mu / (4 p) so lambda/h = 5 mu / (12 T^2).
template <int D>
Vec<D> deviated_conserved(const Primitive<D>& prim, const ns::PrimDerivs<D>& d,
                          double mu) {
    Vec<D> w = kinetic::conserved_from_primitive<D>(prim);
    const auto g = ns::ce_gradients<D>(prim, d);
    w[0] -= 5.0 * mu / (12.0 * prim.T * prim.T) * g.q[0];
    for (int k = 1; k <= D; ++k) w[k] += 2.0 * mu * g.shear[0][k];
    w[D + 1] += 2.0 * mu * g.shear[0][0];
    return w;
}

template <int D>
NSCell<D> exact_nscell(const ProblemSpec<D>& prob, double x, double y,
                       double t) {
    NSCell<D> c;
    c.prim = prob.exact(x, y, t);
    c.derivs = prob.exact_derivs(x, y, t);
    c.w0_dot =
        kinetic::mat_vec<D>(ns::conserved_jacobian<D>(c.prim), c.derivs.t);
    c.ce = deviation_set<D>(c.prim, c.derivs);
    return c;
}

// Mirror across an isothermal slip wall normal to y: the temperature
// reflects about the wall value, pressure and tangential velocity are even,
// normal velocity is odd.  Derivative rows follow by the chain rule of the
// mirror map (t/x rows keep the y flip of the fields; the y row adds the
// sign of the coordinate reflection).
NSCell<2> wall_nscell(const NSCell<2>& s, double Tw) {
    NSCell<2> c;
    const double T2 = 2.0 * Tw - s.prim.T;
    if (!(T2 > 0.0))
        throw NonPhysicalState(
            "isothermal wall mirror produced a non-positive temperature");
    c.prim.T = T2;
    c.prim.n = s.prim.pressure() / T2;
    c.prim.u = {s.prim.u[0], -s.prim.u[1]};
    const double p = s.prim.pressure();
    auto transform = [&](const std::array<double, 4>& d, bool tangent) {
        const double p_c = d[0] * s.prim.T + s.prim.n * d[3];
        std::array<double, 4> o{};
        o[3] = tangent ? -d[3] : d[3];
        const double p2_c = tangent ? p_c : -p_c;
        o[0] = (p2_c * T2 - p * o[3]) / (T2 * T2);
        o[1] = tangent ? d[1] : -d[1];
        o[2] = tangent ? -d[2] : d[2];
        return o;
    };
    c.derivs.t = transform(s.derivs.t, true);
    c.derivs.x = transform(s.derivs.x, true);
    c.derivs.y = transform(s.derivs.y, false);
    c.w0_dot =
        kinetic::mat_vec<2>(ns::conserved_jacobian<2>(c.prim), c.derivs.t);
    c.ce = deviation_set<2>(c.prim, c.derivs);
    return c;
}

template <int D>
void fill_ns_ghost_cells(RunState<D>& rs, NSGrid<D>& grid) {
    const auto& prob = rs.prob;
    const int nx = rs.nx, ny = rs.ny;
    for (int j = 0; j < ny; ++j) {
        if (prob.bc[0] == Boundary::periodic)
            grid.at(-1, j) = grid.at(nx - 1, j);
        else if (prob.bc[0] == Boundary::outflow)
            grid.at(-1, j) = grid.at(0, j);
        else
            grid.at(-1, j) = exact_nscell<D>(prob, rs.xc(-1), rs.yc(j), rs.t);
        if (prob.bc[1] == Boundary::periodic)
            grid.at(nx, j) = grid.at(0, j);
        else if (prob.bc[1] == Boundary::outflow)
            grid.at(nx, j) = grid.at(nx - 1, j);
        else
            grid.at(nx, j) = exact_nscell<D>(prob, rs.xc(nx), rs.yc(j), rs.t);
    }
    if constexpr (D == 2) {
        const bool wrapx = prob.bc[0] == Boundary::periodic;
        for (int i = -1; i <= nx; ++i) {
            const int is = wrapx ? (i + nx) % nx : i;
            if (prob.bc[2] == Boundary::periodic)
                grid.at(i, -1) = grid.at(i, ny - 1);
            else if (prob.bc[2] == Boundary::outflow)
                grid.at(i, -1) = grid.at(i, 0);
            else if (prob.bc[2] == Boundary::exact)
                grid.at(i, -1) =
                    exact_nscell<D>(prob, rs.xc(i), rs.yc(-1), rs.t);
            else
                grid.at(i, -1) = wall_nscell(grid.at(is, 0), prob.wall_T[2]);
            if (prob.bc[3] == Boundary::periodic)
                grid.at(i, ny) = grid.at(i, 0);
            else if (prob.bc[3] == Boundary::outflow)
                grid.at(i, ny) = grid.at(i, ny - 1);
            else if (prob.bc[3] == Boundary::exact)
                grid.at(i, ny) =
                    exact_nscell<D>(prob, rs.xc(i), rs.yc(ny), rs.t);
            else
                grid.at(i, ny) =
                    wall_nscell(grid.at(is, ny - 1), prob.wall_T[3]);
        }
    }
}

// Periodic ghosts already copy deviated interior averages; exact and wall
// ghosts were filled with plain equilibrium values and get their dissipative
// content here (both layers, corners via the wrapped source column).
template <int D>
void overwrite_deviated_ghosts(RunState<D>& rs, const NSGrid<D>& grid) {
    const auto& prob = rs.prob;
    const double mu = prob.collision.mu;
    const int nx = rs.nx, ny = rs.ny;
    for (int s = 0; s < 2; ++s) {
        if (prob.bc[s] != Boundary::exact) continue;
        for (int j = 0; j < ny; ++j)
            for (int g = 1; g <= 2; ++g) {
                const int ti = (s == 0) ? -g : nx - 1 + g;
                const auto c =
                    exact_nscell<D>(prob, rs.xc(ti), rs.yc(j), rs.t);
                rs.w(ti, j) = deviated_conserved<D>(c.prim, c.derivs, mu);
            }
    }
    if constexpr (D == 2) {
        const bool wrapx = prob.bc[0] == Boundary::periodic;
        for (int s = 2; s < 4; ++s) {
            if (prob.bc[s] == Boundary::periodic ||
                prob.bc[s] == Boundary::outflow)
                continue;
            for (int i = -2; i < nx + 2; ++i) {
                const int is = wrapx ? (i + 2 * nx) % nx : i;
                if (!wrapx && (is < -1 || is > nx)) continue;
                for (int g = 1; g <= 2; ++g) {
                    const int tj = (s == 2) ? -g : ny - 1 + g;
                    NSCell<D> c;
                    if (prob.bc[s] == Boundary::exact) {
                        c = exact_nscell<D>(prob, rs.xc(i), rs.yc(tj), rs.t);
                    } else {
                        const int js = (s == 2) ? g - 1 : ny - g;
                        c = wall_nscell(grid.at(is, js), prob.wall_T[s]);
                    }
                    rs.w(i, tj) = deviated_conserved<D>(c.prim, c.derivs, mu);
                }
            }
        }
    }
}

template <int D>
void ns_step(RunState<D>& rs, double dt, const DerivProvider<D>& provider) {
    apply_boundary(rs);
    const int nx = rs.nx, ny = rs.ny;
    const double dx = rs.dx, dy = rs.dy;
    recon::CellField<D> sx(nx, ny), sy(nx, ny);
    fill_slopes(rs, sx, sy);

    NSGrid<D> grid(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            try {
                NSCell<D>& c = grid.at(i, j);
                c.prim = rs.cell(i, j).prim;
                c.wsx = sx(i, j);
                if constexpr (D == 2) c.wsy = sy(i, j);
                const auto td = provider(i, j);
                c.w0_dot = td.w0_dot;
                c.derivs.t = td.prim_dot;
                c.derivs.x = primitive_slope<D>(c.prim, c.wsx);
                if constexpr (D == 2)
                    c.derivs.y = primitive_slope<D>(c.prim, c.wsy);
                c.ce = deviation_set<D>(c.prim, c.derivs);
            } catch (const NonPhysicalState& e) {
                rethrow(e, cell_tag<D>("cell", i, j, rs.steps, rs.t));
            }
        }
    fill_ns_ghost_cells(rs, grid);
    overwrite_deviated_ghosts(rs, grid);
    fill_slopes(rs, sx, sy);  // refresh: traces must see the final ghosts

    const auto& cp = rs.prob.collision;
    struct Cache {
        recon::InterfaceTrace<D> tr;
        Primitive<D> g0;
        double tau = 0.0;
        ns::CEKineticSet<D> cel, cer;
    };
    std::vector<std::array<Vec<D>, D + 1>> FX(std::size_t(nx + 1) * ny), FY;
    if constexpr (D == 2) FY.resize(std::size_t(ny + 1) * nx);
    auto fxi = [nx](int i, int j) { return std::size_t(j) * (nx + 1) + i; };
    auto fyi = [nx](int i, int j) { return std::size_t(j) * nx + i; };

    {
        const int rlo = (D == 2) ? -1 : 0;
        const int rhi = (D == 2) ? ny + 1 : 1;
        const int NXI = nx + 1;
        std::vector<Vec<D>> w0x(std::size_t(rhi - rlo) * NXI);
        std::vector<Cache> cx(std::size_t(ny) * NXI);
        for (int j = rlo; j < rhi; ++j)
            for (int i = 0; i <= nx; ++i) {
                try {
                    auto tr =
                        trace_from_slopes<D>(rs.w, sx, sy, i, j, 1, dx, dy);
                    const auto gl =
                        kinetic::primitive_from_conserved_euler<D>(tr.wl);
                    const auto gr =
                        kinetic::primitive_from_conserved_euler<D>(tr.wr);
                    const double tau = flux::collision_time(
                        cp, dt, gl.pressure(), gr.pressure());
                    const auto cel =
                        deviation_set<D>(gl, grid.at(i - 1, j).derivs);
                    const auto cer = deviation_set<D>(gr, grid.at(i, j).derivs);
                    const auto g0 = ns::ns_interface_equilibrium<D>(
                        gl, gr, cel, cer, tau, 1);
                    w0x[std::size_t(j - rlo) * NXI + i] =
                        kinetic::conserved_from_primitive<D>(g0);
                    if (j >= 0 && j < ny)
                        cx[std::size_t(j) * NXI + i] = {tr, g0, tau, cel, cer};
                } catch (const NonPhysicalState& e) {
                    rethrow(e,
                            cell_tag<D>("x-interface", i, j, rs.steps, rs.t));
                }
            }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                try {
                    const Cache& C = cx[std::size_t(j) * NXI + i];
                    const Vec<D> w0n =
                        (1.0 / dx) * (rs.w(i, j) - rs.w(i - 1, j));
                    Vec<D> w0t{};
                    if constexpr (D == 2)
                        w0t = (0.5 / dy) *
                              (w0x[std::size_t(j + 1 - rlo) * NXI + i] -
                               w0x[std::size_t(j - 1 - rlo) * NXI + i]);
                    const Vec<D> wd = 0.5 * (grid.at(i - 1, j).w0_dot +
                                             grid.at(i, j).w0_dot);
                    const auto iface = ns::ns_assemble_interface<D>(
                        C.tr, w0n, w0t, wd, C.cel, C.cer, 1, C.tau, dt, &C.g0);
                    FX[fxi(i, j)] = ns::ns_interface_flux<D>(iface);
                } catch (const NonPhysicalState& e) {
                    rethrow(e, cell_tag<D>("x-flux", i, j, rs.steps, rs.t));
                }
            }
    }
    if constexpr (D == 2) {
        const int NYI = ny + 1;
        std::vector<Vec<D>> w0y(std::size_t(nx + 2) * NYI);
        std::vector<Cache> cy(std::size_t(nx) * NYI);
        for (int i = -1; i <= nx; ++i)
            for (int j = 0; j <= ny; ++j) {
                try {
                    auto tr =
                        trace_from_slopes<D>(rs.w, sx, sy, i, j, 2, dx, dy);
                    const auto gl =
                        kinetic::primitive_from_conserved_euler<D>(tr.wl);
                    const auto gr =
                        kinetic::primitive_from_conserved_euler<D>(tr.wr);
                    const double tau = flux::collision_time(
                        cp, dt, gl.pressure(), gr.pressure());
                    const auto cel =
                        deviation_set<D>(gl, grid.at(i, j - 1).derivs);
                    const auto cer = deviation_set<D>(gr, grid.at(i, j).derivs);
                    const auto g0 = ns::ns_interface_equilibrium<D>(
                        gl, gr, cel, cer, tau, 2);
                    w0y[std::size_t(i + 1) * NYI + j] =
                        kinetic::conserved_from_primitive<D>(g0);
                    if (i >= 0 && i < nx)
                        cy[std::size_t(i) * NYI + j] = {tr, g0, tau, cel, cer};
                } catch (const NonPhysicalState& e) {
                    rethrow(e,
                            cell_tag<D>("y-interface", i, j, rs.steps, rs.t));
                }
            }
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j <= ny; ++j) {
                try {
                    const Cache& C = cy[std::size_t(i) * NYI + j];
                    const Vec<D> w0n =
                        (1.0 / dy) * (rs.w(i, j) - rs.w(i, j - 1));
                    const Vec<D> w0t =
                        (0.5 / dx) * (w0y[std::size_t(i + 2) * NYI + j] -
                                      w0y[std::size_t(i) * NYI + j]);
                    const Vec<D> wd = 0.5 * (grid.at(i, j - 1).w0_dot +
                                             grid.at(i, j).w0_dot);
                    const auto iface = ns::ns_assemble_interface<D>(
                        C.tr, w0n, w0t, wd, C.cel, C.cer, 2, C.tau, dt, &C.g0);
                    FY[fyi(i, j)] = ns::ns_interface_flux<D>(iface);
                } catch (const NonPhysicalState& e) {
                    rethrow(e, cell_tag<D>("y-flux", i, j, rs.steps, rs.t));
                }
            }
    }

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            try {
                auto& st = rs.cell(i, j);
                const NSCell<D>& c = grid.at(i, j);
                std::array<Vec<D>, D + 1> dflux;
                for (int a = 0; a <= D; ++a) {
                    dflux[a] =
                        (dt / dx) * (FX[fxi(i + 1, j)][a] - FX[fxi(i, j)][a]);
                    if constexpr (D == 2)
                        dflux[a] = dflux[a] + (dt / dy) * (FY[fyi(i, j + 1)][a] -
                                                           FY[fyi(i, j)][a]);
                }
                Vec<D> a0{}, b0{}, A0{};
                flux::slope_coefficients<D>(c.prim, c.wsx, c.wsy, a0, b0, A0);
                A0 = kinetic::solve_moment_system<D>(
                    kinetic::moment_matrix<D>(c.prim, 0), c.w0_dot);
                const double pc = c.prim.pressure();
                const double tauc = flux::collision_time(cp, dt, pc, pc);
                auto src = ns::ns_source<D>(c.prim, a0, b0, A0, c.ce, tauc, dt);
                for (auto& v : src) v = dt * v;
                ns::ns_apply_update<D>(st, dflux, src);
                rs.w(i, j) = st.blocks[0];
                ns::record_history<D>(st, rs.t + dt);
            } catch (const NonPhysicalState& e) {
                rethrow(e, cell_tag<D>("cell update", i, j, rs.steps, rs.t));
            }
        }
}

}  // namespace

// ------------------------------------------------------------------ public

template <int D>
bool Diagnostics<D>::finite() const {
    bool ok = std::isfinite(min_n) && std::isfinite(max_n) &&
              std::isfinite(min_T) && std::isfinite(max_T) &&
              std::isfinite(max_speed);
    for (double v : totals) ok = ok && std::isfinite(v);
    return ok;
}

template <int D>
void apply_boundary(RunState<D>& rs) {
    auto& w = rs.w;
    const int nx = rs.nx, ny = rs.ny;
    const auto& prob = rs.prob;

    auto conserved_exact = [&](double x, double y) {
        return kinetic::conserved_from_primitive<D>(prob.exact(x, y, rs.t));
    };
    auto wall_mirror = [&](const Vec<D>& src, double Tw, int comp) {
        const auto pr = kinetic::primitive_from_conserved_euler<D>(src);
        const double T2 = 2.0 * Tw - pr.T;
        if (!(T2 > 0.0))
            throw NonPhysicalState(
                "isothermal wall mirror produced a non-positive temperature");
        Primitive<D> out = pr;
        out.T = T2;
        out.n = pr.pressure() / T2;
        out.u[comp - 1] = -pr.u[comp - 1];
        return kinetic::conserved_from_primitive<D>(out);
    };

    Vec<D> beam{};
    if (prob.bc[0] == Boundary::jet_inflow)
        beam = kinetic::conserved_from_primitive<D>(prob.jet_beam);

    for (int j = 0; j < ny; ++j)
        for (int g = 1; g <= recon::CellField<D>::ghost; ++g) {
            switch (prob.bc[0]) {
                case Boundary::periodic: w(-g, j) = w(nx - g, j); break;
                case Boundary::outflow: w(-g, j) = w(0, j); break;
                case Boundary::reflective:
                    w(-g, j) = flipped<D>(w(g - 1, j), 1);
                    break;
                case Boundary::jet_inflow:
                    w(-g, j) = (std::abs(rs.yc(j)) < prob.jet_half_width)
                                   ? beam
                                   : flipped<D>(w(g - 1, j), 1);
                    break;
                case Boundary::exact:
                    w(-g, j) = conserved_exact(rs.xc(-g), rs.yc(j));
                    break;
                case Boundary::isothermal_wall:
                    w(-g, j) = wall_mirror(w(g - 1, j), prob.wall_T[0], 1);
                    break;
            }
            switch (prob.bc[1]) {
                case Boundary::periodic: w(nx - 1 + g, j) = w(g - 1, j); break;
                case Boundary::outflow: w(nx - 1 + g, j) = w(nx - 1, j); break;
                case Boundary::reflective:
                    w(nx - 1 + g, j) = flipped<D>(w(nx - g, j), 1);
                    break;
                case Boundary::jet_inflow:
                    throw ConfigError("jet inflow is only valid on xmin");
                case Boundary::exact:
                    w(nx - 1 + g, j) = conserved_exact(rs.xc(nx - 1 + g),
                                                       rs.yc(j));
                    break;
                case Boundary::isothermal_wall:
                    w(nx - 1 + g, j) =
                        wall_mirror(w(nx - g, j), prob.wall_T[1], 1);
                    break;
            }
        }
    if constexpr (D == 2) {
        const int gh = recon::CellField<D>::ghost;
        for (int i = -gh; i < nx + gh; ++i)
            for (int g = 1; g <= gh; ++g) {
                switch (prob.bc[2]) {
                    case Boundary::periodic: w(i, -g) = w(i, ny - g); break;
                    case Boundary::outflow: w(i, -g) = w(i, 0); break;
                    case Boundary::reflective:
                        w(i, -g) = flipped<D>(w(i, g - 1), 2);
                        break;
                    case Boundary::jet_inflow:
                        throw ConfigError("jet inflow is only valid on xmin");
                    case Boundary::exact:
                        w(i, -g) = conserved_exact(rs.xc(i), rs.yc(-g));
                        break;
                    case Boundary::isothermal_wall:
                        w(i, -g) = wall_mirror(w(i, g - 1), prob.wall_T[2], 2);
                        break;
                }
                switch (prob.bc[3]) {
                    case Boundary::periodic:
                        w(i, ny - 1 + g) = w(i, g - 1);
                        break;
                    case Boundary::outflow:
                        w(i, ny - 1 + g) = w(i, ny - 1);
                        break;
                    case Boundary::reflective:
                        w(i, ny - 1 + g) = flipped<D>(w(i, ny - g), 2);
                        break;
                    case Boundary::jet_inflow:
                        throw ConfigError("jet inflow is only valid on xmin");
                    case Boundary::exact:
                        w(i, ny - 1 + g) =
                            conserved_exact(rs.xc(i), rs.yc(ny - 1 + g));
                        break;
                    case Boundary::isothermal_wall:
                        w(i, ny - 1 + g) =
                            wall_mirror(w(i, ny - g), prob.wall_T[3], 2);
                        break;
                }
            }
    }
}

template <int D>
RunState<D> make_run_state(const ProblemSpec<D>& prob, Scheme scheme,
                           recon::Limiter lim, int nx, int ny) {
    if (!prob.init)
        throw ConfigError("problem '" + prob.name + "' has no initial data");
    if (!(prob.t_end > prob.t_begin))
        throw ConfigError("t_end must exceed t_begin");
    if (prob.mode == Mode::ns && scheme != Scheme::bgk)
        throw ConfigError("viscous mode runs only with the bgk scheme");
    if ((prob.bc[0] == Boundary::periodic) !=
        (prob.bc[1] == Boundary::periodic))
        throw ConfigError("periodic boundaries must come in facing pairs");
    if (D == 2 && (prob.bc[2] == Boundary::periodic) !=
                      (prob.bc[3] == Boundary::periodic))
        throw ConfigError("periodic boundaries must come in facing pairs");
    const int nsides = (D == 2) ? 4 : 2;
    for (int s = 0; s < nsides; ++s) {
        const Boundary b = prob.bc[s];
        if (b == Boundary::jet_inflow &&
            (s != 0 || prob.mode != Mode::euler))
            throw ConfigError(
                "jet inflow is only supported on the xmin side of inviscid "
                "runs");
        if (b == Boundary::exact && !prob.exact)
            throw ConfigError("exact boundaries need an exact solution");
        if (b == Boundary::isothermal_wall) {
            if (D == 1 || s < 2)
                throw ConfigError(
                    "isothermal walls are only supported on the y boundaries");
            if (!(prob.wall_T[s] > 0.0))
                throw ConfigError(
                    "isothermal walls need a positive temperature");
        }
        if (prob.mode == Mode::ns) {
            if (b != Boundary::periodic && b != Boundary::outflow &&
                b != Boundary::exact && b != Boundary::isothermal_wall)
                throw ConfigError(
                    "viscous runs support periodic, outflow, exact and "
                    "isothermal wall boundaries");
            if (b == Boundary::exact && !prob.exact_derivs)
                throw ConfigError(
                    "exact boundaries in viscous mode need the analytic "
                    "derivative field");
        }
    }
    if (prob.bc[0] == Boundary::jet_inflow && !prob.jet_beam.valid())
        throw ConfigError("jet inflow needs a valid beam state");

    RunState<D> rs;
    rs.prob = prob;
    rs.scheme = scheme;
    rs.limiter = lim;
    rs.nx = nx;
    rs.ny = (D == 2) ? ny : 1;
    rs.w = recon::CellField<D>(rs.nx, rs.ny);
    rs.dx = (prob.x1 - prob.x0) / rs.nx;
    rs.dy = (D == 2) ? (prob.y1 - prob.y0) / rs.ny : 1.0;
    if (!(rs.dx > 0.0) || !(rs.dy > 0.0))
        throw ConfigError("domain must have positive extent");
    rs.t = prob.t_begin;
    if (prob.mode == Mode::ns)
        rs.cells.resize(std::size_t(rs.nx) * rs.ny);
    for (int j = 0; j < rs.ny; ++j)
        for (int i = 0; i < rs.nx; ++i) {
            const Primitive<D> pr = prob.init(rs.xc(i), rs.yc(j));
            if (!pr.valid())
                throw NonPhysicalState(
                    "initial data is not a valid state" +
                    cell_tag<D>("cell", i, j, 0, rs.t));
            rs.w(i, j) = kinetic::conserved_from_primitive<D>(pr);
            if (prob.mode == Mode::ns) {
                rs.cell(i, j) = ns::make_moment_state<D>(pr);
                ns::record_history<D>(rs.cell(i, j), rs.t);
            }
        }
    refresh_diagnostics(rs);
    return rs;
}

template <int D>
double cfl_timestep(const RunState<D>& rs, double cfl) {
    if (!(cfl > 0.0) || !(cfl < 1.0))
        throw ConfigError("cfl number must lie in (0, 1)");
    double rho = 0.0;
    for (int j = 0; j < rs.ny; ++j)
        for (int i = 0; i < rs.nx; ++i) {
            Primitive<D> pr;
            if (rs.prob.mode == Mode::ns) {
                pr = rs.cell(i, j).prim;
            } else {
                try {
                    pr = kinetic::primitive_from_conserved_euler<D>(
                        rs.w(i, j));
                } catch (const NonPhysicalState& e) {
                    rethrow(e, cell_tag<D>("cell", i, j, rs.steps, rs.t));
                }
            }
            rho = std::max(rho, kinetic::spectral_radius<D>(pr, 1));
            if constexpr (D == 2)
                rho = std::max(rho, kinetic::spectral_radius<D>(pr, 2));
        }
    const double h = (D == 2) ? std::min(rs.dx, rs.dy) : rs.dx;
    double dt = cfl * h / rho;
    if (rs.t + dt > rs.prob.t_end) dt = rs.prob.t_end - rs.t;
    return dt;
}

template <int D>
void advance(RunState<D>& rs, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("step size must be positive and finite");
    if (rs.prob.mode == Mode::ns) {
        if (rs.cells.empty() || rs.cells[0].levels < 3)
            throw MissingInitialDerivatives(
                "viscous stepping needs the three-level history; run the "
                "startup first");
        ns_step<D>(rs, dt, [&rs](int i, int j) {
            return ns::time_derivatives<D>(rs.cell(i, j));
        });
    } else {
        euler_step<D>(rs, dt);
    }
    rs.t += dt;
    ++rs.steps;
    refresh_diagnostics(rs);
}

template <int D>
void ns_bootstrap(RunState<D>& rs, double cfl) {
    if (rs.prob.mode != Mode::ns)
        throw ConfigError("the startup only applies to viscous runs");
    if (rs.steps != 0 || rs.cells.empty() || rs.cells[0].levels != 1)
        throw ConfigError("the startup must run once, on the initial state");
    if (!rs.prob.init_dt)
        throw MissingInitialDerivatives(
            "problem '" + rs.prob.name +
            "' supplies no initial time derivatives");
    const double dt0 = cfl_timestep(rs, cfl);
    if (!(dt0 > 0.0)) throw ConfigError("no room to step before t_end");

    auto analytic = [](RunState<D>& st) -> DerivProvider<D> {
        return [&st](int i, int j) {
            ns::TimeDerivs<D> td;
            td.prim_dot = st.prob.init_dt(st.xc(i), st.yc(j));
            td.w0_dot = kinetic::mat_vec<D>(
                ns::conserved_jacobian<D>(st.cell(i, j).prim), td.prim_dot);
            return td;
        };
    };

    // both startup sub-steps leave from the initial data; the half step only
    // donates its end state as the middle history level
    RunState<D> half = rs;
    ns_step<D>(half, 0.5 * dt0, analytic(half));
    ns_step<D>(rs, dt0, analytic(rs));
    rs.t += dt0;
    rs.steps = 1;
    for (std::size_t k = 0; k < rs.cells.size(); ++k) {
        auto& st = rs.cells[k];
        const auto& hs = half.cells[k];
        st.t_hist[2] = st.t_hist[1];
        st.prim_hist[2] = st.prim_hist[1];
        st.w0_hist[2] = st.w0_hist[1];
        st.t_hist[1] = hs.t_hist[0];
        st.prim_hist[1] = hs.prim_hist[0];
        st.w0_hist[1] = hs.w0_hist[0];
        st.levels = 3;
    }
    refresh_diagnostics(rs);
}

template <int D>
void run_to_time(RunState<D>& rs, double cfl, double t_stop) {
    const double stop = std::min(t_stop, rs.prob.t_end);
    if (rs.prob.mode == Mode::ns && rs.t < stop && !rs.cells.empty() &&
        rs.cells[0].levels < 3)
        ns_bootstrap(rs, cfl);
    while (rs.t < stop) {
        double dt = cfl_timestep(rs, cfl);
        if (rs.t + dt > stop) dt = stop - rs.t;
        if (!(dt > 0.0)) break;
        advance(rs, dt);
    }
}

// ----------------------------------------------------------------- problems

namespace {

constexpr double pi = std::numbers::pi;

// ordinary velocity of a four-velocity spatial component
double fourv(double w) { return w / std::sqrt(1.0 + w * w); }

ProblemSpec<1> riemann_spec(const std::string& name, const Primitive<1>& L,
                            const Primitive<1>& R) {
    ProblemSpec<1> p;
    p.name = name;
    p.t_end = 0.5;
    p.bc = {Boundary::outflow, Boundary::outflow, Boundary::periodic,
            Boundary::periodic};
    p.default_nx = 400;
    p.default_ny = 1;
    p.init = [L, R](double x, double) { return (x < 0.5) ? L : R; };
    const auto fan = riemann::solve_riemann(L, R);
    p.exact = [fan, L, R](double x, double, double t) {
        if (!(t > 0.0)) return (x < 0.5) ? L : R;
        return fan.sample((x - 0.5) / t);
    };
    return p;
}

ProblemSpec<1> sine_spec() {
    ProblemSpec<1> p;
    p.name = "sine";
    p.t_end = 0.2;
    p.bc = {Boundary::periodic, Boundary::periodic, Boundary::periodic,
            Boundary::periodic};
    p.collision = {1.0, 1.0, 2.0, false, 0.0};
    p.default_nx = 100;
    p.default_ny = 1;
    p.init = [](double x, double) {
        const double n = 1.0 + 0.5 * std::sin(2.0 * pi * x);
        return Primitive<1>{n, {0.2}, 1.0 / n};
    };
    p.exact = [](double x, double, double t) {
        const double n = 1.0 + 0.5 * std::sin(2.0 * pi * (x - 0.2 * t));
        return Primitive<1>{n, {0.2}, 1.0 / n};
    };
    return p;
}

ProblemSpec<1> perturbed_spec() {
    ProblemSpec<1> p;
    p.name = "perturbed";
    p.t_end = 0.5;
    p.bc = {Boundary::outflow, Boundary::outflow, Boundary::periodic,
            Boundary::periodic};
    p.default_nx = 400;
    p.default_ny = 1;
    p.init = [](double x, double) {
        if (x < 0.5) return Primitive<1>{1.0, {0.0}, 1.0};
        const double n = 0.125 - 0.0875 * std::sin(50.0 * (x - 0.5));
        return Primitive<1>{n, {0.0}, 0.1 / n};
    };
    return p;
}

ProblemSpec<1> blast_spec() {
    ProblemSpec<1> p;
    p.name = "blast";
    p.t_end = 0.75;
    p.bc = {Boundary::reflective, Boundary::reflective, Boundary::periodic,
            Boundary::periodic};
    p.default_nx = 700;
    p.default_ny = 1;
    p.init = [](double x, double) {
        if (x < 0.1) return Primitive<1>{1.0, {0.0}, 100.0};
        if (x > 0.9) return Primitive<1>{1.0, {0.0}, 10.0};
        return Primitive<1>{1.0, {0.0}, 0.06};
    };
    return p;
}

ProblemSpec<2> sine2d_spec() {
    ProblemSpec<2> p;
    p.name = "sine2d";
    p.t_end = 0.1;
    p.bc = {Boundary::periodic, Boundary::periodic, Boundary::periodic,
            Boundary::periodic};
    p.collision = {1.0, 1.0, 2.0, false, 0.0};
    p.default_nx = p.default_ny = 100;
    p.init = [](double x, double y) {
        const double n = 1.0 + 0.5 * std::sin(2.0 * pi * (x + y));
        return Primitive<2>{n, {0.2, 0.2}, 1.0 / n};
    };
    p.exact = [](double x, double y, double t) {
        const double n =
            1.0 + 0.5 * std::sin(2.0 * pi * (x + y - 0.4 * t));
        return Primitive<2>{n, {0.2, 0.2}, 1.0 / n};
    };
    return p;
}

ProblemSpec<2> implosion_spec() {
    ProblemSpec<2> p;
    p.name = "implosion";
    p.x1 = p.y1 = 2.0;
    p.t_end = 3.0;
    p.bc = {Boundary::reflective, Boundary::reflective, Boundary::reflective,
            Boundary::reflective};
    p.default_nx = p.default_ny = 400;
    p.init = [](double x, double y) {
        const bool inside =
            std::abs(x - 1.0) <= 0.25 && std::abs(y - 1.0) <= 0.25;
        return inside ? Primitive<2>{4.0, {0.0, 0.0}, 2.5}
                      : Primitive<2>{1.0, {0.0, 0.0}, 1.0};
    };
    return p;
}

ProblemSpec<2> explosion_spec() {
    ProblemSpec<2> p;
    p.name = "explosion";
    p.t_end = 0.2;
    p.bc = {Boundary::outflow, Boundary::outflow, Boundary::outflow,
            Boundary::outflow};
    p.default_nx = p.default_ny = 200;
    p.init = [](double x, double y) {
        const bool inside = std::hypot(x - 0.5, y - 0.5) <= 0.2;
        return inside ? Primitive<2>{2.0, {0.0, 0.0}, 5.0}
                      : Primitive<2>{1.0, {0.0, 0.0}, 0.3};
    };
    return p;
}

ProblemSpec<2> jet_spec() {
    ProblemSpec<2> p;
    p.name = "jet";
    p.x1 = 12.0;
    p.y0 = -3.5;
    p.y1 = 3.5;
    p.t_end = 8.0;
    p.bc = {Boundary::jet_inflow, Boundary::outflow, Boundary::outflow,
            Boundary::outflow};
    p.collision = {1.0, 1.0, 1.0, false, 0.0};
    p.default_nx = 600;
    p.default_ny = 350;
    p.jet_beam = Primitive<2>{0.01, {0.99, 0.0}, 1000.0};
    p.jet_half_width = 0.5;
    p.init = [](double, double) {
        return Primitive<2>{1.0, {0.0, 0.0}, 10.0};
    };
    return p;
}

ProblemSpec<1> boost_spec() {
    ProblemSpec<1> p;
    p.name = "boost";
    p.x0 = -0.5;
    p.x1 = 0.5;
    p.t_begin = 1.0;
    p.t_end = 1.2;
    p.mode = Mode::ns;
    p.bc = {Boundary::exact, Boundary::exact, Boundary::periodic,
            Boundary::periodic};
    p.collision.viscous = true;
    p.collision.mu = 5.0e-4;
    p.default_nx = 40;
    p.default_ny = 1;
    const double mu = p.collision.mu;
    const double c1 = 1.0 - 4.0 * mu / 3.0;  // pressure amplitude at t=1, x=0
    const double c2 = 1.0;                   // density amplitude
    p.exact = [=](double x, double, double t) {
        const double tt = std::sqrt(t * t - x * x);
        const double n = c2 / tt;
        const double pr =
            c1 * std::pow(tt, -4.0 / 3.0) + 4.0 / 3.0 * mu / tt;
        return Primitive<1>{n, {x / t}, pr / n};
    };
    p.exact_derivs = [=](double x, double, double t) {
        const double tt = std::sqrt(t * t - x * x);
        const double tt_x = -x / tt, tt_t = t / tt;
        const double n = c2 / tt;
        const double pr =
            c1 * std::pow(tt, -4.0 / 3.0) + 4.0 / 3.0 * mu / tt;
        const double T = pr / n;
        const double dn = -c2 / (tt * tt);
        const double dp = -4.0 / 3.0 * c1 * std::pow(tt, -7.0 / 3.0) -
                          4.0 / 3.0 * mu / (tt * tt);
        ns::PrimDerivs<1> d;
        d.x = {dn * tt_x, 1.0 / t, (dp * tt_x - T * dn * tt_x) / n};
        d.t = {dn * tt_t, -x / (t * t), (dp * tt_t - T * dn * tt_t) / n};
        return d;
    };
    p.init = [ex = p.exact](double x, double y) { return ex(x, y, 1.0); };
    p.init_dt = [ed = p.exact_derivs](double x, double y) {
        return ed(x, y, 1.0).t;
    };
    return p;
}

ProblemSpec<2> heat_spec() {
    ProblemSpec<2> p;
    p.name = "heat";
    p.t_end = 200.0;
    p.mode = Mode::ns;
    p.bc = {Boundary::periodic, Boundary::periodic, Boundary::isothermal_wall,
            Boundary::isothermal_wall};
    p.collision.viscous = true;
    p.collision.mu = 5.0e-3;
    p.default_nx = 8;
    p.default_ny = 40;
    const double T0 = 0.1, T1 = 1.0002 * 0.1, pres = 0.8;
    p.wall_T = {0.0, 0.0, T0, T1};
    p.init = [=](double, double) {
        const double T = 0.5 * (T0 + T1);
        return Primitive<2>{pres / T, {0.2, 0.0}, T};
    };
    p.init_dt = [](double, double) { return std::array<double, 4>{}; };
    // steady conduction profile between the plates (1/T linear in y)
    p.exact = [=](double, double y, double) {
        const double T = T0 * T1 / (T1 - (T1 - T0) * y);
        return Primitive<2>{pres / T, {0.2, 0.0}, T};
    };
    return p;
}

}  // namespace

AnyProblem problem_registry(const std::string& name) {
    if (name == "sine") return sine_spec();
    if (name == "riemann1")
        return riemann_spec("riemann1", Primitive<1>{1.0, {fourv(1.0)}, 3.0},
                            Primitive<1>{1.0, {fourv(-0.5)}, 2.0});
    if (name == "riemann2")
        return riemann_spec("riemann2", Primitive<1>{5.0, {0.0}, 2.0},
                            Primitive<1>{1.0, {0.0}, 0.5});
    if (name == "riemann3")
        return riemann_spec("riemann3", Primitive<1>{1.0, {fourv(-0.5)}, 2.0},
                            Primitive<1>{1.0, {fourv(0.5)}, 2.0});
    if (name == "perturbed") return perturbed_spec();
    if (name == "blast") return blast_spec();
    if (name == "sine2d") return sine2d_spec();
    if (name == "implosion") return implosion_spec();
    if (name == "explosion") return explosion_spec();
    if (name == "jet") return jet_spec();
    if (name == "boost") return boost_spec();
    if (name == "heat") return heat_spec();
    std::string all;
    for (const auto& nm : problem_names()) {
        if (!all.empty()) all += ", ";
        all += nm;
    }
    throw UnknownProblem("unknown problem '" + name + "'; available: " + all);
}

std::vector<std::string> problem_names() {
    return {"sine",   "riemann1",  "riemann2",  "riemann3",
            "perturbed", "blast",  "sine2d",    "implosion",
            "explosion", "jet",    "boost",     "heat"};
}

#define URBGK_SOLVER_INSTANTIATE(D)                                          \
    template struct Diagnostics<D>;                                          \
    template RunState<D> make_run_state<D>(const ProblemSpec<D>&, Scheme,     \
                                           recon::Limiter, int, int);        \
    template double cfl_timestep<D>(const RunState<D>&, double);             \
    template void apply_boundary<D>(RunState<D>&);                           \
    template void ns_bootstrap<D>(RunState<D>&, double);                     \
    template void advance<D>(RunState<D>&, double);                          \
    template void run_to_time<D>(RunState<D>&, double, double);

URBGK_SOLVER_INSTANTIATE(1)
URBGK_SOLVER_INSTANTIATE(2)

}  // namespace urbgk::solver
