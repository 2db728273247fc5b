#include "urbgk/navier_stokes.hpp"

#include <cmath>

#include "urbgk/kinetic.hpp"
#include "urbgk/quadrature.hpp"

namespace urbgk::ns {

namespace {

constexpr double metric_sign[4] = {1.0, -1.0, -1.0, -1.0};

inline Vec<2> swap12(Vec<2> v) {
    std::swap(v[1], v[2]);
    return v;
}

CEKineticSet<2> rotate(const CEKineticSet<2>& c) {
    return {swap12(c.A), swap12(c.b), swap12(c.a), c.diag};
}

template <int D>
struct StateGeom {
    double U0, U1, U2, T, pref;  // pref = n / (8 pi T^3)
};
template <int D>
StateGeom<D> geom(const Primitive<D>& g) {
    return {g.U0(), g.U(1), D == 2 ? g.U(2) : 0.0, g.T,
            g.n / (8.0 * M_PI * g.T * g.T * g.T)};
}

// |p|-affine split value(p) = c0 + |p| * hat for direction (xi, w2).
struct CoeffParts {
    double c0, hat;
};
template <std::size_t N>
inline CoeffParts affine_parts(const std::array<double, N>& v, double xi,
                               double w2) {
    if constexpr (N == 3)
        return {v[0], v[1] * xi + v[2]};
    else
        return {v[0], v[1] * xi + v[2] * w2 + v[3]};
}

// Deviation contraction (p^0 A + p^1 a + p^2 b + p^3 c) / |p| = L0 + |p| Lh.
inline CoeffParts deviation_parts(const CEKineticSet<1>& c, double xi) {
    const auto A = affine_parts(c.A, xi, 0.0);
    const auto a = affine_parts(c.a, xi, 0.0);
    return {A.c0 + xi * a.c0,
            A.hat + xi * a.hat + c.diag * (1.0 - xi * xi)};
}
inline CoeffParts deviation_parts(const CEKineticSet<2>& c, double xi,
                                  double w2, double w3sq) {
    const auto A = affine_parts(c.A, xi, w2);
    const auto a = affine_parts(c.a, xi, w2);
    const auto b = affine_parts(c.b, xi, w2);
    return {A.c0 + xi * a.c0 + w2 * b.c0,
            A.hat + xi * a.hat + w2 * b.hat + c.diag * w3sq};
}

// Radial integrals R[m] = int |p|^{m+1} g d|p| (per steradian), m = 1..4.
inline void radial_stack(double pref, double T, double Dir, double R[5]) {
    const double base = T / Dir;
    R[1] = pref * 2.0 * base * base * base;
    R[2] = R[1] * 3.0 * base;
    R[3] = R[2] * 4.0 * base;
    R[4] = R[3] * 5.0 * base;
}

// Shared angular sweep for the 1D block fluxes.
std::array<Vec<1>, 2> block_flux(const flux::InterfaceKinetics<1>& K,
                                 const CEKineticSet<1>& cel,
                                 const CEKineticSet<1>& cer) {
    const auto& xg = quad::xi_grid();
    const double tau = K.tau, dt = K.dt;
    const auto s0 = geom(K.g0), sl = geom(K.gl), sr = geom(K.gr);
    std::array<Vec<1>, 2> out{};
    for (int i = 0; i < 32; ++i) {
        const double xi = xg.xi[i];
        const double wgt = 2.0 * M_PI * xg.w[i];
        const bool from_left = xi > 0.0;
        const auto& su = from_left ? sl : sr;
        const auto& ce = from_left ? cel : cer;
        const auto& au = from_left ? K.al : K.ar;

        const double D0 = s0.U0 - xi * s0.U1;
        const double Du = su.U0 - xi * su.U1;
        const auto t0 = flux::time_factors(D0 / tau, dt);
        const auto tu = flux::time_factors(Du / tau, dt);

        // equilibrium part: r0 + M0(p) r2 + A0(p) r3
        const auto a0 = affine_parts(K.a0, xi, 0.0);
        const auto A0 = affine_parts(K.A0, xi, 0.0);
        const double e0 = t0.r0 + xi * a0.c0 * t0.r2 + A0.c0 * t0.r3;
        const double e1 = xi * a0.hat * t0.r2 + A0.hat * t0.r3;

        // upwind part: q0 (1 - tau/D dev(p)) - M(p) q1
        const auto dv = deviation_parts(ce, xi);
        const auto av = affine_parts(au, xi, 0.0);
        const double u0 = tu.q0 * (1.0 - tau / Du * dv.c0) - xi * av.c0 * tu.q1;
        const double u1 = -tu.q0 * tau / Du * dv.hat - xi * av.hat * tu.q1;

        double R0[5], Ru[5];
        radial_stack(s0.pref, s0.T, D0, R0);
        radial_stack(su.pref, su.T, Du, Ru);
        const double dir[3] = {1.0, xi, 1.0};  // Psi direction factors
        const double da[2] = {1.0, xi};        // block direction factors
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 3; ++c) {
                const int m = (c == 0) ? 1 : 2;
                const double f = wgt * xi * da[a] * dir[c];
                out[a][c] += f * (e0 * R0[m] + e1 * R0[m + 1] +
                                  u0 * Ru[m] + u1 * Ru[m + 1]);
            }
    }
    out[1][2] = out[0][1];  // T^{01} flux produced once
    return out;
}

std::array<Vec<2>, 3> block_flux(const flux::InterfaceKinetics<2>& K,
                                 const CEKineticSet<2>& cel,
                                 const CEKineticSet<2>& cer) {
    const auto& xg = quad::xi_grid();
    const auto& pg = quad::phi_grid();
    const double tau = K.tau, dt = K.dt;
    const auto s0 = geom(K.g0), sl = geom(K.gl), sr = geom(K.gr);
    std::array<Vec<2>, 3> out{};
    for (int i = 0; i < 32; ++i) {
        const double xi = xg.xi[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - xi * xi));
        const bool from_left = xi > 0.0;
        const auto& su = from_left ? sl : sr;
        const auto& ce = from_left ? cel : cer;
        const auto& au = from_left ? K.al : K.ar;
        const auto& bu = from_left ? K.bl : K.br;
        for (int j = 0; j < 32; ++j) {
            const double w2 = s * pg.sn[j];
            const double w3sq = s * s * pg.cs[j] * pg.cs[j];
            const double wgt = xg.w[i] * pg.w[j];

            const double D0 = s0.U0 - xi * s0.U1 - w2 * s0.U2;
            const double Du = su.U0 - xi * su.U1 - w2 * su.U2;
            const auto t0 = flux::time_factors(D0 / tau, dt);
            const auto tu = flux::time_factors(Du / tau, dt);

            const auto a0 = affine_parts(K.a0, xi, w2);
            const auto b0 = affine_parts(K.b0, xi, w2);
            const auto A0 = affine_parts(K.A0, xi, w2);
            const double e0 = t0.r0 + (xi * a0.c0 + w2 * b0.c0) * t0.r2 +
                              A0.c0 * t0.r3;
            const double e1 = (xi * a0.hat + w2 * b0.hat) * t0.r2 +
                              A0.hat * t0.r3;

            const auto dv = deviation_parts(ce, xi, w2, w3sq);
            const auto av = affine_parts(au, xi, w2);
            const auto bv = affine_parts(bu, xi, w2);
            const double u0 = tu.q0 * (1.0 - tau / Du * dv.c0) -
                              (xi * av.c0 + w2 * bv.c0) * tu.q1;
            const double u1 = -tu.q0 * tau / Du * dv.hat -
                              (xi * av.hat + w2 * bv.hat) * tu.q1;

            double R0[5], Ru[5];
            radial_stack(s0.pref, s0.T, D0, R0);
            radial_stack(su.pref, su.T, Du, Ru);
            const double dir[4] = {1.0, xi, w2, 1.0};
            const double da[3] = {1.0, xi, w2};
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 4; ++c) {
                    const int m = (c == 0) ? 1 : 2;
                    const double f = wgt * xi * da[a] * dir[c];
                    out[a][c] += f * (e0 * R0[m] + e1 * R0[m + 1] +
                                      u0 * Ru[m] + u1 * Ru[m + 1]);
                }
        }
    }
    out[1][3] = out[0][1];  // overlapping tensor entries produced once
    out[2][3] = out[0][2];
    out[2][1] = out[1][2];
    return out;
}

// Half-space moment blocks of the deviated distribution
// g (1 - tau/D (L0 + |p| Lh)) over the given p^1 half space.
std::array<Vec<1>, 2> deviated_half_blocks(const Primitive<1>& g,
                                           const CEKineticSet<1>& ce,
                                           double tau, bool positive) {
    const auto& xg = quad::xi_grid();
    const auto sg = geom(g);
    std::array<Vec<1>, 2> out{};
    const int lo = positive ? 16 : 0, hi = positive ? 32 : 16;
    for (int i = lo; i < hi; ++i) {
        const double xi = xg.xi[i];
        const double wgt = 2.0 * M_PI * xg.w[i];
        const double Dir = sg.U0 - xi * sg.U1;
        const auto dv = deviation_parts(ce, xi);
        double R[5];
        radial_stack(sg.pref, sg.T, Dir, R);
        const double dir[3] = {1.0, xi, 1.0};
        const double da[2] = {1.0, xi};
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 3; ++c) {
                const int m = (c == 0) ? 1 : 2;
                const double f = wgt * da[a] * dir[c];
                out[a][c] += f * (R[m] - tau / Dir *
                                           (dv.c0 * R[m] + dv.hat * R[m + 1]));
            }
    }
    return out;
}

std::array<Vec<2>, 3> deviated_half_blocks(const Primitive<2>& g,
                                           const CEKineticSet<2>& ce,
                                           double tau, bool positive) {
    const auto& xg = quad::xi_grid();
    const auto& pg = quad::phi_grid();
    const auto sg = geom(g);
    std::array<Vec<2>, 3> out{};
    const int lo = positive ? 16 : 0, hi = positive ? 32 : 16;
    for (int i = lo; i < hi; ++i) {
        const double xi = xg.xi[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - xi * xi));
        for (int j = 0; j < 32; ++j) {
            const double w2 = s * pg.sn[j];
            const double w3sq = s * s * pg.cs[j] * pg.cs[j];
            const double wgt = xg.w[i] * pg.w[j];
            const double Dir = sg.U0 - xi * sg.U1 - w2 * sg.U2;
            const auto dv = deviation_parts(ce, xi, w2, w3sq);
            double R[5];
            radial_stack(sg.pref, sg.T, Dir, R);
            const double dir[4] = {1.0, xi, w2, 1.0};
            const double da[3] = {1.0, xi, w2};
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 4; ++c) {
                    const int m = (c == 0) ? 1 : 2;
                    const double f = wgt * da[a] * dir[c];
                    out[a][c] +=
                        f * (R[m] - tau / Dir *
                                        (dv.c0 * R[m] + dv.hat * R[m + 1]));
                }
        }
    }
    return out;
}

template <int D>
std::array<double, D + 2> primitive_fields(const Primitive<D>& p) {
    std::array<double, D + 2> f{};
    f[0] = p.n;
    for (int i = 0; i < D; ++i) f[1 + i] = p.u[i];
    f[D + 1] = p.T;
    return f;
}

}  // namespace

template <int D>
CEGradients ce_gradients(const Primitive<D>& prim, const PrimDerivs<D>& d) {
    CEGradients g{};
    const double gamma = prim.gamma();
    double U[4] = {gamma, gamma * prim.u[0],
                   D == 2 ? gamma * prim.u[1] : 0.0, 0.0};

    // lab-frame partials of U^a, T, p for each used coordinate
    const int nb = 1 + D;  // t, x[, y]
    double dU[3][4]{}, dT[3]{}, dp[3]{};
    for (int b = 0; b < nb; ++b) {
        const auto& row = b == 0 ? d.t : (b == 1 ? d.x : d.y);
        double udu = prim.u[0] * row[1];
        if constexpr (D == 2) udu += prim.u[1] * row[2];
        const double dgamma = gamma * gamma * gamma * udu;
        dU[b][0] = dgamma;
        dU[b][1] = gamma * row[1] + prim.u[0] * dgamma;
        if constexpr (D == 2) dU[b][2] = gamma * row[2] + prim.u[1] * dgamma;
        dT[b] = row[D + 1];
        dp[b] = prim.T * row[0] + prim.n * row[D + 1];
    }

    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            g.delta[a][b] = (a == b ? metric_sign[a] : 0.0) - U[a] * U[b];

    const double hent = prim.enthalpy();
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < nb; ++b) {
            g.grad_T[a] += g.delta[a][b] * dT[b];
            g.grad_p[a] += g.delta[a][b] * dp[b];
        }
        g.q[a] = g.grad_T[a] - prim.T / (prim.n * hent) * g.grad_p[a];
    }

    // B^{ab} = grad^a U^b, then the symmetric trace-free double projection
    double B[4][4]{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int k = 0; k < nb; ++k) B[a][b] += g.delta[a][k] * dU[k][b];

    double mix[4][4];  // Delta^a_b
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) mix[a][b] = g.delta[a][b] * metric_sign[b];

    double trace = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            trace += metric_sign[a] * metric_sign[b] * g.delta[a][b] * B[a][b];

    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double sym = 0.0;
            for (int c = 0; c < 4; ++c)
                for (int e = 0; e < 4; ++e)
                    sym += 0.5 * (mix[a][c] * mix[b][e] +
                                  mix[a][e] * mix[b][c]) *
                           B[c][e];
            g.shear[a][b] = sym - g.delta[a][b] * trace / 3.0;
        }
    return g;
}

template <int D>
CECoefficients chapman_enskog_coefficients(const Primitive<D>& prim,
                                           const CEGradients& g) {
    const double gamma = prim.gamma();
    const double U[4] = {gamma, gamma * prim.u[0],
                         D == 2 ? gamma * prim.u[1] : 0.0, 0.0};
    const double T = prim.T, h = prim.enthalpy();

    double S_lo[4][4], q_lo[4], U_lo[4];
    for (int a = 0; a < 4; ++a) {
        q_lo[a] = metric_sign[a] * g.q[a];
        U_lo[a] = metric_sign[a] * U[a];
        for (int b = 0; b < 4; ++b)
            S_lo[a][b] = metric_sign[a] * metric_sign[b] * g.shear[a][b];
    }

    CECoefficients c{};
    double* rows[4] = {c.A, c.a, c.b, c.c};
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu)
            rows[mu][nu] = -S_lo[mu][nu] / T + q_lo[mu] * U_lo[nu] / (T * T);
        rows[mu][4] = -h / (T * T) * q_lo[mu];
    }
    return c;
}

template <int D>
CEKineticSet<D> ce_kinetic_set(const CECoefficients& c) {
    CEKineticSet<D> k{};
    if constexpr (D == 1) {
        k.A = {c.A[4], c.A[1], c.A[0]};
        k.a = {c.a[4], c.a[1], c.a[0]};
        // azimuthal average of b w2^2 + c w3^2 over the symmetric axes
        k.diag = 0.5 * (c.b[2] + c.c[3]);
    } else {
        k.A = {c.A[4], c.A[1], c.A[2], c.A[0]};
        k.a = {c.a[4], c.a[1], c.a[2], c.a[0]};
        k.b = {c.b[4], c.b[1], c.b[2], c.b[0]};
        k.diag = c.c[3];
    }
    return k;
}

double extrapolate_time_derivative(double t2, double h2, double t1, double h1,
                                   double t0, double h0) {
    const double d1 = t1 - t0, d2 = t2 - t0;
    if (d1 == 0.0 || d2 == 0.0 || d1 == d2)
        throw DegenerateStencil("time extrapolation needs distinct levels");
    const double num = h2 * d1 * d1 - h1 * d2 * d2 - h0 * (d1 * d1 - d2 * d2);
    const double den = d2 * d1 * d1 - d1 * d2 * d2;
    return num / den;
}

template <int D>
MomentMatrix<D> conserved_jacobian(const Primitive<D>& prim) {
    // W = (n U^0, n h U^0 U^i, n h U^0 U^0 - p), differentiated in
    // (n, u.., T); h = 4T, p = n T
    const double gamma = prim.gamma();
    const double g3 = gamma * gamma * gamma;
    const double n = prim.n, T = prim.T, h = prim.enthalpy();
    double U[3] = {gamma, gamma * prim.u[0], D == 2 ? gamma * prim.u[1] : 0.0};

    MomentMatrix<D> J{};
    // dU^a/du_i
    double dU[2][3]{};
    for (int i = 0; i < D; ++i) {
        const double dg = g3 * prim.u[i];
        dU[i][0] = dg;
        dU[i][1] = prim.u[0] * dg;
        dU[i][2] = D == 2 ? prim.u[1] * dg : 0.0;
        dU[i][1 + i] += gamma;
    }
    // rows: W0 = n U0; Wi = n h U0 Ui; We = n h U0^2 - nT
    J[0][0] = U[0];
    J[0][D + 1] = 0.0;
    for (int i = 0; i < D; ++i) J[0][1 + i] = n * dU[i][0];
    for (int r = 0; r < D; ++r) {
        J[1 + r][0] = h * U[0] * U[1 + r];
        J[1 + r][D + 1] = 4.0 * n * U[0] * U[1 + r];
        for (int i = 0; i < D; ++i)
            J[1 + r][1 + i] =
                n * h * (dU[i][0] * U[1 + r] + U[0] * dU[i][1 + r]);
    }
    J[D + 1][0] = h * U[0] * U[0] - T;
    J[D + 1][D + 1] = 4.0 * n * U[0] * U[0] - n;
    for (int i = 0; i < D; ++i)
        J[D + 1][1 + i] = 2.0 * n * h * U[0] * dU[i][0];
    return J;
}

template <int D>
Primitive<D> ns_interface_equilibrium(const Primitive<D>& left,
                                      const Primitive<D>& right,
                                      const CEKineticSet<D>& ce_left,
                                      const CEKineticSet<D>& ce_right,
                                      double tau, int axis) {
    if constexpr (D == 2) {
        if (axis == 2) {
            Primitive<2> l = left, r = right;
            std::swap(l.u[0], l.u[1]);
            std::swap(r.u[0], r.u[1]);
            auto mid = ns_interface_equilibrium<2>(l, r, rotate(ce_left),
                                                   rotate(ce_right), tau, 1);
            std::swap(mid.u[0], mid.u[1]);
            return mid;
        }
    }
    auto blocks = deviated_half_blocks(left, ce_left, tau, true);
    const auto rb = deviated_half_blocks(right, ce_right, tau, false);
    for (int a = 0; a <= D; ++a) blocks[a] = blocks[a] + rb[a];
    return kinetic::landau_recovery<D>(kinetic::tensor_from_blocks<D>(blocks));
}

template <int D>
NSInterface<D> ns_assemble_interface(const recon::InterfaceTrace<D>& trace,
                                     const Vec<D>& w0n, const Vec<D>& w0t,
                                     const Vec<D>& w0_dot,
                                     const CEKineticSet<D>& ce_left,
                                     const CEKineticSet<D>& ce_right, int axis,
                                     double tau, double dt,
                                     const Primitive<D>* g0) {
    if (!(tau > 0.0) || !(dt > 0.0))
        throw ConfigError("ns_assemble_interface: tau and dt must be positive");
    NSInterface<D> f;
    f.axis = axis;
    f.kin.axis = axis;
    f.kin.tau = tau;
    f.kin.dt = dt;
    f.cel = ce_left;
    f.cer = ce_right;

    Vec<D> wl = trace.wl, wr = trace.wr;
    Vec<D> nl = trace.wx_l, nr = trace.wx_r;  // normal-direction slopes
    Vec<D> tl{}, tr{}, n0 = w0n, t0 = w0t, wd = w0_dot;
    if constexpr (D == 2) {
        tl = trace.wy_l;
        tr = trace.wy_r;
        if (axis == 2) {
            wl = swap12(wl);
            wr = swap12(wr);
            nl = swap12(trace.wy_l);
            nr = swap12(trace.wy_r);
            tl = swap12(trace.wx_l);
            tr = swap12(trace.wx_r);
            n0 = swap12(w0n);
            t0 = swap12(w0t);
            wd = swap12(w0_dot);
            f.cel = rotate(ce_left);
            f.cer = rotate(ce_right);
        }
    }
    f.kin.gl = kinetic::primitive_from_conserved_euler<D>(wl);
    f.kin.gr = kinetic::primitive_from_conserved_euler<D>(wr);
    if (g0) {
        f.kin.g0 = *g0;
        if constexpr (D == 2)
            if (axis == 2) std::swap(f.kin.g0.u[0], f.kin.g0.u[1]);
    } else {
        f.kin.g0 = ns_interface_equilibrium<D>(f.kin.gl, f.kin.gr, f.cel,
                                               f.cer, tau, 1);
    }

    flux::slope_coefficients<D>(f.kin.gl, nl, tl, f.kin.al, f.kin.bl, f.kin.Al);
    flux::slope_coefficients<D>(f.kin.gr, nr, tr, f.kin.ar, f.kin.br, f.kin.Ar);
    flux::slope_coefficients<D>(f.kin.g0, n0, t0, f.kin.a0, f.kin.b0, f.kin.A0);
    // the equilibrium time coefficient comes from the moment time derivative
    f.kin.A0 =
        kinetic::solve_moment_system<D>(kinetic::moment_matrix<D>(f.kin.g0, 0), wd);
    return f;
}

template <int D>
std::array<Vec<D>, D + 1> ns_interface_flux(const NSInterface<D>& iface) {
    auto blocks = block_flux(iface.kin, iface.cel, iface.cer);
    if constexpr (D == 2) {
        if (iface.axis == 2) {
            // map the rotated-frame blocks back: swap block row 1 <-> 2 and
            // components 1 <-> 2 inside every block
            std::swap(blocks[1], blocks[2]);
            for (auto& b : blocks) b = swap12(b);
        }
    }
    return blocks;
}

template <int D>
std::array<Vec<D>, D> ns_source(const Primitive<D>& g0, const Vec<D>& a0,
                                const Vec<D>& b0, const Vec<D>& A0,
                                const CEKineticSet<D>& ce0, double tau,
                                double dt) {
    if (!(tau > 0.0) || !(dt > 0.0))
        throw ConfigError("ns_source: tau and dt must be positive");
    const auto sg = geom(g0);
    const auto& xg = quad::xi_grid();
    std::array<Vec<D>, D> out{};
    if constexpr (D == 1) {
        (void)b0;
        for (int i = 0; i < 32; ++i) {
            const double xi = xg.xi[i];
            const double wgt = 2.0 * M_PI * xg.w[i];
            const double Dir = sg.U0 - xi * sg.U1;
            const auto tf = flux::time_factors(Dir / tau, dt);
            const auto dv = deviation_parts(ce0, xi);
            const auto av = affine_parts(a0, xi, 0.0);
            const auto Av = affine_parts(A0, xi, 0.0);
            const double k0 = dv.c0 * tf.q0 + (Av.c0 + xi * av.c0) * tf.r0;
            const double k1 = dv.hat * tf.q0 + (Av.hat + xi * av.hat) * tf.r0;
            double R[5];
            radial_stack(sg.pref, sg.T, Dir, R);
            const double dir[3] = {1.0, xi, 1.0};
            for (int c = 0; c < 2; ++c) {
                const int m = c == 0 ? 1 : 2;
                out[0][c] += wgt * xi * dir[c] * (k0 * R[m] + k1 * R[m + 1]);
            }
        }
        out[0][2] = 0.0;  // energy-slot source vanishes by moment matching
    } else {
        const auto& pg = quad::phi_grid();
        for (int i = 0; i < 32; ++i) {
            const double xi = xg.xi[i];
            const double s = std::sqrt(std::max(0.0, 1.0 - xi * xi));
            for (int j = 0; j < 32; ++j) {
                const double w2 = s * pg.sn[j];
                const double w3sq = s * s * pg.cs[j] * pg.cs[j];
                const double wgt = xg.w[i] * pg.w[j];
                const double Dir = sg.U0 - xi * sg.U1 - w2 * sg.U2;
                const auto tf = flux::time_factors(Dir / tau, dt);
                const auto dv = deviation_parts(ce0, xi, w2, w3sq);
                const auto av = affine_parts(a0, xi, w2);
                const auto bv = affine_parts(b0, xi, w2);
                const auto Av = affine_parts(A0, xi, w2);
                const double k0 = dv.c0 * tf.q0 +
                                  (Av.c0 + xi * av.c0 + w2 * bv.c0) * tf.r0;
                const double k1 = dv.hat * tf.q0 +
                                  (Av.hat + xi * av.hat + w2 * bv.hat) * tf.r0;
                double R[5];
                radial_stack(sg.pref, sg.T, Dir, R);
                const double dir[4] = {1.0, xi, w2, 1.0};
                const double dk[2] = {xi, w2};
                for (int k = 0; k < 2; ++k)
                    for (int c = 0; c < 3; ++c) {
                        const int m = c == 0 ? 1 : 2;
                        out[k][c] += wgt * dk[k] * dir[c] *
                                     (k0 * R[m] + k1 * R[m + 1]);
                    }
            }
        }
        out[0][3] = out[1][3] = 0.0;  // moment matching kills the energy slot
        out[1][1] = out[0][2];        // shared T^{12} source produced once
    }
    return out;
}

template <int D>
std::array<Vec<D>, D + 1> equilibrium_blocks(const Primitive<D>& prim) {
    // N^a = n U^a, T^{ab} = n h U^a U^b - p g^{ab}, packed per weight block
    const double gamma = prim.gamma();
    const double U[3] = {gamma, gamma * prim.u[0],
                         D == 2 ? gamma * prim.u[1] : 0.0};
    const double nh = prim.n * prim.enthalpy(), p = prim.pressure();
    std::array<Vec<D>, D + 1> blocks{};
    for (int a = 0; a <= D; ++a) {
        blocks[a][0] = prim.n * U[a];
        for (int c = 1; c <= D; ++c)
            blocks[a][c] = nh * U[c] * U[a] + (a == c ? p : 0.0);
        blocks[a][D + 1] = nh * U[0] * U[a] - (a == 0 ? p : 0.0);
    }
    return blocks;
}

template <int D>
MomentState<D> make_moment_state(const Primitive<D>& prim) {
    MomentState<D> st;
    st.blocks = equilibrium_blocks(prim);
    st.prim = prim;
    return st;
}

template <int D>
void record_history(MomentState<D>& st, double t) {
    for (int l = 2; l > 0; --l) {
        st.t_hist[l] = st.t_hist[l - 1];
        st.prim_hist[l] = st.prim_hist[l - 1];
        st.w0_hist[l] = st.w0_hist[l - 1];
    }
    st.t_hist[0] = t;
    st.prim_hist[0] = primitive_fields(st.prim);
    st.w0_hist[0] = st.blocks[0];
    if (st.levels < 3) ++st.levels;
}

template <int D>
TimeDerivs<D> time_derivatives(const MomentState<D>& st) {
    if (st.levels < 3)
        throw MissingInitialDerivatives(
            "time derivatives need three recorded levels");
    TimeDerivs<D> d;
    for (int c = 0; c < D + 2; ++c) {
        d.prim_dot[c] = extrapolate_time_derivative(
            st.t_hist[2], st.prim_hist[2][c], st.t_hist[1], st.prim_hist[1][c],
            st.t_hist[0], st.prim_hist[0][c]);
        d.w0_dot[c] = extrapolate_time_derivative(
            st.t_hist[2], st.w0_hist[2][c], st.t_hist[1], st.w0_hist[1][c],
            st.t_hist[0], st.w0_hist[0][c]);
    }
    return d;
}

template <int D>
void ns_apply_update(MomentState<D>& st,
                     const std::array<Vec<D>, D + 1>& dflux,
                     const std::array<Vec<D>, D>& src) {
    for (int a = 0; a <= D; ++a) {
        st.blocks[a] = st.blocks[a] - dflux[a];
        if (a >= 1) st.blocks[a] = st.blocks[a] + src[a - 1];
    }
    st.prim =
        kinetic::landau_recovery<D>(kinetic::tensor_from_blocks<D>(st.blocks));
}

#define URBGK_NS_INSTANTIATE(D)                                               \
    template CEGradients ce_gradients<D>(const Primitive<D>&,                 \
                                         const PrimDerivs<D>&);               \
    template CECoefficients chapman_enskog_coefficients<D>(                   \
        const Primitive<D>&, const CEGradients&);                             \
    template CEKineticSet<D> ce_kinetic_set<D>(const CECoefficients&);        \
    template MomentMatrix<D> conserved_jacobian<D>(const Primitive<D>&);      \
    template Primitive<D> ns_interface_equilibrium<D>(                        \
        const Primitive<D>&, const Primitive<D>&, const CEKineticSet<D>&,     \
        const CEKineticSet<D>&, double, int);                                 \
    template NSInterface<D> ns_assemble_interface<D>(                         \
        const recon::InterfaceTrace<D>&, const Vec<D>&, const Vec<D>&,        \
        const Vec<D>&, const CEKineticSet<D>&, const CEKineticSet<D>&, int,   \
        double, double, const Primitive<D>*);                                 \
    template std::array<Vec<D>, D + 1> ns_interface_flux<D>(                  \
        const NSInterface<D>&);                                               \
    template std::array<Vec<D>, D> ns_source<D>(                              \
        const Primitive<D>&, const Vec<D>&, const Vec<D>&, const Vec<D>&,     \
        const CEKineticSet<D>&, double, double);                              \
    template std::array<Vec<D>, D + 1> equilibrium_blocks<D>(                 \
        const Primitive<D>&);                                                 \
    template MomentState<D> make_moment_state<D>(const Primitive<D>&);        \
    template void record_history<D>(MomentState<D>&, double);                 \
    template TimeDerivs<D> time_derivatives<D>(const MomentState<D>&);        \
    template void ns_apply_update<D>(MomentState<D>&,                         \
                                     const std::array<Vec<D>, D + 1>&,        \
                                     const std::array<Vec<D>, D>&);

URBGK_NS_INSTANTIATE(1)
URBGK_NS_INSTANTIATE(2)

}  // namespace urbgk::ns
