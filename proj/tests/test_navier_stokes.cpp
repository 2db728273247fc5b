#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "urbgk/bgk_flux.hpp"
#include "urbgk/kinetic.hpp"
#include "urbgk/navier_stokes.hpp"
#include "urbgk/quadrature.hpp"

using namespace urbgk;
using namespace urbgk::ns;

namespace {

template <int D>
Primitive<D> make_prim(double n, std::array<double, D> u, double T) {
    Primitive<D> p;
    p.n = n;
    p.u = u;
    p.T = T;
    return p;
}

template <int D>
Vec<D> random_vec(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec<D> v;
    for (auto& x : v) x = scale * uni(rng);
    return v;
}

double rel_gap(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Per-steradian radial moment of the Juttner weight: int |p|^{m+1} g d|p|
// with direction factor Dv = U.p / |p|.
double radial(double n, double T, double Dv, int m) {
    double fact = 1.0;
    for (int k = 2; k <= m + 1; ++k) fact *= k;
    return n / (8.0 * M_PI * T * T * T) * fact * std::pow(T / Dv, m + 2);
}

// Composite Simpson sweep over the momentum sphere; f(xi, phi, weight)
// accumulates its own integrands.
template <typename F>
void simpson_sphere(int nx, int np, F&& f) {
    auto sw = [](int i, int n) {
        return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    };
    const double hx = 2.0 / nx, hp = 2.0 * M_PI / np;
    for (int i = 0; i <= nx; ++i) {
        const double xi = -1.0 + hx * i;
        for (int j = 0; j <= np; ++j)
            f(xi, hp * j, sw(i, nx) * sw(j, np) * hx * hp / 9.0);
    }
}

// Raw deviation density per |p|: sum_mu d_mu (row_mu . p + row_mu[4]) with
// d = (1, xi, w2, w3).
double raw_value(const CECoefficients& c, double pmag, const double d[4]) {
    const double* rows[4] = {c.A, c.a, c.b, c.c};
    double v = 0.0;
    for (int mu = 0; mu < 4; ++mu) {
        double inner = rows[mu][4];
        for (int nu = 0; nu < 4; ++nu) inner += rows[mu][nu] * pmag * d[nu];
        v += d[mu] * inner;
    }
    return v;
}

// Folded deviation density per |p| from the kinetic weight slots.
template <int D>
double slot_value(const CEKineticSet<D>& k, double pmag, double xi, double w2,
                  double w3) {
    auto affine = [&](const Vec<D>& v) {
        if constexpr (D == 1)
            return v[0] + pmag * (v[1] * xi + v[2]);
        else
            return v[0] + pmag * (v[1] * xi + v[2] * w2 + v[3]);
    };
    double val = affine(k.A) + xi * affine(k.a);
    if constexpr (D == 2) val += w2 * affine(k.b) + k.diag * pmag * w3 * w3;
    if constexpr (D == 1) val += k.diag * pmag * (1.0 - xi * xi);
    return val;
}

template <int D>
PrimDerivs<D> random_derivs(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    PrimDerivs<D> d;
    for (auto& x : d.t) x = scale * uni(rng);
    for (auto& x : d.x) x = scale * uni(rng);
    for (auto& x : d.y) x = scale * uni(rng);
    return d;
}

std::array<double, 4> four_velocity_2(const Primitive<2>& p) {
    const double g = p.gamma();
    return {g, g * p.u[0], g * p.u[1], 0.0};
}

constexpr double sgn4[4] = {1.0, -1.0, -1.0, -1.0};

}  // namespace

TEST_CASE("extrapolated time derivative: hand values and quadratic exactness") {
    // linear history h = t sampled at t = 1, 0.5, 0 (newest last)
    CHECK(extrapolate_time_derivative(1.0, 1.0, 0.5, 0.5, 0.0, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-13));
    // h = t^2 at t = 0, 0.4, 1: derivative 2 at the newest level
    CHECK(extrapolate_time_derivative(0.0, 0.0, 0.4, 0.16, 1.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-13));

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int it = 0; it < 50; ++it) {
        const double a = uni(rng), b = uni(rng), c = uni(rng);
        const double t0 = uni(rng);
        const double t1 = t0 + 0.1 + 0.4 * std::abs(uni(rng));
        const double t2 = t1 + 0.1 + 0.4 * std::abs(uni(rng));
        auto h = [&](double t) { return a + b * t + c * t * t; };
        const double got =
            extrapolate_time_derivative(t2, h(t2), t1, h(t1), t0, h(t0));
        CHECK(rel_gap(got, b + 2.0 * c * t0) < 1e-11);
    }

    CHECK_THROWS_AS(extrapolate_time_derivative(1.0, 0.0, 1.0, 0.0, 0.0, 0.0),
                    DegenerateStencil);
    CHECK_THROWS_AS(extrapolate_time_derivative(1.0, 0.0, 0.5, 0.0, 0.5, 0.0),
                    DegenerateStencil);
    CHECK_THROWS_AS(extrapolate_time_derivative(0.5, 0.0, 1.0, 0.0, 0.5, 0.0),
                    DegenerateStencil);
}

TEST_CASE("conserved jacobian matches central differences") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto check = [&]<int D>(const Primitive<D>& prim) {
        const auto J = conserved_jacobian<D>(prim);
        const double h = 1e-6;
        for (int c = 0; c < D + 2; ++c) {
            auto lo = prim, hi = prim;
            if (c == 0) {
                lo.n -= h;
                hi.n += h;
            } else if (c == D + 1) {
                lo.T -= h;
                hi.T += h;
            } else {
                lo.u[c - 1] -= h;
                hi.u[c - 1] += h;
            }
            const auto wlo = equilibrium_blocks<D>(lo)[0];
            const auto whi = equilibrium_blocks<D>(hi)[0];
            for (int r = 0; r < D + 2; ++r) {
                const double fd = (whi[r] - wlo[r]) / (2.0 * h);
                CHECK(rel_gap(J[r][c], fd) < 1e-7);
            }
        }
    };
    for (int it = 0; it < 10; ++it) {
        check(make_prim<1>(0.5 + std::abs(uni(rng)), {0.6 * uni(rng)},
                           0.4 + std::abs(uni(rng))));
        check(make_prim<2>(0.5 + std::abs(uni(rng)),
                           {0.5 * uni(rng), 0.5 * uni(rng)},
                           0.4 + std::abs(uni(rng))));
    }
}

TEST_CASE("gradient package: projector, heat vector and shear invariants") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int it = 0; it < 30; ++it) {
        const auto prim = make_prim<2>(0.5 + std::abs(uni(rng)),
                                       {0.55 * uni(rng), 0.55 * uni(rng)},
                                       0.4 + std::abs(uni(rng)));
        const auto d = random_derivs<2>(rng, 0.5);
        const auto g = ce_gradients<2>(prim, d);
        const auto U = four_velocity_2(prim);

        double scale = 1e-30;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                scale = std::max(scale, std::abs(g.shear[a][b]));

        for (int a = 0; a < 4; ++a) {
            double dU = 0.0, sU = 0.0;
            for (int b = 0; b < 4; ++b) {
                dU += g.delta[a][b] * sgn4[b] * U[b];
                sU += g.shear[a][b] * sgn4[b] * U[b];
            }
            CHECK(std::abs(dU) < 1e-12 * (1.0 + std::abs(U[a])));
            CHECK(std::abs(sU) < 1e-10 * (scale + 1.0));
        }
        // orthogonality of the projected gradients to U
        double qU = 0.0, tU = 0.0, trace = 0.0;
        for (int a = 0; a < 4; ++a) {
            qU += sgn4[a] * g.q[a] * U[a];
            tU += sgn4[a] * g.grad_T[a] * U[a];
            trace += sgn4[a] * g.shear[a][a];
        }
        CHECK(std::abs(qU) < 1e-11 * (1.0 + std::abs(g.q[1])));
        CHECK(std::abs(tU) < 1e-11 * (1.0 + std::abs(g.grad_T[1])));
        CHECK(std::abs(trace) < 1e-10 * (scale + 1.0));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                CHECK(std::abs(g.shear[a][b] - g.shear[b][a]) < 1e-12 * (scale + 1.0));
    }
}

TEST_CASE("deviation coefficients conserve every collision moment") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    // zero gradients produce a vanishing deviation
    const auto rest = make_prim<2>(1.2, {0.3, -0.2}, 0.8);
    const auto z = chapman_enskog_coefficients<2>(rest, ce_gradients<2>(rest, {}));
    for (int j = 0; j < 5; ++j) {
        CHECK(z.A[j] == 0.0);
        CHECK(z.a[j] == 0.0);
        CHECK(z.b[j] == 0.0);
        CHECK(z.c[j] == 0.0);
    }

    // the deviation carries no collision-invariant content:
    // int Psi (U.p) dev g dXi = 0 for every weight, by an independent
    // angular Simpson rule with analytic radial moments
    for (int it = 0; it < 3; ++it) {
        const auto prim = make_prim<2>(0.6 + std::abs(uni(rng)),
                                       {0.4 * uni(rng), 0.4 * uni(rng)},
                                       0.5 + std::abs(uni(rng)));
        const auto c = chapman_enskog_coefficients<2>(
            prim, ce_gradients<2>(prim, random_derivs<2>(rng, 0.6)));
        const double U0 = prim.U0(), U1 = prim.U(1), U2 = prim.U(2);
        double mom[4] = {}, l1[4] = {};
        simpson_sphere(2000, 2000, [&](double xi, double phi, double w) {
            const double s = std::sqrt(std::max(0.0, 1.0 - xi * xi));
            const double w2 = s * std::sin(phi), w3 = s * std::cos(phi);
            const double Dv = U0 - xi * U1 - w2 * U2;
            const double d[4] = {1.0, xi, w2, w3};
            // split the deviation into its |p|-constant and |p|-linear parts
            const double L = raw_value(c, 0.0, d);
            const double Q = raw_value(c, 1.0, d) - L;
            const double dir[4] = {1.0, xi, w2, 1.0};
            for (int k = 0; k < 4; ++k) {
                // the U.p collision weight raises every radial moment by one
                const int e = (k == 0) ? 1 : 2;
                const double r0 = radial(prim.n, prim.T, Dv, e);
                const double r1 = radial(prim.n, prim.T, Dv, e + 1);
                const double term = w * dir[k] * (L * r0 + Q * r1);
                mom[k] += term;
                l1[k] += std::abs(term);
            }
        });
        for (int k = 0; k < 4; ++k) CHECK(std::abs(mom[k]) < 5e-9 * l1[k]);
    }
}

TEST_CASE("deviation moments reproduce the transport closures") {
    // pure temperature gradient at rest, with the density gradient chosen to
    // cancel the pressure gradient
    const double n = 1.3, T = 0.7, G = 0.23, tau = 0.08;
    auto prim = make_prim<1>(n, {0.0}, T);
    PrimDerivs<1> d1{};
    d1.x = {-n * G / T, 0.0, G};
    const auto k1 =
        ce_kinetic_set<1>(chapman_enskog_coefficients<1>(prim, ce_gradients<1>(prim, d1)));

    double dN1 = 0.0, dT01 = 0.0;
    {
        auto sw = [](int i, int np) {
            return (i == 0 || i == np) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        };
        const int np = 4000;
        const double h = 2.0 / np;
        for (int i = 0; i <= np; ++i) {
            const double xi = -1.0 + h * i;
            const double w = 2.0 * M_PI * sw(i, np) * h / 3.0;
            const double L = slot_value<1>(k1, 0.0, xi, 0.0, 0.0);
            const double Q = slot_value<1>(k1, 1.0, xi, 0.0, 0.0) - L;
            // rest state: U.p = |p|, so the deviation weight is tau (L + Q|p|)
            dN1 += w * xi * (-tau) * (L * radial(n, T, 1.0, 1) + Q * radial(n, T, 1.0, 2));
            dT01 += w * xi * (-tau) * (L * radial(n, T, 1.0, 2) + Q * radial(n, T, 1.0, 3));
        }
    }
    CHECK(rel_gap(dN1, n * tau * G / (3.0 * T)) < 1e-9);
    // no energy flux relative to the flow frame
    CHECK(std::abs(dT01) < 1e-10 * n * tau * std::abs(G) * T);

    // pure transverse shear du1/dy = S at rest
    const double S = 0.31;
    auto prim2 = make_prim<2>(n, {0.0, 0.0}, T);
    PrimDerivs<2> d2{};
    d2.y = {0.0, S, 0.0, 0.0};
    const auto k2 = ce_kinetic_set<2>(
        chapman_enskog_coefficients<2>(prim2, ce_gradients<2>(prim2, d2)));

    double dT12 = 0.0, dN1s = 0.0, dN2s = 0.0;
    simpson_sphere(800, 800, [&](double xi, double phi, double w) {
        const double s = std::sqrt(std::max(0.0, 1.0 - xi * xi));
        const double w2 = s * std::sin(phi), w3 = s * std::cos(phi);
        const double L = slot_value<2>(k2, 0.0, xi, w2, w3);
        const double Q = slot_value<2>(k2, 1.0, xi, w2, w3) - L;
        dT12 += w * xi * w2 * (-tau) *
                (L * radial(n, T, 1.0, 2) + Q * radial(n, T, 1.0, 3));
        dN1s += w * xi * (-tau) *
                (L * radial(n, T, 1.0, 1) + Q * radial(n, T, 1.0, 2));
        dN2s += w * w2 * (-tau) *
                (L * radial(n, T, 1.0, 1) + Q * radial(n, T, 1.0, 2));
    });
    const double p = n * T;
    CHECK(rel_gap(dT12, -0.8 * p * tau * S) < 1e-9);
    CHECK(std::abs(dN1s) < 1e-10 * p * tau * S);
    CHECK(std::abs(dN2s) < 1e-10 * p * tau * S);
}

TEST_CASE("kinetic weight folding preserves the azimuthal average") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const auto& pg = quad::phi_grid();

    auto phi_avg_gap = [&]<int D>(const CECoefficients& c,
                                  const CEKineticSet<D>& kset) {
        double worst = 0.0;
        for (double xi : {-0.9, -0.35, 0.0, 0.2, 0.77}) {
            const double s = std::sqrt(1.0 - xi * xi);
            for (double pm : {0.0, 0.4, 1.7, 6.0}) {
                double raw = 0.0, slot = 0.0, wsum = 0.0;
                for (int j = 0; j < 32; ++j) {
                    const double w2 = s * pg.sn[j], w3 = s * pg.cs[j];
                    const double d[4] = {1.0, xi, w2, w3};
                    raw += pg.w[j] * raw_value(c, pm, d);
                    slot += pg.w[j] * slot_value<D>(kset, pm, xi, w2, w3);
                    wsum += pg.w[j];
                }
                worst = std::max(worst, std::abs(raw - slot) / wsum);
            }
        }
        return worst;
    };

    for (int it = 0; it < 8; ++it) {
        // synthetic rows exercise every discarded direction
        CECoefficients c;
        for (int j = 0; j < 5; ++j) {
            c.A[j] = uni(rng);
            c.a[j] = uni(rng);
            c.b[j] = uni(rng);
            c.c[j] = uni(rng);
        }
        CHECK(phi_avg_gap(c, ce_kinetic_set<2>(c)) < 1e-12);
        CHECK(phi_avg_gap(c, ce_kinetic_set<1>(c)) < 1e-12);
    }

    // rows produced by an actual gradient set behave the same way
    const auto prim = make_prim<2>(0.9, {0.25, -0.4}, 1.1);
    const auto c2 = chapman_enskog_coefficients<2>(
        prim, ce_gradients<2>(prim, random_derivs<2>(rng, 0.7)));
    CHECK(phi_avg_gap(c2, ce_kinetic_set<2>(c2)) < 1e-12);

    // a one-dimensional flow keeps the two transverse axes interchangeable
    const auto prim1 = make_prim<1>(1.2, {0.35}, 0.6);
    const auto c1 = chapman_enskog_coefficients<1>(
        prim1, ce_gradients<1>(prim1, random_derivs<1>(rng, 0.7)));
    CHECK(rel_gap(c1.b[2], c1.c[3]) < 1e-13);
    CHECK(phi_avg_gap(c1, ce_kinetic_set<1>(c1)) < 1e-12);
}

namespace {

// Uniform-state interface with zero slopes and deviations.
template <int D>
NSInterface<D> uniform_interface(const Primitive<D>& prim, double tau,
                                 double dt) {
    recon::InterfaceTrace<D> tr;
    const auto w = equilibrium_blocks<D>(prim)[0];
    tr.wl = tr.wr = w;
    tr.wx_l = tr.wx_r = tr.wy_l = tr.wy_r = Vec<D>{};
    return ns_assemble_interface<D>(tr, Vec<D>{}, Vec<D>{}, Vec<D>{}, {}, {},
                                    1, tau, dt);
}

// Simpson oracle for the equilibrium block fluxes of a uniform state.
std::array<Vec<2>, 3> oracle_uniform_blocks(const Primitive<2>& g, int nx,
                                            int np) {
    const double U0 = g.U0(), U1 = g.U(1), U2 = g.U(2);
    std::array<Vec<2>, 3> out{};
    simpson_sphere(nx, np, [&](double xi, double phi, double w) {
        const double s = std::sqrt(std::max(0.0, 1.0 - xi * xi));
        const double w2 = s * std::sin(phi);
        const double Dv = U0 - xi * U1 - w2 * U2;
        const double dir[4] = {1.0, xi, w2, 1.0};
        const double da[3] = {1.0, xi, w2};
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 4; ++c)
                out[a][c] += w * xi * da[a] * dir[c] *
                             radial(g.n, g.T, Dv, c == 0 ? 1 : 2);
    });
    return out;
}

}  // namespace

TEST_CASE("block fluxes: rest state values and uniform moving equilibrium") {
    const double tau = 0.05, dt = 0.01;
    {
        const auto prim = make_prim<2>(1.4, {0.0, 0.0}, 0.9);
        const double p = prim.pressure();
        const auto F = ns_interface_flux<2>(uniform_interface<2>(prim, tau, dt));
        const Vec<2> want0 = {0.0, p, 0.0, 0.0};
        const Vec<2> want1 = {prim.n / 3.0, 0.0, 0.0, p};
        for (int c = 0; c < 4; ++c) {
            CHECK(std::abs(F[0][c] - want0[c]) < 1e-13 * p);
            CHECK(std::abs(F[1][c] - want1[c]) < 1e-13 * p);
            CHECK(std::abs(F[2][c]) < 1e-13 * p);
        }
    }
    {
        const auto prim = make_prim<1>(1.4, {0.0}, 0.9);
        const double p = prim.pressure();
        const auto F = ns_interface_flux<1>(uniform_interface<1>(prim, tau, dt));
        const Vec<1> want0 = {0.0, p, 0.0};
        const Vec<1> want1 = {prim.n / 3.0, 0.0, p};
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(F[0][c] - want0[c]) < 1e-13 * p);
            CHECK(std::abs(F[1][c] - want1[c]) < 1e-13 * p);
        }
    }
    {
        const auto prim = make_prim<2>(0.8, {0.3, -0.2}, 1.2);
        const auto F = ns_interface_flux<2>(uniform_interface<2>(prim, tau, dt));
        const auto want = oracle_uniform_blocks(prim, 1600, 1600);
        // the conserved-block flux also has a closed form
        const auto eq1 = equilibrium_blocks<2>(prim)[1];
        for (int c = 0; c < 4; ++c) CHECK(rel_gap(F[0][c], eq1[c]) < 1e-8);
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 4; ++c) CHECK(rel_gap(F[a][c], want[a][c]) < 1e-8);
    }
}

TEST_CASE("block flux 0 equals the interface flux when the deviation replicates the slopes") {
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto run = [&]<int D>(int axis) {
        std::array<double, D> ul{}, ur{};
        for (int i = 0; i < D; ++i) {
            ul[i] = 0.4 * uni(rng);
            ur[i] = 0.4 * uni(rng);
        }
        const auto pl = make_prim<D>(0.7 + std::abs(uni(rng)), ul,
                                     0.5 + std::abs(uni(rng)));
        const auto pr = make_prim<D>(0.7 + std::abs(uni(rng)), ur,
                                     0.5 + std::abs(uni(rng)));
        recon::InterfaceTrace<D> tr;
        tr.wl = equilibrium_blocks<D>(pl)[0];
        tr.wr = equilibrium_blocks<D>(pr)[0];
        tr.wx_l = random_vec<D>(rng, 0.3);
        tr.wx_r = random_vec<D>(rng, 0.3);
        tr.wy_l = random_vec<D>(rng, 0.3);
        tr.wy_r = random_vec<D>(rng, 0.3);
        const auto w0n = random_vec<D>(rng, 0.3);
        const auto w0t = random_vec<D>(rng, 0.3);
        const double tau = 0.004, dt = 0.01;

        const auto kin = flux::assemble_interface<D>(tr, w0n, w0t, axis, tau, dt);
        NSInterface<D> f;
        f.axis = axis;
        f.kin = kin;
        f.cel = {kin.Al, kin.al, kin.bl, 0.0};
        f.cer = {kin.Ar, kin.ar, kin.br, 0.0};
        const auto blocks = ns_interface_flux<D>(f);
        const auto ref = flux::bgk_interface_flux<D>(kin, true);
        for (int c = 0; c < D + 2; ++c) CHECK(rel_gap(blocks[0][c], ref[c]) < 1e-13);
    };
    for (int it = 0; it < 5; ++it) {
        run.template operator()<1>(1);
        run.template operator()<2>(1);
        run.template operator()<2>(2);
    }
}

TEST_CASE("block fluxes: equilibrium limit and axis-2 rotation") {
    std::mt19937 rng(79);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    // tau -> 0 with a steady interface moment set: every upwind imprint fades
    {
        const auto pl = make_prim<2>(1.1, {0.25, -0.1}, 0.8);
        const auto pr = make_prim<2>(0.9, {0.15, 0.2}, 1.05);
        recon::InterfaceTrace<2> tr;
        tr.wl = equilibrium_blocks<2>(pl)[0];
        tr.wr = equilibrium_blocks<2>(pr)[0];
        tr.wx_l = random_vec<2>(rng, 0.2);
        tr.wx_r = random_vec<2>(rng, 0.2);
        tr.wy_l = random_vec<2>(rng, 0.2);
        tr.wy_r = random_vec<2>(rng, 0.2);
        const double dt = 0.01, tau = 1e-12 * dt;
        CECoefficients cr;
        for (int j = 0; j < 5; ++j) cr.A[j] = cr.a[j] = cr.b[j] = cr.c[j] = 0.3;
        const auto ce = ce_kinetic_set<2>(cr);
        const auto f = ns_assemble_interface<2>(tr, random_vec<2>(rng, 0.2),
                                                random_vec<2>(rng, 0.2),
                                                Vec<2>{}, ce, ce, 1, tau, dt);
        const auto blocks = ns_interface_flux<2>(f);
        const auto eq1 = equilibrium_blocks<2>(f.kin.g0)[1];
        for (int c = 0; c < 4; ++c) CHECK(rel_gap(blocks[0][c], eq1[c]) < 1e-7);
        const auto uni_blocks =
            ns_interface_flux<2>(uniform_interface<2>(f.kin.g0, tau, dt));
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 4; ++c)
                CHECK(rel_gap(blocks[a][c], uni_blocks[a][c]) < 1e-9);
    }

    // a y-normal interface equals the axis-swapped x-normal problem
    {
        auto swap_fields = [](std::array<double, 4> v) {
            std::swap(v[1], v[2]);
            return v;
        };
        auto swap_vec = [](Vec<2> v) {
            std::swap(v[1], v[2]);
            return v;
        };
        const auto pl = make_prim<2>(1.05, {0.2, -0.3}, 0.9);
        const auto pr = make_prim<2>(0.85, {-0.1, 0.25}, 1.15);
        PrimDerivs<2> dl = random_derivs<2>(rng, 0.4);
        PrimDerivs<2> dr = random_derivs<2>(rng, 0.4);
        const auto cel = ce_kinetic_set<2>(
            chapman_enskog_coefficients<2>(pl, ce_gradients<2>(pl, dl)));
        const auto cer = ce_kinetic_set<2>(
            chapman_enskog_coefficients<2>(pr, ce_gradients<2>(pr, dr)));

        recon::InterfaceTrace<2> tr;
        tr.wl = equilibrium_blocks<2>(pl)[0];
        tr.wr = equilibrium_blocks<2>(pr)[0];
        tr.wx_l = random_vec<2>(rng, 0.25);
        tr.wx_r = random_vec<2>(rng, 0.25);
        tr.wy_l = random_vec<2>(rng, 0.25);
        tr.wy_r = random_vec<2>(rng, 0.25);
        const auto w0n = random_vec<2>(rng, 0.25);
        const auto w0t = random_vec<2>(rng, 0.25);
        const auto w0d = random_vec<2>(rng, 0.25);
        const double tau = 0.003, dt = 0.008;

        const auto lab = ns_interface_flux<2>(ns_assemble_interface<2>(
            tr, w0n, w0t, w0d, cel, cer, 2, tau, dt));

        // swapped world: exchange the two space axes everywhere
        Primitive<2> ql = pl, qr = pr;
        std::swap(ql.u[0], ql.u[1]);
        std::swap(qr.u[0], qr.u[1]);
        PrimDerivs<2> el, er;
        el.t = swap_fields(dl.t);
        el.x = swap_fields(dl.y);
        el.y = swap_fields(dl.x);
        er.t = swap_fields(dr.t);
        er.x = swap_fields(dr.y);
        er.y = swap_fields(dr.x);
        const auto cels = ce_kinetic_set<2>(
            chapman_enskog_coefficients<2>(ql, ce_gradients<2>(ql, el)));
        const auto cers = ce_kinetic_set<2>(
            chapman_enskog_coefficients<2>(qr, ce_gradients<2>(qr, er)));
        recon::InterfaceTrace<2> ts;
        ts.wl = swap_vec(tr.wl);
        ts.wr = swap_vec(tr.wr);
        ts.wx_l = swap_vec(tr.wy_l);
        ts.wx_r = swap_vec(tr.wy_r);
        ts.wy_l = swap_vec(tr.wx_l);
        ts.wy_r = swap_vec(tr.wx_r);
        const auto swapped = ns_interface_flux<2>(ns_assemble_interface<2>(
            ts, swap_vec(w0n), swap_vec(w0t), swap_vec(w0d), cels, cers, 1,
            tau, dt));

        for (int c = 0; c < 4; ++c) {
            CHECK(rel_gap(lab[0][c], swap_vec(swapped[0])[c]) < 1e-13);
            CHECK(rel_gap(lab[1][c], swap_vec(swapped[2])[c]) < 1e-13);
            CHECK(rel_gap(lab[2][c], swap_vec(swapped[1])[c]) < 1e-13);
        }
    }
}

TEST_CASE("deviated interface equilibrium: zero deviation and symmetry") {
    std::mt19937 rng(83);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int it = 0; it < 6; ++it) {
        const auto pl = make_prim<2>(0.7 + std::abs(uni(rng)),
                                     {0.4 * uni(rng), 0.4 * uni(rng)},
                                     0.5 + std::abs(uni(rng)));
        const auto pr = make_prim<2>(0.7 + std::abs(uni(rng)),
                                     {0.4 * uni(rng), 0.4 * uni(rng)},
                                     0.5 + std::abs(uni(rng)));
        for (int axis : {1, 2}) {
            const auto got =
                ns_interface_equilibrium<2>(pl, pr, {}, {}, 0.02, axis);
            const auto want = flux::interface_equilibrium<2>(pl, pr, axis);
            CHECK(rel_gap(got.n, want.n) < 1e-12);
            CHECK(rel_gap(got.T, want.T) < 1e-12);
            CHECK(std::abs(got.u[0] - want.u[0]) < 1e-12);
            CHECK(std::abs(got.u[1] - want.u[1]) < 1e-12);
        }
    }

    // a genuine deviation shifts the matched state; tau -> 0 restores it
    const auto pl = make_prim<2>(1.0, {0.2, 0.1}, 0.9);
    const auto pr = make_prim<2>(0.8, {-0.05, 0.15}, 1.1);
    PrimDerivs<2> d = {};
    d.y = {0.0, 0.4, 0.0, 0.3};
    const auto ce = ce_kinetic_set<2>(
        chapman_enskog_coefficients<2>(pl, ce_gradients<2>(pl, d)));
    const auto base = flux::interface_equilibrium<2>(pl, pr, 1);
    const auto shifted = ns_interface_equilibrium<2>(pl, pr, ce, ce, 0.05, 1);
    const auto tiny = ns_interface_equilibrium<2>(pl, pr, ce, ce, 1e-12, 1);
    CHECK(std::abs(shifted.T - base.T) > 1e-6);
    CHECK(rel_gap(tiny.n, base.n) < 1e-10);
    CHECK(rel_gap(tiny.T, base.T) < 1e-10);
}

TEST_CASE("collision sources: structure, zero limits and quadrature oracle") {
    std::mt19937 rng(97);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    // zero coefficients give a zero source
    {
        const auto g0 = make_prim<2>(1.1, {0.2, -0.15}, 0.9);
        const auto S = ns_source<2>(g0, Vec<2>{}, Vec<2>{}, Vec<2>{}, {}, 0.01,
                                    0.008);
        for (int k = 0; k < 2; ++k)
            for (int c = 0; c < 4; ++c) CHECK(S[k][c] == 0.0);
        CHECK_THROWS_AS(ns_source<2>(g0, Vec<2>{}, Vec<2>{}, Vec<2>{}, {}, -1.0,
                                     0.008),
                        ConfigError);
    }

    auto oracle2 = [&](const Primitive<2>& g0, const Vec<2>& a0,
                       const Vec<2>& b0, const Vec<2>& A0,
                       const CEKineticSet<2>& ce, double tau, double dt) {
        const double U0 = g0.U0(), U1 = g0.U(1), U2 = g0.U(2);
        std::array<Vec<2>, 2> out{};
        auto sw = [](int i, int n) {
            return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        };
        simpson_sphere(800, 800, [&](double xi, double phi, double w) {
            const double s = std::sqrt(std::max(0.0, 1.0 - xi * xi));
            const double w2 = s * std::sin(phi), w3 = s * std::cos(phi);
            const double Dv = U0 - xi * U1 - w2 * U2;
            const double nu = Dv / tau;
            // numerical time average of the decaying weight
            double acc = 0.0;
            const int nt = 128;
            for (int i = 0; i <= nt; ++i)
                acc += sw(i, nt) * std::exp(-nu * (dt * i / nt));
            const double Abar = acc * (dt / nt) / 3.0 / dt;
            const double L = slot_value<2>(ce, 0.0, xi, w2, w3);
            const double Q = slot_value<2>(ce, 1.0, xi, w2, w3) - L;
            auto affine = [&](const Vec<2>& v) {
                return std::array<double, 2>{v[0], v[1] * xi + v[2] * w2 + v[3]};
            };
            const auto av = affine(a0), bv = affine(b0), Av = affine(A0);
            const double m0 = Av[0] + xi * av[0] + w2 * bv[0];
            const double m1 = Av[1] + xi * av[1] + w2 * bv[1];
            const double k0 = L * Abar + m0 * (1.0 - Abar);
            const double k1 = Q * Abar + m1 * (1.0 - Abar);
            const double dir[4] = {1.0, xi, w2, 1.0};
            const double dk[2] = {xi, w2};
            for (int k = 0; k < 2; ++k)
                for (int c = 0; c < 3; ++c) {
                    const int e = (c == 0) ? 1 : 2;
                    out[k][c] += w * dk[k] * dir[c] *
                                 (k0 * radial(g0.n, g0.T, Dv, e) +
                                  k1 * radial(g0.n, g0.T, Dv, e + 1));
                }
        });
        return out;
    };

    const auto g0 = make_prim<2>(0.95, {0.25, -0.2}, 1.05);
    const auto a0 = random_vec<2>(rng, 0.4);
    const auto b0 = random_vec<2>(rng, 0.4);
    const auto A0 = random_vec<2>(rng, 0.4);
    const auto ce = ce_kinetic_set<2>(
        chapman_enskog_coefficients<2>(g0, ce_gradients<2>(g0, random_derivs<2>(rng, 0.5))));
    const double tau = 0.003, dt = 0.008;
    const auto S = ns_source<2>(g0, a0, b0, A0, ce, tau, dt);
    const auto W = oracle2(g0, a0, b0, A0, ce, tau, dt);
    double scale = 1e-30;
    for (int k = 0; k < 2; ++k)
        for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(W[k][c]));
    for (int k = 0; k < 2; ++k)
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(S[k][c] - W[k][c]) < 1e-6 * scale);
    // the energy slots are pinned to zero by the collision matching rule
    CHECK(S[0][3] == 0.0);
    CHECK(S[1][3] == 0.0);
    // the shared transverse-momentum entry is produced once
    CHECK(S[1][1] == S[0][2]);

    // one-dimensional source against the same oracle reduced to the axis
    {
        const auto h0 = make_prim<1>(1.2, {0.3}, 0.7);
        const auto ha = random_vec<1>(rng, 0.4);
        const auto hA = random_vec<1>(rng, 0.4);
        const auto hce = ce_kinetic_set<1>(
            chapman_enskog_coefficients<1>(h0, ce_gradients<1>(h0, random_derivs<1>(rng, 0.5))));
        const auto hS = ns_source<1>(h0, ha, Vec<1>{}, hA, hce, tau, dt);
        const double U0 = h0.U0(), U1 = h0.U(1);
        Vec<1> want{};
        auto sw = [](int i, int n) {
            return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        };
        const int np = 20000;
        const double h = 2.0 / np;
        for (int i = 0; i <= np; ++i) {
            const double xi = -1.0 + h * i;
            const double w = 2.0 * M_PI * sw(i, np) * h / 3.0;
            const double Dv = U0 - xi * U1;
            const double nu = Dv / tau;
            double acc = 0.0;
            const int nt = 128;
            for (int q = 0; q <= nt; ++q)
                acc += sw(q, nt) * std::exp(-nu * (dt * q / nt));
            const double Abar = acc * (dt / nt) / 3.0 / dt;
            const double L = slot_value<1>(hce, 0.0, xi, 0.0, 0.0);
            const double Q = slot_value<1>(hce, 1.0, xi, 0.0, 0.0) - L;
            const double m0 = hA[0] + xi * ha[0];
            const double m1 = hA[1] * xi + hA[2] + xi * (ha[1] * xi + ha[2]);
            const double k0 = L * Abar + m0 * (1.0 - Abar);
            const double k1 = Q * Abar + m1 * (1.0 - Abar);
            for (int c = 0; c < 2; ++c) {
                const int e = (c == 0) ? 1 : 2;
                want[c] += w * xi * (c == 1 ? xi : 1.0) *
                           (k0 * radial(h0.n, h0.T, Dv, e) +
                            k1 * radial(h0.n, h0.T, Dv, e + 1));
            }
        }
        CHECK(std::abs(hS[0][0] - want[0]) <
              1e-6 * std::max(std::abs(want[0]), std::abs(want[1])));
        CHECK(std::abs(hS[0][1] - want[1]) <
              1e-6 * std::max(std::abs(want[0]), std::abs(want[1])));
        CHECK(hS[0][2] == 0.0);
    }
}

TEST_CASE("moment state: blocks, history and update invariants") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    // closed-form equilibrium blocks match the half-space quadrature sums
    {
        const auto prim = make_prim<2>(1.15, {0.3, -0.25}, 0.85);
        const auto qb =
            kinetic::juttner_moment_blocks<2>(prim, kinetic::Half::Full());
        const auto cb = equilibrium_blocks<2>(prim);
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 4; ++c)
                CHECK(rel_gap(qb[a][c], cb[a][c]) < 1e-9);

        const auto p1 = make_prim<1>(0.9, {0.45}, 1.3);
        const auto q1 =
            kinetic::juttner_moment_blocks<1>(p1, kinetic::Half::Full());
        const auto c1 = equilibrium_blocks<1>(p1);
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 3; ++c)
                CHECK(rel_gap(q1[a][c], c1[a][c]) < 1e-9);
    }

    // recovery round-trip and history bookkeeping
    {
        const auto prim = make_prim<2>(1.05, {0.2, 0.1}, 0.95);
        auto st = make_moment_state<2>(prim);
        CHECK(rel_gap(st.prim.n, prim.n) < 1e-12);
        CHECK(rel_gap(st.prim.T, prim.T) < 1e-12);
        CHECK_THROWS_AS(time_derivatives<2>(st), MissingInitialDerivatives);
        record_history<2>(st, 0.0);
        record_history<2>(st, 0.004);
        CHECK_THROWS_AS(time_derivatives<2>(st), MissingInitialDerivatives);

        // quadratic primitive trajectory: extrapolation is exact
        auto traj = [&](double t) {
            auto p = prim;
            p.n = prim.n * (1.0 + 0.1 * t + 0.4 * t * t);
            p.u[0] = prim.u[0] + 0.2 * t - 0.1 * t * t;
            p.T = prim.T * (1.0 - 0.05 * t + 0.2 * t * t);
            return p;
        };
        MomentState<2> qs = make_moment_state<2>(traj(0.0));
        for (double t : {0.0, 0.005, 0.01}) {
            qs.prim = traj(t);
            qs.blocks = equilibrium_blocks<2>(traj(t));
            record_history<2>(qs, t);
        }
        const auto der = time_derivatives<2>(qs);
        CHECK(rel_gap(der.prim_dot[0], prim.n * (0.1 + 0.8 * 0.01)) < 1e-9);
        CHECK(rel_gap(der.prim_dot[1], 0.2 - 0.2 * 0.01) < 1e-9);
        CHECK(rel_gap(der.prim_dot[3], prim.T * (-0.05 + 0.4 * 0.01)) < 1e-9);

        // the moment derivative agrees with the jacobian on a linear path
        const auto J = conserved_jacobian<2>(traj(0.01));
        for (int r = 0; r < 4; ++r) {
            double jv = 0.0;
            for (int c = 0; c < 4; ++c) jv += J[r][c] * der.prim_dot[c];
            CHECK(std::abs(der.w0_dot[r] - jv) < 2e-4 * (1.0 + std::abs(jv)));
        }
    }

    // update conservation, overlap invariants and failure detection
    {
        const auto prim = make_prim<2>(1.0, {0.15, -0.1}, 1.0);
        auto st = make_moment_state<2>(prim);
        const auto keep = st;

        std::array<Vec<2>, 3> dflux{};
        std::array<Vec<2>, 2> src{};
        ns_apply_update<2>(st, dflux, src);
        CHECK(rel_gap(st.prim.n, keep.prim.n) < 1e-13);
        CHECK(rel_gap(st.prim.T, keep.prim.T) < 1e-13);
        CHECK(std::abs(st.prim.u[0] - keep.prim.u[0]) < 1e-13);

        // a dedup-respecting increment keeps the shared tensor entries equal
        const auto fa = ns_interface_flux<2>(
            uniform_interface<2>(make_prim<2>(1.1, {0.2, 0.05}, 0.9), 0.01, 0.004));
        const auto fb = ns_interface_flux<2>(
            uniform_interface<2>(make_prim<2>(0.95, {0.1, -0.1}, 1.1), 0.01, 0.004));
        for (int a = 0; a < 3; ++a) dflux[a] = 0.02 * (fa[a] - fb[a]);
        const auto g0 = make_prim<2>(1.02, {0.12, -0.06}, 0.97);
        auto srcv = ns_source<2>(g0, random_vec<2>(rng, 0.2),
                                 random_vec<2>(rng, 0.2),
                                 random_vec<2>(rng, 0.2),
                                 ce_kinetic_set<2>(chapman_enskog_coefficients<2>(
                                     g0, ce_gradients<2>(g0, random_derivs<2>(rng, 0.4)))),
                                 0.01, 0.004);
        for (auto& v : srcv) v = 0.004 * v;
        ns_apply_update<2>(st, dflux, srcv);
        for (int c = 0; c < 4; ++c)
            CHECK(rel_gap(st.blocks[0][c], keep.blocks[0][c] - dflux[0][c]) <
                  1e-13);
        CHECK(std::abs(st.blocks[1][3] - st.blocks[0][1]) < 1e-12);
        CHECK(std::abs(st.blocks[2][3] - st.blocks[0][2]) < 1e-12);
        CHECK(std::abs(st.blocks[2][1] - st.blocks[1][2]) < 1e-12);

        auto bad = make_moment_state<2>(prim);
        std::array<Vec<2>, 3> wreck{};
        wreck[0] = 10.0 * keep.blocks[0];
        CHECK_THROWS_AS(ns_apply_update<2>(bad, wreck, src), NonPhysicalState);
    }
}

TEST_CASE("assembled interface honours the prescribed moment derivative") {
    std::mt19937 rng(113);
    const auto pl = make_prim<2>(1.1, {0.2, -0.1}, 0.9);
    const auto pr = make_prim<2>(0.9, {0.1, 0.15}, 1.1);
    recon::InterfaceTrace<2> tr;
    tr.wl = equilibrium_blocks<2>(pl)[0];
    tr.wr = equilibrium_blocks<2>(pr)[0];
    tr.wx_l = random_vec<2>(rng, 0.2);
    tr.wx_r = random_vec<2>(rng, 0.2);
    tr.wy_l = random_vec<2>(rng, 0.2);
    tr.wy_r = random_vec<2>(rng, 0.2);
    const auto w0d = random_vec<2>(rng, 0.3);
    const auto f = ns_assemble_interface<2>(tr, random_vec<2>(rng, 0.2),
                                            random_vec<2>(rng, 0.2), w0d, {},
                                            {}, 1, 0.005, 0.01);
    const auto M = kinetic::moment_matrix<2>(f.kin.g0, 0);
    for (int r = 0; r < 4; ++r) {
        double got = 0.0;
        for (int c = 0; c < 4; ++c) got += M[r][c] * f.kin.A0[c];
        CHECK(std::abs(got - w0d[r]) < 1e-10 * (1.0 + std::abs(w0d[r])));
    }
    CHECK_THROWS_AS(ns_assemble_interface<2>(tr, Vec<2>{}, Vec<2>{}, Vec<2>{},
                                             {}, {}, 1, 0.0, 0.01),
                    ConfigError);
    CHECK_THROWS_AS(ns_assemble_interface<2>(tr, Vec<2>{}, Vec<2>{}, Vec<2>{},
                                             {}, {}, 1, 0.005, -1.0),
                    ConfigError);
}
