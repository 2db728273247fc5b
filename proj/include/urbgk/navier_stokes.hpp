// Viscous extension of the kinetic solver: first-order deviation
// coefficients from primitive gradients, interface state and moment-block
// fluxes built from the deviated distributions, collision sources, and the
// per-cell moment bookkeeping with the time-derivative history it needs.
#pragma once

#include <array>

#include "urbgk/bgk_flux.hpp"
#include "urbgk/reconstruction.hpp"
#include "urbgk/types.hpp"

namespace urbgk::ns {

// Lab-frame partial derivatives of the primitive fields (n, u.., T), one
// array per coordinate; y is ignored in 1D.
template <int D>
struct PrimDerivs {
    std::array<double, D + 2> t{}, x{}, y{};
};

// Covariant gradient package at one state: the projector orthogonal to the
// four-velocity, projected gradients of T and p, their heat combination
// q^a = grad T - T/(nh) grad p, and the symmetric trace-free velocity shear.
// All tensors are contravariant components in (t, x, y, z) order.
struct CEGradients {
    double delta[4][4]{};
    double grad_T[4]{};
    double grad_p[4]{};
    double q[4]{};
    double shear[4][4]{};
};

template <int D>
CEGradients ce_gradients(const Primitive<D>& prim, const PrimDerivs<D>& d);

// First-order deviation coefficients: the distribution correction is
// g * (1 - tau/(U.p) * (A p^0 + a p^1 + b p^2 + c p^3)) with each scalar of
// the form row[0..3] . p^beta + row[4].
struct CECoefficients {
    double A[5]{}, a[5]{}, b[5]{}, c[5]{};
};

template <int D>
CECoefficients chapman_enskog_coefficients(const Primitive<D>& prim,
                                           const CEGradients& g);

// The same deviation folded onto the kinetic weight slots (1, p^1[, p^2],
// p^0) after discarding the momentum directions that integrate to zero.
// `diag` multiplies |p|^2 w3^2 in 2D; in 1D it multiplies |p|^2 (1 - xi^2),
// absorbing both transverse axes at once.
template <int D>
struct CEKineticSet {
    Vec<D> A{}, a{}, b{};
    double diag = 0.0;
};

template <int D>
CEKineticSet<D> ce_kinetic_set(const CECoefficients& c);

// One-sided derivative at t0 from three time levels (t2 oldest); exact for
// quadratic h(t).  Throws DegenerateStencil if any two times coincide.
double extrapolate_time_derivative(double t2, double h2, double t1, double h1,
                                   double t0, double h0);

// Jacobian dW/d(n, u.., T) of the equilibrium conserved vector.
template <int D>
MomentMatrix<D> conserved_jacobian(const Primitive<D>& prim);

// Everything one interface needs: the equilibrium-side kinetics shared with
// the inviscid flux plus the two deviation sets, pre-rotated normal-first.
template <int D>
struct NSInterface {
    int axis = 1;
    flux::InterfaceKinetics<D> kin;
    CEKineticSet<D> cel, cer;
};

// Matched state of the deviated left/right half-space moment tensors.
template <int D>
Primitive<D> ns_interface_equilibrium(const Primitive<D>& left,
                                      const Primitive<D>& right,
                                      const CEKineticSet<D>& ce_left,
                                      const CEKineticSet<D>& ce_right,
                                      double tau, int axis);

// Builds the interface kinetics from traced states and slopes.  w0_dot is
// the time derivative of the interface conserved vector; it fixes the
// equilibrium time coefficient via the weight-0 moment matrix instead of the
// conservation constraint used in the inviscid scheme.  A caller that already
// holds the matched equilibrium (global frame) can pass it as g0 to skip the
// half-space recovery.
template <int D>
NSInterface<D> ns_assemble_interface(const recon::InterfaceTrace<D>& trace,
                                     const Vec<D>& w0n, const Vec<D>& w0t,
                                     const Vec<D>& w0_dot,
                                     const CEKineticSet<D>& ce_left,
                                     const CEKineticSet<D>& ce_right, int axis,
                                     double tau, double dt,
                                     const Primitive<D>* g0 = nullptr);

// Time-averaged fluxes of all moment blocks alpha = 0..D through the
// interface; blocks[a][c] integrates Psi_c p^n p^a / p^0 against the evolved
// distribution (n = normal axis).  Block 0 is the inviscid flux vector.
// Overlapping tensor entries are produced once and copied.
template <int D>
std::array<Vec<D>, D + 1> ns_interface_flux(const NSInterface<D>& iface);

// Time-averaged collision sources for the momentum blocks k = 1..D at a
// cell center (the block-0 source vanishes identically).  a0/b0/A0 are the
// cell Taylor coefficients of the equilibrium, ce0 the local deviation set.
template <int D>
std::array<Vec<D>, D> ns_source(const Primitive<D>& g0, const Vec<D>& a0,
                                const Vec<D>& b0, const Vec<D>& A0,
                                const CEKineticSet<D>& ce0, double tau,
                                double dt);

// Per-cell moment blocks with the recovered state and a three-level history
// (newest first) for time-derivative extrapolation.
template <int D>
struct MomentState {
    std::array<Vec<D>, D + 1> blocks{};
    Primitive<D> prim{};
    int levels = 0;
    std::array<double, 3> t_hist{};
    std::array<std::array<double, D + 2>, 3> prim_hist{};
    std::array<Vec<D>, 3> w0_hist{};
};

// Equilibrium blocks of a primitive state (closed form).
template <int D>
std::array<Vec<D>, D + 1> equilibrium_blocks(const Primitive<D>& prim);

template <int D>
MomentState<D> make_moment_state(const Primitive<D>& prim);

// Records the current state as the newest history level at time t.
template <int D>
void record_history(MomentState<D>& st, double t);

// Extrapolated time derivatives of the primitives and of the weight-0
// moment block; requires three recorded levels.
template <int D>
struct TimeDerivs {
    std::array<double, D + 2> prim_dot{};
    Vec<D> w0_dot{};
};

template <int D>
TimeDerivs<D> time_derivatives(const MomentState<D>& st);

// Applies one finite-volume update: blocks -= dflux, momentum blocks gain
// their sources, then the full tensor is reassembled and the primitive
// recovered by Landau matching.  Throws NonPhysicalState on failure.
template <int D>
void ns_apply_update(MomentState<D>& st,
                     const std::array<Vec<D>, D + 1>& dflux,
                     const std::array<Vec<D>, D>& src);

}  // namespace urbgk::ns
