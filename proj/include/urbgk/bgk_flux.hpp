// Time-averaged interface fluxes of the Anderson-Witting kinetic model:
// the full BGK flux built from the analytic integral solution along
// characteristics, plus the two reference closures (collisionless KFVS and
// the slope-free BGK-type relaxation flux).
#pragma once

#include "urbgk/reconstruction.hpp"
#include "urbgk/types.hpp"

namespace urbgk::flux {

struct CollisionParams {
    double c1 = 0.001;     // mean collision time in units of dt^alpha (inviscid)
    double c2 = 1.5;       // pressure-jump amplification
    double alpha = 1.0;    // dt exponent of both terms
    bool viscous = false;  // derive the mean collision time from mu instead
    double mu = 0.0;       // dynamic viscosity (viscous mode)
};

// tau = tau_m + c2 * dt^alpha * |p_l - p_r| / (p_l + p_r), with the mean part
// tau_m = c1 * dt^alpha, or 5 mu / (4 pbar) in viscous mode.
double collision_time(const CollisionParams& cp, double dt, double p_left,
                      double p_right);

// Time averages over [0, dt] of the relaxation kernel, x = nu * dt:
//   q0 = <e^{-nu t}>            q1 = <t e^{-nu t}>
//   r0 = <1 - e^{-nu t}>        (source equilibrium weight)
//   r2 = -<J(t)>,  J(t) = (1 - (1 + nu t) e^{-nu t}) / nu   (slope weight)
//   r3 = <t (1 - e^{-nu t}) - J(t)>                         (time-slope weight)
// Below x = 0.02 the cancelling differences switch to series in x.
struct TimeFactors {
    double q0, q1, r0, r2, r3;
};
TimeFactors time_factors(double nu, double dt);

// Everything the flux integration needs at one interface, expressed in the
// normal-first frame (for axis == 2 all states, slopes and coefficient
// vectors live in the axis-swapped frame; the flux routine swaps the output
// momentum components back).  Coefficient vectors contract with
// (1, p^1[, p^2], p^0).
template <int D>
struct InterfaceKinetics {
    int axis = 1;
    double tau = 0.0;
    double dt = 0.0;
    bool with_coefficients = true;
    Primitive<D> g0, gl, gr;
    Vec<D> a0{}, b0{}, A0{};  // interface equilibrium: normal, tangent, time
    Vec<D> al{}, bl{}, Al{};  // left state
    Vec<D> ar{}, br{}, Ar{};  // right state
};

// Landau-matched equilibrium of the colliding half fluxes: the moment tensor
// assembled from the left outgoing and right incoming half-space moments
// (global frame, `axis` is the interface normal).
template <int D>
Primitive<D> interface_equilibrium(const Primitive<D>& left,
                                   const Primitive<D>& right, int axis);

// Affine coefficient functions of the linearized distribution
// g * (v . (1, p^1[, p^2], p^0)): a from the normal slope wn, b from the
// tangent slope wt (2D), and the time coefficient A from the vanishing
// conserved moment of p^0 A + p^1 a + p^2 b.  Solves M0 a = wn etc.
template <int D>
void slope_coefficients(const Primitive<D>& g, const Vec<D>& wn, const Vec<D>& wt,
                        Vec<D>& a, Vec<D>& b, Vec<D>& A);

// Builds the interface state from a reconstruction trace: converts the traced
// conserved values to primitives, Landau-matches the equilibrium, and solves
// the three coefficient sets.  w0n/w0t are the conserved-variable slopes of
// the interface equilibrium along the interface normal/tangent in global
// components (w0t ignored in 1D).  with_coefficients = false zeroes every
// coefficient set (the BGK-type closure).  A caller that already holds the
// matched equilibrium (global frame) can pass it as g0 to skip the half-space
// recovery.  Throws NonPhysicalState for unusable traced states.
template <int D>
InterfaceKinetics<D> assemble_interface(const recon::InterfaceTrace<D>& trace,
                                        const Vec<D>& w0n, const Vec<D>& w0t,
                                        int axis, double tau, double dt,
                                        bool with_coefficients = true,
                                        const Primitive<D>* g0 = nullptr);

// Time-averaged flux of the conserved components through the interface.  In
// 2D the azimuthal integral collapses to closed form once every relaxation
// exponential is negligible (min nu * dt > 46); force_general_quadrature
// keeps the full angular product rule for testing that closure.
template <int D>
Vec<D> bgk_interface_flux(const InterfaceKinetics<D>& iface,
                          bool force_general_quadrature = false);

// Slope-free relaxation flux: equilibrium weight r0 on the Landau-matched
// state plus q0-weighted free flight of the side states.
template <int D>
Vec<D> bgk_type_flux(const Primitive<D>& left, const Primitive<D>& right,
                     int axis, double tau, double dt);

// Collisionless kinetic flux vector splitting.
template <int D>
Vec<D> kfvs_flux(const Primitive<D>& left, const Primitive<D>& right, int axis);

}  // namespace urbgk::flux
