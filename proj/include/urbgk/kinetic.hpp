// Momentum-space mathematics for the ultra-relativistic Anderson-Witting
// kinetic model: Juttner moments (full and half space), closed-form moment
// matrices, primitive recovery (algebraic Euler inversion and Landau-frame
// eigen recovery), characteristic speeds, analytic Euler fluxes.
#pragma once

#include "urbgk/types.hpp"

namespace urbgk::kinetic {

enum class HalfKind { full, pos, neg };

// Integration range descriptor: full momentum space, or the half space where
// momentum component `axis` (1 or 2) is positive/negative.
struct Half {
    HalfKind kind = HalfKind::full;
    int axis = 1;
    static Half Full() { return {HalfKind::full, 1}; }
    static Half Pos(int d) { return {HalfKind::pos, d}; }
    static Half Neg(int d) { return {HalfKind::neg, d}; }
};

template <int D>
Vec<D> conserved_from_primitive(const Primitive<D>& prim);

// Algebraic inversion of the equilibrium map W -> (n, u, T); Euler mode only.
// Throws NonPhysicalState when the discriminant, pressure or density fails.
template <int D>
Primitive<D> primitive_from_conserved_euler(const Vec<D>& w);

// Landau-frame recovery: solves U_beta T^{alpha beta} = eps U^alpha for the
// unique positive eigenvalue with timelike eigenvector, then n = U_alpha
// N^alpha and T = eps/(3n).  Works for non-equilibrium moments.
template <int D>
Primitive<D> landau_recovery(const MomentTensor<D>& mom);

// Moment vector int Psi p^k g dXi with Psi = (1, p^1[, p^2], p^0) over the
// requested momentum range.  weight_axis k in {0,..,D} (0 means p^0).
// Full-space moments are returned in closed form; half spaces use the fixed
// angular quadrature with analytic |p| integrals.
template <int D>
Vec<D> juttner_moments(const Primitive<D>& prim, int weight_axis, Half half);

// All weight blocks at once: blocks[k] = juttner_moments(prim, k, half) for
// k = 0..D, sharing one angular sweep.
template <int D>
std::array<Vec<D>, D + 1> juttner_moment_blocks(const Primitive<D>& prim, Half half);

// Closed-form M_k = int p^k g Psi Psi^T dXi, k in {0,..,D}.
template <int D>
MomentMatrix<D> moment_matrix(const Primitive<D>& prim, int k);

// max |lambda| over the characteristic speeds along `axis` (1-based).
template <int D>
double spectral_radius(const Primitive<D>& prim, int axis);

// All characteristic speeds along `axis`, ascending.
template <int D>
std::array<double, D + 2> characteristic_speeds(const Primitive<D>& prim, int axis);

// Analytic equilibrium flux along `axis` of the conserved block.
template <int D>
Vec<D> euler_flux(const Primitive<D>& prim, int axis);

// SPD solve M x = rhs (Cholesky).  Throws SingularMomentMatrix on failure.
template <int D>
Vec<D> solve_moment_system(const MomentMatrix<D>& M, const Vec<D>& rhs);

template <int D>
Vec<D> mat_vec(const MomentMatrix<D>& M, const Vec<D>& x);

// Assemble the (D+1)-index moment tensor from the Psi p^k moment blocks
// (block k supplies (N^k, T^{1k}[, T^{2k}], T^{0k})).
template <int D>
MomentTensor<D> tensor_from_blocks(const std::array<Vec<D>, D + 1>& blocks);

// Conserved vector of a moment tensor: (N^0, T^{01}[, T^{02}], T^{00}).
template <int D>
Vec<D> conserved_of_tensor(const MomentTensor<D>& mom);

}  // namespace urbgk::kinetic
