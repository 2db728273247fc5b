// Core state types shared by every module: primitive/conserved state vectors,
// moment tensors and matrices, and the error taxonomy.
//
// Conventions (units c = k_B = 1, metric signature (+,-,-,-)):
//   * velocities u are ordinary velocities, |u| < 1
//   * four-velocity U^0 = gamma, U^i = gamma*u^i, so (U^0)^2 - sum (U^i)^2 = 1
//   * ultra-relativistic EOS: p = n*T, eps = 3*n*T, enthalpy h = 4*T
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace urbgk {

inline constexpr double sound_speed = 0.57735026918962576451;  // 1/sqrt(3)

struct NonPhysicalState : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularMomentMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateStencil : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownProblem : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingInitialDerivatives : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Conserved / moment / flux vector: (N^0, T^{01}[, T^{02}], T^{00}) ordering.
template <int D>
using Vec = std::array<double, D + 2>;

template <std::size_t N>
inline std::array<double, N> operator+(std::array<double, N> a,
                                       const std::array<double, N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    return a;
}
template <std::size_t N>
inline std::array<double, N> operator-(std::array<double, N> a,
                                       const std::array<double, N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
    return a;
}
template <std::size_t N>
inline std::array<double, N> operator*(double s, std::array<double, N> a) {
    for (std::size_t i = 0; i < N; ++i) a[i] *= s;
    return a;
}

template <int D>
struct Primitive {
    static_assert(D == 1 || D == 2);
    double n = 1.0;
    std::array<double, D> u{};
    double T = 1.0;

    double usq() const {
        double s = 0.0;
        for (double ui : u) s += ui * ui;
        return s;
    }
    double gamma() const { return 1.0 / std::sqrt(1.0 - usq()); }
    double U0() const { return gamma(); }
    // spatial four-velocity component, i in [1, D]
    double U(int i) const { return gamma() * u[i - 1]; }
    double pressure() const { return n * T; }
    double enthalpy() const { return 4.0 * T; }
    double energy() const { return 3.0 * n * T; }

    bool valid() const {
        return n > 0.0 && T > 0.0 && usq() < 1.0 && std::isfinite(n) &&
               std::isfinite(T) && std::isfinite(usq());
    }
};

// N^alpha and the symmetric T^{alpha beta} restricted to the active
// (t, x[, y]) block; indices run 0..D.
template <int D>
struct MomentTensor {
    std::array<double, D + 1> N{};
    std::array<std::array<double, D + 1>, D + 1> T{};
};

// Dense symmetric (D+2)x(D+2) matrix M_k = int p^k g Psi Psi^T dXi.
template <int D>
struct MomentMatrix {
    std::array<std::array<double, D + 2>, D + 2> m{};
    std::array<double, D + 2>& operator[](int i) { return m[i]; }
    const std::array<double, D + 2>& operator[](int i) const { return m[i]; }
};

}  // namespace urbgk
