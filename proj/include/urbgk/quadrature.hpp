// Momentum-space angular quadrature tables and azimuthal closed forms.
//
// All |p| integrals are done analytically (the Juttner exponent is linear in
// |p| with a direction-only rate), so the only numerical integration is over
// the direction cosine xi = p^1/|p| and, in 2D, the azimuth phi.  Half-space
// splits (p^1 >< 0, p^2 >< 0) land exactly on panel boundaries.
#pragma once

#include <array>
#include <vector>

namespace urbgk::quad {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> x, w;
};
GaussLegendre gauss_legendre(int n);

// 32 xi nodes: [0..15] on [-1,0], [16..31] on [0,1].
struct XiGrid {
    std::array<double, 32> xi{}, w{};
};

// 32 phi nodes: [0..15] on [-pi,0], [16..31] on [0,pi]; sin/cos cached.
struct PhiGrid {
    std::array<double, 32> phi{}, w{}, sn{}, cs{};
};

const XiGrid& xi_grid();
const PhiGrid& phi_grid();

// S[q] = int_{-pi}^{pi} dphi / (a - b*sin(phi))^q for q = 1..qmax (qmax <= 8),
// valid for a > |b|.  S[0] is set to 2*pi.
void azimuthal_inverse_powers(double a, double b, int qmax, double* S);

// t[j][q] = int_0^{2pi} sin(phi)^j / (a - b*sin(phi))^q dphi for j = 0..4,
// q = 0..8, valid for a > |b| >= 0.  Two cancellation-free regimes: for
// |b| >= 0.1 a the j = 0 row comes from the residue closed forms and higher
// j from the exact recursion b t[j][q] = a t[j-1][q] - t[j-1][q-1], whose
// roundoff grows like (a/b)^4 and stays below ~2e-11 down to the threshold;
// below it that recursion cancels catastrophically, so a ten-term ascending
// series in b/a is used instead (truncation <= ~1e-14 at the threshold,
// exact at b = 0).
void azimuthal_sine_moments(double a, double b, double t[5][9]);

}  // namespace urbgk::quad
