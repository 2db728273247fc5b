#include "urbgk/quadrature.hpp"

#include <cmath>

namespace urbgk::quad {

GaussLegendre gauss_legendre(int n) {
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    // Newton iteration from the Chebyshev-like initial guess; standard
    // three-term recurrence for P_n and its derivative.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        g.x[i] = -x;
        g.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        g.w[i] = w;
        g.w[n - 1 - i] = w;
    }
    return g;
}

namespace {

XiGrid make_xi_grid() {
    XiGrid grid;
    const GaussLegendre g = gauss_legendre(16);
    for (int i = 0; i < 16; ++i) {
        // panel [-1, 0]
        grid.xi[i] = 0.5 * (g.x[i] - 1.0);
        grid.w[i] = 0.5 * g.w[i];
        // panel [0, 1]
        grid.xi[16 + i] = 0.5 * (g.x[i] + 1.0);
        grid.w[16 + i] = 0.5 * g.w[i];
    }
    return grid;
}

PhiGrid make_phi_grid() {
    PhiGrid grid;
    const GaussLegendre g = gauss_legendre(16);
    for (int i = 0; i < 16; ++i) {
        grid.phi[i] = 0.5 * M_PI * (g.x[i] - 1.0);
        grid.w[i] = 0.5 * M_PI * g.w[i];
        grid.phi[16 + i] = 0.5 * M_PI * (g.x[i] + 1.0);
        grid.w[16 + i] = 0.5 * M_PI * g.w[i];
    }
    for (int i = 0; i < 32; ++i) {
        grid.sn[i] = std::sin(grid.phi[i]);
        grid.cs[i] = std::cos(grid.phi[i]);
    }
    return grid;
}

}  // namespace

const XiGrid& xi_grid() {
    static const XiGrid grid = make_xi_grid();
    return grid;
}

const PhiGrid& phi_grid() {
    static const PhiGrid grid = make_phi_grid();
    return grid;
}

void azimuthal_inverse_powers(double a, double b, int qmax, double* S) {
    const double b2 = b * b;
    const double a2 = a * a;
    const double R2 = a2 - b2;
    const double iR2 = 1.0 / R2;
    const double c = 2.0 * M_PI / std::sqrt(R2);
    S[0] = 2.0 * M_PI;
    S[1] = c;
    if (qmax < 2) return;
    double ir = iR2;
    S[2] = c * a * ir;
    if (qmax < 3) return;
    ir *= iR2;
    S[3] = c * (a2 + 0.5 * b2) * ir;
    if (qmax < 4) return;
    ir *= iR2;
    S[4] = c * a * (a2 + 1.5 * b2) * ir;
    if (qmax < 5) return;
    const double a4 = a2 * a2, b4 = b2 * b2;
    ir *= iR2;
    S[5] = c * (a4 + 3.0 * a2 * b2 + 0.375 * b4) * ir;
    if (qmax < 6) return;
    ir *= iR2;
    S[6] = c * a * (a4 + 5.0 * a2 * b2 + 1.875 * b4) * ir;
    if (qmax < 7) return;
    ir *= iR2;
    S[7] = c * (a4 * a2 + 7.5 * a4 * b2 + 5.625 * a2 * b4 + 0.3125 * b4 * b2) * ir;
    if (qmax < 8) return;
    ir *= iR2;
    S[8] = c * a * (a4 * a2 + 10.5 * a4 * b2 + 13.125 * a2 * b4 + 2.1875 * b4 * b2) * ir;
}

void azimuthal_sine_moments(double a, double b, double t[5][9]) {
    t[0][0] = 2.0 * M_PI;
    t[1][0] = 0.0;
    t[2][0] = M_PI;
    t[3][0] = 0.0;
    t[4][0] = 0.75 * M_PI;

    if (std::abs(b) >= 0.1 * a) {
        double s[9];
        azimuthal_inverse_powers(a, b, 8, s);
        for (int q = 1; q <= 8; ++q) t[0][q] = s[q];
        const double inv_b = 1.0 / b;
        for (int j = 1; j <= 4; ++j)
            for (int q = 1; q <= 8; ++q)
                t[j][q] = (a * t[j - 1][q] - t[j - 1][q - 1]) * inv_b;
        return;
    }

    // B[q][m] = binom(q-1+m, m); Z[k] = binom(2k, k) / 4^k
    static constexpr auto B = [] {
        std::array<std::array<double, 20>, 9> c{};
        for (int m = 0; m < 20; ++m) c[1][m] = 1.0;
        for (int q = 2; q <= 8; ++q) {
            c[q][0] = 1.0;
            for (int m = 1; m < 20; ++m) c[q][m] = c[q][m - 1] * (q - 1 + m) / m;
        }
        return c;
    }();
    static constexpr double Z[12] = {1.0,
                                     0.5,
                                     0.375,
                                     0.3125,
                                     0.2734375,
                                     0.24609375,
                                     0.2255859375,
                                     0.20947265625,
                                     0.196380615234375,
                                     0.18547058105468750,
                                     0.176197052001953125,
                                     0.1681880950927734375};
    const double r = b / a;
    double rp[20];
    rp[0] = 1.0;
    for (int m = 1; m < 20; ++m) rp[m] = rp[m - 1] * r;
    double inv_aq = 1.0;
    for (int q = 1; q <= 8; ++q) {
        inv_aq /= a;
        for (int j = 0; j <= 4; ++j) {
            const int k0 = (j + 1) / 2;
            const int m0 = 2 * k0 - j;
            double sum = 0.0;
            for (int i = 9; i >= 0; --i)
                sum += B[q][m0 + 2 * i] * Z[k0 + i] * rp[m0 + 2 * i];
            t[j][q] = 2.0 * M_PI * inv_aq * sum;
        }
    }
}

}  // namespace urbgk::quad
