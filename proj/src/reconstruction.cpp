#include "urbgk/reconstruction.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "urbgk/kinetic.hpp"

namespace urbgk::recon {

namespace {

double limited(double dm, double dp) {
    if (dm * dp <= 0.0) return 0.0;
    return 2.0 * dm * dp / (dm + dp);
}

template <int D>
using SmallMat = Eigen::Matrix<double, D + 2, D + 2>;
template <int D>
using SmallVec = Eigen::Matrix<double, D + 2, 1>;

template <int D>
Vec<D> componentwise(const Vec<D>& wl, const Vec<D>& wc, const Vec<D>& wr,
                     double dx) {
    Vec<D> s{};
    for (int c = 0; c < D + 2; ++c)
        s[c] = limited((wc[c] - wl[c]) / dx, (wr[c] - wc[c]) / dx);
    return s;
}

}  // namespace

double van_leer_slope(double w_l, double w_c, double w_r, double dx) {
    return limited((w_c - w_l) / dx, (w_r - w_c) / dx);
}

template <int D>
std::array<Vec<D>, D + 2> flux_jacobian(const Vec<D>& w, int axis) {
    std::array<Vec<D>, D + 2> jac{};
    for (int c = 0; c < D + 2; ++c) {
        const double h = 1e-6 * (1.0 + std::abs(w[c]));
        Vec<D> wp = w, wm = w;
        wp[c] += h;
        wm[c] -= h;
        const Vec<D> fp =
            kinetic::euler_flux(kinetic::primitive_from_conserved_euler<D>(wp), axis);
        const Vec<D> fm =
            kinetic::euler_flux(kinetic::primitive_from_conserved_euler<D>(wm), axis);
        for (int r = 0; r < D + 2; ++r) jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
    }
    return jac;
}

template <int D>
Vec<D> characteristic_reconstruct(const Vec<D>& wl, const Vec<D>& wc,
                                  const Vec<D>& wr, double dx, int axis) {
    constexpr int M = D + 2;
    const auto jac = flux_jacobian<D>(wc, axis);
    SmallMat<D> a;
    for (int r = 0; r < M; ++r)
        for (int c = 0; c < M; ++c) a(r, c) = jac[r][c];

    Eigen::EigenSolver<SmallMat<D>> es(a);
    const double scale = a.cwiseAbs().maxCoeff();
    if (es.info() != Eigen::Success ||
        es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-8 * (1.0 + scale))
        return componentwise<D>(wl, wc, wr, dx);

    const SmallMat<D> r = es.eigenvectors().real();
    const Eigen::JacobiSVD<SmallMat<D>> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 0.0) || svd.singularValues().maxCoeff() / smin > 1e8)
        return componentwise<D>(wl, wc, wr, dx);

    SmallVec<D> dm, dp;
    for (int c = 0; c < M; ++c) {
        dm(c) = wc[c] - wl[c];
        dp(c) = wr[c] - wc[c];
    }
    const Eigen::PartialPivLU<SmallMat<D>> lu(r);
    const SmallVec<D> am = lu.solve(dm), ap = lu.solve(dp);
    SmallVec<D> beta;
    for (int k = 0; k < M; ++k) beta(k) = limited(am(k) / dx, ap(k) / dx);
    const SmallVec<D> s = r * beta;

    Vec<D> out{};
    for (int c = 0; c < M; ++c) out[c] = s(c);
    return out;
}

template <int D>
InterfaceTrace<D> interface_trace(const CellField<D>& field, int i, int j,
                                  int axis, Limiter lim, double dx, double dy) {
    const int il = (axis == 1) ? i - 1 : i;
    const int jl = (axis == 2) ? j - 1 : j;

    auto slope = [&](int a, int b, int dir) -> Vec<D> {
        const double h = (dir == 1) ? dx : dy;
        const Vec<D>& wm = (dir == 1) ? field(a - 1, b) : field(a, b - 1);
        const Vec<D>& wc = field(a, b);
        const Vec<D>& wp = (dir == 1) ? field(a + 1, b) : field(a, b + 1);
        if (lim == Limiter::van_leer)
            return characteristic_reconstruct<D>(wm, wc, wp, h, dir);
        Vec<D> s{};
        for (int c = 0; c < D + 2; ++c) s[c] = (wp[c] - wm[c]) / (2.0 * h);
        return s;
    };

    InterfaceTrace<D> t;
    t.wx_l = slope(il, jl, 1);
    t.wx_r = slope(i, j, 1);
    if constexpr (D == 2) {
        t.wy_l = slope(il, jl, 2);
        t.wy_r = slope(i, j, 2);
    }
    const double half = 0.5 * ((axis == 1) ? dx : dy);
    const Vec<D>& sl = (axis == 1) ? t.wx_l : t.wy_l;
    const Vec<D>& sr = (axis == 1) ? t.wx_r : t.wy_r;
    t.wl = field(il, jl) + half * sl;
    t.wr = field(i, j) + (-half) * sr;
    return t;
}

#define URBGK_RECON_INSTANTIATE(D)                                             \
    template std::array<Vec<D>, D + 2> flux_jacobian<D>(const Vec<D>&, int);   \
    template Vec<D> characteristic_reconstruct<D>(const Vec<D>&, const Vec<D>&,\
                                                  const Vec<D>&, double, int); \
    template InterfaceTrace<D> interface_trace<D>(const CellField<D>&, int,    \
                                                  int, int, Limiter, double,   \
                                                  double);

URBGK_RECON_INSTANTIATE(1)
URBGK_RECON_INSTANTIATE(2)

}  // namespace urbgk::recon
