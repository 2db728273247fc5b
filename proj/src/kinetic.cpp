#include "urbgk/kinetic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "urbgk/quadrature.hpp"

namespace urbgk::kinetic {

namespace {

constexpr double csq = 1.0 / 3.0;  // sound speed squared

// int_0^inf |p|^m g |p| d|p| = n/(8 pi T^3) * (m+1)! * (T/Dir)^(m+2),
// with Dir = U^0 - xi U^1 - s sin(phi) U^2 the direction-only Juttner rate.
inline double radial_moment(double n, double T, double Dir, int m) {
    static constexpr double fact[6] = {1, 1, 2, 6, 24, 120};
    return n / (8.0 * M_PI * T * T * T) * fact[m + 1] * std::pow(T / Dir, m + 2);
}

}  // namespace

template <int D>
Vec<D> conserved_from_primitive(const Primitive<D>& prim) {
    const double nh = prim.n * prim.enthalpy();
    const double U0 = prim.U0();
    Vec<D> w{};
    w[0] = prim.n * U0;
    for (int i = 1; i <= D; ++i) w[i] = nh * U0 * prim.U(i);
    w[D + 1] = nh * U0 * U0 - prim.pressure();
    return w;
}

template <int D>
Primitive<D> primitive_from_conserved_euler(const Vec<D>& w) {
    const double T00 = w[D + 1];
    double mom2 = 0.0;
    for (int i = 1; i <= D; ++i) mom2 += w[i] * w[i];
    const double disc = 4.0 * T00 * T00 - 3.0 * mom2;
    if (disc <= 0.0)
        throw NonPhysicalState("conserved->primitive: non-positive discriminant");
    const double p = (-T00 + std::sqrt(disc)) / 3.0;
    if (!(p > 0.0))
        throw NonPhysicalState("conserved->primitive: non-positive pressure");
    const double denom = std::sqrt(4.0 * p * (p + T00));
    double Usq = 0.0;
    std::array<double, D> U;
    for (int i = 1; i <= D; ++i) {
        U[i - 1] = w[i] / denom;
        Usq += U[i - 1] * U[i - 1];
    }
    const double U0 = std::sqrt(1.0 + Usq);
    const double n = w[0] / U0;
    if (!(n > 0.0))
        throw NonPhysicalState("conserved->primitive: non-positive density");
    Primitive<D> prim;
    prim.n = n;
    prim.T = p / n;
    for (int i = 0; i < D; ++i) prim.u[i] = U[i] / U0;
    return prim;
}

template <int D>
Primitive<D> landau_recovery(const MomentTensor<D>& mom) {
    using Mat = Eigen::Matrix<double, D + 1, D + 1>;
    using Col = Eigen::Matrix<double, D + 1, 1>;
    Mat T;
    for (int a = 0; a <= D; ++a)
        for (int b = 0; b <= D; ++b) T(a, b) = 0.5 * (mom.T[a][b] + mom.T[b][a]);

    // Solve T V = eps G V (G = diag(1,-1[,-1]), V = G U covariant) via the
    // Cholesky congruence: M = L^-1 G L^-T has exactly one positive
    // eigenvalue mu = 1/eps when T is positive definite.
    Eigen::LLT<Mat> llt(T);
    if (llt.info() != Eigen::Success)
        throw NonPhysicalState("landau recovery: moment tensor not positive definite");
    Mat G = Mat::Zero();
    G(0, 0) = 1.0;
    for (int i = 1; i <= D; ++i) G(i, i) = -1.0;
    const Mat Linv = llt.matrixL().solve(Mat::Identity());
    const Mat M = Linv * G * Linv.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> eig(M);
    if (eig.info() != Eigen::Success)
        throw NonPhysicalState("landau recovery: eigen solve failed");

    int chosen = -1;
    double eps = 0.0;
    Col V = Col::Zero();
    int positive_timelike = 0;
    for (int k = 0; k <= D; ++k) {
        const double mu = eig.eigenvalues()(k);
        if (mu <= 0.0) continue;
        Col Vk = llt.matrixL().transpose().solve(eig.eigenvectors().col(k));
        double norm2 = Vk(0) * Vk(0);
        for (int i = 1; i <= D; ++i) norm2 -= Vk(i) * Vk(i);
        if (norm2 > 0.0) {
            ++positive_timelike;
            chosen = k;
            eps = 1.0 / mu;
            V = Vk;
        }
    }
    if (chosen < 0 || positive_timelike != 1)
        throw NonPhysicalState("landau recovery: no unique timelike eigenpair");

    double norm2 = V(0) * V(0);
    for (int i = 1; i <= D; ++i) norm2 -= V(i) * V(i);
    V /= std::sqrt(norm2);
    if (V(0) < 0.0) V = -V;
    // U^0 = V_0, U^i = -V_i; n = U_alpha N^alpha = V . N.
    double n = V(0) * mom.N[0];
    for (int i = 1; i <= D; ++i) n += V(i) * mom.N[i];
    if (!(n > 0.0))
        throw NonPhysicalState("landau recovery: non-positive density");
    Primitive<D> prim;
    prim.n = n;
    prim.T = eps / (3.0 * n);
    for (int i = 0; i < D; ++i) prim.u[i] = -V(i + 1) / V(0);
    if (!prim.valid())
        throw NonPhysicalState("landau recovery: invalid primitive");
    return prim;
}

namespace {

template <int D>
Vec<D> full_space_moments(const Primitive<D>& prim, int k) {
    // N^k, T^{ik}, T^{0k} in closed form (equilibrium identities).
    const double nh = prim.n * prim.enthalpy();
    const double p = prim.pressure();
    auto Ucomp = [&](int a) { return a == 0 ? prim.U0() : prim.U(a); };
    auto metric = [](int a, int b) {
        if (a != b) return 0.0;
        return a == 0 ? 1.0 : -1.0;
    };
    Vec<D> out{};
    out[0] = prim.n * Ucomp(k);
    for (int i = 1; i <= D; ++i)
        out[i] = nh * Ucomp(i) * Ucomp(k) - p * metric(i, k);
    out[D + 1] = nh * Ucomp(0) * Ucomp(k) - p * metric(0, k);
    return out;
}

}  // namespace

template <int D>
Vec<D> juttner_moments(const Primitive<D>& prim, int weight_axis, Half half) {
    if (half.kind == HalfKind::full) return full_space_moments(prim, weight_axis);

    if constexpr (D == 2) {
        // Splits along p^2 are evaluated in the axis-swapped frame, where the
        // half space is a direction-cosine panel and the integrand stays
        // smooth (a direct phi split leaves a bare sqrt(1-xi^2) endpoint
        // singularity that the fixed quadrature resolves poorly).
        if (half.axis == 2) {
            Primitive<2> rot = prim;
            std::swap(rot.u[0], rot.u[1]);
            const int k = (weight_axis == 1) ? 2 : (weight_axis == 2 ? 1 : 0);
            Vec<2> r = juttner_moments(rot, k, {half.kind, 1});
            std::swap(r[1], r[2]);
            return r;
        }
    }

    const auto& xg = quad::xi_grid();
    const double U0 = prim.U0();
    const double U1 = prim.U(1);
    Vec<D> out{};

    if constexpr (D == 1) {
        // azimuth integrates to 2*pi; the direction split is in xi only
        const int lo = (half.kind == HalfKind::pos) ? 16 : 0;
        for (int i = lo; i < lo + 16; ++i) {
            const double xi = xg.xi[i];
            const double Dir = U0 - xi * U1;
            const double I1 = 2.0 * M_PI * radial_moment(prim.n, prim.T, Dir, 1);
            const double I2 = 2.0 * M_PI * radial_moment(prim.n, prim.T, Dir, 2);
            const double wk = (weight_axis == 1) ? xi : 1.0;
            out[0] += xg.w[i] * wk * I1;
            out[1] += xg.w[i] * wk * xi * I2;
            out[2] += xg.w[i] * wk * I2;
        }
    } else {
        const auto& pg = quad::phi_grid();
        const double U2 = prim.U(2);
        const int xlo = (half.kind == HalfKind::pos) ? 16 : 0;
        const int xhi = (half.kind == HalfKind::neg) ? 16 : 32;
        for (int i = xlo; i < xhi; ++i) {
            const double xi = xg.xi[i];
            const double s = std::sqrt(1.0 - xi * xi);
            for (int j = 0; j < 32; ++j) {
                const double w2 = s * pg.sn[j];
                const double Dir = U0 - xi * U1 - w2 * U2;
                const double wgt = xg.w[i] * pg.w[j];
                const double I1 = radial_moment(prim.n, prim.T, Dir, 1);
                const double I2 = radial_moment(prim.n, prim.T, Dir, 2);
                double wk = 1.0;
                if (weight_axis == 1) wk = xi;
                if (weight_axis == 2) wk = w2;
                out[0] += wgt * wk * I1;
                out[1] += wgt * wk * xi * I2;
                out[2] += wgt * wk * w2 * I2;
                out[3] += wgt * wk * I2;
            }
        }
    }
    return out;
}

template <int D>
std::array<Vec<D>, D + 1> juttner_moment_blocks(const Primitive<D>& prim, Half half) {
    std::array<Vec<D>, D + 1> blocks;
    if (half.kind == HalfKind::full) {
        for (int k = 0; k <= D; ++k) blocks[k] = full_space_moments(prim, k);
        return blocks;
    }

    if constexpr (D == 2) {
        if (half.axis == 2) {
            Primitive<2> rot = prim;
            std::swap(rot.u[0], rot.u[1]);
            const auto rb = juttner_moment_blocks(rot, Half{half.kind, 1});
            // weight p^1 <-> p^2 and the component slots 1 <-> 2
            blocks[0] = rb[0];
            blocks[1] = rb[2];
            blocks[2] = rb[1];
            for (int k = 0; k <= 2; ++k) std::swap(blocks[k][1], blocks[k][2]);
            return blocks;
        }
    }

    const auto& xg = quad::xi_grid();
    const double U0 = prim.U0();
    const double U1 = prim.U(1);
    for (auto& bk : blocks) bk = Vec<D>{};

    if constexpr (D == 1) {
        const int lo = (half.kind == HalfKind::pos) ? 16 : 0;
        for (int i = lo; i < lo + 16; ++i) {
            const double xi = xg.xi[i];
            const double Dir = U0 - xi * U1;
            const double I1 = 2.0 * M_PI * xg.w[i] * radial_moment(prim.n, prim.T, Dir, 1);
            const double I2 = 2.0 * M_PI * xg.w[i] * radial_moment(prim.n, prim.T, Dir, 2);
            const double wk[2] = {1.0, xi};
            for (int k = 0; k <= 1; ++k) {
                blocks[k][0] += wk[k] * I1;
                blocks[k][1] += wk[k] * xi * I2;
                blocks[k][2] += wk[k] * I2;
            }
        }
    } else {
        const auto& pg = quad::phi_grid();
        const double U2 = prim.U(2);
        const int xlo = (half.kind == HalfKind::pos) ? 16 : 0;
        const int xhi = (half.kind == HalfKind::neg) ? 16 : 32;
        for (int i = xlo; i < xhi; ++i) {
            const double xi = xg.xi[i];
            const double s = std::sqrt(1.0 - xi * xi);
            for (int j = 0; j < 32; ++j) {
                const double w2 = s * pg.sn[j];
                const double Dir = U0 - xi * U1 - w2 * U2;
                const double wgt = xg.w[i] * pg.w[j];
                const double I1 = wgt * radial_moment(prim.n, prim.T, Dir, 1);
                const double I2 = wgt * radial_moment(prim.n, prim.T, Dir, 2);
                const double wk[3] = {1.0, xi, w2};
                for (int k = 0; k <= 2; ++k) {
                    blocks[k][0] += wk[k] * I1;
                    blocks[k][1] += wk[k] * xi * I2;
                    blocks[k][2] += wk[k] * w2 * I2;
                    blocks[k][3] += wk[k] * I2;
                }
            }
        }
    }
    return blocks;
}

template <int D>
MomentMatrix<D> moment_matrix(const Primitive<D>& prim, int k) {
    const double n = prim.n, T = prim.T;
    const double U0 = prim.U0(), U1 = prim.U(1);
    const double nT = n * T, nT2 = n * T * T;
    MomentMatrix<D> M;
    if constexpr (D == 1) {
        const double V = U1 * U1;
        if (k == 0) {
            M[0] = {n * U0, 4 * nT * U1 * U0, nT * (4 * V + 3)};
            M[1] = {M[0][1], 4 * nT2 * U0 * (6 * V + 1), 4 * nT2 * U1 * (6 * V + 5)};
            M[2] = {M[0][2], M[1][2], 12 * nT2 * U0 * (2 * V + 1)};
        } else {
            M[0] = {n * U1, nT * (4 * V + 1), 4 * nT * U1 * U0};
            M[1] = {M[0][1], 12 * nT2 * U1 * (2 * V + 1), 4 * nT2 * U0 * (6 * V + 1)};
            M[2] = {M[0][2], M[1][2], 4 * nT2 * U1 * (6 * V + 5)};
        }
    } else {
        const double U2 = prim.U(2);
        const double V1 = U1 * U1, V2 = U2 * U2, S = V1 + V2;
        if (k == 0) {
            M[0] = {n * U0, 4 * nT * U1 * U0, 4 * nT * U2 * U0, nT * (4 * S + 3)};
            M[1] = {M[0][1], 4 * nT2 * (6 * V1 + 1) * U0, 24 * nT2 * U1 * U2 * U0,
                    4 * nT2 * U1 * (6 * S + 5)};
            M[2] = {M[0][2], M[1][2], 4 * nT2 * (6 * V2 + 1) * U0,
                    4 * nT2 * U2 * (6 * S + 5)};
            M[3] = {M[0][3], M[1][3], M[2][3], 12 * nT2 * U0 * (2 * S + 1)};
        } else if (k == 1) {
            M[0] = {n * U1, nT * (4 * V1 + 1), 4 * nT * U1 * U2, 4 * nT * U1 * U0};
            M[1] = {M[0][1], 12 * nT2 * U1 * (2 * V1 + 1), 4 * nT2 * U2 * (6 * V1 + 1),
                    4 * nT2 * U0 * (6 * V1 + 1)};
            M[2] = {M[0][2], M[1][2], 4 * nT2 * U1 * (6 * V2 + 1),
                    24 * nT2 * U1 * U2 * U0};
            M[3] = {M[0][3], M[1][3], M[2][3], 4 * nT2 * U1 * (6 * S + 5)};
        } else {
            M[0] = {n * U2, 4 * nT * U1 * U2, nT * (4 * V2 + 1), 4 * nT * U2 * U0};
            M[1] = {M[0][1], 4 * nT2 * U2 * (6 * V1 + 1), 4 * nT2 * U1 * (6 * V2 + 1),
                    24 * nT2 * U1 * U2 * U0};
            M[2] = {M[0][2], M[1][2], 12 * nT2 * U2 * (2 * V2 + 1),
                    4 * nT2 * U0 * (6 * V2 + 1)};
            M[3] = {M[0][3], M[1][3], M[2][3], 4 * nT2 * U2 * (6 * S + 5)};
        }
    }
    return M;
}

template <int D>
std::array<double, D + 2> characteristic_speeds(const Primitive<D>& prim, int axis) {
    std::array<double, D + 2> lam{};
    if constexpr (D == 1) {
        const double u = prim.u[0];
        const double denom = 1.0 - u * u * csq;
        lam[0] = (u * (1.0 - csq) - sound_speed * (1.0 - u * u)) / denom;
        lam[1] = u;
        lam[2] = (u * (1.0 - csq) + sound_speed * (1.0 - u * u)) / denom;
    } else {
        const double uk = prim.u[axis - 1];
        const double q2 = prim.usq();
        const double denom = 1.0 - q2 * csq;
        const double root =
            std::sqrt(std::max(0.0, 1.0 - uk * uk - (q2 - uk * uk) * csq));
        const double fac = std::sqrt(1.0 - q2);
        lam[0] = (uk * (1.0 - csq) - sound_speed * fac * root) / denom;
        lam[1] = uk;
        lam[2] = uk;
        lam[3] = (uk * (1.0 - csq) + sound_speed * fac * root) / denom;
    }
    return lam;
}

template <int D>
double spectral_radius(const Primitive<D>& prim, int axis) {
    const auto lam = characteristic_speeds<D>(prim, axis);
    double r = 0.0;
    for (double l : lam) r = std::max(r, std::abs(l));
    return r;
}

template <int D>
Vec<D> euler_flux(const Primitive<D>& prim, int axis) {
    const double nh = prim.n * prim.enthalpy();
    const double p = prim.pressure();
    const double Ua = prim.U(axis);
    Vec<D> f{};
    f[0] = prim.n * Ua;
    for (int i = 1; i <= D; ++i) f[i] = nh * prim.U(i) * Ua + (i == axis ? p : 0.0);
    f[D + 1] = nh * prim.U0() * Ua;
    return f;
}

template <int D>
Vec<D> solve_moment_system(const MomentMatrix<D>& M, const Vec<D>& rhs) {
    using Mat = Eigen::Matrix<double, D + 2, D + 2>;
    using Col = Eigen::Matrix<double, D + 2, 1>;
    Mat A;
    Col b;
    for (int i = 0; i < D + 2; ++i) {
        b(i) = rhs[i];
        for (int j = 0; j < D + 2; ++j) A(i, j) = M[i][j];
    }
    Eigen::LLT<Mat> llt(A);
    if (llt.info() != Eigen::Success)
        throw SingularMomentMatrix("moment matrix not positive definite");
    const Col x = llt.solve(b);
    Vec<D> out{};
    for (int i = 0; i < D + 2; ++i) out[i] = x(i);
    return out;
}

template <int D>
Vec<D> mat_vec(const MomentMatrix<D>& M, const Vec<D>& x) {
    Vec<D> y{};
    for (int i = 0; i < D + 2; ++i)
        for (int j = 0; j < D + 2; ++j) y[i] += M[i][j] * x[j];
    return y;
}

template <int D>
MomentTensor<D> tensor_from_blocks(const std::array<Vec<D>, D + 1>& blocks) {
    MomentTensor<D> mom;
    for (int k = 0; k <= D; ++k) {
        mom.N[k] = blocks[k][0];
        mom.T[0][k] = blocks[k][D + 1];
        for (int i = 1; i <= D; ++i) mom.T[i][k] = blocks[k][i];
    }
    for (int a = 0; a <= D; ++a)
        for (int b = a + 1; b <= D; ++b) {
            const double v = 0.5 * (mom.T[a][b] + mom.T[b][a]);
            mom.T[a][b] = mom.T[b][a] = v;
        }
    return mom;
}

template <int D>
Vec<D> conserved_of_tensor(const MomentTensor<D>& mom) {
    Vec<D> w{};
    w[0] = mom.N[0];
    for (int i = 1; i <= D; ++i) w[i] = mom.T[0][i];
    w[D + 1] = mom.T[0][0];
    return w;
}

#define URBGK_INSTANTIATE(D)                                                          \
    template Vec<D> conserved_from_primitive<D>(const Primitive<D>&);                 \
    template Primitive<D> primitive_from_conserved_euler<D>(const Vec<D>&);           \
    template Primitive<D> landau_recovery<D>(const MomentTensor<D>&);                 \
    template Vec<D> juttner_moments<D>(const Primitive<D>&, int, Half);               \
    template std::array<Vec<D>, D + 1> juttner_moment_blocks<D>(const Primitive<D>&,  \
                                                                Half);                \
    template MomentMatrix<D> moment_matrix<D>(const Primitive<D>&, int);              \
    template std::array<double, D + 2> characteristic_speeds<D>(const Primitive<D>&,  \
                                                                int);                 \
    template double spectral_radius<D>(const Primitive<D>&, int);                     \
    template Vec<D> euler_flux<D>(const Primitive<D>&, int);                          \
    template Vec<D> solve_moment_system<D>(const MomentMatrix<D>&, const Vec<D>&);    \
    template Vec<D> mat_vec<D>(const MomentMatrix<D>&, const Vec<D>&);                \
    template MomentTensor<D> tensor_from_blocks<D>(const std::array<Vec<D>, D + 1>&); \
    template Vec<D> conserved_of_tensor<D>(const MomentTensor<D>&);

URBGK_INSTANTIATE(1)
URBGK_INSTANTIATE(2)
#undef URBGK_INSTANTIATE

}  // namespace urbgk::kinetic
