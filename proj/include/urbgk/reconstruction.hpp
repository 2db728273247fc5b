#pragma once

#include <cstddef>
#include <vector>

#include "urbgk/types.hpp"

namespace urbgk::recon {

enum class Limiter { none, van_leer };

// Uniform-grid storage of conserved cell averages with two ghost layers on
// every boundary. Indexing accepts i in [-2, nx+2) and j in [-2, ny+2);
// 1D fields use ny = 1 and j = 0.
template <int D>
struct CellField {
    static constexpr int ghost = 2;
    int nx = 0, ny = 1;
    std::vector<Vec<D>> data;

    CellField() = default;
    CellField(int nx_, int ny_) : nx(nx_), ny(ny_) {
        if (nx < 4 || (D == 2 ? ny < 4 : ny != 1))
            throw ConfigError("grid needs at least 4 interior cells per active dimension");
        data.assign(std::size_t(nx + 2 * ghost) * (ny + 2 * ghost), Vec<D>{});
    }
    explicit CellField(int nx_) : CellField(nx_, 1) {}

    Vec<D>& operator()(int i, int j = 0) {
        return data[std::size_t(j + ghost) * (nx + 2 * ghost) + (i + ghost)];
    }
    const Vec<D>& operator()(int i, int j = 0) const {
        return data[std::size_t(j + ghost) * (nx + 2 * ghost) + (i + ghost)];
    }
};

// Interface data for the flux evaluation: limiting values from both sides
// plus the one-sided slopes of the adjacent cells (global axes; the
// transverse slopes are zero in 1D).
template <int D>
struct InterfaceTrace {
    Vec<D> wl{}, wr{};
    Vec<D> wx_l{}, wx_r{};
    Vec<D> wy_l{}, wy_r{};
};

// Monotonized slope of the centered sample: harmonic mean of the one-sided
// differences when they agree in sign, zero otherwise.
double van_leer_slope(double w_l, double w_c, double w_r, double dx);

// Flux Jacobian dF_axis/dW at conserved state w by central differences of
// the analytic flux (step 1e-6 * (1 + |W_k|) per component); rows indexed
// by flux component.
template <int D>
std::array<Vec<D>, D + 2> flux_jacobian(const Vec<D>& w, int axis);

// Limited slope of the center cell: increments are projected onto the
// eigenvectors of the local flux Jacobian, limited per characteristic
// field, and mapped back. Falls back to componentwise limiting when the
// eigen-decomposition is ill-conditioned (condition number above 1e8).
template <int D>
Vec<D> characteristic_reconstruct(const Vec<D>& wl, const Vec<D>& wc,
                                  const Vec<D>& wr, double dx, int axis);

// Traces at the interface between cells (i-1,j) and (i,j) for axis 1, or
// (i,j-1) and (i,j) for axis 2. Limiter none selects plain central slopes.
template <int D>
InterfaceTrace<D> interface_trace(const CellField<D>& field, int i, int j,
                                  int axis, Limiter lim, double dx,
                                  double dy = 1.0);

}  // namespace urbgk::recon
