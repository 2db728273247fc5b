#include "urbgk/riemann.hpp"

#include <algorithm>
#include <cmath>

namespace urbgk::riemann {

namespace {

constexpr double cs = sound_speed;

struct SideState {
    double n, u, p;
};

double lorentz(double v) { return 1.0 / std::sqrt(1.0 - v * v); }

// compression-wave velocity in the frame of the outer state
double shock_w1(double r) { return std::sqrt((3.0 * r + 1.0) / (3.0 * (r + 3.0))); }

// Velocity behind the wave joining state s to star pressure ps.
// sigma = +1 for the left family, -1 for the right family.
double star_velocity(const SideState& s, double ps, int sigma) {
    if (ps <= s.p) {
        const double a =
            std::atanh(s.u) + sigma * (std::sqrt(3.0) / 4.0) * std::log(s.p / ps);
        return std::tanh(a);
    }
    const double w1 = shock_w1(ps / s.p);
    const double w2 = 1.0 / (3.0 * w1);
    const double vs = (s.u - sigma * w1) / (1.0 - sigma * s.u * w1);
    return (sigma * w2 + vs) / (1.0 + sigma * w2 * vs);
}

double shock_speed(const SideState& s, double ps, int sigma) {
    const double w1 = shock_w1(ps / s.p);
    return (s.u - sigma * w1) / (1.0 - sigma * s.u * w1);
}

double star_density(const SideState& s, double ps) {
    if (ps <= s.p) return s.n * std::pow(ps / s.p, 0.75);
    const double w1 = shock_w1(ps / s.p);
    const double w2 = 1.0 / (3.0 * w1);
    return s.n * (lorentz(w1) * w1) / (lorentz(w2) * w2);
}

double velocity_mismatch(const SideState& L, const SideState& R, double ps) {
    return star_velocity(L, ps, +1) - star_velocity(R, ps, -1);
}

// The mismatch is strictly decreasing in ps (tends to +2 as ps -> 0 and to
// -2 as ps -> infinity), so a sign-checked geometric bisection always lands
// on the root; Newton then polishes it to relative 1e-13.
double solve_star_pressure(const SideState& L, const SideState& R) {
    double lo = 1e-14, hi = 1e14;
    const double flo = velocity_mismatch(L, R, lo);
    const double fhi = velocity_mismatch(L, R, hi);
    if (!(flo >= 0.0) || !(fhi <= 0.0))
        throw NoConvergence("riemann star pressure not bracketed in [1e-14, 1e14]");
    while (hi / lo > 1.0 + 1e-6) {
        const double mid = std::sqrt(lo * hi);
        (velocity_mismatch(L, R, mid) >= 0.0 ? lo : hi) = mid;
    }
    double ps = std::sqrt(lo * hi);
    for (int it = 0; it < 100; ++it) {
        const double f = velocity_mismatch(L, R, ps);
        (f >= 0.0 ? lo : hi) = ps;
        const double h = 1e-7 * ps;
        const double fp =
            (velocity_mismatch(L, R, ps + h) - velocity_mismatch(L, R, ps - h)) /
            (2.0 * h);
        double next = ps - f / fp;
        if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
        if (std::abs(next - ps) <= 1e-13 * ps) return next;
        ps = next;
    }
    throw NoConvergence("riemann star pressure iteration stalled");
}

Primitive<1> make_state(double n, double u, double p) {
    return Primitive<1>{n, {u}, p / n};
}

// state inside a rarefaction fan at similarity coordinate xi
Primitive<1> fan_state(const SideState& s, double xi, int sigma) {
    const double u = (xi + sigma * cs) / (1.0 + sigma * xi * cs);
    const double p =
        s.p * std::exp(sigma * (4.0 / std::sqrt(3.0)) * (std::atanh(s.u) - std::atanh(u)));
    const double n = s.n * std::pow(p / s.p, 0.75);
    return make_state(n, u, p);
}

SideState side_of(const Primitive<1>& prim) {
    return {prim.n, prim.u[0], prim.pressure()};
}

}  // namespace

Primitive<1> RiemannFan::sample(double xi) const {
    if (xi <= left_wave.head) return left;
    if (left_wave.type == WaveType::rarefaction && xi < left_wave.tail)
        return fan_state(side_of(left), xi, +1);
    if (xi <= u_star) return make_state(n_star_left, u_star, p_star);
    if (right_wave.type == WaveType::rarefaction) {
        if (xi <= right_wave.tail) return make_state(n_star_right, u_star, p_star);
        if (xi < right_wave.head) return fan_state(side_of(right), xi, -1);
        return right;
    }
    if (xi < right_wave.head) return make_state(n_star_right, u_star, p_star);
    return right;
}

RiemannFan solve_riemann(const Primitive<1>& left, const Primitive<1>& right) {
    if (!left.valid() || !right.valid())
        throw NonPhysicalState("riemann input state is not physical");

    const SideState L = side_of(left), R = side_of(right);
    RiemannFan fan;
    fan.left = left;
    fan.right = right;
    fan.p_star = solve_star_pressure(L, R);
    // the two branch velocities agree to solver tolerance; averaging keeps
    // mirror-symmetric inputs exactly antisymmetric
    fan.u_star =
        0.5 * (star_velocity(L, fan.p_star, +1) + star_velocity(R, fan.p_star, -1));
    fan.n_star_left = star_density(L, fan.p_star);
    fan.n_star_right = star_density(R, fan.p_star);

    if (fan.p_star > L.p) {
        const double vs = shock_speed(L, fan.p_star, +1);
        fan.left_wave = {WaveType::shock, vs, vs};
    } else {
        fan.left_wave = {WaveType::rarefaction, (L.u - cs) / (1.0 - L.u * cs),
                         (fan.u_star - cs) / (1.0 - fan.u_star * cs)};
    }
    if (fan.p_star > R.p) {
        const double vs = shock_speed(R, fan.p_star, -1);
        fan.right_wave = {WaveType::shock, vs, vs};
    } else {
        fan.right_wave = {WaveType::rarefaction, (R.u + cs) / (1.0 + R.u * cs),
                          (fan.u_star + cs) / (1.0 + fan.u_star * cs)};
    }

    if (std::max(shock_residual(fan, -1), shock_residual(fan, +1)) > 1e-9)
        throw NoConvergence("riemann solution violates jump conditions");
    return fan;
}

double shock_residual(const RiemannFan& fan, int side) {
    const Wave& wave = (side < 0) ? fan.left_wave : fan.right_wave;
    if (wave.type != WaveType::shock) return 0.0;
    const SideState out = side_of(side < 0 ? fan.left : fan.right);
    const SideState in{side < 0 ? fan.n_star_left : fan.n_star_right, fan.u_star,
                       fan.p_star};
    const double vs = wave.head;

    // lab-frame conserved densities and fluxes with e = 3p
    auto density = [](const SideState& s, int c) {
        const double g = lorentz(s.u);
        if (c == 0) return s.n * g;
        if (c == 1) return 4.0 * s.p * g * g * s.u;
        return 4.0 * s.p * g * g - s.p;
    };
    auto flux = [&](const SideState& s, int c) {
        if (c == 0) return density(s, 0) * s.u;
        if (c == 1) return density(s, 1) * s.u + s.p;
        return density(s, 1);
    };

    double worst = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double a = vs * density(in, c), b = vs * density(out, c);
        const double fa = flux(in, c), fb = flux(out, c);
        const double scale = std::max({std::abs(a), std::abs(b), std::abs(fa),
                                       std::abs(fb), 1e-300});
        worst = std::max(worst, std::abs((a - b) - (fa - fb)) / scale);
    }
    return worst;
}

}  // namespace urbgk::riemann
