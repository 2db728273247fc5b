#pragma once

#include "urbgk/types.hpp"

namespace urbgk::riemann {

enum class WaveType { shock, rarefaction };

// One outer wave of the self-similar solution; for shocks head == tail.
struct Wave {
    WaveType type = WaveType::shock;
    double head = 0.0;  // edge adjacent to the outer state
    double tail = 0.0;  // edge adjacent to the star region
};

// Self-similar solution of the two-state problem for the ultra-relativistic
// gas: two outer waves, a contact moving at u_star, and a star region with
// common pressure and velocity but side-dependent density.
struct RiemannFan {
    Primitive<1> left{}, right{};
    double p_star = 0.0;
    double u_star = 0.0;
    double n_star_left = 0.0;
    double n_star_right = 0.0;
    Wave left_wave{}, right_wave{};

    // state at similarity coordinate xi = x/t
    Primitive<1> sample(double xi) const;
};

// Connects the two states through rarefaction/shock branches, locating the
// star pressure by bracketed bisection plus a Newton polish.  Throws
// NonPhysicalState for invalid inputs and NoConvergence if the bracket
// [1e-14, 1e14] fails or the iteration stalls.
RiemannFan solve_riemann(const Primitive<1>& left, const Primitive<1>& right);

// Largest relative lab-frame jump-condition residual across the given side's
// shock (side = -1 left, +1 right); zero for rarefaction sides.
double shock_residual(const RiemannFan& fan, int side);

}  // namespace urbgk::riemann
