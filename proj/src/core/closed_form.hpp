#pragma once

#include <vector>

#include "modes.hpp"

namespace epochdd {

struct TrajectorySample {
    double t = 0.0;
    double z = 0.0;
};

namespace closed_form {

// Integration constant C of the general solution. Defined for lambda > 0
// and z0 < sigma/lambda; the branch z0 >= sigma/lambda is not solved.
double constant_C(const ModeParams& mode);

// z(t) under the decoupled flow. Dispatches to the one-layer exponential
// (eta = 0), the balanced logistic (|gamma| < 1e-12) or the general
// solution. Inactive modes return z0 for all t; z0 = sigma/lambda is a
// genuine fixed point and returns z* for all t. Numerically stable for
// arbitrarily large t.
double z_general(const ModeParams& mode, double t);

// Exponential relaxation of the fixed-first-layer model:
// z(t) = exp(-|gamma| lambda t)(z0 - sigma/lambda) + sigma/lambda.
// Requires eta = 0 and gamma != 0.
double z_one_layer(const ModeParams& mode, double t);

// Balanced logistic solution, requires gamma = 0, eta > 0, 0 < z0 < z*.
double z_balanced(const ModeParams& mode, double t);

// Flow time at which z(t) first reaches z_target. Requires an active mode
// and z0 <= z_target < z*; z_target = z* maps to +infinity.
double time_to_value(const ModeParams& mode, double z_target);

// Flow time to reach (1 - rho_target) z*. Returns +infinity for
// rho_target = 0 and 0 when z0 already equals the target. Targets behind
// the initialisation raise TargetBehind.
double time_to_target(const ModeParams& mode, double rho_target);

// Right-hand side sqrt(gamma^2 + 4 eta^2 z^2)(sigma - lambda z).
double flow_rhs(const ModeParams& mode, double z);

std::vector<TrajectorySample> sample_trajectory(
    const ModeParams& mode, const std::vector<double>& times);

}  // namespace closed_form

}  // namespace epochdd
