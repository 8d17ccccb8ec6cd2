#pragma once

#include <optional>
#include <span>
#include <vector>

#include "generalisation.hpp"
#include "modes.hpp"

namespace epochdd {

enum class InflectionSide { BeforeMin, AfterMin };

struct InflectionPoint {
    double t_hat = 0.0;
    double z_hat = 0.0;
    InflectionSide side = InflectionSide::AfterMin;
};

// Inflection points of a per-mode error curve, classified against the time
// t_min at which the curve attains its minimum. routh_sign_changes is -1
// when the inflection cubic degenerates (eta = 0 or gamma = 0).
struct InflectionReport {
    int mode_index = -1;
    std::vector<InflectionPoint> points;  // sorted by t_hat, at most 3
    double t_min = 0.0;                   // may be +infinity (rho = 0)
    double discriminant = 0.0;
    int routh_sign_changes = -1;
};

struct CubicCoeffs {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double eval(double z) const { return ((a * z + b) * z + c) * z + d; }
};

// Coefficients of the cubic in z whose roots are the candidate inflection
// locations of the per-mode error curve.
CubicCoeffs inflection_cubic(const ModeParams& mode);

// 18abcd - 4ac^3 - 27a^2d^2 + b^2c^2 - 4b^3d.
double cubic_discriminant_coeffs(const CubicCoeffs& k);
double cubic_discriminant(const ModeParams& mode);

// Sign changes of the first Routh column (a, b, (bc - ad)/b, d); equals the
// number of roots with positive real part. Requires b != 0.
int routh_sign_changes(const CubicCoeffs& k);

// Real roots in ascending order (normalised trigonometric/Cardano closed
// form followed by one Newton polish per root). Quadratic and linear
// degenerations are handled.
std::vector<double> solve_cubic(double a, double b, double c, double d);

// Analytic d^2/dt^2 of the per-mode error curve expressed through z.
double error_second_derivative(const ModeParams& mode, double z);

// eta = 0, gamma != 0: a single inflection after the minimum for rho > 0,
// none for rho = 0.
InflectionReport inflection_one_layer(const ModeParams& mode);

// gamma = 0, eta > 0: up to two inflection points straddling the minimum;
// the earlier one exists only when z0 lies below its location.
InflectionReport inflection_balanced(const ModeParams& mode);

// gamma != 0, eta > 0: real cubic roots inside (z0, z*) confirmed by a sign
// change of the analytic second derivative.
InflectionReport inflection_general(const ModeParams& mode);

// Regime dispatch over the three cases above.
InflectionReport inflections(const ModeParams& mode);

struct NecessaryWitness {
    int mode_index = -1;
    double t_hat = 0.0;
};

struct NecessaryCondition {
    bool holds = false;
    std::optional<NecessaryWitness> witness;
};

// Double descent requires some inflection point strictly inside
// (min_i t_min_i, max_i t_min_i) over the active modes.
NecessaryCondition necessary_condition_general(
    std::span<const ModeParams> modes);

enum class TwoModeScenario { Neither, FirstScenario, SecondScenario, Both };

const char* scenario_name(TwoModeScenario s);

struct TwoModeCondition {
    bool holds = false;
    TwoModeScenario scenario = TwoModeScenario::Neither;
};

// Specialisation to two active modes, ordered internally so the first
// reaches its minimum earlier: either the later mode still has an
// inflection ahead of it (FirstScenario) or the earlier mode inflects
// before the later minimum (SecondScenario).
TwoModeCondition necessary_condition_two_modes(const ModeParams& mode_i,
                                               const ModeParams& mode_j);

// Closed-form equivalent for two one-layer modes started at zero with equal
// imbalance: log(2 / rho_i) <= (lambda_i / lambda_j) log(1 / rho_j).
bool one_layer_zero_init_condition(const ModeParams& mode_i,
                                   const ModeParams& mode_j);

struct DDVerdict {
    bool detected = false;
    std::optional<double> first_min_t;
    std::optional<double> peak_t;
    std::optional<double> second_min_t;
    double prominence = 0.0;
    std::optional<bool> necessary_condition_holds;
    std::optional<NecessaryWitness> witness;
};

// Descent / rise / descent detector: a prominence-qualified minimum, a
// later maximum at least the threshold above it, and a later point at
// least the threshold below that maximum. The threshold is
// prominence_rel * (max - min) of the curve.
DDVerdict detect_double_descent(const ErrorCurve& curve,
                                double prominence_rel = 0.01);

// Same, additionally evaluating the necessary condition on the attached
// modes.
DDVerdict detect_double_descent(const ErrorCurve& curve,
                                std::span<const ModeParams> modes,
                                double prominence_rel = 0.01);

}  // namespace epochdd
