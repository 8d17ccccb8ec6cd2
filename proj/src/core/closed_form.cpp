#include "closed_form.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace epochdd {
namespace closed_form {

namespace {

constexpr double kBalancedGammaTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_inactive(const ModeParams& mode) {
    if (mode.gamma == 0.0 && mode.z0 == 0.0) return true;
    // rate = 0 freezes the flow except for the unsupported decreasing
    // branch eta > 0, sigma = 0, z0 > 0, which falls through to the
    // branch checks below.
    if (effective_rate(mode) == 0.0 && (mode.eta() == 0.0 || mode.z0 == 0.0))
        return true;
    return false;
}

// N(z) = sqrt((g^2 l^2 + 4 e^2 s^2)(g^2 + 4 e^2 z^2)) + g^2 l + 4 e^2 s z,
// the numerator of the separable-integral antiderivative.
double antiderivative_numerator(const ModeParams& mode, double z) {
    double g2 = mode.gamma * mode.gamma;
    double e2 = mode.eta() * mode.eta();
    double r = effective_rate(mode);
    return r * std::sqrt(g2 + 4.0 * e2 * z * z) + g2 * mode.lambda +
           4.0 * e2 * mode.sigma * z;
}

}  // namespace

double flow_rhs(const ModeParams& mode, double z) {
    double e = mode.eta();
    return std::sqrt(mode.gamma * mode.gamma + 4.0 * e * e * z * z) *
           (mode.sigma - mode.lambda * z);
}

double constant_C(const ModeParams& mode) {
    if (mode.lambda <= 0.0)
        fail(ErrorKind::DegenerateMode, "constant_C requires lambda > 0");
    double zstar = global_minimum(mode);
    if (mode.z0 >= zstar)
        fail(ErrorKind::OutOfBranch,
             "solution branch requires z0 < sigma/lambda");
    return antiderivative_numerator(mode, mode.z0) /
           (mode.lambda * (mode.sigma - mode.lambda * mode.z0));
}

double z_one_layer(const ModeParams& mode, double t) {
    if (mode.eta() != 0.0)
        fail(ErrorKind::Regime, "one-layer solution requires eta = 0");
    if (mode.gamma == 0.0)
        fail(ErrorKind::InactiveMode,
             "gamma = 0 with eta = 0 never moves; no one-layer solution");
    if (mode.lambda <= 0.0)
        fail(ErrorKind::DegenerateMode, "one-layer solution needs lambda > 0");
    double zstar = global_minimum(mode);
    double rate = std::fabs(mode.gamma) * mode.lambda;
    return std::exp(-rate * t) * (mode.z0 - zstar) + zstar;
}

double z_balanced(const ModeParams& mode, double t) {
    if (mode.z0 <= 0.0)
        fail(ErrorKind::InactiveMode,
             "balanced solution requires z0 > 0");
    if (mode.eta() <= 0.0)
        fail(ErrorKind::Regime, "balanced solution requires eta > 0");
    if (mode.lambda <= 0.0)
        fail(ErrorKind::DegenerateMode, "balanced solution needs lambda > 0");
    if (mode.z0 >= global_minimum(mode))
        fail(ErrorKind::OutOfBranch,
             "solution branch requires z0 < sigma/lambda");
    // sigma z0 / (lambda z0 (1 - E) + sigma E), E = exp(-2 eta sigma t);
    // the logistic form rescaled to avoid overflow at large t.
    double E = std::exp(-2.0 * mode.eta() * mode.sigma * t);
    return mode.sigma * mode.z0 /
           (mode.lambda * mode.z0 * (1.0 - E) + mode.sigma * E);
}

double z_general(const ModeParams& mode, double t) {
    validate_mode(mode);
    if (mode.sigma == 0.0 && mode.lambda == 0.0) return mode.z0;  // frozen
    if (is_inactive(mode)) return mode.z0;
    if (mode.lambda <= 0.0)
        fail(ErrorKind::DegenerateMode, "z_general requires lambda > 0");
    double zstar = global_minimum(mode);
    if (mode.z0 == zstar) return zstar;  // fixed point of the flow
    if (mode.z0 > zstar)
        fail(ErrorKind::OutOfBranch,
             "solution branch requires z0 <= sigma/lambda");

    if (mode.eta() == 0.0) return z_one_layer(mode, t);
    if (std::fabs(mode.gamma) < kBalancedGammaTol) return z_balanced(mode, t);

    double r = effective_rate(mode);
    double C = constant_C(mode);
    double g2 = mode.gamma * mode.gamma;
    double e2 = mode.eta() * mode.eta();
    double l = mode.lambda;
    double s = mode.sigma;
    if (r * t > 350.0) {
        // Tail expansion: z* - 2 (g^2 l^2 + 4 e^2 s^2) exp(-rt) / (C l^3).
        double corr = 2.0 * r * r * std::exp(-r * t) / (C * l * l * l);
        return zstar - corr;
    }
    // Solution with numerator and denominator divided by C^2 l^2 e^{2rt}.
    double E = std::exp(-r * t);
    double num = s - (2.0 * g2 / C) * E - (4.0 * g2 * e2 * s / (C * C * l * l)) * E * E;
    double den = l * (1.0 + (8.0 * e2 * s / (C * l * l)) * E -
                      (4.0 * g2 * e2 / (C * C * l * l)) * E * E);
    return num / den;
}

double time_to_value(const ModeParams& mode, double z_target) {
    validate_mode(mode);
    ActivityStatus status = classify_activity(mode);
    if (!status.active)
        fail(ErrorKind::InactiveMode, "time_to_value requires an active mode");
    double zstar = global_minimum(mode);
    if (z_target < mode.z0)
        fail(ErrorKind::TargetBehind, "target lies behind the initialisation");
    if (z_target >= zstar) {
        if (z_target == zstar) return kInf;
        fail(ErrorKind::OutOfBranch, "target beyond the global minimum");
    }
    if (z_target == mode.z0) return 0.0;
    double r = effective_rate(mode);
    double n1 = antiderivative_numerator(mode, z_target) /
                (mode.sigma - mode.lambda * z_target);
    double n0 = antiderivative_numerator(mode, mode.z0) /
                (mode.sigma - mode.lambda * mode.z0);
    return std::log(n1 / n0) / r;
}

double time_to_target(const ModeParams& mode, double rho_target) {
    if (!(rho_target >= 0.0 && rho_target <= 1.0))
        fail(ErrorKind::Parameter, "rho_target must lie in [0, 1]");
    if (rho_target == 0.0) {
        // Consistency checks still apply before answering +infinity.
        ActivityStatus status = classify_activity(mode);
        if (!status.active)
            fail(ErrorKind::InactiveMode,
                 "time_to_target requires an active mode");
        return kInf;
    }
    double target = (1.0 - rho_target) * global_minimum(mode);
    return time_to_value(mode, target);
}

std::vector<TrajectorySample> sample_trajectory(
    const ModeParams& mode, const std::vector<double>& times) {
    std::vector<TrajectorySample> out;
    out.reserve(times.size());
    for (double t : times) out.push_back({t, z_general(mode, t)});
    return out;
}

}  // namespace closed_form
}  // namespace epochdd
