#include "modes.hpp"

#include <cmath>

#include "errors.hpp"

namespace epochdd {

double ModeParams::eta() const { return std::sqrt(eta_a * eta_b); }

ModeParams mode_from_init(double lambda, double sigma, double eta_a,
                          double eta_b, double a0, double b0, double rho,
                          int multiplicity) {
    ModeParams mode;
    mode.lambda = lambda;
    mode.sigma = sigma;
    mode.eta_a = eta_a;
    mode.eta_b = eta_b;
    mode.gamma = conserved_gamma(a0, b0, eta_a, eta_b);
    mode.z0 = a0 * b0;
    mode.rho = rho;
    mode.multiplicity = multiplicity;
    validate_mode(mode);
    return mode;
}

const char* activity_reason_name(ActivityReason reason) {
    switch (reason) {
        case ActivityReason::ZeroSigma: return "ZeroSigma";
        case ActivityReason::ZeroEffectiveRate: return "ZeroEffectiveRate";
        case ActivityReason::FixedPointInit: return "FixedPointInit";
        case ActivityReason::Active: return "Active";
    }
    return "?";
}

double conserved_gamma(double a0, double b0, double eta_a, double eta_b) {
    return eta_b * a0 * a0 - eta_a * b0 * b0;
}

double effective_rate(const ModeParams& mode) {
    double gl = mode.gamma * mode.lambda;
    double es = mode.eta() * mode.sigma;
    return std::sqrt(gl * gl + 4.0 * es * es);
}

double global_minimum(const ModeParams& mode) {
    if (mode.lambda <= 0.0)
        fail(ErrorKind::DegenerateMode,
             "global minimum undefined: lambda = 0");
    return mode.sigma / mode.lambda;
}

double true_weight(const ModeParams& mode) {
    return (1.0 - mode.rho) * global_minimum(mode);
}

void validate_mode(const ModeParams& mode) {
    if (!(mode.lambda >= 0.0) || !std::isfinite(mode.lambda))
        fail(ErrorKind::Parameter, "lambda must be finite and >= 0");
    if (!(mode.sigma >= 0.0) || !std::isfinite(mode.sigma))
        fail(ErrorKind::Parameter, "sigma must be finite and >= 0");
    if (!(mode.eta_a >= 0.0) || !(mode.eta_b >= 0.0))
        fail(ErrorKind::Parameter, "learning rates must be >= 0");
    if (!(mode.rho >= 0.0 && mode.rho <= 1.0))
        fail(ErrorKind::Parameter, "rho must lie in [0, 1]");
    if (!std::isfinite(mode.gamma) || !std::isfinite(mode.z0))
        fail(ErrorKind::Parameter, "gamma and z0 must be finite");
    if (mode.multiplicity < 1)
        fail(ErrorKind::Parameter, "multiplicity must be >= 1");
}

void check_analysis_conditions(const ModeParams& mode) {
    validate_mode(mode);
    if (mode.lambda == 0.0) {
        if (mode.sigma > 0.0)
            fail(ErrorKind::ConditionViolation,
                 "condition (ii) violated: sigma > 0 with lambda = 0 leaves "
                 "the global minimum undefined");
        if (mode.z0 != 0.0)
            fail(ErrorKind::ConditionViolation,
                 "condition (i) violated: z0 must be 0 when sigma = 0");
        return;
    }
    double zbar = true_weight(mode);
    if (mode.z0 < 0.0 || mode.z0 > zbar)
        fail(ErrorKind::ConditionViolation,
             "condition (i) violated: z0 must lie in [0, zbar]");
}

void check_trajectory_conditions(const ModeParams& mode) {
    validate_mode(mode);
    if (mode.lambda == 0.0) {
        if (mode.sigma > 0.0)
            fail(ErrorKind::ConditionViolation,
                 "condition (ii) violated: sigma > 0 with lambda = 0 leaves "
                 "the global minimum undefined");
        if (mode.z0 != 0.0)
            fail(ErrorKind::ConditionViolation,
                 "condition (i) violated: z0 must be 0 when sigma = 0");
        return;
    }
    double zstar = global_minimum(mode);
    if (mode.z0 < 0.0 || mode.z0 > zstar)
        fail(ErrorKind::ConditionViolation,
             "condition (i) violated: z0 must lie in [0, z*]");
}

ActivityStatus classify_activity(const ModeParams& mode) {
    check_analysis_conditions(mode);
    if (mode.sigma == 0.0) return {false, ActivityReason::ZeroSigma};
    if (effective_rate(mode) == 0.0)
        return {false, ActivityReason::ZeroEffectiveRate};
    if (mode.gamma == 0.0 && mode.z0 == 0.0)
        return {false, ActivityReason::FixedPointInit};
    if (mode.rho == 0.0 && mode.z0 == global_minimum(mode))
        return {false, ActivityReason::FixedPointInit};
    return {true, ActivityReason::Active};
}

}  // namespace epochdd
