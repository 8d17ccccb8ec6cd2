#pragma once

#include <string>

namespace epochdd {

// Parameters of one decoupled mode of the synaptic weight matrix. The
// product weight z(t) = a(t)b(t) evolves under
//
//     dz/dt = sqrt(gamma^2 + 4 eta^2 z^2) (sigma - lambda z),
//
// with eta = sqrt(eta_a eta_b) and gamma = eta_b a^2 - eta_a b^2 conserved
// along the flow. The true (noise-shifted) optimum is parameterised by rho:
// zbar = (1 - rho) sigma / lambda.
struct ModeParams {
    double lambda = 1.0;   // input covariance eigenvalue, >= 0
    double sigma = 1.0;    // input-output covariance singular value, >= 0
    double eta_a = 0.0;    // first-layer learning rate, >= 0
    double eta_b = 0.0;    // second-layer learning rate, >= 0
    double gamma = 0.0;    // conserved imbalance eta_b a^2 - eta_a b^2
    double z0 = 0.0;       // initial product weight z(0)
    double rho = 0.0;      // relative position of the true optimum, in [0, 1]
    int multiplicity = 1;  // number of identical copies of this mode

    double eta() const;  // sqrt(eta_a * eta_b)
};

// Makes a mode with gamma derived from an explicit (a0, b0) initialisation.
ModeParams mode_from_init(double lambda, double sigma, double eta_a,
                          double eta_b, double a0, double b0, double rho,
                          int multiplicity = 1);

// Instantaneous state of the two scalar projections.
struct ModeState {
    double a = 0.0;
    double b = 0.0;
    double t = 0.0;

    double z() const { return a * b; }
};

enum class ActivityReason {
    ZeroSigma,          // sigma = 0
    ZeroEffectiveRate,  // sqrt(gamma^2 lambda^2 + 4 eta^2 sigma^2) = 0
    FixedPointInit,     // started at a fixed point of the flow
    Active,
};

struct ActivityStatus {
    bool active = false;
    ActivityReason reason = ActivityReason::Active;
};

const char* activity_reason_name(ActivityReason reason);

// gamma = eta_b a0^2 - eta_a b0^2, the quantity conserved along the flow.
double conserved_gamma(double a0, double b0, double eta_a, double eta_b);

// Exponential rate constant sqrt(gamma^2 lambda^2 + 4 eta^2 sigma^2) of the
// convergence z(t) -> sigma/lambda. Zero exactly for modes that never move.
double effective_rate(const ModeParams& mode);

// Global minimum z* = sigma / lambda. Requires lambda > 0.
double global_minimum(const ModeParams& mode);

// True weight zbar = (1 - rho) sigma / lambda. Requires lambda > 0.
double true_weight(const ModeParams& mode);

// Throws ErrorKind::Parameter if basic field ranges are violated.
void validate_mode(const ModeParams& mode);

// Checks the analysis frame: z0 in [0, zbar] and zbar in [0, z*]. Throws
// ErrorKind::ConditionViolation naming the violated condition.
void check_analysis_conditions(const ModeParams& mode);

// Like check_analysis_conditions but only requires the trajectory to be
// nonnegative and nondecreasing: z0 in [0, z*]. Used where monotonically
// increasing error curves (zbar < z0) are part of the classification.
void check_trajectory_conditions(const ModeParams& mode);

// Classifies the mode as active or inactive with the reason. Preconditions:
// analysis conditions hold (checked).
ActivityStatus classify_activity(const ModeParams& mode);

}  // namespace epochdd
