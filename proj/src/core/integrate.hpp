#pragma once

#include <Eigen/Dense>
#include <vector>

#include "modes.hpp"

namespace epochdd {

enum class Method { RK4, Euler };

struct IntegratorConfig {
    double step = 0.0;      // flow-time step, > 0
    Method method = Method::RK4;
    double t_max = 0.0;     // > 0
    int sample_stride = 1;  // record every stride-th step
};

// step = 0.01 / rate, t_max = 12 / rate: resolves the fast transient and
// the slow tail in one pass.
IntegratorConfig default_config(const ModeParams& mode);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;

    // Piecewise-linear lookup; times must be sorted.
    double value_at(double t) const;
};

// Brute-force reference for the scalar flow
// dz/dt = sqrt(gamma^2 + 4 eta^2 z^2)(sigma - lambda z).
Trajectory integrate_scalar(const ModeParams& mode,
                            const IntegratorConfig& cfg);

// Coupled projections da/dt = eta_a b (sigma - lambda ab),
// db/dt = eta_b a (sigma - lambda ab). gamma is implied by (a0, b0).
std::vector<ModeState> integrate_ab(double a0, double b0,
                                    const ModeParams& mode,
                                    const IntegratorConfig& cfg);

struct MatrixTrajectory {
    std::vector<double> times;           // flow time or epoch index
    std::vector<Eigen::MatrixXd> W1;     // h x d_x
    std::vector<Eigen::MatrixXd> W2;     // d_y x h
    std::vector<Eigen::MatrixXd> W;      // d_y x d_x, W2 * W1
    std::vector<double> train_loss;      // filled by gradient descent
    bool lr_warning = false;             // loss grew within the first steps
};

// Full-matrix gradient flow of the two-layer network on (X, Y):
// (1/eta_a) dW1/dt = W2^T (Y^T X / n - W X^T X / n),
// (1/eta_b) dW2/dt = (Y^T X / n - W X^T X / n) W1^T.
MatrixTrajectory integrate_full_network(const Eigen::MatrixXd& X,
                                        const Eigen::MatrixXd& Y,
                                        const Eigen::MatrixXd& W1_0,
                                        const Eigen::MatrixXd& W2_0,
                                        double eta_a, double eta_b,
                                        const IntegratorConfig& cfg);

// Plain discrete gradient descent with per-epoch training loss; exists as a
// flow-consistency check of the continuous-time results.
MatrixTrajectory train_gradient_descent(const Eigen::MatrixXd& X,
                                        const Eigen::MatrixXd& Y,
                                        const Eigen::MatrixXd& W1_0,
                                        const Eigen::MatrixXd& W2_0,
                                        double lr_a, double lr_b, int epochs);

// MSE training criterion (1/2n) ||Y - X W^T||_F^2 with W = W2 W1.
double mse_loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                const Eigen::MatrixXd& W1, const Eigen::MatrixXd& W2);

std::vector<double> linspace(double lo, double hi, int count);
std::vector<double> logspace(double lo, double hi, int count);

}  // namespace epochdd
