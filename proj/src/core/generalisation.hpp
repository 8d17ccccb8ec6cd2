#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "datagen.hpp"
#include "modes.hpp"

namespace epochdd {

// Generalisation-error curve over a time grid. values[k] equals
// sum over modes of multiplicity * per_mode[i][k] plus const_term, where a
// per-mode component is (1/2) lambda (zbar - z(t))^2 for a single copy.
struct ErrorCurve {
    std::vector<double> times;
    std::vector<double> values;
    double const_term = 0.0;
    std::vector<std::vector<double>> per_mode;  // one series per mode entry
};

enum class CurveShape {
    MonotoneDecreasing,
    UShaped,
    MonotoneIncreasing,
    Constant,
};

const char* curve_shape_name(CurveShape shape);

// Single error term ((1 - rho) sigma - lambda z(t))^2. Note this carries
// 2 lambda times the weight of the per-mode component used in total_error;
// the total keeps the canonical (1/2) lambda (zbar - z)^2 normalisation.
double mode_error(const ModeParams& mode, double t);

// Total curve (1/2) sum_i multiplicity_i lambda_i (zbar_i - z_i(t))^2 over
// the grid, plus const_term.
ErrorCurve total_error(std::span<const ModeParams> modes,
                       const std::vector<double>& t_grid, double const_term);

// Constant error floor: inactive modes frozen at z0, off-diagonal true
// synaptic weight mass, and the irreducible noise (1/2) tr(noise_cov).
// Zbar is m x d_x with column weights lambda (d_x entries).
double constant_error_term(std::span<const ModeParams> inactive_modes,
                           const Eigen::MatrixXd& Zbar,
                           const Eigen::VectorXd& lambda, double noise_trace);

// Convenience overload pulling Zbar, lambda and the noise trace from a
// dataset.
double constant_error_term(const SpectralDataset& ds,
                           std::span<const ModeParams> inactive_modes);

// Shape of the per-mode error curve from the analytic thresholds:
// rho = 0 decreasing, rho >= 1 - z0 lambda / sigma increasing, else
// U-shaped; inactive modes give a constant curve.
CurveShape classify_mode_curve(const ModeParams& mode);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Fresh-sample estimate of (1/2) E ||y - x W^T||^2 under the dataset's
// generative model, with its standard error.
MonteCarloEstimate monte_carlo_error(const SpectralDataset& ds,
                                     const Eigen::MatrixXd& W, int n_test,
                                     std::uint64_t seed);

// 512 log-spaced points on [1e-3 / max rate, 12 / min rate].
std::vector<double> default_time_grid(std::span<const ModeParams> modes,
                                      int count = 512);

}  // namespace epochdd
