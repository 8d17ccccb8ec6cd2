#include "generalisation.hpp"

#include <cmath>

#include "closed_form.hpp"
#include "errors.hpp"
#include "integrate.hpp"
#include "rng.hpp"

namespace epochdd {

const char* curve_shape_name(CurveShape shape) {
    switch (shape) {
        case CurveShape::MonotoneDecreasing: return "MonotoneDecreasing";
        case CurveShape::UShaped: return "UShaped";
        case CurveShape::MonotoneIncreasing: return "MonotoneIncreasing";
        case CurveShape::Constant: return "Constant";
    }
    return "?";
}

double mode_error(const ModeParams& mode, double t) {
    double z = closed_form::z_general(mode, t);
    double gap = (1.0 - mode.rho) * mode.sigma - mode.lambda * z;
    return gap * gap;
}

ErrorCurve total_error(std::span<const ModeParams> modes,
                       const std::vector<double>& t_grid, double const_term) {
    if (modes.empty())
        fail(ErrorKind::Parameter, "total_error needs at least one mode");
    if (const_term < 0.0)
        fail(ErrorKind::Parameter, "const_term must be >= 0");
    ErrorCurve curve;
    curve.times = t_grid;
    curve.const_term = const_term;
    curve.values.assign(t_grid.size(), const_term);
    curve.per_mode.assign(modes.size(), std::vector<double>(t_grid.size()));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const ModeParams& m = modes[i];
        double mult = static_cast<double>(m.multiplicity);
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            // (1/2) lambda (zbar - z)^2 = mode_error / (2 lambda)
            double component =
                m.lambda > 0.0 ? mode_error(m, t_grid[k]) / (2.0 * m.lambda)
                               : 0.0;
            curve.per_mode[i][k] = component;
            curve.values[k] += mult * component;
        }
    }
    return curve;
}

double constant_error_term(std::span<const ModeParams> inactive_modes,
                           const Eigen::MatrixXd& Zbar,
                           const Eigen::VectorXd& lambda, double noise_trace) {
    if (noise_trace < 0.0)
        fail(ErrorKind::Parameter, "noise trace must be >= 0");
    double total = 0.5 * noise_trace;
    for (const ModeParams& m : inactive_modes) {
        if (m.lambda <= 0.0) continue;
        double zbar = true_weight(m);
        double gap = zbar - m.z0;
        total += 0.5 * static_cast<double>(m.multiplicity) * m.lambda * gap *
                 gap;
    }
    if (Zbar.size() > 0) {
        if (lambda.size() != Zbar.cols())
            fail(ErrorKind::Dimension,
                 "lambda must provide one weight per Zbar column");
        for (int i = 0; i < Zbar.rows(); ++i)
            for (int j = 0; j < Zbar.cols(); ++j)
                if (i != j) total += 0.5 * lambda[j] * Zbar(i, j) * Zbar(i, j);
    }
    return total;
}

double constant_error_term(const SpectralDataset& ds,
                           std::span<const ModeParams> inactive_modes) {
    return constant_error_term(inactive_modes, true_synaptic_weights(ds),
                               ds.lambda, ds.noise_cov.trace());
}

CurveShape classify_mode_curve(const ModeParams& mode) {
    check_trajectory_conditions(mode);
    if (mode.sigma == 0.0 || effective_rate(mode) == 0.0)
        return CurveShape::Constant;
    if (mode.gamma == 0.0 && mode.z0 == 0.0) return CurveShape::Constant;
    double zstar = global_minimum(mode);
    if (mode.z0 == zstar) return CurveShape::Constant;
    if (mode.rho == 0.0) return CurveShape::MonotoneDecreasing;
    if (mode.rho >= 1.0 - mode.z0 * mode.lambda / mode.sigma)
        return CurveShape::MonotoneIncreasing;
    return CurveShape::UShaped;
}

MonteCarloEstimate monte_carlo_error(const SpectralDataset& ds,
                                     const Eigen::MatrixXd& W, int n_test,
                                     std::uint64_t seed) {
    if (n_test < 1) fail(ErrorKind::Parameter, "n_test must be >= 1");
    if (W.rows() != ds.d_y || W.cols() != ds.d_x)
        fail(ErrorKind::Dimension, "W must be d_y x d_x");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esx(ds.true_cov);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ese(ds.noise_cov);
    if (esx.eigenvalues().minCoeff() < -1e-10 ||
        ese.eigenvalues().minCoeff() < -1e-10)
        fail(ErrorKind::Covariance, "covariances must be PSD");
    Eigen::MatrixXd Ax = esx.eigenvectors() *
                         esx.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                         esx.eigenvectors().transpose();
    Eigen::MatrixXd Ae = ese.eigenvectors() *
                         ese.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                         ese.eigenvectors().transpose();
    Eigen::MatrixXd D = ds.Wbar - W;  // error operator on x

    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd gx(ds.d_x), ge(ds.d_y);
    for (int k = 0; k < n_test; ++k) {
        for (int i = 0; i < ds.d_x; ++i) gx[i] = rng.gaussian();
        for (int i = 0; i < ds.d_y; ++i) ge[i] = rng.gaussian();
        Eigen::VectorXd resid = D * (Ax * gx) + Ae * ge;
        double v = 0.5 * resid.squaredNorm();
        sum += v;
        sum_sq += v * v;
    }
    double nt = static_cast<double>(n_test);
    double mean = sum / nt;
    double var = std::max(0.0, sum_sq / nt - mean * mean);
    MonteCarloEstimate out;
    out.estimate = mean;
    out.std_error = std::sqrt(var / nt);
    return out;
}

std::vector<double> default_time_grid(std::span<const ModeParams> modes,
                                      int count) {
    double min_rate = 0.0, max_rate = 0.0;
    bool any = false;
    for (const ModeParams& m : modes) {
        double r = effective_rate(m);
        if (r <= 0.0) continue;
        if (!any) {
            min_rate = max_rate = r;
            any = true;
        } else {
            min_rate = std::min(min_rate, r);
            max_rate = std::max(max_rate, r);
        }
    }
    if (!any) fail(ErrorKind::Parameter, "no active mode sets the timescale");
    return logspace(1e-3 / max_rate, 12.0 / min_rate, count);
}

}  // namespace epochdd
