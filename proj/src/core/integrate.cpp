#include "integrate.hpp"

#include <algorithm>
#include <cmath>

#include "closed_form.hpp"
#include "errors.hpp"

namespace epochdd {

namespace {

constexpr double kOvershootTol = 1e-6;

void check_config(const IntegratorConfig& cfg) {
    if (!(cfg.step > 0.0) || !(cfg.t_max > 0.0))
        fail(ErrorKind::Parameter, "integrator needs step > 0 and t_max > 0");
    if (cfg.sample_stride < 1)
        fail(ErrorKind::Parameter, "sample_stride must be >= 1");
}

void check_mode_stability(const ModeParams& mode, const IntegratorConfig& cfg) {
    double rate = effective_rate(mode);
    if (rate > 0.0 && cfg.step > 0.1 / rate)
        fail(ErrorKind::UnstableStep,
             "step exceeds the stability bound 0.1/effective_rate");
}

}  // namespace

IntegratorConfig default_config(const ModeParams& mode) {
    double rate = effective_rate(mode);
    if (rate <= 0.0) rate = 1.0;  // inactive modes: any timescale works
    IntegratorConfig cfg;
    cfg.step = 0.01 / rate;
    cfg.t_max = 12.0 / rate;
    cfg.method = Method::RK4;
    cfg.sample_stride = 1;
    return cfg;
}

double Trajectory::value_at(double t) const {
    if (times.empty()) fail(ErrorKind::Parameter, "empty trajectory");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    std::size_t lo = hi - 1;
    double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

Trajectory integrate_scalar(const ModeParams& mode,
                            const IntegratorConfig& cfg) {
    check_config(cfg);
    check_mode_stability(mode, cfg);
    validate_mode(mode);

    auto rhs = [&](double z) { return closed_form::flow_rhs(mode, z); };

    bool bounded = mode.lambda > 0.0;
    double zstar = bounded ? mode.sigma / mode.lambda : 0.0;
    double dir = 0.0;
    if (bounded && mode.z0 != zstar) dir = (zstar > mode.z0) ? 1.0 : -1.0;

    Trajectory out;
    double z = mode.z0;
    double t = 0.0;
    long n_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.step));
    out.times.push_back(t);
    out.values.push_back(z);
    for (long k = 1; k <= n_steps; ++k) {
        double h = cfg.step;
        if (cfg.method == Method::Euler) {
            z += h * rhs(z);
        } else {
            double k1 = rhs(z);
            double k2 = rhs(z + 0.5 * h * k1);
            double k3 = rhs(z + 0.5 * h * k2);
            double k4 = rhs(z + h * k3);
            z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t = k * cfg.step;
        if (bounded && dir != 0.0 && (z - zstar) * dir > kOvershootTol)
            fail(ErrorKind::UnstableStep,
                 "trajectory overshot the fixed point; reduce the step");
        if (k % cfg.sample_stride == 0 || k == n_steps) {
            out.times.push_back(t);
            out.values.push_back(z);
        }
    }
    return out;
}

std::vector<ModeState> integrate_ab(double a0, double b0,
                                    const ModeParams& mode,
                                    const IntegratorConfig& cfg) {
    check_config(cfg);
    ModeParams implied = mode;
    implied.gamma = conserved_gamma(a0, b0, mode.eta_a, mode.eta_b);
    implied.z0 = a0 * b0;
    check_mode_stability(implied, cfg);

    double la = mode.lambda, si = mode.sigma;
    double ea = mode.eta_a, eb = mode.eta_b;
    auto da = [&](double a, double b) { return ea * b * (si - la * a * b); };
    auto db = [&](double a, double b) { return eb * a * (si - la * a * b); };

    bool bounded = la > 0.0;
    double zstar = bounded ? si / la : 0.0;
    double dir = 0.0;
    if (bounded && implied.z0 != zstar) dir = (zstar > implied.z0) ? 1.0 : -1.0;

    std::vector<ModeState> out;
    double a = a0, b = b0, t = 0.0;
    long n_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.step));
    out.push_back({a, b, t});
    for (long k = 1; k <= n_steps; ++k) {
        double h = cfg.step;
        if (cfg.method == Method::Euler) {
            double ka = da(a, b), kb = db(a, b);
            a += h * ka;
            b += h * kb;
        } else {
            double k1a = da(a, b), k1b = db(a, b);
            double k2a = da(a + 0.5 * h * k1a, b + 0.5 * h * k1b);
            double k2b = db(a + 0.5 * h * k1a, b + 0.5 * h * k1b);
            double k3a = da(a + 0.5 * h * k2a, b + 0.5 * h * k2b);
            double k3b = db(a + 0.5 * h * k2a, b + 0.5 * h * k2b);
            double k4a = da(a + h * k3a, b + h * k3b);
            double k4b = db(a + h * k3a, b + h * k3b);
            a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
            b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        }
        t = k * cfg.step;
        if (bounded && dir != 0.0 && (a * b - zstar) * dir > kOvershootTol)
            fail(ErrorKind::UnstableStep,
                 "trajectory overshot the fixed point; reduce the step");
        if (k % cfg.sample_stride == 0 || k == n_steps) out.push_back({a, b, t});
    }
    return out;
}

namespace {

void check_network_shapes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          const Eigen::MatrixXd& W1,
                          const Eigen::MatrixXd& W2) {
    if (X.rows() != Y.rows())
        fail(ErrorKind::Dimension, "X and Y must have the same sample count");
    if (X.rows() < 1) fail(ErrorKind::Dimension, "need at least one sample");
    if (W1.cols() != X.cols())
        fail(ErrorKind::Dimension, "W1 columns must match input width");
    if (W2.rows() != Y.cols())
        fail(ErrorKind::Dimension, "W2 rows must match output width");
    if (W2.cols() != W1.rows())
        fail(ErrorKind::Dimension, "hidden widths of W1 and W2 must agree");
}

}  // namespace

double mse_loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                const Eigen::MatrixXd& W1, const Eigen::MatrixXd& W2) {
    Eigen::MatrixXd resid = Y - X * W1.transpose() * W2.transpose();
    return resid.squaredNorm() / (2.0 * static_cast<double>(X.rows()));
}

MatrixTrajectory integrate_full_network(const Eigen::MatrixXd& X,
                                        const Eigen::MatrixXd& Y,
                                        const Eigen::MatrixXd& W1_0,
                                        const Eigen::MatrixXd& W2_0,
                                        double eta_a, double eta_b,
                                        const IntegratorConfig& cfg) {
    check_config(cfg);
    check_network_shapes(X, Y, W1_0, W2_0);

    double n = static_cast<double>(X.rows());
    Eigen::MatrixXd Syx = Y.transpose() * X / n;  // d_y x d_x
    Eigen::MatrixXd Sxx = X.transpose() * X / n;  // d_x x d_x

    auto grad = [&](const Eigen::MatrixXd& W1, const Eigen::MatrixXd& W2,
                    Eigen::MatrixXd& dW1, Eigen::MatrixXd& dW2) {
        Eigen::MatrixXd G = Syx - W2 * W1 * Sxx;
        dW1 = eta_a * W2.transpose() * G;
        dW2 = eta_b * G * W1.transpose();
    };

    MatrixTrajectory out;
    Eigen::MatrixXd W1 = W1_0, W2 = W2_0;
    long n_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.step));
    auto record = [&](double t) {
        out.times.push_back(t);
        out.W1.push_back(W1);
        out.W2.push_back(W2);
        out.W.push_back(W2 * W1);
    };
    record(0.0);
    Eigen::MatrixXd k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    for (long k = 1; k <= n_steps; ++k) {
        double h = cfg.step;
        if (cfg.method == Method::Euler) {
            grad(W1, W2, k1a, k1b);
            W1 += h * k1a;
            W2 += h * k1b;
        } else {
            grad(W1, W2, k1a, k1b);
            grad(W1 + 0.5 * h * k1a, W2 + 0.5 * h * k1b, k2a, k2b);
            grad(W1 + 0.5 * h * k2a, W2 + 0.5 * h * k2b, k3a, k3b);
            grad(W1 + h * k3a, W2 + h * k3b, k4a, k4b);
            W1 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
            W2 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        }
        if (k % cfg.sample_stride == 0 || k == n_steps)
            record(k * cfg.step);
    }
    return out;
}

MatrixTrajectory train_gradient_descent(const Eigen::MatrixXd& X,
                                        const Eigen::MatrixXd& Y,
                                        const Eigen::MatrixXd& W1_0,
                                        const Eigen::MatrixXd& W2_0,
                                        double lr_a, double lr_b, int epochs) {
    if (epochs < 0) fail(ErrorKind::Parameter, "epochs must be >= 0");
    check_network_shapes(X, Y, W1_0, W2_0);

    double n = static_cast<double>(X.rows());
    Eigen::MatrixXd Syx = Y.transpose() * X / n;
    Eigen::MatrixXd Sxx = X.transpose() * X / n;

    MatrixTrajectory out;
    Eigen::MatrixXd W1 = W1_0, W2 = W2_0;
    auto record = [&](double epoch) {
        out.times.push_back(epoch);
        out.W1.push_back(W1);
        out.W2.push_back(W2);
        out.W.push_back(W2 * W1);
        out.train_loss.push_back(mse_loss(X, Y, W1, W2));
    };
    record(0.0);
    double prev_loss = out.train_loss.front();
    for (int k = 1; k <= epochs; ++k) {
        Eigen::MatrixXd G = Syx - W2 * W1 * Sxx;
        Eigen::MatrixXd dW1 = lr_a * W2.transpose() * G;
        Eigen::MatrixXd dW2 = lr_b * G * W1.transpose();
        W1 += dW1;
        W2 += dW2;
        record(static_cast<double>(k));
        double loss = out.train_loss.back();
        if (!std::isfinite(loss) || loss > 1e12)
            fail(ErrorKind::Diverged, "training loss diverged");
        if (k <= 10 && loss > prev_loss + 1e-15) out.lr_warning = true;
        prev_loss = loss;
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 2) fail(ErrorKind::Parameter, "linspace needs count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) /
                     static_cast<double>(count - 1);
    return out;
}

std::vector<double> logspace(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo))
        fail(ErrorKind::Parameter, "logspace needs 0 < lo < hi");
    std::vector<double> out = linspace(std::log(lo), std::log(hi), count);
    for (double& v : out) v = std::exp(v);
    return out;
}

}  // namespace epochdd
