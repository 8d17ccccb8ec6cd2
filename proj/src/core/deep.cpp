#include "deep.hpp"

#include <cmath>
#include <limits>

#include "closed_form.hpp"
#include "errors.hpp"

namespace epochdd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOvershootTol = 1e-6;

}  // namespace

double DeepModeParams::eta() const { return std::sqrt(eta_first * eta_last); }

double DeepModeParams::rate_term() const {
    double e2 = eta_first * eta_last;
    double g = square_gamma ? base.gamma * base.gamma : base.gamma;
    double arg = g + 4.0 * e2;
    if (arg < 0.0)
        fail(ErrorKind::Parameter,
             "negative rate argument gamma + 4 eta^2; use square_gamma");
    return std::sqrt(arg);
}

void validate_deep_mode(const DeepModeParams& mode) {
    validate_mode(mode.base);
    if (mode.L < 2 || mode.L % 2 != 0)
        fail(ErrorKind::Parameter, "depth L must be even and >= 2");
    if (mode.eta_first < 0.0 || mode.eta_last < 0.0)
        fail(ErrorKind::Parameter, "group rates must be >= 0");
    (void)mode.rate_term();
}

IntegratorConfig default_deep_config(const DeepModeParams& mode) {
    validate_deep_mode(mode);
    double s = mode.rate_term();
    double L = static_cast<double>(mode.L);
    double zstar = mode.base.sigma / std::max(mode.base.lambda, 1e-300);
    double z0 = std::max(mode.base.z0, 1e-3 * zstar);
    // plateau-escape scale of dz/dt ~ (L/2) s sigma z^2 and the linear tail
    // rate at z*
    double t_escape = 2.0 / (L * s * mode.base.sigma * z0);
    double rate_lin = 0.5 * L * s * zstar * zstar * mode.base.lambda;
    IntegratorConfig cfg;
    cfg.step = 0.005 * std::min(t_escape, 1.0 / rate_lin);
    cfg.t_max = 4.0 * t_escape + 12.0 / rate_lin;
    cfg.sample_stride = 1;
    return cfg;
}

Trajectory integrate_deep_scalar(const DeepModeParams& mode,
                                 const IntegratorConfig& cfg) {
    validate_deep_mode(mode);
    if (!(cfg.step > 0.0) || !(cfg.t_max > 0.0) || cfg.sample_stride < 1)
        fail(ErrorKind::Parameter, "bad integrator config");
    double s = mode.rate_term();
    double L = static_cast<double>(mode.L);
    double la = mode.base.lambda, si = mode.base.sigma;
    auto rhs = [&](double z) { return 0.5 * L * s * z * z * (si - la * z); };

    bool bounded = la > 0.0;
    double zstar = bounded ? si / la : 0.0;
    double dir = 0.0;
    if (bounded && mode.base.z0 != zstar)
        dir = (zstar > mode.base.z0) ? 1.0 : -1.0;

    Trajectory out;
    double z = mode.base.z0, t = 0.0;
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
                 "deep trajectory overshot the fixed point");
        if (k % cfg.sample_stride == 0 || k == n_steps) {
            out.times.push_back(t);
            out.values.push_back(z);
        }
    }
    return out;
}

GroupedInit grouped_init(const DeepModeParams& mode) {
    validate_deep_mode(mode);
    if (mode.eta_first <= 0.0 || mode.eta_last <= 0.0)
        fail(ErrorKind::Parameter,
             "grouped init needs positive rates in both groups");
    if (mode.base.z0 <= 0.0)
        fail(ErrorKind::Parameter, "grouped init needs z0 > 0");
    double g = mode.base.gamma;
    double zpow = std::pow(mode.base.z0, 4.0 / static_cast<double>(mode.L));
    double R = std::sqrt(g * g + 4.0 * mode.eta_first * mode.eta_last * zpow);
    GroupedInit init;
    init.a_last = std::sqrt((-g + R) / (2.0 * mode.eta_first));
    init.a_first = std::sqrt((g + mode.eta_first * init.a_last * init.a_last) /
                             mode.eta_last);
    return init;
}

DeepLayerwiseResult integrate_deep_layerwise(int L, double a_first0,
                                             double a_last0, double eta_first,
                                             double eta_last, double lambda,
                                             double sigma,
                                             const IntegratorConfig& cfg) {
    if (L < 2 || L % 2 != 0)
        fail(ErrorKind::Parameter, "depth L must be even and >= 2");
    if (!(cfg.step > 0.0) || !(cfg.t_max > 0.0) || cfg.sample_stride < 1)
        fail(ErrorKind::Parameter, "bad integrator config");

    std::size_t n = static_cast<std::size_t>(L);
    std::vector<double> a(n), eta(n);
    for (std::size_t l = 0; l < n; ++l) {
        bool first_group = l < n / 2;
        a[l] = first_group ? a_first0 : a_last0;
        eta[l] = first_group ? eta_first : eta_last;
    }

    // da_l/dt = eta_l (prod_{j != l} a_j)(sigma - lambda prod_j a_j),
    // leave-one-out products via prefix/suffix accumulation
    std::vector<double> pre(n + 1), suf(n + 1), deriv(n);
    auto rhs = [&](const std::vector<double>& s, std::vector<double>& out) {
        pre[0] = 1.0;
        for (std::size_t l = 0; l < n; ++l) pre[l + 1] = pre[l] * s[l];
        suf[n] = 1.0;
        for (std::size_t l = n; l-- > 0;) suf[l] = suf[l + 1] * s[l];
        double z = pre[n];
        double drive = sigma - lambda * z;
        for (std::size_t l = 0; l < n; ++l)
            out[l] = eta[l] * pre[l] * suf[l + 1] * drive;
    };

    bool bounded = lambda > 0.0;
    double zstar = bounded ? sigma / lambda : 0.0;
    double z0 = std::pow(a_first0, static_cast<double>(L / 2)) *
                std::pow(a_last0, static_cast<double>(L / 2));
    double dir = 0.0;
    if (bounded && z0 != zstar) dir = (zstar > z0) ? 1.0 : -1.0;

    DeepLayerwiseResult out;
    auto record = [&](double t) {
        double z = 1.0;
        for (double v : a) z *= v;
        out.z.times.push_back(t);
        out.z.values.push_back(z);
        out.layer_first.push_back(a[0]);
        out.layer_last.push_back(a[n - 1]);
    };
    record(0.0);

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    long n_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.step));
    for (long k = 1; k <= n_steps; ++k) {
        double h = cfg.step;
        if (cfg.method == Method::Euler) {
            rhs(a, k1);
            for (std::size_t l = 0; l < n; ++l) a[l] += h * k1[l];
        } else {
            rhs(a, k1);
            for (std::size_t l = 0; l < n; ++l) tmp[l] = a[l] + 0.5 * h * k1[l];
            rhs(tmp, k2);
            for (std::size_t l = 0; l < n; ++l) tmp[l] = a[l] + 0.5 * h * k2[l];
            rhs(tmp, k3);
            for (std::size_t l = 0; l < n; ++l) tmp[l] = a[l] + h * k3[l];
            rhs(tmp, k4);
            for (std::size_t l = 0; l < n; ++l)
                a[l] += h / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
        }
        double z = 1.0;
        for (double v : a) z *= v;
        if (bounded && dir != 0.0 && (z - zstar) * dir > kOvershootTol)
            fail(ErrorKind::UnstableStep,
                 "layerwise trajectory overshot the fixed point");
        if (k % cfg.sample_stride == 0 || k == n_steps)
            record(k * cfg.step);
    }
    return out;
}

namespace {

// Time at which a monotone trajectory first reaches `target`, refined by
// bisection on a cubic Hermite model of the bracketing interval.
double invert_trajectory(const Trajectory& traj, double target,
                         const DeepModeParams& mode) {
    const std::vector<double>& ts = traj.times;
    const std::vector<double>& zs = traj.values;
    if (target <= zs.front()) return ts.front();
    if (target > zs.back())
        fail(ErrorKind::TargetBehind,
             "trajectory does not reach the target within t_max");
    std::size_t lo = 0, hi = zs.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (zs[mid] < target ? lo : hi) = mid;
    }
    double s = mode.rate_term();
    double L = static_cast<double>(mode.L);
    auto rhs = [&](double z) {
        return 0.5 * L * s * z * z * (mode.base.sigma - mode.base.lambda * z);
    };
    double h = ts[hi] - ts[lo];
    double z_lo = zs[lo], z_hi = zs[hi];
    double f_lo = rhs(z_lo), f_hi = rhs(z_hi);
    auto hermite = [&](double u) {
        double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * z_lo + (u3 - 2 * u2 + u) * h * f_lo +
               (-2 * u3 + 3 * u2) * z_hi + (u3 - u2) * h * f_hi;
    };
    double a = 0.0, b = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        double zm = hermite(mid);
        if (std::fabs(zm - target) <= 1e-9) return ts[lo] + mid * h;
        (zm < target ? a : b) = mid;
    }
    return ts[lo] + 0.5 * (a + b) * h;
}

}  // namespace

InflectionReport deep_inflections(const DeepModeParams& mode) {
    validate_deep_mode(mode);
    check_analysis_conditions(mode.base);
    if (mode.base.z0 <= 0.0)
        fail(ErrorKind::Regime, "deep analysis requires z0 > 0");
    if (mode.rate_term() <= 0.0)
        fail(ErrorKind::Regime, "deep analysis requires a positive rate");
    if (mode.base.rho >= 1.0)
        fail(ErrorKind::Regime, "deep analysis requires rho < 1");
    if (mode.base.sigma <= 0.0 || mode.base.lambda <= 0.0)
        fail(ErrorKind::Regime, "deep analysis requires sigma, lambda > 0");

    double la = mode.base.lambda, si = mode.base.sigma, rho = mode.base.rho;
    double disc = 9.0 * rho * rho - 4.0 * rho + 4.0;
    double root = std::sqrt(disc);
    double z_minus = si * (6.0 - 3.0 * rho - root) / (8.0 * la);
    double z_plus = si * (6.0 - 3.0 * rho + root) / (8.0 * la);
    double zbar = (1.0 - rho) * si / la;

    Trajectory traj = integrate_deep_scalar(mode, default_deep_config(mode));

    InflectionReport rep;
    if (mode.base.z0 < z_minus)
        rep.points.push_back({invert_trajectory(traj, z_minus, mode), z_minus,
                              InflectionSide::BeforeMin});
    if (rho > 0.0)
        rep.points.push_back({invert_trajectory(traj, z_plus, mode), z_plus,
                              InflectionSide::AfterMin});
    rep.t_min = rho > 0.0 ? invert_trajectory(traj, zbar, mode) : kInf;
    rep.discriminant = la * la * si * si * disc;  // quadratic discriminant
    rep.routh_sign_changes = -1;
    return rep;
}

}  // namespace epochdd
