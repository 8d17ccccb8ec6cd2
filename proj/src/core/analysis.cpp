#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "closed_form.hpp"
#include "errors.hpp"

namespace epochdd {

namespace {

constexpr double kBalancedGammaTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_active_analysis_mode(const ModeParams& mode) {
    ActivityStatus st = classify_activity(mode);  // checks conditions
    if (!st.active)
        fail(ErrorKind::ConditionViolation,
             std::string("mode is inactive (") +
                 activity_reason_name(st.reason) + ")");
}

}  // namespace

CubicCoeffs inflection_cubic(const ModeParams& mode) {
    double l = mode.lambda, s = mode.sigma, rho = mode.rho;
    double e2 = mode.eta() * mode.eta();
    double g2 = mode.gamma * mode.gamma;
    CubicCoeffs k;
    k.a = 12.0 * l * l * e2;
    k.b = -8.0 * e2 * l * s * (2.0 - rho);
    k.c = 2.0 * (g2 * l * l + 2.0 * e2 * s * s * (1.0 - rho));
    k.d = -g2 * l * s * (2.0 - rho);
    return k;
}

double cubic_discriminant_coeffs(const CubicCoeffs& k) {
    return 18.0 * k.a * k.b * k.c * k.d - 4.0 * k.a * k.c * k.c * k.c -
           27.0 * k.a * k.a * k.d * k.d + k.b * k.b * k.c * k.c -
           4.0 * k.b * k.b * k.b * k.d;
}

double cubic_discriminant(const ModeParams& mode) {
    return cubic_discriminant_coeffs(inflection_cubic(mode));
}

int routh_sign_changes(const CubicCoeffs& k) {
    if (k.b == 0.0) return -1;
    double col[4] = {k.a, k.b, (k.b * k.c - k.d * k.a) / k.b, k.d};
    int changes = 0;
    double prev = 0.0;
    for (double v : col) {
        if (v == 0.0) continue;
        if (prev != 0.0 && ((prev < 0.0) != (v < 0.0))) ++changes;
        prev = v;
    }
    return changes;
}

std::vector<double> solve_cubic(double a, double b, double c, double d) {
    double scale = std::max({std::fabs(a), std::fabs(b), std::fabs(c),
                             std::fabs(d)});
    if (scale == 0.0) return {};
    std::vector<double> roots;
    if (std::fabs(a) <= 1e-14 * scale) {
        // quadratic (or linear) degeneration
        if (std::fabs(b) <= 1e-14 * scale) {
            if (c != 0.0) roots.push_back(-d / c);
            return roots;
        }
        double disc = c * c - 4.0 * b * d;
        if (disc < 0.0) return {};
        double q = -0.5 * (c + std::copysign(std::sqrt(disc), c));
        roots.push_back(q / b);
        if (q != 0.0) roots.push_back(d / q);
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    // normalised cubic z^3 + p2 z^2 + p1 z + p0
    double p2 = b / a, p1 = c / a, p0 = d / a;
    double q = (p2 * p2 - 3.0 * p1) / 9.0;
    double r = (p2 * (2.0 * p2 * p2 - 9.0 * p1) + 27.0 * p0) / 54.0;
    double q3 = q * q * q;
    if (r * r < q3) {
        double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
        double amp = -2.0 * std::sqrt(q);
        roots.push_back(amp * std::cos(theta / 3.0) - p2 / 3.0);
        roots.push_back(amp * std::cos((theta + 2.0 * M_PI) / 3.0) - p2 / 3.0);
        roots.push_back(amp * std::cos((theta - 2.0 * M_PI) / 3.0) - p2 / 3.0);
    } else {
        double u3 = -r - std::copysign(std::sqrt(r * r - q3), r);
        double u = std::cbrt(u3);
        double v = (u == 0.0) ? 0.0 : q / u;
        roots.push_back(u + v - p2 / 3.0);
        // complex pair collapses to a real double root when its imaginary
        // part vanishes
        if (std::fabs(u - v) < 1e-12 * std::max(1.0, std::fabs(u + v)))
            roots.push_back(-0.5 * (u + v) - p2 / 3.0);
    }

    // one Newton polish per root against the unnormalised cubic
    for (double& z : roots) {
        double f = ((a * z + b) * z + c) * z + d;
        double df = (3.0 * a * z + 2.0 * b) * z + c;
        if (df != 0.0) z -= f / df;
    }
    std::sort(roots.begin(), roots.end());
    // drop near-duplicates and roots the polish could not certify
    std::vector<double> out;
    double span = 0.0;
    for (double z : roots) span = std::max(span, std::fabs(z));
    for (double z : roots) {
        double f = ((a * z + b) * z + c) * z + d;
        double mag = scale * std::max(1.0, span * span * span);
        if (std::fabs(f) > 1e-10 * mag) continue;
        if (!out.empty() && std::fabs(z - out.back()) <=
                                1e-9 * std::max(1.0, std::fabs(z)))
            continue;
        out.push_back(z);
    }
    return out;
}

double error_second_derivative(const ModeParams& mode, double z) {
    double l = mode.lambda, s = mode.sigma;
    double e2 = mode.eta() * mode.eta();
    double g2 = mode.gamma * mode.gamma;
    double zbar = (1.0 - mode.rho) * s / l;
    double speed2 = g2 + 4.0 * e2 * z * z;
    return 2.0 * l * (s - l * z) *
           (speed2 * (s + l * zbar - 2.0 * l * z) -
            4.0 * e2 * z * (zbar - z) * (s - l * z));
}

namespace {

InflectionReport finish_report(const ModeParams& mode,
                               std::vector<InflectionPoint> points) {
    InflectionReport rep;
    std::sort(points.begin(), points.end(),
              [](const InflectionPoint& x, const InflectionPoint& y) {
                  return x.t_hat < y.t_hat;
              });
    rep.points = std::move(points);
    rep.t_min = closed_form::time_to_target(mode, mode.rho);
    rep.discriminant = cubic_discriminant(mode);
    CubicCoeffs k = inflection_cubic(mode);
    rep.routh_sign_changes =
        (mode.eta() > 0.0 && std::fabs(mode.gamma) > kBalancedGammaTol)
            ? routh_sign_changes(k)
            : -1;
    return rep;
}

}  // namespace

InflectionReport inflection_one_layer(const ModeParams& mode) {
    if (mode.eta() != 0.0)
        fail(ErrorKind::Regime, "one-layer analysis requires eta = 0");
    if (mode.gamma == 0.0)
        fail(ErrorKind::Regime, "one-layer analysis requires gamma != 0");
    require_active_analysis_mode(mode);

    std::vector<InflectionPoint> points;
    if (mode.rho > 0.0) {
        double l = mode.lambda, s = mode.sigma;
        double z_hat = s * (2.0 - mode.rho) / (2.0 * l);
        double t_hat = std::log(2.0 * (s - l * mode.z0) / (s * mode.rho)) /
                       (std::fabs(mode.gamma) * l);
        points.push_back({t_hat, z_hat, InflectionSide::AfterMin});
    }
    return finish_report(mode, std::move(points));
}

InflectionReport inflection_balanced(const ModeParams& mode) {
    if (std::fabs(mode.gamma) > kBalancedGammaTol)
        fail(ErrorKind::Regime, "balanced analysis requires gamma = 0");
    if (mode.eta() <= 0.0)
        fail(ErrorKind::Regime, "balanced analysis requires eta > 0");
    if (mode.rho >= 1.0)
        fail(ErrorKind::Regime, "balanced analysis requires rho < 1");
    require_active_analysis_mode(mode);

    double l = mode.lambda, s = mode.sigma, rho = mode.rho;
    double root = std::sqrt(rho * rho - rho + 1.0);
    double z_minus = s * (2.0 - rho - root) / (3.0 * l);
    std::vector<InflectionPoint> points;
    if (mode.z0 < z_minus)
        points.push_back({closed_form::time_to_value(mode, z_minus), z_minus,
                          InflectionSide::BeforeMin});
    if (rho > 0.0) {
        double z_plus = s * (2.0 - rho + root) / (3.0 * l);
        points.push_back({closed_form::time_to_value(mode, z_plus), z_plus,
                          InflectionSide::AfterMin});
    }
    return finish_report(mode, std::move(points));
}

InflectionReport inflection_general(const ModeParams& mode) {
    if (mode.eta() <= 0.0 || std::fabs(mode.gamma) <= kBalancedGammaTol)
        fail(ErrorKind::Regime,
             "general analysis requires gamma != 0 and eta > 0");
    require_active_analysis_mode(mode);

    double zstar = global_minimum(mode);
    double zbar = true_weight(mode);
    CubicCoeffs k = inflection_cubic(mode);
    std::vector<double> roots = solve_cubic(k.a, k.b, k.c, k.d);

    std::vector<double> inside;
    for (double z : roots)
        if (z > mode.z0 && z < zstar) inside.push_back(z);

    std::vector<InflectionPoint> points;
    for (std::size_t i = 0; i < inside.size(); ++i) {
        double z = inside[i];
        // probe offsets limited by the distance to neighbours and interval
        // ends, so the sign probes do not cross another root
        double left_gap = (i == 0) ? z - mode.z0 : z - inside[i - 1];
        double right_gap =
            (i + 1 == inside.size()) ? zstar - z : inside[i + 1] - z;
        double delta = 0.25 * std::min(left_gap, right_gap);
        if (delta <= 0.0) continue;
        double before = error_second_derivative(mode, z - delta);
        double after = error_second_derivative(mode, z + delta);
        if (before == 0.0 || after == 0.0 || (before < 0.0) == (after < 0.0))
            continue;  // undulation, not an inflection
        InflectionSide side =
            z < zbar ? InflectionSide::BeforeMin : InflectionSide::AfterMin;
        points.push_back({closed_form::time_to_value(mode, z), z, side});
    }
    return finish_report(mode, std::move(points));
}

InflectionReport inflections(const ModeParams& mode) {
    if (mode.eta() == 0.0) return inflection_one_layer(mode);
    if (std::fabs(mode.gamma) <= kBalancedGammaTol)
        return inflection_balanced(mode);
    return inflection_general(mode);
}

NecessaryCondition necessary_condition_general(
    std::span<const ModeParams> modes) {
    std::vector<int> active;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        ActivityStatus st = classify_activity(modes[i]);
        if (st.active) active.push_back(static_cast<int>(i));
    }
    if (active.empty())
        fail(ErrorKind::ConditionViolation, "no active mode in the set");

    double lo = kInf, hi = -kInf;
    for (int i : active) {
        double t = closed_form::time_to_target(modes[static_cast<std::size_t>(i)],
                                               modes[static_cast<std::size_t>(i)].rho);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    NecessaryCondition out;
    if (!(lo < hi)) return out;  // empty interval, ties included
    for (int i : active) {
        InflectionReport rep =
            inflections(modes[static_cast<std::size_t>(i)]);
        for (const InflectionPoint& p : rep.points) {
            if (p.t_hat > lo && p.t_hat < hi) {
                out.holds = true;
                out.witness = NecessaryWitness{i, p.t_hat};
                return out;
            }
        }
    }
    return out;
}

const char* scenario_name(TwoModeScenario s) {
    switch (s) {
        case TwoModeScenario::Neither: return "Neither";
        case TwoModeScenario::FirstScenario: return "FirstScenario";
        case TwoModeScenario::SecondScenario: return "SecondScenario";
        case TwoModeScenario::Both: return "Both";
    }
    return "?";
}

TwoModeCondition necessary_condition_two_modes(const ModeParams& mode_i,
                                               const ModeParams& mode_j) {
    for (const ModeParams* m : {&mode_i, &mode_j}) {
        ActivityStatus st = classify_activity(*m);
        if (!st.active)
            fail(ErrorKind::ConditionViolation,
                 "both modes must be active");
    }
    double ti = closed_form::time_to_target(mode_i, mode_i.rho);
    double tj = closed_form::time_to_target(mode_j, mode_j.rho);
    const ModeParams* first = &mode_i;
    const ModeParams* later = &mode_j;
    double t_first = ti, t_later = tj;
    if (tj < ti) {
        std::swap(first, later);
        std::swap(t_first, t_later);
    }
    TwoModeCondition out;
    if (!(t_first < t_later)) return out;  // equal times: empty interval

    bool first_scenario = false;
    InflectionReport rep_later = inflections(*later);
    for (const InflectionPoint& p : rep_later.points)
        if (p.side == InflectionSide::BeforeMin && p.t_hat > t_first)
            first_scenario = true;

    bool second_scenario = false;
    InflectionReport rep_first = inflections(*first);
    for (const InflectionPoint& p : rep_first.points)
        if (p.side == InflectionSide::AfterMin && p.t_hat < t_later)
            second_scenario = true;

    out.holds = first_scenario || second_scenario;
    out.scenario = first_scenario
                       ? (second_scenario ? TwoModeScenario::Both
                                          : TwoModeScenario::FirstScenario)
                       : (second_scenario ? TwoModeScenario::SecondScenario
                                          : TwoModeScenario::Neither);
    return out;
}

bool one_layer_zero_init_condition(const ModeParams& mode_i,
                                   const ModeParams& mode_j) {
    if (mode_i.eta() != 0.0 || mode_j.eta() != 0.0)
        fail(ErrorKind::Regime, "requires eta = 0 for both modes");
    if (mode_i.z0 != 0.0 || mode_j.z0 != 0.0)
        fail(ErrorKind::Regime, "requires zero initialisation");
    if (mode_i.gamma != mode_j.gamma || mode_i.gamma == 0.0)
        fail(ErrorKind::Regime, "requires equal nonzero imbalance");
    if (mode_i.lambda <= 0.0 || mode_j.lambda <= 0.0)
        fail(ErrorKind::Regime, "requires lambda > 0 for both modes");
    if (mode_i.rho == 0.0) return false;  // no inflection point exists
    double lhs = std::log(2.0 / mode_i.rho);
    double rhs = mode_j.rho > 0.0
                     ? (mode_i.lambda / mode_j.lambda) *
                           std::log(1.0 / mode_j.rho)
                     : kInf;
    return lhs <= rhs;
}

DDVerdict detect_double_descent(const ErrorCurve& curve,
                                double prominence_rel) {
    const std::vector<double>& v = curve.values;
    if (v.size() < 256)
        fail(ErrorKind::TooFewSamples,
             "detector needs at least 256 samples");
    if (!(prominence_rel > 0.0 && prominence_rel < 1.0))
        fail(ErrorKind::Parameter, "prominence must lie in (0, 1)");

    DDVerdict verdict;
    double vmin = v[0], vmax = v[0];
    for (double x : v) {
        vmin = std::min(vmin, x);
        vmax = std::max(vmax, x);
    }
    double thr = prominence_rel * (vmax - vmin);
    if (thr <= 0.0) return verdict;

    // first minimum must be preceded by a qualified descent
    std::size_t i1 = 0;
    double min_val = v[0], prefix_max_at_min = v[0], prefix_max = v[0];
    std::size_t i2 = 0;
    double peak = 0.0;
    bool have_min = false, have_rise = false;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!have_rise) {
            if (v[k] < min_val) {
                min_val = v[k];
                i1 = k;
                prefix_max_at_min = prefix_max;
            }
            prefix_max = std::max(prefix_max, v[k]);
            have_min = prefix_max_at_min - min_val >= thr;
            if (have_min && v[k] - min_val >= thr) {
                have_rise = true;
                peak = v[k];
                i2 = k;
            }
        } else {
            if (v[k] > peak) {
                peak = v[k];
                i2 = k;
            }
            if (peak - v[k] >= thr) {
                // second descent found; report its deepest later point
                std::size_t i3 = k;
                for (std::size_t m = k; m < v.size(); ++m)
                    if (v[m] < v[i3]) i3 = m;
                verdict.detected = true;
                verdict.first_min_t = curve.times[i1];
                verdict.peak_t = curve.times[i2];
                verdict.second_min_t = curve.times[i3];
                verdict.prominence =
                    std::min(peak - min_val, peak - v[i3]);
                break;
            }
        }
    }
    return verdict;
}

DDVerdict detect_double_descent(const ErrorCurve& curve,
                                std::span<const ModeParams> modes,
                                double prominence_rel) {
    DDVerdict verdict = detect_double_descent(curve, prominence_rel);
    NecessaryCondition cond = necessary_condition_general(modes);
    verdict.necessary_condition_holds = cond.holds;
    verdict.witness = cond.witness;
    return verdict;
}

}  // namespace epochdd
