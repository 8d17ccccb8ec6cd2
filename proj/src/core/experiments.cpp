#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "closed_form.hpp"
#include "datagen.hpp"
#include "errors.hpp"
#include "integrate.hpp"
#include "rng.hpp"
#include "svg.hpp"

namespace epochdd {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// JSON has no infinities; widths of the reachable interval use them.
json jnum(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

json mode_to_json(const ModeParams& m) {
    json j;
    j["lambda"] = m.lambda;
    j["sigma"] = m.sigma;
    j["eta_a"] = m.eta_a;
    j["eta_b"] = m.eta_b;
    j["gamma"] = m.gamma;
    j["z0"] = m.z0;
    j["rho"] = m.rho;
    j["multiplicity"] = m.multiplicity;
    return j;
}

ModeParams mode_from_json(const json& j) {
    ModeParams m;
    try {
        m.lambda = j.at("lambda").get<double>();
        m.sigma = j.at("sigma").get<double>();
        m.eta_a = j.at("eta_a").get<double>();
        m.eta_b = j.at("eta_b").get<double>();
        m.gamma = j.at("gamma").get<double>();
        m.z0 = j.at("z0").get<double>();
        m.rho = j.at("rho").get<double>();
        m.multiplicity = j.value("multiplicity", 1);
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("bad mode entry: ") + e.what());
    }
    validate_mode(m);
    return m;
}

ExperimentConfig parse_experiment_config(const json& j) {
    ExperimentConfig cfg;
    try {
        if (!j.is_object()) fail(ErrorKind::Config, "config must be an object");
        for (const json& jm : j.at("modes")) cfg.modes.push_back(mode_from_json(jm));
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            TimeGridSpec grid;
            grid.lo = g.at("lo").get<double>();
            grid.hi = g.at("hi").get<double>();
            grid.count = g.at("count").get<int>();
            std::string spacing = g.value("spacing", "log");
            if (spacing != "log" && spacing != "linear")
                fail(ErrorKind::Config, "grid.spacing must be log or linear");
            grid.log_spacing = spacing == "log";
            if (grid.count < 2 || !(grid.hi > grid.lo) ||
                (grid.log_spacing && !(grid.lo > 0.0)))
                fail(ErrorKind::Config, "bad grid bounds");
            cfg.grid = grid;
        }
        if (j.contains("sweep")) {
            SweepSpec sweep;
            sweep.parameter = j.at("sweep").at("parameter").get<std::string>();
            for (const json& v : j.at("sweep").at("values"))
                sweep.values.push_back(v.get<double>());
            static const char* kParams[] = {"lambda_i", "sigma_i", "rho_i",
                                            "gamma",    "eta",     "z0"};
            bool known = false;
            for (const char* p : kParams) known |= sweep.parameter == p;
            if (!known)
                fail(ErrorKind::Config,
                     "unknown sweep parameter " + sweep.parameter);
            cfg.sweep = sweep;
        }
        cfg.prominence = j.value("prominence", 0.01);
        cfg.const_term = j.value("const_term", 0.0);
        cfg.seed = j.value("seed", static_cast<std::uint64_t>(0));
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("config parse error: ") + e.what());
    }
    if (cfg.modes.empty()) fail(ErrorKind::Config, "config has no modes");
    if (!(cfg.prominence > 0.0 && cfg.prominence < 1.0))
        fail(ErrorKind::Config, "prominence must lie in (0, 1)");
    if (cfg.const_term < 0.0)
        fail(ErrorKind::Config, "const_term must be >= 0");
    return cfg;
}

json emit_experiment_config(const ExperimentConfig& cfg) {
    json j;
    j["modes"] = json::array();
    for (const ModeParams& m : cfg.modes) j["modes"].push_back(mode_to_json(m));
    if (cfg.grid) {
        j["grid"]["lo"] = cfg.grid->lo;
        j["grid"]["hi"] = cfg.grid->hi;
        j["grid"]["count"] = cfg.grid->count;
        j["grid"]["spacing"] = cfg.grid->log_spacing ? "log" : "linear";
    }
    if (cfg.sweep) {
        j["sweep"]["parameter"] = cfg.sweep->parameter;
        j["sweep"]["values"] = cfg.sweep->values;
    }
    j["prominence"] = cfg.prominence;
    j["const_term"] = cfg.const_term;
    j["seed"] = cfg.seed;
    return j;
}

std::vector<ModeParams> apply_sweep(const std::vector<ModeParams>& modes,
                                    const std::string& parameter,
                                    double value) {
    std::vector<ModeParams> out = modes;
    if (parameter == "lambda_i") {
        out.at(0).lambda = value;
    } else if (parameter == "sigma_i") {
        out.at(0).sigma = value;
    } else if (parameter == "rho_i") {
        out.at(0).rho = value;
    } else if (parameter == "gamma") {
        for (ModeParams& m : out) m.gamma = value;
    } else if (parameter == "eta") {
        for (ModeParams& m : out) {
            if (value > 0.0) {
                m.eta_a = m.eta_b = value;
            } else {
                m.eta_a = 0.0;
                m.eta_b = 1.0;
            }
        }
    } else if (parameter == "z0") {
        for (ModeParams& m : out) m.z0 = value;
    } else {
        fail(ErrorKind::Config, "unknown sweep parameter " + parameter);
    }
    return out;
}

json verdict_to_json(const DDVerdict& v) {
    json j;
    j["detected"] = v.detected;
    j["first_min_t"] = v.first_min_t ? jnum(*v.first_min_t) : json(nullptr);
    j["peak_t"] = v.peak_t ? jnum(*v.peak_t) : json(nullptr);
    j["second_min_t"] = v.second_min_t ? jnum(*v.second_min_t) : json(nullptr);
    j["prominence"] = jnum(v.prominence);
    j["necessary_condition_holds"] =
        v.necessary_condition_holds ? json(*v.necessary_condition_holds)
                                    : json(nullptr);
    if (v.witness) {
        j["witness"]["mode_index"] = v.witness->mode_index;
        j["witness"]["t_hat"] = jnum(v.witness->t_hat);
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

json inflection_report_to_json(const InflectionReport& r) {
    json j;
    j["mode_index"] = r.mode_index;
    j["t_min"] = jnum(r.t_min);
    j["discriminant"] = jnum(r.discriminant);
    j["routh_sign_changes"] = r.routh_sign_changes;
    j["points"] = json::array();
    for (const InflectionPoint& p : r.points) {
        json pj;
        pj["t_hat"] = jnum(p.t_hat);
        pj["z_hat"] = jnum(p.z_hat);
        pj["side"] =
            p.side == InflectionSide::BeforeMin ? "BeforeMin" : "AfterMin";
        j["points"].push_back(pj);
    }
    return j;
}

void write_curves_csv(const std::filesystem::path& path,
                      const ErrorCurve& curve) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << "t,total,const";
    for (std::size_t i = 0; i < curve.per_mode.size(); ++i)
        out << ",mode_" << i;
    out << "\n";
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        out << fmt17(curve.times[k]) << "," << fmt17(curve.values[k]) << ","
            << fmt17(curve.const_term);
        for (const auto& pm : curve.per_mode) out << "," << fmt17(pm[k]);
        out << "\n";
    }
}

void write_trajectories_csv(const std::filesystem::path& path,
                            std::span<const ModeParams> modes,
                            const std::vector<double>& t_grid) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << "t";
    for (std::size_t i = 0; i < modes.size(); ++i) out << ",z_" << i;
    out << "\n";
    for (double t : t_grid) {
        out << fmt17(t);
        for (const ModeParams& m : modes)
            out << "," << fmt17(closed_form::z_general(m, t));
        out << "\n";
    }
}

namespace {

std::vector<double> build_grid(const ExperimentConfig& cfg,
                               std::span<const ModeParams> modes) {
    if (cfg.grid) {
        return cfg.grid->log_spacing
                   ? logspace(cfg.grid->lo, cfg.grid->hi, cfg.grid->count)
                   : linspace(cfg.grid->lo, cfg.grid->hi, cfg.grid->count);
    }
    return default_time_grid(modes);
}

std::string point_suffix(std::size_t k, bool sweeping) {
    if (!sweeping) return "";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_%03zu", k);
    return buf;
}

}  // namespace

json run_simulate(const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<double> sweep_values{0.0};
    bool sweeping = cfg.sweep.has_value();
    if (sweeping) {
        sweep_values = cfg.sweep->values;
        if (sweep_values.empty())
            fail(ErrorKind::Config, "sweep.values must not be empty");
    }

    json report;
    report["seed"] = cfg.seed;
    report["config"] = emit_experiment_config(cfg);
    report["points"] = json::array();
    for (std::size_t k = 0; k < sweep_values.size(); ++k) {
        std::vector<ModeParams> modes =
            sweeping ? apply_sweep(cfg.modes, cfg.sweep->parameter,
                                   sweep_values[k])
                     : cfg.modes;
        for (const ModeParams& m : modes) (void)classify_activity(m);
        std::vector<double> grid = build_grid(cfg, modes);
        ErrorCurve curve = total_error(modes, grid, cfg.const_term);
        DDVerdict verdict =
            detect_double_descent(curve, modes, cfg.prominence);

        std::string suffix = point_suffix(k, sweeping);
        write_curves_csv(out_dir / ("curves" + suffix + ".csv"), curve);
        write_trajectories_csv(out_dir / ("trajectories" + suffix + ".csv"),
                               modes, grid);

        json pj;
        pj["sweep_value"] = sweeping ? json(sweep_values[k]) : json(nullptr);
        pj["verdict"] = verdict_to_json(verdict);
        pj["inflections"] = json::array();
        for (std::size_t i = 0; i < modes.size(); ++i) {
            ActivityStatus st = classify_activity(modes[i]);
            if (!st.active) continue;
            InflectionReport rep = inflections(modes[i]);
            rep.mode_index = static_cast<int>(i);
            pj["inflections"].push_back(inflection_report_to_json(rep));
        }
        report["points"].push_back(pj);
    }
    std::ofstream out(out_dir / "report.json");
    if (!out) fail(ErrorKind::Io, "cannot write report.json");
    out << report.dump(2) << "\n";
    return report;
}

const std::vector<Scenario>& panel_scenarios() {
    static const std::vector<Scenario> scenarios = {
        {"one-layer", 0.005, 0.0},
        {"bridged", 0.0025, 0.0025},
        {"balanced", 0.0, 0.005},
    };
    return scenarios;
}

std::vector<ModeParams> panel_modes(const Scenario& sc, bool top_row,
                                    double swept_value) {
    ModeParams mode_i, mode_j;
    mode_i.lambda = mode_j.lambda = 1.0;
    mode_i.sigma = mode_j.sigma = 2.5;
    mode_i.rho = 0.5;
    mode_j.rho = 0.8;
    mode_i.z0 = mode_j.z0 = 0.01;
    for (ModeParams* m : {&mode_i, &mode_j}) {
        m->gamma = sc.gamma;
        if (sc.eta > 0.0) {
            m->eta_a = m->eta_b = sc.eta;
        } else {
            m->eta_a = 0.0;
            m->eta_b = 1.0;
        }
    }
    if (top_row) {
        mode_i.lambda = swept_value;
        mode_i.multiplicity = 9;
        mode_j.multiplicity = 1;
    } else {
        mode_i.sigma = swept_value;
        mode_i.multiplicity = 1;
        mode_j.multiplicity = 9;
    }
    return {mode_i, mode_j};
}

namespace {

json panel_point(const Scenario& sc, bool top_row, double value,
                 double prominence, ErrorCurve* curve_out) {
    std::vector<ModeParams> modes = panel_modes(sc, top_row, value);
    std::vector<double> grid = default_time_grid(modes);
    ErrorCurve curve = total_error(modes, grid, 0.0);
    DDVerdict verdict = detect_double_descent(curve, modes, prominence);
    json j;
    j["scenario"] = sc.name;
    j["row"] = top_row ? "lambda_i" : "sigma_i";
    j["value"] = value;
    j["verdict"] = verdict_to_json(verdict);
    if (curve_out) *curve_out = std::move(curve);
    return j;
}

}  // namespace

json run_figure1(const std::filesystem::path& out_dir, std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    std::vector<double> sweep = logspace(1.0, 50.0, 10);

    json table;
    table["seed"] = seed;
    table["sweep_values"] = sweep;
    table["panels"] = json::array();

    std::ofstream vcsv(out_dir / "verdicts.csv");
    if (!vcsv) fail(ErrorKind::Io, "cannot write verdicts.csv");
    vcsv << "row,scenario,value,detected,necessary_condition,prominence\n";

    for (bool top_row : {true, false}) {
        for (const Scenario& sc : panel_scenarios()) {
            json panel;
            panel["scenario"] = sc.name;
            panel["row"] = top_row ? "lambda_i" : "sigma_i";
            panel["points"] = json::array();

            std::vector<svg::Series> series;
            std::ofstream csv(out_dir /
                              (std::string("panel_") +
                               (top_row ? "lambda_" : "sigma_") + sc.name +
                               ".csv"));
            if (!csv) fail(ErrorKind::Io, "cannot write panel csv");

            std::vector<ErrorCurve> curves;
            for (double v : sweep) {
                ErrorCurve curve;
                json pj = panel_point(sc, top_row, v, 0.01, &curve);
                panel["points"].push_back(pj);
                vcsv << (top_row ? "lambda_i" : "sigma_i") << "," << sc.name
                     << "," << fmt17(v) << ","
                     << (pj["verdict"]["detected"].get<bool>() ? 1 : 0) << ","
                     << (pj["verdict"]["necessary_condition_holds"].get<bool>()
                             ? 1
                             : 0)
                     << "," << fmt17(pj["verdict"]["prominence"].get<double>())
                     << "\n";
                svg::Series s;
                char label[48];
                std::snprintf(label, sizeof(label), "%s=%.3g",
                              top_row ? "lambda_i" : "sigma_i", v);
                s.label = label;
                s.x = curve.times;
                s.y = curve.values;
                series.push_back(std::move(s));
                curves.push_back(std::move(curve));
            }

            // CSV: shared grid per sweep value column-wise
            csv << "t";
            for (double v : sweep) csv << ",v_" << fmt17(v);
            csv << "\n";
            for (std::size_t kk = 0; kk < curves[0].times.size(); ++kk) {
                csv << fmt17(curves[0].times[kk]);
                for (const ErrorCurve& c : curves)
                    csv << ","
                        << fmt17(kk < c.values.size() ? c.values[kk] : 0.0);
                csv << "\n";
            }

            svg::PlotSpec spec;
            spec.title = std::string(top_row ? "sweeping lambda_i"
                                             : "sweeping sigma_i") +
                         ", scenario " + sc.name;
            spec.y_label = "generalisation error";
            spec.log_x = true;
            svg::write_line_plot(out_dir /
                                     (std::string("panel_") +
                                      (top_row ? "lambda_" : "sigma_") +
                                      sc.name + ".svg"),
                                 spec, series);
            table["panels"].push_back(panel);
        }
    }
    std::ofstream out(out_dir / "verdicts.json");
    if (!out) fail(ErrorKind::Io, "cannot write verdicts.json");
    out << table.dump(2) << "\n";
    return table;
}

std::optional<double> sweep_onset(const Scenario& sc,
                                  const std::string& parameter, double lo,
                                  double hi, double prominence) {
    if (parameter != "lambda_i" && parameter != "sigma_i")
        fail(ErrorKind::Config,
             "onset search supports lambda_i and sigma_i only");
    bool top_row = parameter == "lambda_i";
    auto detected_at = [&](double v) {
        std::vector<ModeParams> modes = panel_modes(sc, top_row, v);
        std::vector<double> grid = default_time_grid(modes);
        ErrorCurve curve = total_error(modes, grid, 0.0);
        return detect_double_descent(curve, prominence).detected;
    };
    if (!(lo > 0.0) || !(hi >= lo))
        fail(ErrorKind::Config, "need 0 < lo <= hi");
    if (lo == hi) return detected_at(lo) ? std::optional<double>(lo)
                                         : std::nullopt;
    if (!detected_at(hi)) return std::nullopt;
    if (detected_at(lo)) return lo;
    double a = std::log(lo), b = std::log(hi);
    for (int it = 0; it < 48; ++it) {
        double mid = 0.5 * (a + b);
        (detected_at(std::exp(mid)) ? b : a) = mid;
    }
    return std::exp(b);
}

json run_sweep_onset(const std::string& scenario,
                     const std::string& parameter, double lo, double hi,
                     const std::filesystem::path& out_csv) {
    const Scenario* sc = nullptr;
    for (const Scenario& s : panel_scenarios())
        if (s.name == scenario) sc = &s;
    if (!sc)
        fail(ErrorKind::Config,
             "unknown scenario " + scenario +
                 " (expected one-layer, bridged or balanced)");
    std::optional<double> onset = sweep_onset(*sc, parameter, lo, hi);
    json j;
    j["scenario"] = scenario;
    j["parameter"] = parameter;
    j["lo"] = lo;
    j["hi"] = hi;
    j["onset"] = onset ? json(*onset) : json(nullptr);
    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        if (!out) fail(ErrorKind::Io, "cannot write " + out_csv.string());
        out << "scenario,parameter,lo,hi,onset\n";
        out << scenario << "," << parameter << "," << fmt17(lo) << ","
            << fmt17(hi) << "," << (onset ? fmt17(*onset) : "absent") << "\n";
    }
    return j;
}

// ---------------------------------------------------------------------------
// verify: the invariant suite

namespace {

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct CheckContext {
    int level_full = 0;  // 0 fast, 1 full
    std::string fault;
    std::vector<CheckResult> results;

    int n(int fast_count, int full_count) const {
        return level_full ? full_count : fast_count;
    }

    void record(const std::string& name, bool passed,
                const std::string& detail) {
        results.push_back({name, passed, detail});
    }
};

std::string fmt_detail(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), format, a, b);
    return buf;
}

ModeParams random_mode_for_checks(Rng& rng, int regime) {
    ModeParams m;
    m.lambda = rng.log_uniform(0.2, 5.0);
    m.sigma = rng.log_uniform(0.5, 5.0);
    m.rho = rng.uniform(0.02, 0.95);
    if (regime == 0) {
        m.eta_a = 0.0;
        m.eta_b = 1.0;
        m.gamma = rng.log_uniform(1e-4, 0.05);
        m.z0 = (1.0 - m.rho) * m.sigma / m.lambda * rng.uniform(0.0, 0.9);
    } else if (regime == 1) {
        m.eta_a = m.eta_b = rng.log_uniform(1e-4, 0.05);
        m.gamma = 0.0;
        m.z0 = (1.0 - m.rho) * m.sigma / m.lambda * rng.uniform(1e-4, 0.9);
    } else {
        m.eta_a = m.eta_b = rng.log_uniform(1e-4, 0.05);
        m.gamma = rng.log_uniform(1e-4, 0.05);
        if (rng.uniform() < 0.5) m.gamma = -m.gamma;
        m.z0 = (1.0 - m.rho) * m.sigma / m.lambda * rng.uniform(1e-4, 0.9);
    }
    return m;
}

ModeParams random_mode_for_checks(Rng& rng) {
    return random_mode_for_checks(rng, static_cast<int>(rng.uniform() * 3.0));
}

// RK4 landing exactly on the requested times.
std::vector<double> rk4_reference(const ModeParams& m,
                                  const std::vector<double>& times,
                                  double step) {
    auto f = [&](double z) { return closed_form::flow_rhs(m, z); };
    auto advance = [&](double z, double h) {
        double k1 = f(z);
        double k2 = f(z + 0.5 * h * k1);
        double k3 = f(z + 0.5 * h * k2);
        double k4 = f(z + h * k3);
        return z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    std::vector<double> out;
    double t = 0.0, z = m.z0;
    for (double target : times) {
        while (t < target) {
            double h = std::min(step, target - t);
            z = advance(z, h);
            t += h;
        }
        out.push_back(z);
    }
    return out;
}

// Cells of the grid where the discrete curvature of (t, v) changes sign.
std::vector<std::size_t> curvature_sign_change_cells(
    const std::vector<double>& t, const std::vector<double>& v) {
    std::size_t n = t.size();
    std::vector<double> curv(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double dl = (v[k] - v[k - 1]) / (t[k] - t[k - 1]);
        double dr = (v[k + 1] - v[k]) / (t[k + 1] - t[k]);
        curv[k] = 2.0 * (dr - dl) / (t[k + 1] - t[k - 1]);
    }
    double top = 0.0;
    for (double c : curv) top = std::max(top, std::fabs(c));
    double eps = 1e-9 * top;
    std::vector<std::size_t> cells;
    int prev_sign = 0;
    std::size_t prev_idx = 0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (std::fabs(curv[k]) <= eps) continue;
        int sign = curv[k] > 0.0 ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign) cells.push_back(prev_idx);
        prev_sign = sign;
        prev_idx = k;
    }
    return cells;
}

void check_conservation(CheckContext& ctx) {
    Rng rng(101);
    int count = ctx.n(20, 20);
    double worst = 0.0;
    bool pass = true;
    for (int i = 0; i < count; ++i) {
        ModeParams m;
        m.lambda = rng.log_uniform(0.3, 3.0);
        m.sigma = rng.log_uniform(0.5, 4.0);
        m.eta_a = rng.log_uniform(0.005, 0.05);
        m.eta_b = rng.log_uniform(0.005, 0.05);
        double a0 = rng.uniform(-1.0, 1.0);
        double b0 = rng.uniform(0.0, 1.0);
        double gamma0 = conserved_gamma(a0, b0, m.eta_a, m.eta_b);
        ModeParams zm = m;
        zm.gamma = gamma0;
        zm.z0 = a0 * b0;
        double r = std::max(effective_rate(zm), 1e-3);
        IntegratorConfig cfg{0.005 / r, Method::RK4, 12.0 / r, 20};
        auto states = integrate_ab(a0, b0, m, cfg);
        for (const auto& s : states) {
            double b_obs = s.b;
            if (ctx.fault == "gamma-drift")
                b_obs += 1e-3 * s.t / cfg.t_max;  // injected drift
            double drift = std::fabs(
                conserved_gamma(s.a, b_obs, m.eta_a, m.eta_b) - gamma0);
            worst = std::max(worst, drift);
            if (drift > 1e-8) pass = false;
        }
    }
    ctx.record("conservation_coupled_flow", pass,
               fmt_detail("max drift %.3g (tol 1e-8)", worst));
}

void check_closed_form_vs_integrator(CheckContext& ctx) {
    Rng rng(102);
    int count = ctx.n(12, 50);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        ModeParams m = random_mode_for_checks(rng);
        double r = effective_rate(m);
        std::vector<double> ts = logspace(1e-3 / r, 12.0 / r, 64);
        auto ref = rk4_reference(m, ts, 0.002 / r);
        for (std::size_t k = 0; k < ts.size(); ++k)
            worst = std::max(worst,
                             std::fabs(closed_form::z_general(m, ts[k]) -
                                       ref[k]));
    }
    ctx.record("closed_form_vs_integrator", worst <= 1e-6,
               fmt_detail("max |closed form - RK4| %.3g (tol 1e-6)", worst));
}

void check_special_cases(CheckContext& ctx) {
    Rng rng(103);
    int count = ctx.n(6, 20);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        ModeParams one = random_mode_for_checks(rng, 0);
        ModeParams near_one = one;
        near_one.eta_a = near_one.eta_b = 1e-8;
        double r = effective_rate(one);
        for (double t : logspace(0.01 / r, 10.0 / r, 24))
            worst = std::max(worst,
                             std::fabs(closed_form::z_general(near_one, t) -
                                       closed_form::z_one_layer(one, t)));
        ModeParams bal = random_mode_for_checks(rng, 1);
        ModeParams near_bal = bal;
        near_bal.gamma = 1e-8;
        double rb = effective_rate(bal);
        for (double t : logspace(0.01 / rb, 10.0 / rb, 24))
            worst = std::max(worst,
                             std::fabs(closed_form::z_general(near_bal, t) -
                                       closed_form::z_balanced(bal, t)));
    }
    ctx.record("special_case_boundaries", worst <= 1e-5,
               fmt_detail("max boundary gap %.3g (tol 1e-5)", worst));
}

void check_convergence_rate(CheckContext& ctx) {
    Rng rng(104);
    int count = ctx.n(6, 30);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        ModeParams m = random_mode_for_checks(rng);
        m.rho = rng.uniform(0.05, 0.7);
        double zbar = (1.0 - m.rho) * m.sigma / m.lambda;
        m.z0 = zbar * rng.uniform(0.6, 0.95);
        double r = effective_rate(m);
        double zstar = global_minimum(m);
        std::vector<double> ts = linspace(5.0 / r, 10.0 / r, 40);
        std::vector<double> ys;
        double mean_t = 0.0, mean_y = 0.0;
        for (double t : ts) {
            ys.push_back(std::log(std::fabs(zstar -
                                            closed_form::z_general(m, t))));
            mean_t += t;
            mean_y += ys.back();
        }
        mean_t /= ts.size();
        mean_y /= ts.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            sxy += (ts[k] - mean_t) * (ys[k] - mean_y);
            sxx += (ts[k] - mean_t) * (ts[k] - mean_t);
        }
        double slope = sxy / sxx;
        worst = std::max(worst, std::fabs(slope + r) / r);
    }
    ctx.record("convergence_rate_tail", worst <= 0.05,
               fmt_detail("max relative slope error %.3g (tol 0.05)", worst));
}

void check_derivative_residual(CheckContext& ctx) {
    Rng rng(105);
    int count = ctx.n(6, 20);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        ModeParams m = random_mode_for_checks(rng);
        double r = effective_rate(m);
        for (double t : logspace(0.05 / r, 6.0 / r, 12)) {
            double h = 1e-5 / r;
            double deriv = (closed_form::z_general(m, t + h) -
                            closed_form::z_general(m, t - h)) /
                           (2.0 * h);
            double expect =
                closed_form::flow_rhs(m, closed_form::z_general(m, t));
            worst = std::max(worst, std::fabs(deriv - expect) /
                                        std::max(std::fabs(expect), 1e-12));
        }
    }
    ctx.record("derivative_residual", worst <= 1e-5,
               fmt_detail("max relative residual %.3g (tol 1e-5)", worst));
}

void check_inversion(CheckContext& ctx) {
    Rng rng(106);
    int count = ctx.n(10, 40);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        ModeParams m = random_mode_for_checks(rng);
        double zstar = global_minimum(m);
        double rho_max = 1.0 - m.z0 / zstar;
        double rho = rng.uniform(0.02 * rho_max, 0.98 * rho_max);
        double t = closed_form::time_to_target(m, rho);
        worst = std::max(worst, std::fabs(closed_form::z_general(m, t) -
                                          (1.0 - rho) * zstar));
    }
    ctx.record("time_target_inversion", worst <= 1e-9,
               fmt_detail("max inversion gap %.3g (tol 1e-9)", worst));
}

void check_decoupling(CheckContext& ctx) {
    Eigen::VectorXd lambda(6), sigma(4), rho(4);
    lambda << 1.0, 1.3, 0.8, 1.6, 1.1, 0.9;
    sigma << 2.5, 2.0, 1.5, 1.0;
    rho << 0.5, 0.4, 0.3, 0.2;
    SpectralDataset ds = synthesize_exact(64, 6, 4, lambda, sigma, rho, 424242);

    InitSpec init;
    init.h = 4;
    Rng rng(107);
    Eigen::MatrixXd R = random_orthonormal(4, 4, rng);
    for (int i = 0; i < 4; ++i) init.r_vectors.push_back(R.col(i));
    init.a0 = {0.10, 0.12, 0.20, 0.15};
    init.b0 = {0.10, 0.30, 0.05, 0.20};
    double eta_a = 0.02, eta_b = 0.03;
    auto [W1, W2] = spectral_init(ds, init);
    std::vector<ModeParams> modes = dataset_modes(ds, init, eta_a, eta_b);

    double min_rate = kInf, max_rate = 0.0;
    for (const ModeParams& m : modes) {
        min_rate = std::min(min_rate, effective_rate(m));
        max_rate = std::max(max_rate, effective_rate(m));
    }
    IntegratorConfig cfg{0.005 / max_rate, Method::RK4, 12.0 / min_rate, 25};
    MatrixTrajectory flow =
        integrate_full_network(ds.X, ds.Y, W1, W2, eta_a, eta_b, cfg);

    double worst_off = 0.0, worst_diag = 0.0;
    for (std::size_t k = 0; k < flow.W.size(); ++k) {
        Eigen::MatrixXd Z = to_synaptic(ds, flow.W[k]);
        double max_diag = 0.0;
        for (int i = 0; i < Z.rows(); ++i)
            max_diag = std::max(max_diag, std::fabs(Z(i, i)));
        for (int i = 0; i < Z.rows(); ++i)
            for (int j = 0; j < Z.cols(); ++j)
                if (i != j)
                    worst_off = std::max(
                        worst_off,
                        std::fabs(Z(i, j)) / std::max(max_diag, 1e-300));
        for (std::size_t i = 0; i < modes.size(); ++i)
            worst_diag = std::max(
                worst_diag,
                std::fabs(Z(static_cast<int>(i), static_cast<int>(i)) -
                          closed_form::z_general(modes[i], flow.times[k])));
    }
    bool pass = worst_off <= 1e-8 && worst_diag <= 1e-5;
    ctx.record("decoupling_matrix_flow", pass,
               fmt_detail("max relative off-diagonal %.3g, max diagonal gap "
                          "%.3g (tol 1e-8, 1e-5)",
                          worst_off, worst_diag));
}

void check_dataset_invariants(CheckContext& ctx) {
    Rng rng(108);
    int count = ctx.n(5, 20);
    double worst = 0.0, worst_orth = 0.0;
    for (int i = 0; i < count; ++i) {
        int d_x = 2 + static_cast<int>(rng.uniform() * 5.0);
        int d_y = 2 + static_cast<int>(rng.uniform() * 5.0);
        int n = d_x + 6 + static_cast<int>(rng.uniform() * 30.0);
        int m = std::min(d_x, d_y);
        Eigen::VectorXd lambda(d_x), sigma(m), rho(m);
        for (int k = 0; k < d_x; ++k) lambda[k] = rng.log_uniform(0.3, 3.0);
        for (int k = 0; k < m; ++k) {
            sigma[k] = rng.log_uniform(0.5, 3.0);
            rho[k] = rng.uniform(0.0, 1.0);
        }
        SpectralDataset ds =
            synthesize_exact(n, d_x, d_y, lambda, sigma, rho, rng.next_u64());
        double nn = static_cast<double>(ds.n);
        worst = std::max(worst, (ds.X / std::sqrt(nn) -
                                 ds.U * ds.lambda.cwiseSqrt().asDiagonal() *
                                     ds.V.transpose())
                                    .cwiseAbs()
                                    .maxCoeff());
        Eigen::MatrixXd Sigma_rect = Eigen::MatrixXd::Zero(m, d_x);
        for (int k = 0; k < m; ++k) Sigma_rect(k, k) = ds.sigma[k];
        worst = std::max(worst, (ds.Y.transpose() * ds.X / nn -
                                 ds.U_yx * Sigma_rect * ds.V.transpose())
                                    .cwiseAbs()
                                    .maxCoeff());
        // rotated-noise identity for the true weights
        Eigen::MatrixXd E = ds.Y - ds.X * ds.Wbar.transpose();
        Eigen::MatrixXd Et = ds.U.transpose() * E * ds.U_yx / std::sqrt(nn);
        Eigen::MatrixXd Zbar = true_synaptic_weights(ds);
        for (int k = 0; k < m; ++k) {
            if (ds.lambda[k] <= 0.0) continue;
            double expect = ds.sigma[k] / ds.lambda[k] -
                            Et(k, k) / std::sqrt(ds.lambda[k]);
            worst = std::max(worst, std::fabs(Zbar(k, k) - expect));
        }
        worst_orth = std::max(
            worst_orth,
            (ds.U.transpose() * ds.U -
             Eigen::MatrixXd::Identity(d_x, d_x)).cwiseAbs().maxCoeff());
        worst_orth = std::max(
            worst_orth,
            (ds.V.transpose() * ds.V -
             Eigen::MatrixXd::Identity(d_x, d_x)).cwiseAbs().maxCoeff());
        worst = std::max(worst, ds.misalignment);
    }
    bool pass = worst <= 1e-10 && worst_orth <= 1e-12;
    ctx.record("dataset_exact_invariants", pass,
               fmt_detail("max identity residual %.3g (tol 1e-10), max "
                          "orthonormality gap %.3g (tol 1e-12)",
                          worst, worst_orth));
}

void check_error_decomposition(CheckContext& ctx) {
    Rng rng(109);
    int count = ctx.n(5, 20);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        int k_modes = 2 + static_cast<int>(rng.uniform() * 3.0);
        std::vector<ModeParams> modes;
        for (int k = 0; k < k_modes; ++k) {
            ModeParams m = random_mode_for_checks(rng);
            m.multiplicity = 1 + static_cast<int>(rng.uniform() * 8.0);
            modes.push_back(m);
        }
        double const_term = rng.uniform(0.0, 0.5);
        std::vector<double> grid = default_time_grid(modes, 128);
        ErrorCurve curve = total_error(modes, grid, const_term);
        for (std::size_t t = 0; t < grid.size(); ++t) {
            double sum = const_term;
            for (std::size_t mi = 0; mi < modes.size(); ++mi)
                sum += modes[mi].multiplicity * curve.per_mode[mi][t];
            worst = std::max(worst, std::fabs(sum - curve.values[t]) /
                                        std::max(1.0, curve.values[t]));
            if (curve.values[t] < 0.0) worst = kInf;
        }
    }
    ctx.record("error_decomposition", worst <= 1e-12,
               fmt_detail("max decomposition residual %.3g (tol 1e-12)",
                          worst));
}

void check_shape_classification(CheckContext& ctx) {
    Rng rng(110);
    int count = ctx.n(50, 200);
    int mismatches = 0;
    for (int i = 0; i < count; ++i) {
        ModeParams m = random_mode_for_checks(rng);
        double pick = rng.uniform();
        double zstar = global_minimum(m);
        if (pick < 0.25) {
            m.rho = 0.0;
        } else if (pick < 0.5) {
            double zbar = (1.0 - m.rho) * zstar;
            m.z0 = zbar + (zstar - zbar) * rng.uniform(0.05, 0.9);
        }
        CurveShape shape = classify_mode_curve(m);
        double r = std::max(effective_rate(m), 1e-12);
        std::vector<double> ts = logspace(1e-3 / r, 14.0 / r, 1500);
        double vmax = 0.0, vmin = kInf;
        std::vector<double> vs;
        for (double t : ts) {
            vs.push_back(mode_error(m, t));
            vmax = std::max(vmax, vs.back());
            vmin = std::min(vmin, vs.back());
        }
        double thr = 1e-9 * std::max(vmax - vmin, 1e-300);
        int last_neg = -1, first_pos = -1;
        bool has_neg = false, has_pos = false;
        for (std::size_t k = 1; k < vs.size(); ++k) {
            double d = vs[k] - vs[k - 1];
            if (d < -thr) {
                has_neg = true;
                last_neg = static_cast<int>(k);
            }
            if (d > thr) {
                has_pos = true;
                if (first_pos < 0) first_pos = static_cast<int>(k);
            }
        }
        CurveShape observed;
        if (!has_neg && !has_pos) observed = CurveShape::Constant;
        else if (has_neg && !has_pos) observed = CurveShape::MonotoneDecreasing;
        else if (!has_neg) observed = CurveShape::MonotoneIncreasing;
        else observed = (first_pos > last_neg) ? CurveShape::UShaped
                                               : CurveShape::Constant;
        if (observed != shape) ++mismatches;
    }
    ctx.record("shape_classification", mismatches == 0,
               fmt_detail("%.0f mismatches out of %.0f modes",
                          static_cast<double>(mismatches),
                          static_cast<double>(count)));
}

void check_monte_carlo(CheckContext& ctx) {
    Eigen::VectorXd lambda(4), sigma(3), rho(3);
    lambda << 1.0, 0.8, 1.2, 0.9;
    sigma << 2.0, 1.5, 1.0;
    rho << 0.5, 0.3, 0.6;
    Eigen::MatrixXd noise_cov = 0.04 * Eigen::MatrixXd::Identity(3, 3);
    SpectralDataset ds =
        synthesize_exact(32, 4, 3, lambda, sigma, rho, 515151, &noise_cov);

    InitSpec init;
    init.h = 3;
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(3);
        r[i] = 1.0;
        init.r_vectors.push_back(r);
    }
    init.a0 = {0.1, 0.15, 0.12};
    init.b0 = {0.1, 0.08, 0.12};
    double eta_a = 0.02, eta_b = 0.02;
    std::vector<ModeParams> modes = dataset_modes(ds, init, eta_a, eta_b);
    double const_term = constant_error_term(ds, {});

    std::vector<double> grid = default_time_grid(modes, 10);
    ErrorCurve curve = total_error(modes, grid, const_term);
    int n_test = ctx.n(20000, 100000);
    double worst_sigmas = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 4);
        for (std::size_t i = 0; i < modes.size(); ++i)
            Z(static_cast<int>(i), static_cast<int>(i)) =
                closed_form::z_general(modes[i], grid[k]);
        Eigen::MatrixXd W = ds.U_yx * Z * ds.V.transpose();
        MonteCarloEstimate mc =
            monte_carlo_error(ds, W, n_test, 616161 + k);
        double gap = std::fabs(mc.estimate - curve.values[k]);
        worst_sigmas =
            std::max(worst_sigmas, gap / std::max(mc.std_error, 1e-300));
    }
    ctx.record("monte_carlo_agreement", worst_sigmas <= 3.0,
               fmt_detail("max |analytic - MC| = %.3g standard errors "
                          "(tol 3)",
                          worst_sigmas));
}

void check_inflection_census(CheckContext& ctx) {
    Rng rng(111);
    int count = ctx.n(100, 500);
    bool pass = true;
    int three_root_cases = 0;
    for (int i = 0; i < count; ++i) {
        ModeParams m = random_mode_for_checks(rng);
        InflectionReport rep = inflections(m);
        int before = 0, after = 0;
        for (const InflectionPoint& p : rep.points)
            (p.side == InflectionSide::BeforeMin ? before : after)++;
        if (rep.points.size() > 3 || before > 2) pass = false;
        if (rep.points.size() == 3) {
            ++three_root_cases;
            if (m.rho > 0.0 && m.rho < 5.0 / 7.0 &&
                !(before == 2 && after == 1))
                pass = false;
        }
        for (std::size_t k = 1; k < rep.points.size(); ++k)
            if (rep.points[k].t_hat < rep.points[k - 1].t_hat) pass = false;
    }
    ctx.record("inflection_census", pass,
               fmt_detail("%.0f modes, %.0f three-point cases",
                          static_cast<double>(count),
                          static_cast<double>(three_root_cases)));
}

void check_inflection_oracle(CheckContext& ctx) {
    Rng rng(112);
    int count = ctx.n(30, 200);
    int bad = 0;
    for (int i = 0; i < count; ++i) {
        ModeParams m = random_mode_for_checks(rng);
        InflectionReport rep = inflections(m);
        double r = effective_rate(m);
        double t_lo = 1e-4 / r, t_hi = 20.0 / r;
        for (const InflectionPoint& p : rep.points) {
            t_lo = std::min(t_lo, p.t_hat / 10.0);
            t_hi = std::max(t_hi, p.t_hat * 5.0);
        }
        std::vector<double> ts = logspace(t_lo, t_hi, 4000);
        std::vector<double> vs;
        for (double t : ts) vs.push_back(mode_error(m, t));
        std::vector<std::size_t> cells = curvature_sign_change_cells(ts, vs);
        if (cells.size() != rep.points.size()) {
            ++bad;
            continue;
        }
        for (std::size_t k = 0; k < cells.size(); ++k) {
            std::size_t c = cells[k];
            double cell_lo = ts[c > 0 ? c - 1 : 0];
            double cell_hi = ts[std::min(c + 2, ts.size() - 1)];
            if (rep.points[k].t_hat < cell_lo || rep.points[k].t_hat > cell_hi)
                ++bad;
        }
    }
    ctx.record("inflection_time_oracle", bad == 0,
               fmt_detail("%.0f mismatches out of %.0f modes",
                          static_cast<double>(bad),
                          static_cast<double>(count)));
}

void check_detector_soundness(CheckContext& ctx) {
    Rng rng(113);
    int count = ctx.n(150, 1000);
    int violations = 0, detections = 0;
    for (int i = 0; i < count; ++i) {
        int k_modes = 2 + static_cast<int>(rng.uniform() * 4.0);
        std::vector<ModeParams> modes;
        for (int k = 0; k < k_modes; ++k) {
            ModeParams m = random_mode_for_checks(rng);
            m.multiplicity = 1 + static_cast<int>(rng.uniform() * 8.0);
            modes.push_back(m);
        }
        std::vector<double> grid = default_time_grid(modes);
        ErrorCurve curve = total_error(modes, grid, 0.0);
        DDVerdict verdict = detect_double_descent(curve, modes, 0.01);
        if (verdict.detected) {
            ++detections;
            if (!verdict.necessary_condition_holds.value_or(false))
                ++violations;
        }
    }
    ctx.record("detector_soundness", violations == 0,
               fmt_detail("%.0f detections, %.0f necessary-condition "
                          "violations",
                          static_cast<double>(detections),
                          static_cast<double>(violations)));
}

void check_one_layer_asymmetry(CheckContext& ctx) {
    Rng rng(114);
    int pairs = ctx.n(50, 200);
    bool pass = true;
    for (int i = 0; i < pairs; ++i) {
        ModeParams a = random_mode_for_checks(rng, 0);
        ModeParams b = random_mode_for_checks(rng, 0);
        TwoModeCondition cond = necessary_condition_two_modes(a, b);
        if (cond.scenario == TwoModeScenario::FirstScenario ||
            cond.scenario == TwoModeScenario::Both)
            pass = false;
    }
    int zpairs = ctx.n(30, 100);
    int disagreements = 0;
    for (int i = 0; i < zpairs; ++i) {
        double gamma = rng.log_uniform(1e-3, 0.05);
        ModeParams a, b;
        for (ModeParams* m : {&a, &b}) {
            m->lambda = rng.log_uniform(0.2, 5.0);
            m->sigma = rng.log_uniform(0.5, 5.0);
            m->eta_a = 0.0;
            m->eta_b = 1.0;
            m->gamma = gamma;
            m->z0 = 0.0;
            m->rho = rng.uniform(0.02, 0.98);
        }
        double ta = closed_form::time_to_target(a, a.rho);
        double tb = closed_form::time_to_target(b, b.rho);
        const ModeParams& first = ta <= tb ? a : b;
        const ModeParams& later = ta <= tb ? b : a;
        bool closed = one_layer_zero_init_condition(first, later);
        bool checker = necessary_condition_two_modes(first, later).holds;
        if (closed != checker) ++disagreements;
    }
    ctx.record("one_layer_asymmetry", pass && disagreements == 0,
               fmt_detail("%.0f ordered pairs, %.0f zero-init "
                          "disagreements",
                          static_cast<double>(pairs),
                          static_cast<double>(disagreements)));
}

void check_deep_trend(CheckContext& ctx) {
    double prev_gap = kInf;
    bool pass = true;
    double worst_drift = 0.0;
    for (int L : {8, 16, 32}) {
        DeepModeParams dm;
        dm.base.lambda = 1.0;
        dm.base.sigma = 2.0;
        dm.base.gamma = 0.0;
        dm.base.z0 = 0.05;
        dm.base.rho = 0.5;
        dm.L = L;
        dm.eta_first = dm.eta_last = 0.02;
        dm.base.eta_a = dm.eta_first;
        dm.base.eta_b = dm.eta_last;
        IntegratorConfig cfg = default_deep_config(dm);
        cfg.sample_stride = 50;
        GroupedInit init = grouped_init(dm);
        DeepLayerwiseResult lw = integrate_deep_layerwise(
            L, init.a_first, init.a_last, dm.eta_first, dm.eta_last,
            dm.base.lambda, dm.base.sigma, cfg);
        Trajectory approx = integrate_deep_scalar(dm, cfg);
        double gap = 0.0;
        for (std::size_t k = 0; k < lw.z.values.size(); ++k)
            gap = std::max(gap,
                           std::fabs(lw.z.values[k] - approx.values[k]));
        if (gap >= prev_gap) pass = false;
        prev_gap = gap;
        double g0 = dm.eta_last * lw.layer_first[0] * lw.layer_first[0] -
                    dm.eta_first * lw.layer_last[0] * lw.layer_last[0];
        for (std::size_t k = 0; k < lw.layer_first.size(); ++k) {
            double g = dm.eta_last * lw.layer_first[k] * lw.layer_first[k] -
                       dm.eta_first * lw.layer_last[k] * lw.layer_last[k];
            worst_drift = std::max(worst_drift, std::fabs(g - g0));
        }
    }
    pass = pass && worst_drift <= 1e-8;
    ctx.record("deep_approximation_trend", pass,
               fmt_detail("final gap %.3g, max pairwise conservation drift "
                          "%.3g (tol 1e-8)",
                          prev_gap, worst_drift));
}

void check_deep_inflection_oracle(CheckContext& ctx) {
    DeepModeParams dm;
    dm.base.lambda = 1.0;
    dm.base.sigma = 2.5;
    dm.base.gamma = 0.0;
    dm.base.z0 = 0.02;
    dm.base.rho = 0.5;
    dm.L = 8;
    dm.eta_first = dm.eta_last = 0.02;
    dm.base.eta_a = dm.eta_first;
    dm.base.eta_b = dm.eta_last;
    InflectionReport rep = deep_inflections(dm);

    IntegratorConfig cfg = default_deep_config(dm);
    cfg.sample_stride = 20;
    Trajectory traj = integrate_deep_scalar(dm, cfg);
    std::vector<double> ts, vs;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        double z = traj.values[k];
        double gap = (1.0 - dm.base.rho) * dm.base.sigma -
                     dm.base.lambda * z;
        ts.push_back(traj.times[k]);
        vs.push_back(gap * gap);
    }
    std::vector<std::size_t> cells = curvature_sign_change_cells(ts, vs);
    bool pass = cells.size() == rep.points.size();
    if (pass) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            std::size_t c = cells[k];
            double lo = ts[c > 0 ? c - 1 : 0];
            double hi = ts[std::min(c + 2, ts.size() - 1)];
            if (rep.points[k].t_hat < lo || rep.points[k].t_hat > hi)
                pass = false;
        }
    }
    ctx.record("deep_inflection_oracle", pass,
               fmt_detail("%.0f analytic vs %.0f numeric inflection points",
                          static_cast<double>(rep.points.size()),
                          static_cast<double>(cells.size())));
}

}  // namespace

json run_verify(const std::string& level, const std::string& fault) {
    CheckContext ctx;
    if (level == "fast") ctx.level_full = 0;
    else if (level == "full") ctx.level_full = 1;
    else fail(ErrorKind::Config, "verify level must be fast or full");
    if (!fault.empty() && fault != "gamma-drift")
        fail(ErrorKind::Config, "unknown fault " + fault);
    ctx.fault = fault;

    check_conservation(ctx);
    check_closed_form_vs_integrator(ctx);
    check_special_cases(ctx);
    check_convergence_rate(ctx);
    check_derivative_residual(ctx);
    check_inversion(ctx);
    check_decoupling(ctx);
    check_dataset_invariants(ctx);
    check_error_decomposition(ctx);
    check_shape_classification(ctx);
    check_monte_carlo(ctx);
    check_inflection_census(ctx);
    check_inflection_oracle(ctx);
    check_detector_soundness(ctx);
    check_one_layer_asymmetry(ctx);
    check_deep_trend(ctx);
    check_deep_inflection_oracle(ctx);

    json report;
    report["level"] = level;
    if (!fault.empty()) report["fault"] = fault;
    report["checks"] = json::array();
    bool all = true;
    for (const CheckResult& r : ctx.results) {
        json cj;
        cj["name"] = r.name;
        cj["passed"] = r.passed;
        cj["detail"] = r.detail;
        report["checks"].push_back(cj);
        all = all && r.passed;
    }
    report["all_passed"] = all;
    return report;
}

}  // namespace epochdd
