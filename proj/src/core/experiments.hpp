#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "analysis.hpp"
#include "deep.hpp"
#include "generalisation.hpp"
#include "modes.hpp"

namespace epochdd {

struct TimeGridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 512;
    bool log_spacing = true;
};

struct SweepSpec {
    // lambda_i / sigma_i / rho_i retarget the first mode; gamma / eta / z0
    // apply to every mode.
    std::string parameter;
    std::vector<double> values;
};

struct ExperimentConfig {
    std::vector<ModeParams> modes;
    std::optional<TimeGridSpec> grid;  // default grid when absent
    std::optional<SweepSpec> sweep;
    double prominence = 0.01;
    double const_term = 0.0;
    std::uint64_t seed = 0;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
nlohmann::json emit_experiment_config(const ExperimentConfig& cfg);

// Applies one sweep value to a copy of the base modes.
std::vector<ModeParams> apply_sweep(const std::vector<ModeParams>& modes,
                                    const std::string& parameter,
                                    double value);

nlohmann::json mode_to_json(const ModeParams& mode);
ModeParams mode_from_json(const nlohmann::json& j);
nlohmann::json verdict_to_json(const DDVerdict& verdict);
nlohmann::json inflection_report_to_json(const InflectionReport& report);

void write_curves_csv(const std::filesystem::path& path,
                      const ErrorCurve& curve);
void write_trajectories_csv(const std::filesystem::path& path,
                            std::span<const ModeParams> modes,
                            const std::vector<double>& t_grid);

// simulate: curves/trajectories CSVs plus report.json with per-sweep-point
// verdicts and inflection reports. Returns the report.
nlohmann::json run_simulate(const ExperimentConfig& cfg,
                            const std::filesystem::path& out_dir);

// Two-row, three-scenario panel sweep: the top row sweeps the first mode's
// input eigenvalue with multiplicities 9/1, the bottom row sweeps its
// cross singular value with multiplicities 1/9. Emits one SVG and one CSV
// per panel plus a verdict table. Returns the verdict table.
nlohmann::json run_figure1(const std::filesystem::path& out_dir,
                           std::uint64_t seed);

// Named (gamma, eta) scenarios of the panel protocol.
struct Scenario {
    std::string name;
    double gamma = 0.0;
    double eta = 0.0;
};
const std::vector<Scenario>& panel_scenarios();

std::vector<ModeParams> panel_modes(const Scenario& sc, bool top_row,
                                    double swept_value);

// Smallest swept value whose curve shows a detected double descent, by
// bisection on a log scale. Returns nullopt when the range has none.
std::optional<double> sweep_onset(const Scenario& sc,
                                  const std::string& parameter, double lo,
                                  double hi, double prominence = 0.01);

nlohmann::json run_sweep_onset(const std::string& scenario,
                               const std::string& parameter, double lo,
                               double hi,
                               const std::filesystem::path& out_csv);

// Invariant suite. level is "fast" or "full"; fault is empty or
// "gamma-drift" (negative control that must make the conservation check
// fail). Returns the machine-readable report; all_passed is in the report.
nlohmann::json run_verify(const std::string& level, const std::string& fault);

}  // namespace epochdd
