#pragma once

// Scenario pipelines behind the command-line tool. Output schemas are fixed and documented in
// docs/formats.md; all outputs are deterministic for any thread count.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrchan/csv.hpp"
#include "corrchan/lindblad.hpp"
#include "corrchan/observables.hpp"
#include "corrchan/scenario.hpp"

namespace corrchan {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int threads = 1;
};

struct GeneratorRun {
  GeneratorKind kind;
  Trajectory trajectory;
};

struct ScenarioOutcome {
  ModeCutoff cutoff;
  DensityOperator initial;
  std::vector<GeneratorRun> runs;
  std::map<OutputKind, csv::Table> tables;
  std::map<GeneratorKind, DfsReport> dfs;
  std::string summary_json;
};

/// Runs every generator of the scenario and builds the requested tables; no file I/O.
ScenarioOutcome compute_scenario(const Scenario& scenario, int threads = 1);

/// Writes <out_dir>/<name>/<output>.csv for each requested output plus summary.json.
std::vector<std::filesystem::path> run_scenario(const Scenario& scenario, const RunOptions& opts);

/// Long-format sweep: <out_dir>/<name>/sweep_<output>.csv with a leading sweep_value column.
std::vector<std::filesystem::path> run_sweep(const Scenario& scenario, const RunOptions& opts);

/// Q-function comparison table on `grid` at time `t` (t_max when absent), correlated channel.
csv::Table qgrid_table(const Scenario& scenario, const QGridSpec& grid,
                       std::optional<double> t = std::nullopt, int threads = 1);

namespace columns {
inline const std::vector<std::string> purity = {"generator", "t", "n_t", "purity_numeric",
                                                "purity_quadratic", "purity_rotated"};
inline const std::vector<std::string> fidelity = {"generator", "t", "n_t", "fidelity_numeric",
                                                  "fidelity_formula"};
inline const std::vector<std::string> chi_grid = {
    "generator",      "t",              "re_lambda1",      "im_lambda1",
    "re_lambda2",     "im_lambda2",     "re_chi_numeric",  "im_chi_numeric",
    "re_chi_analytic", "im_chi_analytic", "abs_diff"};
inline const std::vector<std::string> q_grid = {"re_delta1", "im_delta1", "re_delta2", "im_delta2",
                                                "q_analytic", "q_numeric", "abs_diff"};
inline const std::vector<std::string> dfs = {"generator", "t", "trace_distance"};
}  // namespace columns

}  // namespace corrchan
