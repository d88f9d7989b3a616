#include "corrchan/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "corrchan/errors.hpp"
#include "parallel.hpp"

namespace corrchan {

namespace {

using json = nlohmann::json;
using csv::format_17;
using csv::format_shortest;

std::string num(double x) { return format_shortest(x); }

/// Closed-form fidelity applies to |a,-a> and |a,a> inputs on the correlated channel.
std::optional<double> fidelity_formula(const Scenario& sc, GeneratorKind kind, double t) {
  if (kind != GeneratorKind::correlated) return std::nullopt;
  const auto coh = sc.input.as_coherent();
  if (!coh) return std::nullopt;
  if (coh->alpha2 == -coh->alpha1) return fidelity_antisym(sc.channel, t);
  if (coh->alpha2 == coh->alpha1) return fidelity_sym(coh->alpha1, sc.channel, t);
  return std::nullopt;
}

csv::Table purity_table(const Scenario& sc, const std::vector<GeneratorRun>& runs) {
  csv::Table table(columns::purity);
  const bool coherent = sc.input.as_coherent().has_value();
  for (const auto& run : runs) {
    const bool analytic = coherent && run.kind == GeneratorKind::correlated;
    const auto& traj = run.trajectory;
    for (std::size_t k = 0; k < traj.grid.size(); ++k) {
      const double t = traj.grid[k];
      table.add_row({std::string(to_string(run.kind)), num(t), num(n_of_t(sc.channel, t)),
                     num(purity_numeric(traj.states[k])),
                     analytic ? num(purity_coherent_quadratic(sc.channel, t)) : "",
                     analytic ? num(purity_coherent_rotated(sc.channel, t)) : ""});
    }
  }
  return table;
}

csv::Table fidelity_table(const Scenario& sc, const DensityOperator& rho0,
                          const std::vector<GeneratorRun>& runs) {
  csv::Table table(columns::fidelity);
  for (const auto& run : runs) {
    const auto& traj = run.trajectory;
    for (std::size_t k = 0; k < traj.grid.size(); ++k) {
      const double t = traj.grid[k];
      const auto formula = fidelity_formula(sc, run.kind, t);
      table.add_row({std::string(to_string(run.kind)), num(t), num(n_of_t(sc.channel, t)),
                     num(overlap(rho0, traj.states[k])), formula ? num(*formula) : ""});
    }
  }
  return table;
}

csv::Table chi_table(const Scenario& sc, const DyadExpansion& dyads,
                     const std::vector<GeneratorRun>& runs, int threads) {
  csv::Table table(columns::chi_grid);
  const auto points = sc.chi_grid.points();
  for (const auto& run : runs) {
    const bool analytic = run.kind == GeneratorKind::correlated;
    const auto& traj = run.trajectory;
    std::vector<std::vector<std::string>> rows(traj.grid.size() * points.size());
    detail::parallel_for(rows.size(), threads, [&](std::size_t idx) {
      const std::size_t k = idx / points.size();
      const PhasePoint& pt = points[idx % points.size()];
      const double t = traj.grid[k];
      const cplx numeric = chi_numeric(traj.states[k], pt);
      std::vector<std::string> row = {std::string(to_string(run.kind)), num(t),
                                      num(pt.lambda1.real()), num(pt.lambda1.imag()),
                                      num(pt.lambda2.real()), num(pt.lambda2.imag()),
                                      num(numeric.real()), num(numeric.imag()), "", "", ""};
      if (analytic) {
        const cplx a = chi_analytic(dyads, pt, sc.channel, t);
        row[8] = num(a.real());
        row[9] = num(a.imag());
        row[10] = num(std::abs(cplx(numeric.real() - a.real(), numeric.imag() - a.imag())));
      }
      rows[idx] = std::move(row);
    });
    for (auto& r : rows) table.add_row(std::move(r));
  }
  return table;
}

csv::Table q_table(const DensityOperator& state, const DyadExpansion* dyads,
                   const ChannelParams& p, double t, const QGridSpec& grid, int threads) {
  csv::Table table(columns::q_grid);
  const auto points = grid.points();
  std::vector<std::vector<std::string>> rows(points.size());
  detail::parallel_for(points.size(), threads, [&](std::size_t i) {
    const QPoint& q = points[i];
    const double numeric = q_numeric(state, q);
    std::vector<std::string> row = {format_17(q.delta1.real()), format_17(q.delta1.imag()),
                                    format_17(q.delta2.real()), format_17(q.delta2.imag()),
                                    "", format_17(numeric), ""};
    if (dyads) {
      const double analytic = q_analytic(*dyads, q, p, t);
      row[4] = format_17(analytic);
      row[6] = format_17(std::abs(analytic - numeric));
    }
    rows[i] = std::move(row);
  });
  for (auto& r : rows) table.add_row(std::move(r));
  return table;
}

csv::Table dfs_table(const std::map<GeneratorKind, DfsReport>& reports) {
  csv::Table table(columns::dfs);
  for (const auto& [kind, rep] : reports) {
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
      table.add_row({std::string(to_string(kind)), num(rep.times[k]),
                     num(rep.trace_distance_to_input[k])});
    }
  }
  return table;
}

json diagnostics_json(const GeneratorRun& run) {
  const auto& traj = run.trajectory;
  double drift = 0.0, herm = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (const auto& d : traj.diagnostics) {
    drift = std::max(drift, d.trace_drift);
    herm = std::max(herm, d.hermiticity_defect);
    if (!std::isnan(d.min_eigenvalue)) min_eig = std::min(min_eig, d.min_eigenvalue);
  }
  json j = {{"generator", std::string(to_string(run.kind))},
            {"dt", traj.dt},
            {"steps", traj.steps},
            {"max_trace_drift", drift},
            {"max_hermiticity_defect", herm},
            {"min_eigenvalue", min_eig},
            {"warnings", traj.warnings}};
  j["convergence_estimate"] =
      traj.convergence_estimate ? json(*traj.convergence_estimate) : json(nullptr);
  return j;
}

bool wants(const Scenario& sc, OutputKind k) {
  return std::find(sc.outputs.begin(), sc.outputs.end(), k) != sc.outputs.end();
}

}  // namespace

ScenarioOutcome compute_scenario(const Scenario& sc, int threads) {
  const CoherentSuperposition psi = sc.input.superposition().normalized();
  const ModeCutoff cutoff = sc.resolved_cutoff();
  ScenarioOutcome out{cutoff, superposition_to_density(psi, cutoff), {}, {}, {}, {}};
  const auto grid = sc.grid();
  const SimConfig cfg = sc.sim_config();
  const auto kinds = generators_of(sc.generator);

  out.runs.resize(kinds.size(), GeneratorRun{GeneratorKind::correlated, {}});
  detail::parallel_for(kinds.size(), threads, [&](std::size_t i) {
    out.runs[i] = {kinds[i], evolve(out.initial, kinds[i], sc.channel, cfg, grid)};
  });

  const DyadExpansion dyads = dyad_expansion_of(psi);
  for (const auto& run : out.runs) {
    if (!wants(sc, OutputKind::dfs)) break;
    DfsReport rep;
    rep.times = run.trajectory.grid;
    for (const auto& s : run.trajectory.states) {
      const double d = trace_distance(s, out.initial);
      rep.trace_distance_to_input.push_back(d);
      rep.max_deviation = std::max(rep.max_deviation, d);
    }
    rep.decoherence_free = rep.max_deviation < rep.tolerance;
    out.dfs.emplace(run.kind, std::move(rep));
  }

  for (OutputKind k : sc.outputs) {
    switch (k) {
      case OutputKind::purity: out.tables.emplace(k, purity_table(sc, out.runs)); break;
      case OutputKind::fidelity: out.tables.emplace(k, fidelity_table(sc, out.initial, out.runs)); break;
      case OutputKind::chi_grid: out.tables.emplace(k, chi_table(sc, dyads, out.runs, threads)); break;
      case OutputKind::q_grid: {
        const GeneratorRun* chosen = &out.runs.front();
        for (const auto& r : out.runs) {
          if (r.kind == GeneratorKind::correlated) chosen = &r;
        }
        const bool analytic = chosen->kind == GeneratorKind::correlated;
        out.tables.emplace(k, q_table(chosen->trajectory.states.back(), analytic ? &dyads : nullptr,
                                      sc.channel, chosen->trajectory.grid.back(), sc.q_grid,
                                      threads));
        break;
      }
      case OutputKind::dfs: out.tables.emplace(k, dfs_table(out.dfs)); break;
    }
  }

  json summary = {{"name", sc.name},
                  {"cutoff", {cutoff.d1, cutoff.d2}},
                  {"channel", {{"gamma", sc.channel.gamma}, {"n0", sc.channel.n0}}},
                  {"time_grid", {{"t_max", sc.time.t_max}, {"n_points", sc.time.n_points}}}};
  json gens = json::array();
  for (const auto& run : out.runs) gens.push_back(diagnostics_json(run));
  summary["generators"] = gens;
  if (wants(sc, OutputKind::dfs)) {
    json dfs = json::object();
    for (const auto& [kind, rep] : out.dfs) {
      dfs[std::string(to_string(kind))] = {{"max_deviation", rep.max_deviation},
                                           {"decoherence_free", rep.decoherence_free},
                                           {"tolerance", rep.tolerance}};
    }
    summary["dfs"] = dfs;
  }
  json outputs = json::array();
  for (OutputKind k : sc.outputs) outputs.push_back(std::string(to_string(k)));
  summary["outputs"] = outputs;
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

std::vector<std::filesystem::path> run_scenario(const Scenario& sc, const RunOptions& opts) {
  const ScenarioOutcome outcome = compute_scenario(sc, opts.threads);
  const auto dir = opts.out_dir / sc.name;
  std::vector<std::filesystem::path> written;
  for (const auto& [kind, table] : outcome.tables) {
    const auto path = dir / (std::string(to_string(kind)) + ".csv");
    table.write_atomic(path);
    written.push_back(path);
  }
  const auto summary = dir / "summary.json";
  csv::write_file_atomic(summary, outcome.summary_json);
  written.push_back(summary);
  return written;
}

std::vector<std::filesystem::path> run_sweep(const Scenario& sc, const RunOptions& opts) {
  if (!sc.sweep) throw ConfigError("sweep", "scenario declares no swept field");
  const SweepSpec& spec = *sc.sweep;
  if (spec.values.empty()) throw ConfigError("sweep.values", "sweep list must not be empty");

  std::vector<ScenarioOutcome> outcomes(spec.values.size());
  detail::parallel_for(spec.values.size(), opts.threads, [&](std::size_t i) {
    outcomes[i] = compute_scenario(with_field(sc, spec.field, spec.values[i]), 1);
  });

  const auto dir = opts.out_dir / sc.name;
  std::vector<std::filesystem::path> written;
  for (OutputKind kind : sc.outputs) {
    std::vector<std::string> header = {"sweep_value"};
    const auto& first = outcomes.front().tables.at(kind);
    header.insert(header.end(), first.header().begin(), first.header().end());
    csv::Table merged(header);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      for (const auto& row : outcomes[i].tables.at(kind).rows()) {
        std::vector<std::string> r = {format_shortest(spec.values[i])};
        r.insert(r.end(), row.begin(), row.end());
        merged.add_row(std::move(r));
      }
    }
    const auto path = dir / ("sweep_" + std::string(to_string(kind)) + ".csv");
    merged.write_atomic(path);
    written.push_back(path);
  }

  json summary = {{"name", sc.name}, {"field", spec.field}, {"values", spec.values}};
  json points = json::array();
  for (const auto& o : outcomes) points.push_back(json::parse(o.summary_json));
  summary["points"] = points;
  const auto path = dir / "sweep_summary.json";
  csv::write_file_atomic(path, summary.dump(2) + "\n");
  written.push_back(path);
  return written;
}

csv::Table qgrid_table(const Scenario& sc, const QGridSpec& grid, std::optional<double> t,
                       int threads) {
  const double when = t.value_or(sc.time.t_max);
  if (!(when >= 0.0)) throw DomainError("qgrid time must be >= 0");
  const CoherentSuperposition psi = sc.input.superposition().normalized();
  const ModeCutoff cutoff = sc.resolved_cutoff();
  const DensityOperator rho0 = superposition_to_density(psi, cutoff);
  SimConfig cfg = sc.sim_config();
  cfg.t_final = std::max(cfg.t_final, when);
  const std::vector<double> g = when > 0.0 ? std::vector<double>{0.0, when} : std::vector<double>{0.0};
  const Trajectory traj = evolve(rho0, GeneratorKind::correlated, sc.channel, cfg, g);
  const DyadExpansion dyads = dyad_expansion_of(psi);
  return q_table(traj.states.back(), &dyads, sc.channel, when, grid, threads);
}

}  // namespace corrchan
