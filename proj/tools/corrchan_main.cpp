#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "corrchan/csv.hpp"
#include "corrchan/errors.hpp"
#include "corrchan/runner.hpp"
#include "corrchan/scenario.hpp"
#include "corrchan/verify.hpp"

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kIntegration = 3, kCutoff = 4 };

std::set<int> parse_criteria(const std::string& list) {
  std::set<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != item.size() || id < 1 || id > corrchan::verify::kCriterionCount) {
      throw corrchan::ConfigError("--criteria", "bad criterion id '" + item + "'");
    }
    out.insert(id);
  }
  return out;
}

void print_paths(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << '\n';
}

int cmd_verify(const std::string& json_out, const std::string& criteria, const std::string& fault,
               int threads) {
  corrchan::verify::Options opts;
  opts.threads = threads;
  opts.only = parse_criteria(criteria);
  if (!fault.empty()) {
    if (fault != "gamma-sign") throw corrchan::ConfigError("--inject-fault", "unknown fault '" + fault + "'");
    opts.tamper_gamma_sign = true;
  }
  const auto report = corrchan::verify::run(opts);
  for (const auto& r : report.criteria) std::cout << corrchan::verify::format_line(r) << '\n';
  if (report.purity) {
    for (const auto& pt : report.purity->points) {
      std::printf("purity N=%g: quadratic %.10f  rotated %.10f  numeric %.10f\n", pt.n, pt.quadratic,
                  pt.rotated, pt.numeric);
    }
    std::printf("purity formula selected by numerics: %s (residual %.3e, other %.3e)\n",
                report.purity->selected.c_str(), report.purity->residual_selected,
                report.purity->residual_other);
  }
  std::printf("%s in %.1f s\n", report.all_passed ? "all criteria passed" : "FAILED",
              report.seconds);
  if (!json_out.empty()) {
    if (json_out == "-") {
      std::cout << report.to_json() << '\n';
    } else {
      corrchan::csv::write_file_atomic(json_out, report.to_json() + "\n");
    }
  }
  return report.all_passed ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two bosonic modes in a common thermal reservoir: simulator and verifier"};
  app.require_subcommand(1);

  int threads = 1;
  std::string out_dir = ".";
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--out-dir", out_dir, "output directory");

  std::string run_file, sweep_file, qgrid_file;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("file", run_file)->required();

  auto* sweep = app.add_subcommand("sweep", "run a scenario sweep");
  sweep->add_option("file", sweep_file)->required();

  std::string json_out, criteria, fault;
  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_option("--json", json_out, "write the JSON report here ('-' for stdout)");
  verify->add_option("--criteria", criteria, "comma-separated criterion ids (default: all)");
  verify->add_option("--inject-fault", fault, "deliberately break a prediction: gamma-sign");

  double xmin = -2.0, xmax = 2.0, step = 1.0;
  std::optional<double> qt;
  std::string q_output;
  auto* qgrid = app.add_subcommand("qgrid", "tabulate the Q-function on a 4-D grid");
  qgrid->add_option("file", qgrid_file)->required();
  qgrid->add_option("--xmin", xmin)->required();
  qgrid->add_option("--xmax", xmax)->required();
  qgrid->add_option("--step", step)->required();
  qgrid->add_option("--t", qt, "time (default: t_max)");
  qgrid->add_option("--output", q_output, "CSV path (default: <out-dir>/<name>/qgrid.csv)");

  for (auto* sub : {run, sweep, verify, qgrid}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    corrchan::RunOptions opts{out_dir, threads};
    if (*run) {
      print_paths(corrchan::run_scenario(corrchan::load_scenario(run_file), opts));
    } else if (*sweep) {
      print_paths(corrchan::run_sweep(corrchan::load_scenario(sweep_file), opts));
    } else if (*verify) {
      return cmd_verify(json_out, criteria, fault, threads);
    } else if (*qgrid) {
      const auto sc = corrchan::load_scenario(qgrid_file);
      corrchan::QGridSpec spec;
      spec.xmin = xmin;
      spec.xmax = xmax;
      spec.step = step;
      try {
        spec.axis();
      } catch (const corrchan::DomainError& e) {
        throw corrchan::ConfigError("qgrid", e.what());
      }
      const auto table = corrchan::qgrid_table(sc, spec, qt, threads);
      std::filesystem::path path =
          q_output.empty() ? std::filesystem::path(out_dir) / sc.name / "qgrid.csv"
                            : std::filesystem::path(q_output);
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      table.write_atomic(path);
      std::cout << path.string() << '\n';
    }
    return kOk;
  } catch (const corrchan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const corrchan::IntegrationFailure& e) {
    std::cerr << "integration failure at t=" << e.time() << " (trace drift " << e.trace_drift()
              << ", min eigenvalue " << e.min_eigenvalue() << "): " << e.what() << '\n';
    return kIntegration;
  } catch (const corrchan::CutoffTooSmall& e) {
    std::cerr << "cutoff too small for amplitude " << e.amplitude() << ": cutoff " << e.cutoff()
              << " leaves Poisson tail " << e.tail() << '\n';
    return kCutoff;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
