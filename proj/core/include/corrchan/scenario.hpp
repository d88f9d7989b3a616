#pragma once

// Scenario files: strict JSON configuration for the command-line runner.
// The schema is documented in docs/formats.md.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrchan/channel.hpp"
#include "corrchan/fock.hpp"
#include "corrchan/lindblad.hpp"

namespace corrchan {

inline constexpr int kScenarioVersion = 1;

struct InputState {
  enum class Kind { coherent, superposition, entangled_coherent };

  Kind kind = Kind::coherent;
  /// coherent: one term; superposition: the listed terms (normalized on use)
  CoherentSuperposition terms;
  cplx alpha;  ///< entangled_coherent only
  double phi = 0.0;
  int sign = 1;

  CoherentSuperposition superposition() const;
  /// Single coherent term |alpha1, alpha2>, if that is what this is.
  std::optional<CoherentTerm> as_coherent() const;
};

enum class OutputKind { purity, fidelity, chi_grid, q_grid, dfs };
enum class GeneratorChoice { correlated, independent, both };

std::string_view to_string(OutputKind kind);
std::string_view to_string(GeneratorChoice choice);
std::vector<GeneratorKind> generators_of(GeneratorChoice choice);

struct TimeGridSpec {
  double t_max = 1.0;
  int n_points = 11;
};

/// lambda1 = v_j e^{i pi/5}, lambda2 = v_k e^{-i pi/3}, v on n evenly spaced points of
/// [-lambda_max, lambda_max]: an n x n grid.
struct ChiGridSpec {
  double lambda_max = 1.5;
  int n = 5;

  std::vector<PhasePoint> points() const;
};

/// Four-dimensional grid over (Re d1, Im d1, Re d2, Im d2), each axis xmin, xmin + step, ...
/// up to xmax (inclusive within step/1e9), row-major with Re d1 slowest.
struct QGridSpec {
  double xmin = -2.0;
  double xmax = 2.0;
  double step = 1.0;

  std::vector<double> axis() const;
  std::vector<QPoint> points() const;
};

struct SweepSpec {
  std::string field;
  std::vector<double> values;
};

struct Scenario {
  int version = kScenarioVersion;
  std::string name = "scenario";
  ChannelParams channel;
  std::optional<double> temperature_ratio;
  InputState input;
  TimeGridSpec time;
  std::optional<ModeCutoff> cutoff;  ///< nullopt means "auto"
  GeneratorChoice generator = GeneratorChoice::correlated;
  std::vector<OutputKind> outputs;
  double dt = 0.0;  ///< 0 selects default_dt
  bool step_halving = false;
  ChiGridSpec chi_grid;
  QGridSpec q_grid;
  std::optional<SweepSpec> sweep;

  ModeCutoff resolved_cutoff() const;
  std::vector<double> grid() const;
  SimConfig sim_config() const;
};

/// Fields that `sweep.field` may name.
const std::vector<std::string>& sweepable_fields();

/// Throws ConfigError with the offending field path and, when it can be located, the line.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
/// Copy of `base` with `field` set to `value` (and `sweep` cleared).
Scenario with_field(const Scenario& base, std::string_view field, double value);

}  // namespace corrchan
