#pragma once

// Master-equation integration in the truncated two-mode Fock space.
//
//   d rho/dt = (G/2)(N0+1) [2 L rho L^+ - L^+L rho - rho L^+L]
//            + (G/2) N0    [2 L^+ rho L - L L^+ rho - rho L L^+]
//
// with L = a1 + a2 for the common reservoir, or one such pair of terms per mode with
// L1 = a1 and L2 = a2 for independent reservoirs.

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corrchan/channel.hpp"
#include "corrchan/fock.hpp"

namespace corrchan {

enum class GeneratorKind { correlated, independent };

std::string_view to_string(GeneratorKind kind);
GeneratorKind generator_from_string(std::string_view name);

struct SimConfig {
  double dt = 0.0;  ///< <= 0 selects default_dt()
  double t_final = std::numeric_limits<double>::infinity();  ///< integration horizon
  double trace_tol = 1e-8;
  double positivity_tol = 1e-8;
  bool step_halving = false;
  bool check_positivity = true;
};

/// 0.5 / (Gamma (2 N0 + 1) (d1 + d2)), inside the RK4 stability interval for both generators.
double default_dt(const ChannelParams& p, const ModeCutoff& cutoff);

class Liouvillian {
 public:
  Liouvillian(GeneratorKind kind, const ChannelParams& p, const ModeCutoff& cutoff);

  GeneratorKind kind() const noexcept { return kind_; }
  const ModeCutoff& cutoff() const noexcept { return cutoff_; }
  const ChannelParams& params() const noexcept { return params_; }

  DensityOperator apply(const DensityOperator& rho) const;
  /// Hot path used by the integrator: `rho` must be hermitian, no cutoff check, and `out`
  /// must not alias `rho`.
  void apply(const Matrix& rho, Matrix& out) const;
  /// Upper bound on the spectral radius of the generator (inverse time units).
  double stiffness() const noexcept { return stiffness_; }

 private:
  // Ladder operators act on the dense matrix as row/column shifts by `stride` (d2 for mode 1,
  // 1 for mode 2) scaled by sqrt(n); `lower` holds sqrt(n+1) (0 on the top level) and
  // `raise` holds sqrt(n) per flat index.
  struct Ladder {
    Eigen::Index stride;
    Eigen::VectorXd lower;
    Eigen::VectorXd raise;
  };

  void left_lower(const Ladder& a, const Matrix& x, Matrix& out, bool accumulate) const;
  void left_raise(const Ladder& a, const Matrix& x, Matrix& out, bool accumulate) const;
  void right_lower_dag(const Ladder& a, const Matrix& x, Matrix& out, bool accumulate) const;
  void right_raise_dag(const Ladder& a, const Matrix& x, Matrix& out, bool accumulate) const;
  /// out (+)= L x for the jump L = sum of `group`
  void left_jump(std::span<const Ladder> group, const Matrix& x, Matrix& out, bool dagger) const;
  void right_jump(std::span<const Ladder> group, const Matrix& x, Matrix& out, bool dagger) const;

  GeneratorKind kind_;
  ChannelParams params_;
  ModeCutoff cutoff_;
  std::vector<Ladder> ladders_;               // mode 1, mode 2
  std::vector<std::vector<Ladder>> jumps_;    // each jump operator is a sum of ladders
  double stiffness_ = 0.0;
};

DensityOperator correlated_generator(const DensityOperator& rho, const ChannelParams& p);
DensityOperator independent_generator(const DensityOperator& rho, const ChannelParams& p);

struct PointDiagnostics {
  double trace_drift = 0.0;         ///< max |Tr rho - 1| seen before renormalization
  double hermiticity_defect = 0.0;  ///< max |rho - rho^+| seen before symmetrization
  double min_eigenvalue = 0.0;      ///< NaN when positivity checks are disabled
};

struct Trajectory {
  std::vector<double> grid;
  std::vector<DensityOperator> states;
  std::vector<PointDiagnostics> diagnostics;
  double dt = 0.0;
  std::size_t steps = 0;
  /// max entry difference against a dt/2 rerun, when step halving was requested
  std::optional<double> convergence_estimate;
  std::vector<std::string> warnings;
};

/// Fixed-step RK4 on every grid interval (each interval is split into equal substeps no longer
/// than dt, so grid points are hit exactly). A grid not starting at 0 gets 0 prepended.
Trajectory evolve(const DensityOperator& rho0, GeneratorKind kind, const ChannelParams& p,
                  const SimConfig& config, std::span<const double> grid);

/// Evenly spaced grid of n points on [0, t_max]; n == 1 gives {0}.
std::vector<double> linear_grid(double t_max, int n);

}  // namespace corrchan
