#pragma once

#include <optional>
#include <span>
#include <vector>

#include "corrchan/channel.hpp"
#include "corrchan/fock.hpp"
#include "corrchan/lindblad.hpp"

namespace corrchan {

/// Tr rho^2 as the squared Frobenius norm.
double purity_numeric(const DensityOperator& rho);
/// Tr[rho0 rho_t], the overlap fidelity. Throws NumericalError if the imaginary part is
/// larger than 1e-10 (inputs not hermitian).
double overlap(const DensityOperator& rho0, const DensityOperator& rhot);
/// Tr[(D(l1) x D(l2)) rho]. Exact for the truncated rho at any lambda: the displacement
/// matrix elements come from the closed form, not from a truncated exponential.
cplx chi_numeric(const DensityOperator& rho, const PhasePoint& pt);
/// <d1,d2|rho|d1,d2> / pi^2. Values below -1e-12 raise NumericalError.
double q_numeric(const DensityOperator& rho, const QPoint& q);
/// (1/2) sum |eig(rho - sigma)|
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

inline constexpr double kDfsTolerance = 1e-6;

struct DfsReport {
  std::vector<double> times;
  std::vector<double> trace_distance_to_input;
  double max_deviation = 0.0;
  bool decoherence_free = false;
  double tolerance = kDfsTolerance;
};

/// Evolve `input` under the correlated generator and measure how far it drifts from itself.
/// Without an explicit cutoff the automatic truncation policy (auto_cutoff) is used.
DfsReport dfs_deviation(const CoherentSuperposition& input, const ChannelParams& p,
                        std::span<const double> grid, const SimConfig& config,
                        std::optional<ModeCutoff> cutoff = std::nullopt);

}  // namespace corrchan
