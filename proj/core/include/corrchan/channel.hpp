#pragma once

// Closed-form results for two modes damped by one common thermal reservoir.
//
// With lambda_pm = lambda1 +- lambda2 and alpha_pm = alpha1 +- alpha2, the symmetric
// combination decays at rate Gamma and picks up thermal noise N(t) = N0 (1 - e^{-2 Gamma t}),
// while the antisymmetric combination is untouched.

#include "corrchan/fock.hpp"

namespace corrchan {

struct ChannelParams {
  double gamma = 1.0;  ///< decay rate, inverse time units
  double n0 = 0.0;     ///< mean reservoir occupancy

  ChannelParams() = default;
  ChannelParams(double decay_rate, double occupancy);

  /// Occupancy from the dimensionless ratio hbar omega0 / kT.
  static ChannelParams from_temperature_ratio(double decay_rate, double ratio);
};

struct PhasePoint {
  cplx lambda1;
  cplx lambda2;

  cplx lambda_plus() const { return lambda1 + lambda2; }
  cplx lambda_minus() const { return lambda1 - lambda2; }

  static PhasePoint from_plus_minus(cplx plus, cplx minus) {
    return {0.5 * (plus + minus), 0.5 * (plus - minus)};
  }
};

struct QPoint {
  cplx delta1;
  cplx delta2;
};

/// default_cutoff() on both modes for the largest amplitude present at t = 0, plus four
/// levels when the reservoir is warm. Amplitudes never grow under the zero-temperature map.
ModeCutoff auto_cutoff(double max_abs_alpha, const ChannelParams& p);

/// 1 / (e^x - 1); x must be > 0.
double planck_occupancy(double ratio);
/// N0 (1 - e^{-2 Gamma t})
double n_of_t(const ChannelParams& p, double t);

/// Zero-temperature evolution of a dyad expansion. Only `p.gamma` enters: the map is exact
/// for N0 = 0. Normalized dyads map onto normalized dyads, so weights are carried unchanged.
DyadExpansion zero_temp_map(const DyadExpansion& input, const ChannelParams& p, double t);
/// Same map parameterized by the decay factor e^{-Gamma t} of the symmetric amplitude.
DyadExpansion zero_temp_map_factor(const DyadExpansion& input, double decay);

/// Symmetric-order characteristic function of the evolved state.
cplx chi_analytic(const DyadExpansion& input, const PhasePoint& pt, const ChannelParams& p,
                  double t);
/// The t = 0 kernel sum_k w_k prod_i exp(-|l_i|^2/2 - conj(l_i) alpha_i + l_i conj(beta_i)).
cplx chi_initial(const DyadExpansion& input, const PhasePoint& pt);

/// Husimi Q-function <delta|rho(t)|delta> / pi^2 of the evolved state (real part).
double q_analytic(const DyadExpansion& input, const QPoint& q, const ChannelParams& p, double t);
/// Same value with the (rounding-level) imaginary residue kept.
cplx q_analytic_complex(const DyadExpansion& input, const QPoint& q, const ChannelParams& p,
                        double t);

/// 2(1+N) / (2 + 6N + 5N^2), the competing purity candidate for coherent inputs.
double purity_coherent_quadratic(const ChannelParams& p, double t);
/// 1 / (1 + 2N), purity of a displaced thermal state in the symmetric mode.
double purity_coherent_rotated(const ChannelParams& p, double t);
/// Overlap fidelity Tr[rho(0) rho(t)] for |alpha,-alpha>: 1 / (1 + N).
double fidelity_antisym(const ChannelParams& p, double t);
/// Overlap fidelity for |alpha,alpha>.
double fidelity_sym(cplx alpha, const ChannelParams& p, double t);

/// |d chi/dt + Gamma (N0 + 1/2)|l+|^2 chi + Gamma (conj(l+) d chi/d conj(l+) + l+ d chi/d l+)|
/// evaluated on chi_analytic with central differences of step h in t and in Re/Im lambda_plus
/// (lambda_minus held fixed). Requires t > h >= kMinPdeStep.
double chi_pde_residual(const DyadExpansion& input, const PhasePoint& pt, const ChannelParams& p,
                        double t, double h);

inline constexpr double kMinPdeStep = 1e-6;

}  // namespace corrchan
