#include "corrchan/channel.hpp"

#include <cmath>
#include <numbers>

#include "corrchan/errors.hpp"

namespace corrchan {

namespace {

void require_time(double t) {
  if (!(t >= 0.0)) throw DomainError("time must be >= 0");
}

}  // namespace

ChannelParams::ChannelParams(double decay_rate, double occupancy)
    : gamma(decay_rate), n0(occupancy) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be > 0");
  if (!(n0 >= 0.0) || !std::isfinite(n0)) throw DomainError("n0 must be >= 0");
}

ChannelParams ChannelParams::from_temperature_ratio(double decay_rate, double ratio) {
  return {decay_rate, planck_occupancy(ratio)};
}

ModeCutoff auto_cutoff(double max_abs_alpha, const ChannelParams& p) {
  const int d = default_cutoff(max_abs_alpha) + (p.n0 > 0.0 ? 4 : 0);
  return {d, d};
}

double planck_occupancy(double ratio) {
  if (!(ratio > 0.0)) throw DomainError("hbar omega / kT must be > 0");
  return 1.0 / std::expm1(ratio);
}

double n_of_t(const ChannelParams& p, double t) {
  require_time(t);
  return -p.n0 * std::expm1(-2.0 * p.gamma * t);
}

DyadExpansion zero_temp_map_factor(const DyadExpansion& input, double decay) {
  DyadExpansion out;
  out.terms.reserve(input.terms.size());
  for (const auto& d : input.terms) {
    const cplx ap = d.alpha1 + d.alpha2;
    const cplx am = d.alpha1 - d.alpha2;
    const cplx bp = d.beta1 + d.beta2;
    const cplx bm = d.beta1 - d.beta2;
    out.terms.push_back({d.weight, 0.5 * (ap * decay + am), 0.5 * (ap * decay - am),
                         0.5 * (bp * decay + bm), 0.5 * (bp * decay - bm)});
  }
  return out;
}

DyadExpansion zero_temp_map(const DyadExpansion& input, const ChannelParams& p, double t) {
  require_time(t);
  return zero_temp_map_factor(input, std::exp(-p.gamma * t));
}

cplx chi_analytic(const DyadExpansion& input, const PhasePoint& pt, const ChannelParams& p,
                  double t) {
  const double n = n_of_t(p, t);
  const double decay = std::exp(-p.gamma * t);
  const cplx lp = pt.lambda_plus();
  const cplx lm = pt.lambda_minus();
  const double gauss = -0.5 * n * std::norm(lp) - 0.25 * std::norm(lp) - 0.25 * std::norm(lm);
  cplx acc = 0.0;
  for (const auto& d : input.terms) {
    const cplx ap = d.alpha1 + d.alpha2;
    const cplx am = d.alpha1 - d.alpha2;
    const cplx bp = d.beta1 + d.beta2;
    const cplx bm = d.beta1 - d.beta2;
    const cplx e = gauss - 0.5 * decay * (ap * std::conj(lp) - std::conj(bp) * lp) -
                   0.5 * (am * std::conj(lm) - std::conj(bm) * lm);
    acc += d.weight * std::exp(e);
  }
  return acc;
}

cplx chi_initial(const DyadExpansion& input, const PhasePoint& pt) {
  const cplx l1 = pt.lambda1;
  const cplx l2 = pt.lambda2;
  cplx acc = 0.0;
  for (const auto& d : input.terms) {
    const cplx e = -0.5 * std::norm(l1) - std::conj(l1) * d.alpha1 + l1 * std::conj(d.beta1) -
                   0.5 * std::norm(l2) - std::conj(l2) * d.alpha2 + l2 * std::conj(d.beta2);
    acc += d.weight * std::exp(e);
  }
  return acc;
}

cplx q_analytic_complex(const DyadExpansion& input, const QPoint& q, const ChannelParams& p,
                        double t) {
  const double n = n_of_t(p, t);
  const double decay = std::exp(-p.gamma * t);
  const double inv = 1.0 / (1.0 + n);
  const cplx d1 = q.delta1;
  const cplx d2 = q.delta2;
  const cplx quad = -(2.0 + n) * inv * (std::norm(d1) + std::norm(d2)) +
                    n * inv * (d1 * std::conj(d2) + std::conj(d1) * d2);
  cplx acc = 0.0;
  for (const auto& d : input.terms) {
    const cplx ap = d.alpha1 + d.alpha2;
    const cplx am = d.alpha1 - d.alpha2;
    const cplx bpc = std::conj(d.beta1 + d.beta2);
    const cplx bmc = std::conj(d.beta1 - d.beta2);
    const cplx f = quad - inv * ap * bpc * decay * decay - am * bmc +
                   (ap * decay * inv + am) * std::conj(d1) + (bpc * decay * inv + bmc) * d1 +
                   (ap * decay * inv - am) * std::conj(d2) + (bpc * decay * inv - bmc) * d2;
    acc += d.weight * std::exp(0.5 * f);
  }
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return acc * inv / pi2;
}

double q_analytic(const DyadExpansion& input, const QPoint& q, const ChannelParams& p, double t) {
  return q_analytic_complex(input, q, p, t).real();
}

double purity_coherent_quadratic(const ChannelParams& p, double t) {
  const double n = n_of_t(p, t);
  return 2.0 * (1.0 + n) / (2.0 + 6.0 * n + 5.0 * n * n);
}

double purity_coherent_rotated(const ChannelParams& p, double t) {
  return 1.0 / (1.0 + 2.0 * n_of_t(p, t));
}

double fidelity_antisym(const ChannelParams& p, double t) { return 1.0 / (1.0 + n_of_t(p, t)); }

double fidelity_sym(cplx alpha, const ChannelParams& p, double t) {
  const double n = n_of_t(p, t);
  const double loss = -std::expm1(-p.gamma * t);
  return std::exp(-2.0 * loss * loss * std::norm(alpha) / (1.0 + n)) / (1.0 + n);
}

double chi_pde_residual(const DyadExpansion& input, const PhasePoint& pt, const ChannelParams& p,
                        double t, double h) {
  if (!(h >= kMinPdeStep)) throw StepSizeError("finite-difference step below cancellation limit");
  if (!(t > h)) throw DomainError("chi_pde_residual requires t > h");

  const cplx lp = pt.lambda_plus();
  const cplx lm = pt.lambda_minus();
  auto chi_at = [&](cplx plus, double time) {
    return chi_analytic(input, PhasePoint::from_plus_minus(plus, lm), p, time);
  };

  const cplx chi = chi_at(lp, t);
  const cplx dchi_dt = (chi_at(lp, t + h) - chi_at(lp, t - h)) / (2.0 * h);
  const cplx dchi_dx = (chi_at(lp + h, t) - chi_at(lp - h, t)) / (2.0 * h);
  const cplx dchi_dy =
      (chi_at(lp + cplx(0.0, h), t) - chi_at(lp - cplx(0.0, h), t)) / (2.0 * h);
  // Wirtinger derivatives: d/dl = (d/dx - i d/dy)/2, d/dconj(l) = (d/dx + i d/dy)/2.
  const cplx d_dl = 0.5 * (dchi_dx - cplx(0.0, 1.0) * dchi_dy);
  const cplx d_dlc = 0.5 * (dchi_dx + cplx(0.0, 1.0) * dchi_dy);

  const cplx residual = dchi_dt + p.gamma * (p.n0 + 0.5) * std::norm(lp) * chi +
                        p.gamma * (std::conj(lp) * d_dlc + lp * d_dl);
  return std::abs(residual);
}

}  // namespace corrchan
