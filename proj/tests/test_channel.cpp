#include <doctest.h>

#include <cmath>
#include <numbers>

#include "corrchan/channel.hpp"
#include "corrchan/errors.hpp"
#include "corrchan/fock.hpp"

using namespace corrchan;
using namespace std::complex_literals;

namespace {

const std::vector<PhasePoint> kPoints = {
    {0.0, 0.0}, {{0.3, -0.2}, {0.1, 0.4}}, {{-0.7, 0.5}, {0.2, -0.9}}, {{1.2, 0.0}, {0.0, -1.1}}};

}  // namespace

TEST_CASE("channel parameters") {
  CHECK_THROWS_AS(ChannelParams(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(ChannelParams(1.0, -0.1), DomainError);
  CHECK_THROWS_AS(ChannelParams(1.0, std::nan("")), DomainError);
  const auto p = ChannelParams::from_temperature_ratio(2.0, std::log(2.0));
  CHECK(p.gamma == 2.0);
  CHECK(p.n0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("planck occupancy") {
  CHECK(planck_occupancy(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(planck_occupancy(800.0) < 1e-300);
  const double x = 1e-3;
  CHECK(std::abs(planck_occupancy(x) - (1.0 / x - 0.5)) / (1.0 / x - 0.5) < 1e-3);
  double prev = planck_occupancy(0.01);
  for (double xi = 0.02; xi < 10.0; xi += 0.37) {
    const double n = planck_occupancy(xi);
    CHECK(n > 0.0);
    CHECK(n < prev);
    prev = n;
  }
  CHECK_THROWS_AS(planck_occupancy(0.0), DomainError);
  CHECK_THROWS_AS(planck_occupancy(-1.0), DomainError);
}

TEST_CASE("reservoir occupancy in time") {
  CHECK(n_of_t({1.0, 0.7}, 0.0) == 0.0);
  CHECK(n_of_t({1.0, 1.0}, std::log(2.0) / 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (double t : {0.0, 0.5, 3.0, 100.0}) CHECK(n_of_t({1.0, 0.0}, t) == 0.0);
  CHECK(n_of_t({1.0, 0.8}, 1e3) == doctest::Approx(0.8));
  CHECK_THROWS_AS(n_of_t({1.0, 0.5}, -0.1), DomainError);
}

TEST_CASE("zero-temperature map") {
  const ChannelParams p(1.0, 0.0);
  const auto ecs = dyad_expansion_of(entangled_coherent(0.6, 0.4, 1));

  const auto same = zero_temp_map(ecs, p, 0.0);
  for (std::size_t k = 0; k < ecs.terms.size(); ++k) {
    CHECK(same.terms[k].alpha1 == ecs.terms[k].alpha1);
    CHECK(same.terms[k].beta2 == ecs.terms[k].beta2);
    CHECK(same.terms[k].weight == ecs.terms[k].weight);
  }

  // |alpha,-alpha> dyads and the entangled coherent state do not move at all.
  const auto anti = dyad_expansion_of(coherent_state(0.9 - 0.2i, -0.9 + 0.2i));
  for (double t : {0.3, 2.0, 10.0}) {
    const auto m = zero_temp_map(anti, p, t);
    CHECK(std::abs(m.terms[0].alpha1 - anti.terms[0].alpha1) < 1e-15);
    CHECK(std::abs(m.terms[0].alpha2 - anti.terms[0].alpha2) < 1e-15);
    const auto e = zero_temp_map(ecs, p, t);
    for (std::size_t k = 0; k < ecs.terms.size(); ++k) {
      CHECK(std::abs(e.terms[k].alpha1 - ecs.terms[k].alpha1) < 1e-15);
      CHECK(std::abs(e.terms[k].beta2 - ecs.terms[k].beta2) < 1e-15);
    }
  }

  const auto m = zero_temp_map(dyad_expansion_of(coherent_state(1.0, 1.0)), p, std::log(2.0));
  CHECK(std::abs(m.terms[0].alpha1 - 0.5) < 1e-15);
  CHECK(std::abs(m.terms[0].alpha2 - 0.5) < 1e-15);
  CHECK(std::abs(m.total_weight() - 1.0) < 1e-10);

  CHECK_THROWS_AS(zero_temp_map(ecs, p, -1.0), DomainError);
}

TEST_CASE("zero-temperature map is a semigroup") {
  const ChannelParams p(0.7, 0.0);
  const auto in = dyad_expansion_of(entangled_coherent(0.9 + 0.3i, 0.5, -1));
  const auto a = zero_temp_map(zero_temp_map(in, p, 0.4), p, 1.1);
  const auto b = zero_temp_map(in, p, 1.5);
  REQUIRE(a.terms.size() == b.terms.size());
  for (std::size_t k = 0; k < a.terms.size(); ++k) {
    CHECK(std::abs(a.terms[k].weight - b.terms[k].weight) < 1e-12);
    CHECK(std::abs(a.terms[k].alpha1 - b.terms[k].alpha1) < 1e-12);
    CHECK(std::abs(a.terms[k].alpha2 - b.terms[k].alpha2) < 1e-12);
    CHECK(std::abs(a.terms[k].beta1 - b.terms[k].beta1) < 1e-12);
    CHECK(std::abs(a.terms[k].beta2 - b.terms[k].beta2) < 1e-12);
  }
}

TEST_CASE("characteristic function closed form") {
  const DyadExpansion vac = dyad_expansion_of(coherent_state(0.0, 0.0));
  for (double t : {0.0, 0.4, 2.0}) {
    for (const auto& pt : kPoints) {
      const double expect = std::exp(-(std::norm(pt.lambda1) + std::norm(pt.lambda2)) / 2.0);
      CHECK(std::abs(chi_analytic(vac, pt, {1.0, 0.0}, t) - expect) < 1e-15);
    }
  }

  const ChannelParams p(1.3, 0.6);
  for (const auto& psi : {coherent_state(0.4 + 0.1i, -0.3), entangled_coherent(0.7, 0.9, 1),
                          entangled_coherent(0.5i, 0.0, -1)}) {
    const auto dy = dyad_expansion_of(psi);
    for (const auto& pt : kPoints) {
      CHECK(std::abs(chi_analytic(dy, pt, p, 0.0) - chi_initial(dy, pt)) < 1e-12);
      for (double t : {0.0, 0.3, 1.7}) {
        const PhasePoint neg{-pt.lambda1, -pt.lambda2};
        CHECK(std::abs(chi_analytic(dy, pt, p, t) - std::conj(chi_analytic(dy, neg, p, t))) < 1e-12);
      }
    }
    for (double t : {0.0, 0.3, 1.7}) CHECK(std::abs(chi_analytic(dy, {0.0, 0.0}, p, t) - 1.0) < 1e-12);
  }
}

TEST_CASE("characteristic function satisfies its equation of motion") {
  const auto coh = dyad_expansion_of(coherent_state(0.7, 0.2));
  const ChannelParams p(1.0, 0.4);
  const PhasePoint pt{{0.4, 0.3}, {-0.2, 0.5}};
  const double r1 = chi_pde_residual(coh, pt, p, 0.5, 1e-3);
  const double r2 = chi_pde_residual(coh, pt, p, 0.5, 5e-4);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.125));

  const auto vac = dyad_expansion_of(coherent_state(0.0, 0.0));
  CHECK(chi_pde_residual(vac, PhasePoint::from_plus_minus(0.0, 0.6 - 0.3i), p, 0.5, 1e-3) < 1e-12);

  const auto ecs = dyad_expansion_of(entangled_coherent(0.5, 0.0, 1));
  CHECK(chi_pde_residual(ecs, pt, p, 0.5, 1e-4) < 1e-6);

  CHECK_THROWS_AS(chi_pde_residual(coh, pt, p, 0.5, 1e-8), StepSizeError);
  CHECK_THROWS_AS(chi_pde_residual(coh, pt, p, 1e-4, 1e-3), DomainError);
}

TEST_CASE("Q-function closed form") {
  const auto vac = dyad_expansion_of(coherent_state(0.0, 0.0));
  const QPoint q{0.3 - 0.4i, 0.5};
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(q_analytic(vac, q, {1.0, 0.0}, 0.0) -
                 std::exp(-std::norm(q.delta1) - std::norm(q.delta2)) / pi2) < 1e-15);

  const ChannelParams cold(1.0, 0.0);
  const auto coh = dyad_expansion_of(coherent_state(0.8, 0.3i));
  const auto moved = zero_temp_map(coh, cold, 0.6);
  const QPoint peak{moved.terms[0].alpha1, moved.terms[0].alpha2};
  CHECK(q_analytic(coh, peak, cold, 0.6) == doctest::Approx(1.0 / pi2).epsilon(1e-13));

  const auto ecs = dyad_expansion_of(entangled_coherent(0.6, 0.3, 1));
  const ChannelParams warm(1.0, 0.7);
  for (double x : {-1.5, -0.5, 0.0, 0.7, 2.0}) {
    const QPoint qq{{x, 0.3 * x}, {-0.2, x}};
    CHECK(q_analytic(ecs, qq, warm, 0.8) >= -1e-10);
    CHECK(std::abs(q_analytic_complex(ecs, qq, warm, 0.8).imag()) < 1e-10);
  }
}

TEST_CASE("Q-function integrates to one") {
  const ChannelParams p(1.0, 1.0);
  const auto in = dyad_expansion_of(entangled_coherent(0.7, 0.5, -1));
  constexpr double h = 0.25;
  double sum = 0.0;
  for (int a = 0; a < 40; ++a)
    for (int b = 0; b < 40; ++b)
      for (int c = 0; c < 40; ++c)
        for (int d = 0; d < 40; ++d) {
          auto mid = [](int k) { return -5.0 + h * (k + 0.5); };
          sum += q_analytic(in, {{mid(a), mid(b)}, {mid(c), mid(d)}}, p, 0.9);
        }
  CHECK(std::abs(sum * h * h * h * h - 1.0) < 1e-3);
}

TEST_CASE("purity formulas") {
  CHECK(purity_coherent_quadratic({1.0, 0.0}, 3.0) == 1.0);
  CHECK(purity_coherent_rotated({1.0, 0.0}, 3.0) == 1.0);
  // N(t) = 1 at N0 = 2 when e^{-2 Gamma t} = 1/2.
  const ChannelParams p(1.0, 2.0);
  const double t1 = std::log(2.0) / 2.0;
  CHECK(n_of_t(p, t1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(purity_coherent_quadratic(p, t1) == doctest::Approx(4.0 / 13.0).epsilon(1e-14));
  CHECK(purity_coherent_rotated(p, t1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // Direct Fock sum for a thermal state of occupancy 1: sum (1/2)^{2(n+1)} = 1/3.
  double s = 0.0;
  for (int n = 0; n < 200; ++n) s += std::pow(0.5, 2 * (n + 1));
  CHECK(purity_coherent_rotated(p, t1) == doctest::Approx(s).epsilon(1e-14));

  double prev = 1.0;
  for (double t = 0.05; t < 3.0; t += 0.05) {
    const double v = purity_coherent_quadratic(p, t);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("fidelity formulas") {
  const ChannelParams p(1.0, 0.5);
  CHECK(fidelity_antisym(p, 0.0) == 1.0);
  const ChannelParams p2(1.0, 2.0);
  CHECK(fidelity_antisym(p2, std::log(2.0) / 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (double t : {0.1, 1.0, 10.0}) CHECK(fidelity_antisym({1.0, 0.0}, t) == 1.0);

  for (double t : {0.0, 0.4, 2.0}) CHECK(fidelity_sym(0.0, p, t) == doctest::Approx(fidelity_antisym(p, t)));
  CHECK(fidelity_sym(0.8, {1.0, 0.0}, 60.0) == doctest::Approx(std::exp(-2.0 * 0.64)).epsilon(1e-14));

  const double n = n_of_t(p, 1.0);
  const double direct = std::exp(-2.0 * std::pow(1.0 - std::exp(-1.0), 2) / (1.0 + n)) / (1.0 + n);
  CHECK(fidelity_sym(1.0, p, 1.0) == doctest::Approx(direct).epsilon(1e-14));

  for (double a : {0.3, 1.0, 2.0}) {
    CHECK(fidelity_sym(a, p, 0.0) == fidelity_antisym(p, 0.0));
    for (double t : {0.05, 0.5, 3.0}) CHECK(fidelity_sym(a, p, t) < fidelity_antisym(p, t));
  }
}

TEST_CASE("automatic cutoff") {
  const ModeCutoff cold = auto_cutoff(1.0, {1.0, 0.0});
  CHECK(cold == ModeCutoff(19, 19));
  CHECK(auto_cutoff(1.0, {1.0, 0.2}) == ModeCutoff(23, 23));
}
