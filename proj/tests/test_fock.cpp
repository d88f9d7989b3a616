#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "corrchan/errors.hpp"
#include "corrchan/fock.hpp"

using namespace corrchan;
using namespace std::complex_literals;

namespace {

Matrix random_matrix(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("annihilation operator") {
  const Matrix a2 = annihilation(2);
  CHECK(a2(0, 1) == cplx(1.0));
  CHECK(a2(0, 0) == cplx(0.0));
  CHECK(a2(1, 0) == cplx(0.0));
  CHECK(a2(1, 1) == cplx(0.0));

  CHECK(annihilation(3)(1, 2).real() == doctest::Approx(1.41421356).epsilon(1e-9));
  CHECK_THROWS_AS(annihilation(0), InvalidDimension);

  const Matrix a = annihilation(16);
  const Matrix comm = a * a.adjoint() - a.adjoint() * a;
  for (int n = 0; n < 15; ++n) CHECK(comm(n, n).real() == doctest::Approx(1.0));
  CHECK(comm(15, 15).real() == doctest::Approx(-15.0));
  CHECK((comm - Matrix(comm.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("coherent kets") {
  const Vector vac = coherent_ket(0.0, 5);
  CHECK(vac(0) == cplx(1.0));
  CHECK(vac.tail(4).norm() == 0.0);

  // The tail of |alpha| = 1 at d = 2 is far above tolerance, so loosen it.
  const Vector k = coherent_ket(1.0, 2, 1.0);
  CHECK(std::abs(k(0) - std::exp(-0.5)) < 1e-15);
  CHECK(std::abs(k(1) - std::exp(-0.5)) < 1e-15);

  const cplx ov = coherent_ket(-0.8, 40).dot(coherent_ket(0.8, 40));
  CHECK(std::abs(ov - std::exp(-1.28)) < 1e-12);
  CHECK(std::abs(coherent_overlap(-0.8, 0.8) - std::exp(-1.28)) < 1e-15);

  try {
    coherent_ket(3.0, 10);
    FAIL("expected CutoffTooSmall");
  } catch (const CutoffTooSmall& e) {
    CHECK(e.amplitude() == doctest::Approx(3.0));
    CHECK(e.cutoff() == 10);
    CHECK(e.tail() > kTruncationTolerance);
  }
}

TEST_CASE("coherent ket norm deficit equals the Poisson tail") {
  for (double r : {0.1, 0.5, 1.0, 1.5, 2.0}) {
    for (int d : {8, 12, 20, 40, 60}) {
      const Vector k = coherent_ket(std::polar(r, 0.7), d, 1.0);
      CHECK(std::abs((1.0 - k.squaredNorm()) - poisson_tail(r, d)) < 1e-12);
    }
  }
  CHECK(poisson_tail(0.0, 1) == 0.0);
  CHECK(poisson_tail(1.0, 0) == doctest::Approx(1.0));
}

TEST_CASE("default cutoff policy") {
  CHECK(default_cutoff(0.0) == 16);
  CHECK(default_cutoff(1.0) == 19);
  CHECK(default_cutoff(2.0) == 28);
  for (double r : {0.0, 0.5, 1.0, 2.0, 3.0}) CHECK(poisson_tail(r, default_cutoff(r)) < 1e-12);
}

TEST_CASE("displacement matrix elements") {
  CHECK((displacement(0.0, 7) - identity(7)).cwiseAbs().maxCoeff() < 1e-15);

  for (cplx lam : {cplx(0.3, 0.0), cplx(-0.5, 0.8), cplx(0.0, -1.0), cplx(0.6, 0.6)}) {
    const Matrix D = displacement(lam, 30);
    CHECK((D.col(0) - coherent_ket(lam, 30)).cwiseAbs().maxCoeff() < 1e-10);
  }

  const cplx lam(0.5, 0.3);
  const Matrix prod = displacement(lam, 30) * displacement(-lam, 30);
  CHECK((prod.topLeftCorner(15, 15) - identity(15)).cwiseAbs().maxCoeff() < 1e-8);

  // Exponentiate the generator in a much larger space and compare the low block.
  const int big = 80;
  const Matrix a = annihilation(big);
  const Matrix gen = lam * a.adjoint() - std::conj(lam) * a;
  const Matrix expm = gen.exp();
  CHECK((expm.topLeftCorner(20, 20) - displacement(lam, 20)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tensor products and the index convention") {
  const ModeCutoff c(3, 4);
  CHECK(c.index(1, 2) == 6);
  CHECK(c.dim() == 12);
  CHECK_THROWS_AS(ModeCutoff(0, 3), InvalidDimension);

  CHECK((tensor(identity(3), identity(4)) - identity(12)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix a3 = annihilation(3), a4 = annihilation(4);
  const Matrix lhs = tensor(a3, identity(4)) * tensor(identity(3), a4);
  CHECK((lhs - tensor(a3, a4)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((embed_mode1(a3, c) - tensor(a3, identity(4))).cwiseAbs().maxCoeff() == 0.0);
  CHECK((embed_mode2(a4, c) - tensor(identity(3), a4)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix A = random_matrix(3, 1), B = random_matrix(3, 2);
  CHECK(std::abs(tensor(A, B).trace() - A.trace() * B.trace()) < 1e-12);

  // |n1, n2> = e_{n1} x e_{n2} sits at n1 * d2 + n2.
  Vector e1 = Vector::Zero(3), e2 = Vector::Zero(4);
  e1(2) = 1.0;
  e2(1) = 1.0;
  const Vector v = tensor(e1, e2);
  CHECK(v(c.index(2, 1)) == cplx(1.0));
  CHECK(v.norm() == doctest::Approx(1.0));
}

TEST_CASE("partial traces and embedding commute") {
  const ModeCutoff c(3, 5);
  const Matrix A = random_matrix(3, 3), B = random_matrix(5, 4);
  const Matrix ab = embed_mode1(A, c) * embed_mode2(B, c);
  CHECK((ab - embed_mode2(B, c) * embed_mode1(A, c)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace(ab, c, 1) - B.trace() * A).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace(ab, c, 2) - A.trace() * B).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(partial_trace(ab, c, 3), InvalidDimension);
  CHECK_THROWS_AS(partial_trace(Matrix::Zero(4, 4), c, 1), DimensionMismatch);
}

TEST_CASE("entangled coherent states") {
  const auto vac = entangled_coherent(0.0, 0.0, 1);
  const ModeCutoff c(16, 16);
  const DensityOperator rho = superposition_to_density(vac, c);
  CHECK(std::abs(rho.matrix(0, 0) - 1.0) < 1e-14);

  // Norm before scaling: 2 + sign 2 cos(phi) e^{-4|alpha|^2}, against a Fock-space inner product.
  const auto norm_unscaled = [](cplx alpha, double phi, int sign) {
    CoherentSuperposition raw;
    raw.terms = {{1.0, alpha, -alpha}, {double(sign) * std::polar(1.0, phi), -alpha, alpha}};
    return raw;
  };
  const ModeCutoff big(40, 40);
  const auto s1 = norm_unscaled(0.5, 0.0, 1);
  CHECK(s1.norm_squared() == doctest::Approx(2.0 + 2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(superposition_ket(s1, big).norm_squared() == doctest::Approx(2.0 + 2.0 * std::exp(-1.0)).epsilon(1e-12));

  const auto s2 = norm_unscaled(2.0, std::numbers::pi / 3.0, -1);
  const double expect = 2.0 - 2.0 * 0.5 * std::exp(-16.0);
  CHECK(s2.norm_squared() == doctest::Approx(expect).epsilon(1e-14));
  CHECK(superposition_ket(s2, big).norm_squared() == doctest::Approx(expect).epsilon(1e-11));

  const auto ecs = entangled_coherent(0.5, 0.0, 1);
  CHECK(ecs.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(entangled_coherent(0.0, 0.0, -1), DegenerateState);
  CHECK_THROWS_AS(entangled_coherent(0.5, 0.0, 2), DomainError);
}

TEST_CASE("superposition to density") {
  const ModeCutoff c(30, 30);
  const auto ecs = entangled_coherent(0.8, 0.0, 1);
  const DensityOperator rho = superposition_to_density(ecs, c);
  CHECK(std::abs((rho.matrix * rho.matrix).trace() - 1.0) < 1e-10);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  CoherentSuperposition psi;
  for (int k = 0; k < 3; ++k) psi.terms.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
  const DensityOperator r = superposition_to_density(psi, c);
  CHECK(std::abs(r.trace() - 1.0) < 1e-10);
  CHECK(r.hermiticity_defect() < 1e-15);
  CHECK(r.min_eigenvalue() > -1e-12);

  CHECK_THROWS_AS(superposition_to_density(coherent_state(4.0, 0.0), ModeCutoff(10, 10)), CutoffTooSmall);
}

TEST_CASE("dyad expansion") {
  const auto single = dyad_expansion_of(coherent_state(0.3, -0.2i));
  REQUIRE(single.terms.size() == 1);
  CHECK(std::abs(single.terms[0].weight - 1.0) < 1e-15);

  const auto ecs = entangled_coherent(0.5, 0.0, 1);
  const auto dy = dyad_expansion_of(ecs);
  REQUIRE(dy.terms.size() == 4);
  CHECK(std::abs(dy.total_weight() - 1.0) < 1e-10);
  CHECK(dy.is_hermitian_paired());
  const double c2 = 1.0 / (2.0 + 2.0 * std::exp(-1.0));
  int cross = 0;
  for (const auto& t : dy.terms) {
    if (std::abs(t.alpha1 - t.beta1) > 0.0) {
      ++cross;
      CHECK(std::abs(t.weight - c2 * std::exp(-1.0)) < 1e-14);
    }
  }
  CHECK(cross == 2);

  const ModeCutoff c(30, 30);
  for (const auto& psi : {ecs, entangled_coherent(0.8, 1.1, -1), coherent_state(0.7, 0.2i)}) {
    const auto a = dyads_to_density(dyad_expansion_of(psi), c);
    const auto b = superposition_to_density(psi, c);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 1e-9);
  }
}
