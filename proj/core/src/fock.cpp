#include "corrchan/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "corrchan/errors.hpp"

namespace corrchan {

CutoffTooSmall::CutoffTooSmall(double amplitude, int cutoff, double tail, double tolerance)
    : Error([&] {
        std::ostringstream os;
        os << "cutoff " << cutoff << " too small for coherent amplitude |alpha|=" << amplitude
           << ": Poisson tail " << tail << " exceeds tolerance " << tolerance;
        return os.str();
      }()),
      amplitude_(amplitude),
      cutoff_(cutoff),
      tail_(tail) {}

IntegrationFailure::IntegrationFailure(const std::string& what, double time, double trace_drift,
                                       double min_eigenvalue)
    : Error(what), time_(time), trace_drift_(trace_drift), min_eigenvalue_(min_eigenvalue) {}

ConfigError::ConfigError(const std::string& field, const std::string& message, int line)
    : Error([&] {
        std::ostringstream os;
        if (line > 0) os << "line " << line << ": ";
        if (!field.empty()) os << field << ": ";
        os << message;
        return os.str();
      }()),
      field_(field),
      line_(line) {}

ModeCutoff::ModeCutoff(int levels1, int levels2) : d1(levels1), d2(levels2) {
  if (d1 < 1 || d2 < 1) {
    throw InvalidDimension("mode cutoff must be >= 1 on both modes");
  }
}

DensityOperator::DensityOperator(Matrix m, ModeCutoff c) : matrix(std::move(m)), cutoff(c) {
  if (matrix.rows() != cutoff.dim() || matrix.cols() != cutoff.dim()) {
    throw DimensionMismatch("density matrix shape does not match cutoff");
  }
}

double DensityOperator::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
  const Matrix herm = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double CoherentSuperposition::norm_squared() const {
  cplx acc = 0.0;
  for (const auto& ti : terms) {
    for (const auto& tj : terms) {
      acc += std::conj(tj.c) * ti.c * coherent_overlap(tj.alpha1, tj.alpha2, ti.alpha1, ti.alpha2);
    }
  }
  return acc.real();
}

CoherentSuperposition CoherentSuperposition::normalized() const {
  if (terms.empty()) throw DegenerateState("coherent superposition has no terms");
  const double n2 = norm_squared();
  if (!(n2 > 1e-12)) throw DegenerateState("coherent superposition has vanishing norm");
  CoherentSuperposition out = *this;
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& t : out.terms) t.c *= scale;
  return out;
}

double CoherentSuperposition::max_amplitude() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max({m, std::abs(t.alpha1), std::abs(t.alpha2)});
  return m;
}

cplx DyadExpansion::total_weight() const {
  cplx acc = 0.0;
  for (const auto& t : terms) acc += t.weight;
  return acc;
}

bool DyadExpansion::is_hermitian_paired(double tol) const {
  auto close = [tol](cplx a, cplx b) { return std::abs(a - b) <= tol; };
  return std::all_of(terms.begin(), terms.end(), [&](const Dyad& t) {
    return std::any_of(terms.begin(), terms.end(), [&](const Dyad& u) {
      return close(u.weight, std::conj(t.weight)) && close(u.alpha1, t.beta1) &&
             close(u.alpha2, t.beta2) && close(u.beta1, t.alpha1) && close(u.beta2, t.alpha2);
    });
  });
}

double DyadExpansion::max_amplitude() const {
  double m = 0.0;
  for (const auto& t : terms) {
    m = std::max({m, std::abs(t.alpha1), std::abs(t.alpha2), std::abs(t.beta1),
                  std::abs(t.beta2)});
  }
  return m;
}

Matrix annihilation(int d) {
  if (d < 1) throw InvalidDimension("annihilation operator needs d >= 1");
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix identity(int d) {
  if (d < 1) throw InvalidDimension("identity needs d >= 1");
  return Matrix::Identity(d, d);
}

double poisson_tail(double abs_alpha, int d) {
  if (d < 0) throw InvalidDimension("negative cutoff");
  const double mean = abs_alpha * abs_alpha;
  if (mean == 0.0) return d == 0 ? 1.0 : 0.0;
  // log p_n = -mean + n log(mean) - lgamma(n+1); sum until terms are past the mode and tiny.
  double tail = 0.0;
  for (int n = d;; ++n) {
    const double logp = -mean + n * std::log(mean) - std::lgamma(n + 1.0);
    const double p = std::exp(logp);
    tail += p;
    if (n > mean && p < 1e-300 + tail * 1e-17) break;
    if (n > d + 100000) break;
  }
  return tail;
}

Vector coherent_ket(cplx alpha, int d, double tol) {
  if (d < 1) throw InvalidDimension("coherent ket needs d >= 1");
  const double tail = poisson_tail(std::abs(alpha), d);
  if (tail > tol) throw CutoffTooSmall(std::abs(alpha), d, tail, tol);
  Vector v(d);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < d; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

Matrix displacement(cplx lambda, int d) {
  if (d < 1) throw InvalidDimension("displacement operator needs d >= 1");
  const double x = std::norm(lambda);
  const double gauss = std::exp(-0.5 * x);
  Matrix out(d, d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      // <m|D|n> = sqrt(n!/m!) lambda^{m-n} e^{-x/2} L_n^{(m-n)}(x) for m >= n;
      // the m < n entries follow from <m|D(lambda)|n> = conj(<n|D(-lambda)|m>).
      const int lo = std::min(m, n);
      const int k = std::abs(m - n);
      const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)));
      const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(k), x);
      const cplx base = m >= n ? lambda : -std::conj(lambda);
      cplx power = 1.0;
      for (int i = 0; i < k; ++i) power *= base;
      out(m, n) = ratio * power * gauss * lag;
    }
  }
  return out;
}

int default_cutoff(double max_abs_alpha) {
  const double a = std::abs(max_abs_alpha);
  return std::max(16, static_cast<int>(std::ceil(a * a + 6.0 * a + 12.0)));
}

cplx coherent_overlap(cplx beta, cplx alpha) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(beta) * alpha);
}

cplx coherent_overlap(cplx beta1, cplx beta2, cplx alpha1, cplx alpha2) {
  return coherent_overlap(beta1, alpha1) * coherent_overlap(beta2, alpha2);
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  const auto d1 = a.rows();
  const auto d2 = b.rows();
  if (a.cols() != d1 || b.cols() != d2) throw DimensionMismatch("tensor expects square factors");
  Matrix out(d1 * d2, d1 * d2);
  for (Eigen::Index i = 0; i < d1; ++i) {
    for (Eigen::Index j = 0; j < d1; ++j) {
      out.block(i * d2, j * d2, d2, d2) = a(i, j) * b;
    }
  }
  return out;
}

Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix embed_mode1(const Matrix& a, const ModeCutoff& cutoff) {
  if (a.rows() != cutoff.d1) throw DimensionMismatch("mode-1 operator has wrong size");
  return tensor(a, identity(cutoff.d2));
}

Matrix embed_mode2(const Matrix& b, const ModeCutoff& cutoff) {
  if (b.rows() != cutoff.d2) throw DimensionMismatch("mode-2 operator has wrong size");
  return tensor(identity(cutoff.d1), b);
}

Matrix partial_trace(const Matrix& m, const ModeCutoff& cutoff, int keep) {
  if (m.rows() != cutoff.dim() || m.cols() != cutoff.dim()) {
    throw DimensionMismatch("partial trace: matrix does not match cutoff");
  }
  if (keep == 1) {
    Matrix out = Matrix::Zero(cutoff.d1, cutoff.d1);
    for (int i = 0; i < cutoff.d1; ++i)
      for (int j = 0; j < cutoff.d1; ++j)
        for (int k = 0; k < cutoff.d2; ++k) out(i, j) += m(cutoff.index(i, k), cutoff.index(j, k));
    return out;
  }
  if (keep == 2) {
    Matrix out = Matrix::Zero(cutoff.d2, cutoff.d2);
    for (int i = 0; i < cutoff.d2; ++i)
      for (int j = 0; j < cutoff.d2; ++j)
        for (int k = 0; k < cutoff.d1; ++k) out(i, j) += m(cutoff.index(k, i), cutoff.index(k, j));
    return out;
  }
  throw InvalidDimension("partial trace: keep must be 1 or 2");
}

StateVector coherent_ket2(cplx alpha1, cplx alpha2, const ModeCutoff& cutoff, double tol) {
  return {tensor(coherent_ket(alpha1, cutoff.d1, tol), coherent_ket(alpha2, cutoff.d2, tol)),
          cutoff};
}

CoherentSuperposition entangled_coherent(cplx alpha, double phi, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("entangled coherent sign must be +1 or -1");
  const double norm2 =
      2.0 + sign * 2.0 * std::cos(phi) * std::exp(-4.0 * std::norm(alpha));
  if (!(norm2 > 1e-12)) {
    throw DegenerateState("entangled coherent state has vanishing norm");
  }
  const double c = 1.0 / std::sqrt(norm2);
  const cplx second = static_cast<double>(sign) * std::polar(1.0, phi) * c;
  return {{{c, alpha, -alpha}, {second, -alpha, alpha}}};
}

CoherentSuperposition coherent_state(cplx alpha1, cplx alpha2) {
  return {{{1.0, alpha1, alpha2}}};
}

StateVector superposition_ket(const CoherentSuperposition& psi, const ModeCutoff& cutoff,
                              double tol) {
  if (psi.terms.empty()) throw DegenerateState("coherent superposition has no terms");
  Vector v = Vector::Zero(cutoff.dim());
  for (const auto& t : psi.terms) v += t.c * coherent_ket2(t.alpha1, t.alpha2, cutoff, tol).amplitudes;
  return {std::move(v), cutoff};
}

DensityOperator superposition_to_density(const CoherentSuperposition& psi,
                                         const ModeCutoff& cutoff, double tol) {
  const StateVector ket = superposition_ket(psi, cutoff, tol);
  const double n2 = ket.norm_squared();
  if (!(n2 > 0.0)) throw DegenerateState("superposition vanishes at this cutoff");
  Matrix rho = ket.amplitudes * ket.amplitudes.adjoint() / n2;
  return {std::move(rho), cutoff};
}

DyadExpansion dyad_expansion_of(const CoherentSuperposition& psi) {
  const double n2 = psi.norm_squared();
  if (!(n2 > 1e-12)) throw DegenerateState("coherent superposition has vanishing norm");
  DyadExpansion out;
  out.terms.reserve(psi.terms.size() * psi.terms.size());
  for (const auto& ti : psi.terms) {
    for (const auto& tj : psi.terms) {
      const cplx w = ti.c * std::conj(tj.c) *
                     coherent_overlap(tj.alpha1, tj.alpha2, ti.alpha1, ti.alpha2) / n2;
      out.terms.push_back({w, ti.alpha1, ti.alpha2, tj.alpha1, tj.alpha2});
    }
  }
  return out;
}

DensityOperator dyads_to_density(const DyadExpansion& dyads, const ModeCutoff& cutoff,
                                 double tol) {
  Matrix rho = Matrix::Zero(cutoff.dim(), cutoff.dim());
  for (const auto& t : dyads.terms) {
    const Vector ket = coherent_ket2(t.alpha1, t.alpha2, cutoff, tol).amplitudes;
    const Vector bra = coherent_ket2(t.beta1, t.beta2, cutoff, tol).amplitudes;
    const cplx norm = coherent_overlap(t.beta1, t.beta2, t.alpha1, t.alpha2);
    rho.noalias() += (t.weight / norm) * ket * bra.adjoint();
  }
  return {std::move(rho), cutoff};
}

}  // namespace corrchan
