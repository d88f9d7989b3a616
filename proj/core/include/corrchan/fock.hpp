#pragma once

// Truncated two-mode Fock space.
//
// Basis state |n1, n2> lives at flat index n1 * d2 + n2 (mode-1-major).
// Every routine in the library relies on this convention.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace corrchan {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Default truncation tolerance on the Poisson tail of a coherent state.
inline constexpr double kTruncationTolerance = 1e-12;

struct ModeCutoff {
  int d1 = 1;
  int d2 = 1;

  ModeCutoff() = default;
  ModeCutoff(int levels1, int levels2);

  int dim() const noexcept { return d1 * d2; }
  int index(int n1, int n2) const noexcept { return n1 * d2 + n2; }

  friend bool operator==(const ModeCutoff&, const ModeCutoff&) = default;
};

struct StateVector {
  Vector amplitudes;
  ModeCutoff cutoff;

  double norm_squared() const { return amplitudes.squaredNorm(); }
};

struct DensityOperator {
  Matrix matrix;
  ModeCutoff cutoff;

  DensityOperator() = default;
  DensityOperator(Matrix m, ModeCutoff c);

  int dim() const noexcept { return cutoff.dim(); }
  cplx trace() const { return matrix.trace(); }
  /// max |rho - rho^dagger| entry.
  double hermiticity_defect() const;
  double min_eigenvalue() const;
};

/// One term c |alpha1, alpha2> of a coherent superposition.
struct CoherentTerm {
  cplx c;
  cplx alpha1;
  cplx alpha2;
};

struct CoherentSuperposition {
  std::vector<CoherentTerm> terms;

  /// <psi|psi> from pairwise coherent overlaps (no truncation involved).
  double norm_squared() const;
  CoherentSuperposition normalized() const;
  double max_amplitude() const;
};

/// w * |alpha1, alpha2><beta1, beta2| / <beta1, beta2|alpha1, alpha2>
struct Dyad {
  cplx weight;
  cplx alpha1;
  cplx alpha2;
  cplx beta1;
  cplx beta2;
};

/// Finite coherent-dyad representation of a density operator. Each dyad has unit trace,
/// so the represented operator has trace equal to the weight sum.
struct DyadExpansion {
  std::vector<Dyad> terms;

  cplx total_weight() const;
  /// Every term has a partner with conjugate weight and swapped ket/bra labels.
  bool is_hermitian_paired(double tol = 1e-12) const;
  double max_amplitude() const;
};

// Single-mode helpers.

Matrix annihilation(int d);
Matrix identity(int d);
/// Sum_{n >= d} e^{-|alpha|^2} |alpha|^{2n} / n!, summed directly (no 1 - head cancellation).
double poisson_tail(double abs_alpha, int d);
/// Truncated coherent ket, not renormalized. Throws CutoffTooSmall when the tail exceeds `tol`.
Vector coherent_ket(cplx alpha, int d, double tol = kTruncationTolerance);
/// <m|exp(lambda a^dagger - conj(lambda) a)|n> for m, n < d from the Laguerre closed form.
Matrix displacement(cplx lambda, int d);
/// max(16, ceil(|alpha|^2 + 6|alpha| + 12))
int default_cutoff(double max_abs_alpha);

/// <beta|alpha> for single-mode coherent states.
cplx coherent_overlap(cplx beta, cplx alpha);
cplx coherent_overlap(cplx beta1, cplx beta2, cplx alpha1, cplx alpha2);

// Two-mode helpers.

/// Mode-1-major Kronecker product.
Matrix tensor(const Matrix& a, const Matrix& b);
Vector tensor(const Vector& a, const Vector& b);
Matrix embed_mode1(const Matrix& a, const ModeCutoff& cutoff);
Matrix embed_mode2(const Matrix& b, const ModeCutoff& cutoff);
/// Trace out the other mode; `keep` is 1 or 2.
Matrix partial_trace(const Matrix& m, const ModeCutoff& cutoff, int keep);

StateVector coherent_ket2(cplx alpha1, cplx alpha2, const ModeCutoff& cutoff,
                          double tol = kTruncationTolerance);

/// c (|alpha,-alpha> + sign e^{i phi} |-alpha,alpha>), normalized.
CoherentSuperposition entangled_coherent(cplx alpha, double phi, int sign);
CoherentSuperposition coherent_state(cplx alpha1, cplx alpha2);

StateVector superposition_ket(const CoherentSuperposition& psi, const ModeCutoff& cutoff,
                              double tol = kTruncationTolerance);
DensityOperator superposition_to_density(const CoherentSuperposition& psi,
                                         const ModeCutoff& cutoff,
                                         double tol = kTruncationTolerance);
DyadExpansion dyad_expansion_of(const CoherentSuperposition& psi);
/// Dense reconstruction of sum_k w_k Lambda_k.
DensityOperator dyads_to_density(const DyadExpansion& dyads, const ModeCutoff& cutoff,
                                 double tol = kTruncationTolerance);

}  // namespace corrchan
