#include "corrchan/observables.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "corrchan/errors.hpp"

namespace corrchan {

namespace {

void require_same_cutoff(const DensityOperator& a, const DensityOperator& b) {
  if (!(a.cutoff == b.cutoff)) throw DimensionMismatch("density operators have different cutoffs");
}

}  // namespace

double purity_numeric(const DensityOperator& rho) { return rho.matrix.squaredNorm(); }

double overlap(const DensityOperator& rho0, const DensityOperator& rhot) {
  require_same_cutoff(rho0, rhot);
  // Tr[A B] = sum_ij A_ij B_ji
  const cplx value = rho0.matrix.cwiseProduct(rhot.matrix.transpose()).sum();
  if (std::abs(value.imag()) > 1e-10) {
    std::ostringstream os;
    os << "overlap has imaginary part " << value.imag() << "; inputs are not hermitian";
    throw NumericalError(os.str());
  }
  return value.real();
}

cplx chi_numeric(const DensityOperator& rho, const PhasePoint& pt) {
  const ModeCutoff& c = rho.cutoff;
  const Matrix disp1 = displacement(pt.lambda1, c.d1);
  const Matrix disp2_t = displacement(pt.lambda2, c.d2).transpose();
  cplx acc = 0.0;
  for (int m1 = 0; m1 < c.d1; ++m1) {
    for (int n1 = 0; n1 < c.d1; ++n1) {
      const auto block = rho.matrix.block(n1 * c.d2, m1 * c.d2, c.d2, c.d2);
      acc += disp1(m1, n1) * disp2_t.cwiseProduct(block).sum();
    }
  }
  return acc;
}

double q_numeric(const DensityOperator& rho, const QPoint& q) {
  // Only the components below the cutoff meet rho, so the probe ket needs no tail check.
  const Vector ket = coherent_ket2(q.delta1, q.delta2, rho.cutoff,
                                   std::numeric_limits<double>::infinity()).amplitudes;
  const double value =
      ket.dot(rho.matrix * ket).real() / (std::numbers::pi * std::numbers::pi);
  if (value < -1e-12) {
    std::ostringstream os;
    os << "Q-function negative (" << value << "); state is not positive";
    throw NumericalError(os.str());
  }
  return value;
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_cutoff(rho, sigma);
  const Matrix diff = rho.matrix - sigma.matrix;
  const Matrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

DfsReport dfs_deviation(const CoherentSuperposition& input, const ChannelParams& p,
                        std::span<const double> grid, const SimConfig& config,
                        std::optional<ModeCutoff> cutoff) {
  const CoherentSuperposition psi = input.normalized();
  const ModeCutoff c = cutoff.value_or(auto_cutoff(psi.max_amplitude(), p));
  const DensityOperator rho0 = superposition_to_density(psi, c);
  const Trajectory traj = evolve(rho0, GeneratorKind::correlated, p, config, grid);

  DfsReport report;
  report.times = traj.grid;
  report.trace_distance_to_input.reserve(traj.states.size());
  for (const auto& state : traj.states) {
    const double d = trace_distance(state, rho0);
    report.trace_distance_to_input.push_back(d);
    report.max_deviation = std::max(report.max_deviation, d);
  }
  report.decoherence_free = report.max_deviation < report.tolerance;
  return report;
}

}  // namespace corrchan
