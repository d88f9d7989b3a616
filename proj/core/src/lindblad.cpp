#include "corrchan/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "corrchan/errors.hpp"

namespace corrchan {

namespace {

void rk4_step(const Liouvillian& gen, Matrix& rho, double h, Matrix& k1, Matrix& k2, Matrix& k3,
              Matrix& k4, Matrix& stage) {
  gen.apply(rho, k1);
  stage = rho + (0.5 * h) * k1;
  gen.apply(stage, k2);
  stage = rho + (0.5 * h) * k2;
  gen.apply(stage, k3);
  stage = rho + h * k3;
  gen.apply(stage, k4);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct RunResult {
  std::vector<DensityOperator> states;
  std::vector<PointDiagnostics> diagnostics;
  std::size_t steps = 0;
};

RunResult integrate(const Liouvillian& gen, const DensityOperator& rho0,
                    const std::vector<double>& grid, double dt, const SimConfig& config) {
  const auto dim = rho0.matrix.rows();
  Matrix rho = rho0.matrix;
  Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);

  RunResult out;
  out.states.reserve(grid.size());
  out.diagnostics.reserve(grid.size());

  auto record = [&](double t, PointDiagnostics diag) {
    DensityOperator state(rho, rho0.cutoff);
    if (config.check_positivity) {
      diag.min_eigenvalue = state.min_eigenvalue();
      if (diag.min_eigenvalue < -config.positivity_tol) {
        std::ostringstream os;
        os << "negative eigenvalue " << diag.min_eigenvalue << " at t=" << t;
        throw IntegrationFailure(os.str(), t, diag.trace_drift, diag.min_eigenvalue);
      }
    } else {
      diag.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    }
    out.states.push_back(std::move(state));
    out.diagnostics.push_back(diag);
  };

  PointDiagnostics initial;
  initial.trace_drift = std::abs(rho.trace() - 1.0);
  initial.hermiticity_defect = rho0.hermiticity_defect();
  if (initial.trace_drift > config.trace_tol) {
    throw IntegrationFailure("initial state is not trace-1", 0.0, initial.trace_drift,
                             std::numeric_limits<double>::quiet_NaN());
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  record(grid.front(), initial);

  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double span = grid[k] - grid[k - 1];
    const auto substeps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(substeps);
    PointDiagnostics diag;
    for (std::size_t s = 0; s < substeps; ++s) {
      rk4_step(gen, rho, h, k1, k2, k3, k4, stage);
      diag.hermiticity_defect =
          std::max(diag.hermiticity_defect, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      rho = 0.5 * (rho + rho.adjoint()).eval();
      const cplx tr = rho.trace();
      const double drift = std::abs(tr - 1.0);
      diag.trace_drift = std::max(diag.trace_drift, drift);
      if (!std::isfinite(drift) || drift > config.trace_tol) {
        const double t = grid[k - 1] + h * static_cast<double>(s + 1);
        std::ostringstream os;
        os << "trace drift " << drift << " exceeds tolerance at t=" << t;
        throw IntegrationFailure(os.str(), t, drift, std::numeric_limits<double>::quiet_NaN());
      }
      rho /= tr.real();
      ++out.steps;
    }
    record(grid[k], diag);
  }
  return out;
}

}  // namespace

std::string_view to_string(GeneratorKind kind) {
  return kind == GeneratorKind::correlated ? "correlated" : "independent";
}

GeneratorKind generator_from_string(std::string_view name) {
  if (name == "correlated") return GeneratorKind::correlated;
  if (name == "independent") return GeneratorKind::independent;
  throw DomainError("unknown generator '" + std::string(name) + "'");
}

double default_dt(const ChannelParams& p, const ModeCutoff& cutoff) {
  return 0.5 / (p.gamma * (2.0 * p.n0 + 1.0) * (cutoff.d1 + cutoff.d2));
}

Liouvillian::Liouvillian(GeneratorKind kind, const ChannelParams& p, const ModeCutoff& cutoff)
    : kind_(kind), params_(p), cutoff_(cutoff) {
  const Eigen::Index dim = cutoff.dim();
  for (int mode : {1, 2}) {
    Ladder l{mode == 1 ? cutoff.d2 : 1, Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
    const int levels = mode == 1 ? cutoff.d1 : cutoff.d2;
    for (int n1 = 0; n1 < cutoff.d1; ++n1) {
      for (int n2 = 0; n2 < cutoff.d2; ++n2) {
        const int n = mode == 1 ? n1 : n2;
        l.lower(cutoff.index(n1, n2)) = n + 1 < levels ? std::sqrt(n + 1.0) : 0.0;
        l.raise(cutoff.index(n1, n2)) = std::sqrt(static_cast<double>(n));
      }
    }
    ladders_.push_back(std::move(l));
  }
  if (kind == GeneratorKind::correlated) {
    jumps_.push_back({ladders_[0], ladders_[1]});
  } else {
    jumps_.push_back({ladders_[0]});
    jumps_.push_back({ladders_[1]});
  }

  // ||a|| = sqrt(d - 1) on a truncated mode; the generator norm is bounded by
  // 2 Gamma (2 N0 + 1) ||L||^2 per jump operator.
  const double norm1 = std::sqrt(cutoff.d1 - 1.0);
  const double norm2 = std::sqrt(cutoff.d2 - 1.0);
  const double per_unit = 2.0 * p.gamma * (2.0 * p.n0 + 1.0);
  stiffness_ = kind == GeneratorKind::correlated
                   ? per_unit * (norm1 + norm2) * (norm1 + norm2)
                   : per_unit * (norm1 * norm1 + norm2 * norm2);
}

void Liouvillian::left_lower(const Ladder& a, const Matrix& x, Matrix& out,
                             bool accumulate) const {
  const Eigen::Index n = x.rows() - a.stride;
  if (accumulate) {
    out.topRows(n) += a.lower.head(n).asDiagonal() * x.bottomRows(n);
  } else {
    out.topRows(n) = a.lower.head(n).asDiagonal() * x.bottomRows(n);
    out.bottomRows(a.stride).setZero();
  }
}

void Liouvillian::left_raise(const Ladder& a, const Matrix& x, Matrix& out,
                             bool accumulate) const {
  const Eigen::Index n = x.rows() - a.stride;
  if (accumulate) {
    out.bottomRows(n) += a.raise.tail(n).asDiagonal() * x.topRows(n);
  } else {
    out.bottomRows(n) = a.raise.tail(n).asDiagonal() * x.topRows(n);
    out.topRows(a.stride).setZero();
  }
}

void Liouvillian::right_lower_dag(const Ladder& a, const Matrix& x, Matrix& out,
                                  bool accumulate) const {
  // (x a^+)(:, c) = sqrt(n_c + 1) x(:, c + stride)
  const Eigen::Index n = x.cols() - a.stride;
  if (accumulate) {
    out.leftCols(n) += x.rightCols(n) * a.lower.head(n).asDiagonal();
  } else {
    out.leftCols(n) = x.rightCols(n) * a.lower.head(n).asDiagonal();
    out.rightCols(a.stride).setZero();
  }
}

void Liouvillian::right_raise_dag(const Ladder& a, const Matrix& x, Matrix& out,
                                  bool accumulate) const {
  // (x a)(:, c) = sqrt(n_c) x(:, c - stride)
  const Eigen::Index n = x.cols() - a.stride;
  if (accumulate) {
    out.rightCols(n) += x.leftCols(n) * a.raise.tail(n).asDiagonal();
  } else {
    out.rightCols(n) = x.leftCols(n) * a.raise.tail(n).asDiagonal();
    out.leftCols(a.stride).setZero();
  }
}

void Liouvillian::left_jump(std::span<const Ladder> group, const Matrix& x, Matrix& out,
                            bool dagger) const {
  bool first = true;
  for (const auto& a : group) {
    if (dagger) {
      left_raise(a, x, out, !first);
    } else {
      left_lower(a, x, out, !first);
    }
    first = false;
  }
}

void Liouvillian::right_jump(std::span<const Ladder> group, const Matrix& x, Matrix& out,
                             bool dagger) const {
  bool first = true;
  for (const auto& a : group) {
    if (dagger) {
      right_lower_dag(a, x, out, !first);
    } else {
      right_raise_dag(a, x, out, !first);
    }
    first = false;
  }
}

void Liouvillian::apply(const Matrix& rho, Matrix& out) const {
  // For hermitian rho, rate [L rho L^+ - (L^+L rho + rho L^+L)/2] = H + H^+ with
  // H = (rate/2)(L rho L^+ - L^+L rho), which halves the number of dense passes.
  const double down = params_.gamma * (params_.n0 + 1.0);
  const double up = params_.gamma * params_.n0;
  const auto dim = rho.rows();
  Matrix half = Matrix::Zero(dim, dim);
  Matrix first(dim, dim), second(dim, dim), third(dim, dim);

  auto dissipate = [&](std::span<const Ladder> jump, double rate, bool absorb) {
    left_jump(jump, rho, first, absorb);       // L rho
    right_jump(jump, first, second, !absorb);  // L rho L^+
    left_jump(jump, first, third, !absorb);    // L^+ L rho
    half += (0.5 * rate) * (second - third);
  };

  for (const auto& jump : jumps_) {
    dissipate(jump, down, false);
    if (up != 0.0) dissipate(jump, up, true);
  }
  out.noalias() = half + half.adjoint();
}

DensityOperator Liouvillian::apply(const DensityOperator& rho) const {
  if (!(rho.cutoff == cutoff_)) throw DimensionMismatch("state cutoff differs from generator cutoff");
  // Split into hermitian parts so the fast path stays exact for any input.
  const Matrix herm = 0.5 * (rho.matrix + rho.matrix.adjoint());
  const Matrix anti = cplx(0.0, -0.5) * (rho.matrix - rho.matrix.adjoint());
  Matrix out(herm.rows(), herm.cols());
  apply(herm, out);
  if (anti.cwiseAbs().maxCoeff() > 0.0) {
    Matrix extra(herm.rows(), herm.cols());
    apply(anti, extra);
    out += cplx(0.0, 1.0) * extra;
  }
  return {std::move(out), cutoff_};
}

DensityOperator correlated_generator(const DensityOperator& rho, const ChannelParams& p) {
  return Liouvillian(GeneratorKind::correlated, p, rho.cutoff).apply(rho);
}

DensityOperator independent_generator(const DensityOperator& rho, const ChannelParams& p) {
  return Liouvillian(GeneratorKind::independent, p, rho.cutoff).apply(rho);
}

std::vector<double> linear_grid(double t_max, int n) {
  if (n < 1) throw DomainError("time grid needs at least one point");
  if (!(t_max >= 0.0)) throw DomainError("t_max must be >= 0");
  if (n == 1) return {0.0};
  if (!(t_max > 0.0)) throw DomainError("t_max must be > 0 for grids with several points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = t_max * i / (n - 1);
  grid.back() = t_max;
  return grid;
}

Trajectory evolve(const DensityOperator& rho0, GeneratorKind kind, const ChannelParams& p,
                  const SimConfig& config, std::span<const double> grid_in) {
  if (grid_in.empty()) throw DomainError("empty time grid");
  if (!(config.trace_tol > 0.0) || !(config.positivity_tol > 0.0)) {
    throw DomainError("tolerances must be > 0");
  }
  if (!(config.t_final >= 0.0)) throw DomainError("t_final must be >= 0");

  std::vector<double> grid;
  grid.reserve(grid_in.size() + 1);
  if (grid_in.front() != 0.0) grid.push_back(0.0);
  grid.insert(grid.end(), grid_in.begin(), grid_in.end());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw DomainError("time grid must be strictly increasing from 0");
  }
  if (grid.front() < 0.0) throw DomainError("time grid starts before 0");
  if (grid.back() > config.t_final * (1.0 + 1e-12)) {
    throw DomainError("time grid extends past t_final");
  }

  const Liouvillian gen(kind, p, rho0.cutoff);
  const double dt = config.dt > 0.0 ? config.dt : default_dt(p, rho0.cutoff);

  Trajectory traj;
  traj.grid = grid;
  traj.dt = dt;
  if (dt * gen.stiffness() > 2.7) {
    std::ostringstream os;
    os << "dt=" << dt << " is near or beyond the RK4 stability limit (stiffness "
       << gen.stiffness() << ")";
    traj.warnings.push_back(os.str());
  }

  RunResult main = integrate(gen, rho0, grid, dt, config);
  if (config.step_halving) {
    SimConfig quiet = config;
    quiet.check_positivity = false;
    const RunResult fine = integrate(gen, rho0, grid, 0.5 * dt, quiet);
    double diff = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      diff = std::max(diff,
                      (main.states[k].matrix - fine.states[k].matrix).cwiseAbs().maxCoeff());
    }
    traj.convergence_estimate = diff;
  }
  traj.states = std::move(main.states);
  traj.diagnostics = std::move(main.diagnostics);
  traj.steps = main.steps;
  return traj;
}

}  // namespace corrchan
