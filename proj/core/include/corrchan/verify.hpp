#pragma once

// Acceptance checks: every analytic result is compared against the numerical integrator at a
// pinned tolerance. Used by `corrchan verify` and by the acceptance test binary.

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace corrchan::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;   ///< the quantity compared against `threshold`
  double threshold = 0.0;
  std::string comparison;  ///< e.g. "<", ">=", "in [8, 32]"
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> values;  ///< supporting measurements
  std::string note;
};

struct PurityPoint {
  double n = 0.0;
  double quadratic = 0.0;
  double rotated = 0.0;
  double numeric = 0.0;
  double numeric_coarse = 0.0;  ///< same run at the smaller cutoff
};

struct PurityAdjudication {
  std::vector<PurityPoint> points;
  std::string selected;  ///< "quadratic", "rotated", "both" or "neither"
  double residual_selected = 0.0;
  double residual_other = 0.0;
};

struct Options {
  std::set<int> only;  ///< empty = all criteria
  /// Fault injection: predict the zero-temperature map with e^{+Gamma t}.
  bool tamper_gamma_sign = false;
  int threads = 1;
};

struct Report {
  std::vector<CriterionResult> criteria;
  std::optional<PurityAdjudication> purity;
  bool all_passed = true;
  double seconds = 0.0;

  std::string to_json() const;
};

inline constexpr int kCriterionCount = 8;

Report run(const Options& options);
CriterionResult run_criterion(int id, const Options& options,
                              std::optional<PurityAdjudication>* purity = nullptr);

/// One human-readable line per criterion.
std::string format_line(const CriterionResult& r);

}  // namespace corrchan::verify
