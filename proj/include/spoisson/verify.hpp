#pragma once

#include <spoisson/errors.hpp>
#include <spoisson/quadrature.hpp>
#include <spoisson/report.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spoisson {

inline constexpr int kCriterionCount = 11;

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Multiplies every numeric acceptance tolerance.
  double tol_scale = 1.0;
  std::size_t budget = kDefaultEvaluationBudget;
  /// Empty: all criteria.
  std::vector<int> criteria;
};

struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;
  std::optional<ErrorCode> error;

  bool within_time() const noexcept { return seconds < time_limit; }
  bool ok() const noexcept { return passed && within_time(); }
};

struct VerifyRun {
  Report report;
  std::vector<CriterionOutcome> outcomes;

  bool all_ok() const noexcept;
  /// 0 when every criterion passed, the budget status when one hit a budget, else the failure status.
  int exit_code() const noexcept;
};

const char* criterion_title(int id);

/// Runs the acceptance criteria. `progress` receives each outcome as it completes.
VerifyRun run_verify(const VerifyOptions& options,
                     const std::function<void(const CriterionOutcome&)>& progress = {});

std::string format_outcome(const CriterionOutcome& o);

}  // namespace spoisson
