#pragma once

#include <stdexcept>
#include <string>

namespace spoisson {

enum class ErrorCode {
  Usage,
  Domain,
  SingularArgument,
  DiagonalSingularity,
  Unsupported,
  EmptyGrid,
  DegenerateRegion,
  BudgetExceeded,
  ModelSingular,
  DegenerateVariance,
  DegeneratePair,
  SingularNoise,
  MonotonicityViolation,
  NonConvergence,
  CriticalDimension,
  Eigensolver,
};

const char* to_string(ErrorCode code);

/// Base of every error raised by the library. The code selects the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An iterative routine ran out of its evaluation or iteration budget.
/// The best estimate reached so far travels with the error.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, double best_estimate, double error_estimate)
      : Error(ErrorCode::BudgetExceeded, what), best_(best_estimate), error_(error_estimate) {}
  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double best_;
  double error_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(ErrorCode::NonConvergence, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Process exit statuses used by the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCriterionFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitMonotonicity = 4;
inline constexpr int kExitNumerical = 5;
inline constexpr int kExitCriticalDimension = 6;

int exit_code_for(ErrorCode code) noexcept;

}  // namespace spoisson
