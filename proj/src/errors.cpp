#include <spoisson/errors.hpp>

namespace spoisson {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::SingularArgument: return "singular-argument";
    case ErrorCode::DiagonalSingularity: return "diagonal-singularity";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::EmptyGrid: return "empty-grid";
    case ErrorCode::DegenerateRegion: return "degenerate-region";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    case ErrorCode::ModelSingular: return "model-singular";
    case ErrorCode::DegenerateVariance: return "degenerate-variance";
    case ErrorCode::DegeneratePair: return "degenerate-pair";
    case ErrorCode::SingularNoise: return "singular-noise";
    case ErrorCode::MonotonicityViolation: return "monotonicity-violation";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::CriticalDimension: return "critical-dimension";
    case ErrorCode::Eigensolver: return "eigensolver";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::Domain:
    case ErrorCode::EmptyGrid:
    case ErrorCode::DegenerateRegion:
    case ErrorCode::Unsupported:
      return kExitUsage;
    case ErrorCode::BudgetExceeded:
    case ErrorCode::NonConvergence:
      return kExitBudget;
    case ErrorCode::MonotonicityViolation:
      return kExitMonotonicity;
    case ErrorCode::CriticalDimension:
      return kExitCriticalDimension;
    default:
      return kExitNumerical;
  }
}

}  // namespace spoisson
