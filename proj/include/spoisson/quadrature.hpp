#pragma once

#include <spoisson/green_kernel.hpp>

#include <cstddef>
#include <functional>
#include <span>

namespace spoisson {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kDefaultEvaluationBudget = 10'000'000;

/// 1e-7 for k = 1, 2 and 1e-5 for k = 3.
double default_rel_tol(const Domain& domain);

using Integrand = std::function<double(const SpatialPoint&)>;

/// Adaptive integral of `integrand` over the domain.
///
/// On the interval the singular points become breakpoints of a global
/// Gauss-Kronrod subdivision. On the ball the integral is taken in polar
/// (k = 2) or spherical (k = 3) coordinates centred on the first singular
/// point, so the Jacobian absorbs its singularity; the angular frame is
/// aligned with the second singular point and every further point adds a
/// radial breakpoint at its closest approach along each ray.
///
/// Throws BudgetExceeded (carrying the best estimate) when the tolerance is
/// not met within `max_evaluations` integrand calls.
QuadratureResult integrate(const Domain& domain, const Integrand& integrand,
                           std::span<const SpatialPoint> singular_points, double rel_tol,
                           std::size_t max_evaluations = kDefaultEvaluationBudget);

/// sigma_x^2 = integral of G(x, y)^2 dy.
double norm_sq(const Domain& domain, const SpatialPoint& x, double rel_tol,
               std::size_t max_evaluations = kDefaultEvaluationBudget);

/// <G(x1, .), G(x2, .)>.
double gram_entry(const Domain& domain, const SpatialPoint& x1, const SpatialPoint& x2, double rel_tol,
                  std::size_t max_evaluations = kDefaultEvaluationBudget);

/// integral of (G(x1, y) - G(x2, y))^2 dy as one integral.
double increment_norm_sq(const Domain& domain, const SpatialPoint& x1, const SpatialPoint& x2, double rel_tol,
                         std::size_t max_evaluations = kDefaultEvaluationBudget);

}  // namespace spoisson
