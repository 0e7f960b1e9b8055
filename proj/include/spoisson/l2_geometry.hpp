#pragma once

#include <spoisson/green_kernel.hpp>
#include <spoisson/quadrature.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace spoisson {

/// Second-order structure of the field at two points.
struct PairGeometry {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
  double cov = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double m = 0.0;
  double tau_sq = 0.0;
};

/// Derives rho, m and tau^2 from the four primitive quantities.
PairGeometry make_pair_geometry(double sigma1_sq, double sigma2_sq, double cov, double delta_sq);

namespace closed_form {
// Interval (0, b) only.
double sigma_sq(double b, double x);
double cov(double b, double x, double y);
/// Squared increment norm, expanded so that no cancellation occurs for close points.
double delta_sq(double b, double x1, double x2);
/// sigma_x sigma_y - sigma_xy = (x^y)(b - (x v y))(x - y)^2 / (6b).
double gap_factor(double b, double x, double y);
}  // namespace closed_form

/// Closed forms for the interval, quadrature on the ball (tolerance < 0 selects the default).
PairGeometry pair_geometry(const Domain& domain, const SpatialPoint& x1, const SpatialPoint& x2,
                           double rel_tol = -1.0, std::size_t max_evaluations = kDefaultEvaluationBudget);

/// (s1^2 s2^2 - cov^2) - 1/4 [delta^2 - (s2 - s1)^2][(s2 + s1)^2 - delta^2].
double variance_identity_residual(const PairGeometry& pg);

/// A compact subset of the domain: [lo, hi] inside (0, b), or the closed ball of radius r < 1.
struct ScanRegion {
  double lo = 0.0;
  double hi = 0.0;
  double radius = 0.0;
  bool ball = false;

  static ScanRegion interval(double lo, double hi) { return {lo, hi, 0.0, false}; }
  static ScanRegion centered_ball(double r) { return {0.0, 0.0, r, true}; }

  bool contains(const SpatialPoint& x) const noexcept;
  double diameter() const noexcept;
  std::string describe() const;
};

/// Throws DegenerateRegion unless the region is nonempty, strictly interior and of the domain's dimension.
void validate_region(const Domain& domain, const ScanRegion& region);

using PointPair = std::pair<SpatialPoint, SpatialPoint>;

/// Half of the pairs come from a lattice of the region, half have |x1 - x2|
/// log-uniform in [1e-4, diameter] with a uniform base point and direction.
std::vector<PointPair> sample_pairs(const Domain& domain, const ScanRegion& region, std::size_t count,
                                    std::uint64_t seed);

struct ScanSample {
  PointPair pair;
  double separation = 0.0;
  double ratio = 0.0;
};

struct BoundScanReport {
  std::string region;
  std::size_t pair_count = 0;
  std::string normalizer;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  PointPair argmin;
  PointPair argmax;
  /// Constants stated for the bound, recorded next to the empirical ratios; never asserted.
  std::vector<std::pair<std::string, double>> paper_constants;
  /// Further named scan diagnostics.
  std::vector<std::pair<std::string, double>> extras;
  std::vector<ScanSample> samples;

  bool bounded() const noexcept;
};

struct ScanOptions {
  std::size_t pairs = 100;
  std::uint64_t seed = 0;
  double rel_tol = -1.0;
  double gamma = 0.05;
  std::size_t max_evaluations = kDefaultEvaluationBudget;
};

/// Hoelder index xi of the field: 1, 1 - gamma, 1/2 for k = 1, 2, 3.
double holder_index(int k, double gamma = 0.05);

/// delta / normalizer over sampled pairs. One report for k = 1, 3; for k = 2 the
/// lower (|D|) and upper (|D| |log^2|D| - log|D| + 1|^1/2) scans, plus their
/// per-pair quotient recorded in the extras of the second report.
std::vector<BoundScanReport> metric_ratio_scan(const Domain& domain, const ScanRegion& region,
                                               const ScanOptions& options);

/// |sigma_1 - sigma_2| / |D|^xi. Records how many pairs break |sigma_1 - sigma_2| <= delta.
BoundScanReport sigma_modulus_scan(const Domain& domain, const ScanRegion& region, const ScanOptions& options);

/// |sigma_1^2 - sigma_2^2| / |D|^(1 - zeta) on the ball of R^3.
BoundScanReport sigma_sq_increment_scan(const Domain& domain, const ScanRegion& region, double zeta,
                                        const ScanOptions& options);

/// sigma_sq_increment_scan over several zeta values on one pair set.
std::vector<BoundScanReport> sigma_sq_increment_scan(const Domain& domain, const ScanRegion& region,
                                                     const std::vector<double>& zetas, const ScanOptions& options);

/// (1 - rho^2) / |D|^2 on the interval, with both readings of the factorised gap checked.
BoundScanReport correlation_gap_scan(const Domain& domain, const ScanRegion& region, const ScanOptions& options);

}  // namespace spoisson
