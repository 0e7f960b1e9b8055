#pragma once

#include <spoisson/green_kernel.hpp>
#include <spoisson/l2_geometry.hpp>
#include <spoisson/quadrature.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spoisson {

struct CovarianceModel {
  Domain domain = Domain::interval(1.0);
  std::vector<SpatialPoint> grid;
  Eigen::MatrixXd gram;
  /// Lower triangular, factor * factor^T = gram + jitter * I.
  Eigen::MatrixXd factor;
  double jitter = 0.0;
};

/// Gram matrix of the grid (closed forms on the interval, quadrature on the
/// ball) and its Cholesky factor. Jitter escalates through 0, 1e-12, 1e-10,
/// 1e-8, 1e-6; failure at 1e-6, or a repeated grid point, raises ModelSingular.
CovarianceModel build_covariance(const Domain& domain, const std::vector<SpatialPoint>& grid, double rel_tol = -1.0,
                                 std::size_t max_evaluations = kDefaultEvaluationBudget);

/// Draws of the R^d-valued field on a grid, stored draw-major:
/// values[(draw * grid_size + point) * d + component].
struct FieldSample {
  std::vector<SpatialPoint> grid;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;

  std::size_t grid_size() const noexcept { return grid.size(); }
  double at(std::size_t draw, std::size_t point, std::size_t component) const noexcept {
    return values[(draw * grid.size() + point) * d + component];
  }
  double& at(std::size_t draw, std::size_t point, std::size_t component) noexcept {
    return values[(draw * grid.size() + point) * d + component];
  }
  /// All values of one component at one grid point, in draw order.
  std::vector<double> series(std::size_t point, std::size_t component) const;
};

/// n draws of d independent components. Draw j uses the streams (seed, first_draw + j, component),
/// so a sample is a reproducible slice of one infinite sequence.
FieldSample sample(const CovarianceModel& model, std::size_t d, std::size_t n, std::uint64_t seed,
                   std::uint64_t first_draw = 0);

/// Interval field from a simulated Brownian path W on a refinement of the grid
/// with step at most 1e-3 b: v(x) = (x/b) int_0^b W - int_0^x W, trapezoidal integrals.
FieldSample sample_1d_exact(double b, const std::vector<SpatialPoint>& grid, std::size_t d, std::size_t n,
                            std::uint64_t seed);

/// Isotropic Gaussian density (2 pi s^2)^(-d/2) exp(-|z|^2 / (2 s^2)).
double marginal_density(double sigma_sq, std::span<const double> z);

/// Density of (v(x1), v(x2)) at (z1, z2) as conditional times marginal, per component.
double joint_density(const PairGeometry& pg, std::span<const double> z1, std::span<const double> z2);

struct DensitySandwich {
  double sigma_min_sq = 0.0;  // over the scanned compact set
  double sigma_max_sq = 0.0;
  double sup_density = 0.0;
  double inf_density = 0.0;
  double upper_bound = 0.0;  // (2 pi sigma_min^2)^(-d/2)
  double lower_bound = 0.0;  // c1 (2 pi sigma_max^2)^(-d/2)
  double c1 = 0.0;
  bool holds() const noexcept { return sup_density <= upper_bound && inf_density >= lower_bound; }
};

/// Scans x over a lattice of the region and z over a lattice of [-M, M]^d.
DensitySandwich marginal_density_sandwich(const Domain& domain, const ScanRegion& region, double z_bound,
                                          std::size_t d, int x_points = 41, int z_points = 11,
                                          double rel_tol = -1.0);

struct JointBoundOptions {
  std::size_t pairs = 100;
  std::size_t z_samples = 32;
  std::uint64_t seed = 0;
  double rel_tol = -1.0;
  double gamma = 0.0;  // 0 selects d for k = 1 and d/2 for k = 3
  double alpha = 0.0;  // 0 selects 2 for k = 1 and 1 for k = 3
};

/// max of joint * |D|^gamma * exp(c |z1 - z2|^2 / |D|^alpha) over pairs and z samples in [-M, M]^d.
/// c is half the smallest |D|^alpha / (4 tau^2) over the pairs and is recorded.
BoundScanReport joint_density_bound_check(const Domain& domain, const ScanRegion& region, double z_bound,
                                          std::size_t d, const JointBoundOptions& options);

struct ModulusSummary {
  std::size_t draws = 0;
  double mean = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  double median_first_half = 0.0;
  std::vector<double> per_draw;
};

/// Per draw, A* = max over grid pairs of |v(x) - v(y)| / (t sqrt(log(1 + 1/t))), t = |x - y|^xi.
ModulusSummary modulus_diagnostic(const FieldSample& samples, double xi);

/// Per draw, the largest |v(x_i) - v(x_j)| over nearest-neighbour grid pairs.
std::vector<double> neighbour_increments(const FieldSample& samples);

double quantile(std::vector<double> xs, double q);

/// Columns: draw, point coordinates, component values.
std::string to_csv(const FieldSample& samples);

}  // namespace spoisson
