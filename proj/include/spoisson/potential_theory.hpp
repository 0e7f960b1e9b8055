#pragma once

#include <spoisson/gaussian_field.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace spoisson {

/// beta = d - k / xi.
double codimension(int k, int d, double gamma = 0.05);
bool is_critical_dimension(int k, int d, double gamma = 0.05);

/// A target set in R^d: a closed ball, a finite point cloud, or an axis-aligned box
/// (infinite bounds allowed, so the whole space is a box).
class TargetSet {
 public:
  enum class Kind { Ball, PointSet, Box };

  static TargetSet ball(std::vector<double> center, double radius);
  static TargetSet point_set(std::vector<std::vector<double>> points);
  static TargetSet box(std::vector<double> lo, std::vector<double> hi);
  static TargetSet whole_space(std::size_t d);

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return d_; }
  const std::vector<double>& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  const std::vector<std::vector<double>>& points() const noexcept { return points_; }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }
  bool bounded() const noexcept;

  /// Euclidean distance from z to the set (0 inside).
  double distance(const double* z) const noexcept;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Ball;
  std::size_t d_ = 0;
  std::vector<double> center_;
  double radius_ = 0.0;
  std::vector<std::vector<double>> points_;
  std::vector<double> lo_, hi_;
};

/// infinity for beta <= 0 and for boxes of positive volume; (2r)^beta for balls;
/// for point clouds the least dyadic box-covering sum over scales between the
/// cloud's diameter and its smallest point spacing (0 for a single point).
double hausdorff_measure(const TargetSet& a, double beta);

struct CapacityOptions {
  int mesh = 16;              // lattice points per axis for balls and boxes
  double reg = -1.0;          // < 0 selects the lattice spacing (smallest spacing for point clouds)
  std::size_t max_iterations = 1'000'000;
  double gap_tol = 1e-8;      // relative Frank-Wolfe duality gap
};

struct CapacityResult {
  double capacity = 0.0;
  double energy = 0.0;
  double reg = 0.0;
  std::size_t points = 0;
  std::size_t iterations = 0;
  double relative_gap = 0.0;
};

/// 1 / min energy of probability weights on a discretisation of A, kernel
/// r^-beta, log(e/r) or 1 for beta > 0, = 0, < 0, evaluated at max(r, reg).
/// Pairwise Frank-Wolfe with exact line search; stops once the duality gap
/// bounds the relative suboptimality by gap_tol. BudgetExceeded carries the best capacity.
CapacityResult riesz_capacity_detail(const TargetSet& a, double beta, const CapacityOptions& options = {});
double riesz_capacity(const TargetSet& a, double beta, int mesh = 16, double reg = -1.0);

std::vector<std::vector<double>> discretize(const TargetSet& a, int mesh, double* spacing = nullptr);

struct HitProbReport {
  std::string target;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_samples = 0;
  std::size_t hits = 0;
  std::size_t grid_resolution = 0;
  double margin = 0.0;
  /// Estimate with no inflation margin, and its hit count.
  double p_hat_no_margin = 0.0;
  std::size_t hits_no_margin = 0;
  double hausdorff_value = 0.0;
  double capacity_value = 0.0;
  double beta = 0.0;
  double ratio_capacity = 0.0;   // p_hat / capacity
  double ratio_hausdorff = 0.0;  // p_hat / hausdorff (0 when the measure is infinite)
};

struct HitOptions {
  double gamma = 0.05;
  /// < 0: half the median over draws of the largest nearest-neighbour grid increment.
  double margin = -1.0;
  std::size_t chunk = 512;
  CapacityOptions capacity;
};

/// Monte Carlo estimates for several targets from one shared set of draws, so
/// nested targets give ordered estimates.
std::vector<HitProbReport> hit_probability(const CovarianceModel& model, std::size_t d,
                                           const std::vector<TargetSet>& targets, std::size_t n, std::uint64_t seed,
                                           const HitOptions& options = {});
HitProbReport hit_probability(const CovarianceModel& model, std::size_t d, const TargetSet& target, std::size_t n,
                              std::uint64_t seed, const HitOptions& options = {});

struct SandwichSummary {
  std::size_t reports = 0;
  double capacity_window = 1.0;   // max / min of p_hat / capacity
  double hausdorff_window = 1.0;  // max / min of p_hat / hausdorff
  bool hausdorff_checked = false;
  double upper_constant = 0.0;    // fitted C with p_hat <= C H
  double lower_constant = 0.0;    // fitted c with p_hat >= c Cap
  bool upper_holds = true;
  bool lower_holds = true;
};

SandwichSummary sandwich_report(const std::vector<HitProbReport>& reports);

struct PolarityReport {
  double beta = 0.0;
  std::vector<double> epsilons;
  std::vector<HitProbReport> reports;
  double slope = 0.0;
  std::string verdict;
};

inline constexpr const char* kCriticalDimensionNotice =
    "critical dimension d = k/xi: hitting-probability bounds are not informative here, request refused";

/// Hit frequencies of B_eps(y0) for decreasing eps and their log-log slope. Refuses the critical dimension.
PolarityReport polarity_scan(const CovarianceModel& model, std::size_t d, const std::vector<double>& y0,
                             const std::vector<double>& epsilons, std::size_t n, std::uint64_t seed,
                             const HitOptions& options = {});

/// Columns r, p_hat, ci_low, ci_high, hausdorff, capacity.
std::string radius_sweep_csv(const std::vector<double>& radii, const std::vector<HitProbReport>& reports);

}  // namespace spoisson
