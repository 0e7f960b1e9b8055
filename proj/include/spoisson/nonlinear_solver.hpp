#pragma once

#include <spoisson/gaussian_field.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spoisson {

/// A map R^d -> R^d applied pointwise, split as f = f1 + f2 with f1 monotone and f2 L-Lipschitz.
struct NemytskiiSpec {
  using Map = std::function<void(const double* z, double* out)>;
  using Jacobian = std::function<void(const double* z, double* jac)>;  // row-major d x d

  std::string name;
  std::size_t d = 1;
  Map f;
  Map f1;
  Map f2;
  double L = 0.0;
  Jacobian jacobian;  // empty: the solver falls back to the damped fixed point
  bool is_zero = false;
};

NemytskiiSpec zero_nonlinearity(std::size_t d);
/// f(z) = lambda z: monotone part lambda z for lambda >= 0, else a Lipschitz part with L = |lambda|.
NemytskiiSpec linear_nonlinearity(std::size_t d, double lambda);
/// Coordinatewise arctan, taken as the monotone part (L = 0).
NemytskiiSpec arctan_nonlinearity(std::size_t d);
/// f(z) = -c sin(z) coordinatewise, entirely Lipschitz with L = c.
NemytskiiSpec sine_nonlinearity(std::size_t d, double c);

struct SpecCheck {
  double decomposition_error = 0.0;  // max |f - f1 - f2|
  double lipschitz_excess = 0.0;     // max of |f2(a) - f2(b)| - L |a - b|
  double monotonicity_defect = 0.0;  // max of -<a - b, f1(a) - f1(b)>
};

/// Probes the three structural conditions on random pairs in [-scale, scale]^d.
SpecCheck check_spec(const NemytskiiSpec& spec, std::size_t samples, std::uint64_t seed, double scale = 3.0);

/// First Dirichlet eigenvalue of the Laplacian from second-order finite
/// (volume) differences at n and 2n cells, Richardson extrapolated.
double poincare_constant(const Domain& domain, int n);

/// Quadrature nodes: x_i = i b/(n+1) with weight b/(n+1) on the interval;
/// midpoint product rules in polar or spherical coordinates with n radial cells on the ball.
struct NodeSet {
  std::vector<SpatialPoint> points;
  std::vector<double> weights;
};
NodeSet quadrature_nodes(const Domain& domain, int resolution);

using Forcing = std::function<std::vector<double>(const SpatialPoint&)>;

struct SystemSpec {
  Domain domain = Domain::interval(1.0);
  int resolution = 64;  // 0: no quadrature nodes, only extra points (meaningful for f = 0)
  /// Zero-weight evaluation nodes appended after the quadrature nodes.
  std::vector<SpatialPoint> extra_points;
  std::size_t d = 1;
  Forcing g;              // empty: no deterministic forcing
  Eigen::MatrixXd sigma;  // empty: identity
  double rel_tol = -1.0;
  int poincare_resolution = 256;
};

struct DiscreteSystem {
  std::vector<SpatialPoint> grid;
  std::vector<double> weights;
  Eigen::MatrixXd K;  // positive_green(x_i, y_j) w_j with a singular correction on the diagonal
  double a = 0.0;
  std::size_t d = 1;
  /// Point-major, b_vec[i * d + c], matching the FieldSample layout.
  std::vector<double> b_vec;
  std::vector<double> deterministic;
  std::vector<double> noise;
};

/// Everything that does not depend on the noise draw, computed once.
class SystemFamily {
 public:
  explicit SystemFamily(SystemSpec spec);

  /// Right-hand side for one noise draw: K g + sigma v with v = sample(covariance, d, 1, seed, draw).
  DiscreteSystem system(std::uint64_t seed, std::uint64_t draw = 0) const;

  const SystemSpec& spec() const noexcept { return spec_; }
  const CovarianceModel& covariance() const noexcept { return cov_; }
  const std::vector<SpatialPoint>& grid() const noexcept { return grid_; }
  double poincare() const noexcept { return a_; }

 private:
  SystemSpec spec_;
  std::vector<SpatialPoint> grid_;
  std::vector<double> weights_;
  Eigen::MatrixXd k_;
  double a_ = 0.0;
  CovarianceModel cov_;
  std::vector<double> deterministic_;
};

DiscreteSystem assemble(const Domain& domain, int grid_resolution, const Forcing& g, const Eigen::MatrixXd& sigma,
                        std::size_t d, std::uint64_t seed);

struct SolverConfig {
  double tol = 1e-10;
  std::size_t max_iterations = 10'000;
  bool use_newton = true;        // when a jacobian is available
  std::vector<double> initial;   // empty: start from b_vec
  int max_backtracks = 40;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double residual = 0.0;
  double theta = 0.0;
};

struct SolveResult {
  std::vector<double> u;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::string method;
  double theta0 = 1.0;
  std::vector<IterationRecord> log;
};

/// Solves u + K f(u) = b_vec to sup-norm residual below config.tol.
SolveResult solve_mild(const DiscreteSystem& system, const NemytskiiSpec& spec, const SolverConfig& config = {});

/// sup-norm of u + K f(u) - b_vec.
double residual(const DiscreteSystem& system, const NemytskiiSpec& spec, const std::vector<double>& u);

/// <K phi, phi> / ||K phi||^2 with the quadrature-weighted inner product.
double property_p_ratio(const DiscreteSystem& system, const std::vector<double>& phi);

struct MomentEstimate {
  double l2_norm_moment = 0.0;  // E ||u||_{L^2(D)}^p
  double l2_norm_se = 0.0;
  double sup_point_moment = 0.0;  // max over nodes of E |u(x)|^p
  double sup_point_se = 0.0;
  std::size_t draws = 0;
};

MomentEstimate moment_estimate(const SystemFamily& family, const NemytskiiSpec& spec, int p, std::size_t n,
                               std::uint64_t seed, const SolverConfig& config = {});

struct HolderEstimate {
  std::vector<double> separations;
  std::vector<double> moments;  // E |u(x1) - u(x2)|^p
  std::vector<double> se;
  double slope = 0.0;
  double expected = 0.0;  // p xi
};

/// Pairs are given as extra evaluation points of one system family.
HolderEstimate holder_estimate(const Domain& domain, const NemytskiiSpec& spec, const std::vector<PointPair>& pairs,
                               int p, std::size_t n, std::uint64_t seed, int resolution = 0, double gamma = 0.05,
                               double rel_tol = -1.0);

struct MarginalSmoothness {
  std::size_t n = 0;
  double atom_mass = 0.0;
  double ks_p_value = 0.0;
  double kde_at_mean = 0.0;
  bool atomless = false;  // atom mass <= 2/n
};

MarginalSmoothness marginal_smoothness_diagnostic(const std::vector<double>& values);

}  // namespace spoisson
