#include <doctest.h>

#include <spoisson/errors.hpp>
#include <spoisson/gaussian_field.hpp>
#include <spoisson/stats.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace spoisson;
namespace cf = spoisson::closed_form;

namespace {

std::vector<SpatialPoint> interval_grid(std::initializer_list<double> xs) {
  std::vector<SpatialPoint> g;
  for (double x : xs) g.push_back(SpatialPoint{x});
  return g;
}

}  // namespace

TEST_CASE("interval Gram matrix is the closed-form covariance and is PSD") {
  const auto grid = interval_grid({0.05, 0.2, 0.33, 0.5, 0.51, 0.8, 0.97});
  const CovarianceModel m = build_covariance(Domain::interval(1.0), grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j)
      CHECK(m.gram(i, j) == doctest::Approx(cf::cov(1.0, grid[i][0], grid[j][0])).epsilon(1e-13));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gram);
  CHECK(es.eigenvalues().minCoeff() > -1e-14);
  const Eigen::MatrixXd llt = m.factor * m.factor.transpose();
  CHECK((llt - m.gram).cwiseAbs().maxCoeff() <= m.jitter + 1e-15);
}

TEST_CASE("ball Gram matrix is symmetric PSD with Cauchy-Schwarz entries") {
  const Domain d2 = Domain::unit_ball(2);
  const std::vector<SpatialPoint> grid{{0.0, 0.0}, {0.3, 0.1}, {-0.5, 0.2}, {0.1, -0.6}};
  const CovarianceModel m = build_covariance(d2, grid);
  CHECK((m.gram - m.gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.gram(0, 0) == doctest::Approx(1.0 / (8 * std::numbers::pi)).epsilon(1e-6));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(m.gram(i, j) * m.gram(i, j) <= m.gram(i, i) * m.gram(j, j) * (1 + 1e-10));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gram);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("singular grids are rejected") {
  const Domain d = Domain::interval(1.0);
  CHECK_THROWS_AS(build_covariance(d, interval_grid({0.2, 0.4, 0.2})), Error);
  CHECK_THROWS_AS(build_covariance(d, interval_grid({0.0, 0.4})), Error);
  CHECK_THROWS_AS(build_covariance(d, {}), Error);
  try {
    build_covariance(d, interval_grid({0.3, 0.3}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModelSingular);
  }
}

TEST_CASE("samples are reproducible slices of one sequence") {
  const CovarianceModel m = build_covariance(Domain::interval(1.0), interval_grid({0.1, 0.5, 0.9}));
  const FieldSample a = sample(m, 2, 10, 77);
  const FieldSample b = sample(m, 2, 10, 77);
  const FieldSample tail = sample(m, 2, 4, 77, 6);
  CHECK(a.values == b.values);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t c = 0; c < 2; ++c) CHECK(tail.at(j, p, c) == a.at(j + 6, p, c));
  CHECK(sample(m, 2, 10, 78).values != a.values);
}

TEST_CASE("empirical covariance is within five standard errors") {
  const auto grid = interval_grid({0.1, 0.3, 0.5, 0.7, 0.9});
  const CovarianceModel m = build_covariance(Domain::interval(1.0), grid);
  for (bool exact : {false, true}) {
    const FieldSample s = exact ? sample_1d_exact(1.0, grid, 1, 8000, 3) : sample(m, 1, 8000, 3);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i; j < grid.size(); ++j) {
        std::vector<double> prod(s.n);
        for (std::size_t t = 0; t < s.n; ++t) prod[t] = s.at(t, i, 0) * s.at(t, j, 0);
        const MeanSe ms = mean_se(prod);
        CHECK(std::abs(ms.mean - m.gram(i, j)) < 5 * ms.se);
      }
  }
}

TEST_CASE("Brownian representation vanishes at the endpoints") {
  const auto grid = interval_grid({0.0, 0.37, 2.0});
  const FieldSample s = sample_1d_exact(2.0, grid, 2, 50, 1);
  for (std::size_t t = 0; t < s.n; ++t)
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(std::abs(s.at(t, 0, c)) < 1e-15);
      CHECK(std::abs(s.at(t, 2, c)) < 1e-12);
    }
}

TEST_CASE("densities") {
  const std::vector<double> z{0.1, -0.2};
  CHECK(marginal_density(0.5, z) == doctest::Approx(std::exp(-0.05 / (2 * 0.5)) / (2 * std::numbers::pi * 0.5)));
  // Integrating the joint density over z2 returns the marginal of z1 (d = 1, trapezoids).
  const PairGeometry pg = pair_geometry(Domain::interval(1.0), SpatialPoint{0.3}, SpatialPoint{0.6});
  const double z1 = 0.07;
  double acc = 0.0;
  const double h = 1e-3;
  for (double t = -1.5; t <= 1.5; t += h) {
    const double a[1] = {z1}, b[1] = {t};
    acc += joint_density(pg, a, b) * h;
  }
  const double a1[1] = {z1};
  CHECK(acc == doctest::Approx(marginal_density(pg.sigma1_sq, a1)).epsilon(1e-6));
}

TEST_CASE("marginal density sandwich holds on a compact subinterval") {
  const DensitySandwich s = marginal_density_sandwich(Domain::interval(1.0), ScanRegion::interval(0.2, 0.8), 1.0, 2);
  CHECK(s.holds());
  CHECK(s.sigma_min_sq == doctest::Approx(cf::sigma_sq(1.0, 0.2)));
  CHECK(s.sigma_max_sq == doctest::Approx(1.0 / 48.0));
}

TEST_CASE("joint density bound is finite on the interval") {
  JointBoundOptions o;
  o.pairs = 40;
  const auto r = joint_density_bound_check(Domain::interval(1.0), ScanRegion::interval(0.2, 0.8), 1.0, 2, o);
  CHECK(r.bounded());
  CHECK_THROWS_AS(
      joint_density_bound_check(Domain::unit_ball(2), ScanRegion::centered_ball(0.5), 1.0, 2, o), Error);
}

TEST_CASE("modulus statistics and helpers") {
  const auto grid = interval_grid({0.2, 0.3, 0.4, 0.5, 0.6});
  const CovarianceModel m = build_covariance(Domain::interval(1.0), grid);
  const FieldSample s = sample(m, 2, 200, 5);
  const ModulusSummary ms = modulus_diagnostic(s, 1.0);
  CHECK(ms.draws == 200);
  CHECK(ms.median <= ms.q90);
  CHECK(ms.q90 <= ms.q99);
  CHECK(neighbour_increments(s).size() == 200);
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == doctest::Approx(2.0));
  const std::string csv = to_csv(s);
  CHECK(csv.rfind("draw,x1,v1,v2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 200 * 5);
}
