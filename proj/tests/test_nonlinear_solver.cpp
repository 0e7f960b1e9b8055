#include <doctest.h>

#include <spoisson/errors.hpp>
#include <spoisson/nonlinear_solver.hpp>

#include <cmath>
#include <cstring>
#include <numbers>

using namespace spoisson;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("Poincare constants against known eigenvalues") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(poincare_constant(Domain::interval(1.0), 256) - pi2) < 1e-3);
  CHECK(std::abs(poincare_constant(Domain::interval(2.0), 256) - pi2 / 4) < 1e-3);
  // First zero of J0 squared.
  CHECK(std::abs(poincare_constant(Domain::unit_ball(2), 256) - 2.404825557695773 * 2.404825557695773) < 1e-3);
  CHECK(std::abs(poincare_constant(Domain::unit_ball(3), 256) - pi2) < 1e-3);
  CHECK_THROWS_AS(poincare_constant(Domain::interval(1.0), 8), Error);
}

TEST_CASE("quadrature weights integrate constants") {
  for (int k = 1; k <= 3; ++k) {
    const Domain dom = k == 1 ? Domain::interval(2.0) : Domain::unit_ball(k);
    const NodeSet ns = quadrature_nodes(dom, 10);
    double w = 0.0;
    for (double v : ns.weights) w += v;
    if (k == 1)
      CHECK(w == doctest::Approx(2.0 * 10.0 / 11.0));
    else
      CHECK(w == doctest::Approx(dom.volume()).epsilon(1e-12));
  }
}

TEST_CASE("nonlinearity specs satisfy their structural conditions") {
  for (const auto& spec : {zero_nonlinearity(2), linear_nonlinearity(2, 1.5), linear_nonlinearity(2, -0.5),
                           arctan_nonlinearity(2), sine_nonlinearity(2, 3.0)}) {
    const SpecCheck c = check_spec(spec, 500, 1);
    CHECK(c.decomposition_error < 1e-14);
    CHECK(c.lipschitz_excess <= 1e-12);
    CHECK(c.monotonicity_defect <= 1e-12);
  }
}

TEST_CASE("deterministic part solves the Poisson problem with unit forcing") {
  const DiscreteSystem s =
      assemble(Domain::interval(1.0), 63, [](const SpatialPoint&) { return std::vector<double>{1.0}; },
               Eigen::MatrixXd(), 1, 1);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const double x = s.grid[i][0];
    CHECK(s.deterministic[i] == doctest::Approx(0.5 * x * (1 - x)).epsilon(1e-12));
  }
}

TEST_CASE("mild solutions on the interval") {
  SystemSpec ss;
  ss.resolution = 48;
  ss.d = 2;
  const SystemFamily family(ss);
  const DiscreteSystem sys = family.system(3, 0);

  SUBCASE("f = 0 returns the noise bit for bit") {
    const SolveResult r = solve_mild(sys, zero_nonlinearity(2));
    const FieldSample fs = sample(family.covariance(), 2, 1, 3, 0);
    REQUIRE(r.u.size() == fs.values.size());
    CHECK(std::memcmp(r.u.data(), fs.values.data(), r.u.size() * sizeof(double)) == 0);
  }
  SUBCASE("linear f agrees with a dense solve") {
    const SolveResult r = solve_mild(sys, linear_nonlinearity(2, 2.0));
    const auto n = static_cast<Eigen::Index>(sys.grid.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (int q = 0; q < 2; ++q) A(2 * i + q, 2 * j + q) += 2.0 * sys.K(i, j);
    const Eigen::VectorXd x = A.lu().solve(Eigen::Map<const Eigen::VectorXd>(sys.b_vec.data(), 2 * n));
    CHECK(sup_diff(r.u, std::vector<double>(x.data(), x.data() + x.size())) < 1e-10);
  }
  SUBCASE("arctan converges from several starts with Newton and the fixed point") {
    const NemytskiiSpec f = arctan_nonlinearity(2);
    const SolveResult a = solve_mild(sys, f);
    CHECK(a.residual < 1e-10);
    CHECK(residual(sys, f, a.u) == doctest::Approx(a.residual).epsilon(1e-6).scale(1e-12));
    SolverConfig far;
    far.initial.assign(sys.b_vec.size(), -4.0);
    CHECK(sup_diff(solve_mild(sys, f, far).u, a.u) < 1e-9);
    SolverConfig fp;
    fp.use_newton = false;
    const SolveResult b = solve_mild(sys, f, fp);
    CHECK(b.residual < 1e-10);
    CHECK(sup_diff(b.u, a.u) < 1e-9);
  }
  SUBCASE("Lipschitz perturbations below the Poincare constant converge") {
    const SolveResult r = solve_mild(sys, sine_nonlinearity(2, 0.5 * sys.a));
    CHECK(r.residual < 1e-10);
    CHECK(r.theta0 == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("L >= a is rejected") {
    try {
      solve_mild(sys, sine_nonlinearity(2, sys.a));
      FAIL("expected a monotonicity violation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MonotonicityViolation);
      CHECK(exit_code_for(e.code()) == kExitMonotonicity);
    }
  }
  SUBCASE("an iteration budget that is too small is reported") {
    SolverConfig c;
    c.max_iterations = 1;
    c.use_newton = false;
    CHECK_THROWS_AS(solve_mild(sys, sine_nonlinearity(2, 0.9 * sys.a), c), NonConvergence);
  }
}

TEST_CASE("discrete Green operator keeps the coercivity of the Laplacian inverse") {
  SystemSpec ss;
  ss.resolution = 64;
  ss.d = 1;
  const SystemFamily family(ss);
  const DiscreteSystem sys = family.system(1, 0);
  std::vector<double> phi(sys.grid.size()), sine(sys.grid.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = 1.0 + sys.grid[i][0];
    sine[i] = std::sin(std::numbers::pi * sys.grid[i][0]);
  }
  CHECK(property_p_ratio(sys, phi) >= 0.99 * sys.a);
  CHECK(property_p_ratio(sys, sine) == doctest::Approx(sys.a).epsilon(1e-3));
}

TEST_CASE("noise covariance and rank checks") {
  SystemSpec ss;
  ss.resolution = 16;
  ss.d = 2;
  ss.sigma = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(SystemFamily{ss}, Error);
  ss.sigma = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(SystemFamily{ss}, Error);
}

TEST_CASE("moment and Hoelder estimates") {
  SystemSpec ss;
  ss.resolution = 32;
  ss.d = 1;
  const SystemFamily family(ss);
  const MomentEstimate m = moment_estimate(family, arctan_nonlinearity(1), 2, 400, 2);
  CHECK(m.draws == 400);
  CHECK(m.l2_norm_moment > 0.0);
  CHECK(std::isfinite(m.sup_point_moment));
  // For f = 0, E ||v||^2 = sum_i w_i sigma^2(x_i).
  const MomentEstimate z = moment_estimate(family, zero_nonlinearity(1), 2, 4000, 2);
  double expected = 0.0;
  const DiscreteSystem sys = family.system(1, 0);
  for (std::size_t i = 0; i < sys.grid.size(); ++i)
    expected += sys.weights[i] * closed_form::sigma_sq(1.0, sys.grid[i][0]);
  CHECK(std::abs(z.l2_norm_moment - expected) < 5 * z.l2_norm_se);
  CHECK_THROWS_AS(moment_estimate(family, zero_nonlinearity(1), 3, 10, 1), Error);

  std::vector<PointPair> pairs;
  for (double s : {0.01, 0.02, 0.04, 0.08}) pairs.push_back({SpatialPoint{0.5 - s / 2}, SpatialPoint{0.5 + s / 2}});
  const HolderEstimate h = holder_estimate(Domain::interval(1.0), zero_nonlinearity(1), pairs, 2, 4000, 6);
  CHECK(h.expected == 2.0);
  CHECK(std::abs(h.slope - 2.0) < 0.2);
}

TEST_CASE("marginal smoothness diagnostics") {
  SystemSpec ss;
  ss.resolution = 0;
  ss.extra_points = {SpatialPoint{0.5}};
  ss.d = 1;
  const SystemFamily family(ss);
  std::vector<double> vals;
  for (std::size_t j = 0; j < 2000; ++j) vals.push_back(family.system(9, j).noise[0]);
  const MarginalSmoothness ms = marginal_smoothness_diagnostic(vals);
  CHECK(ms.atomless);
  CHECK(ms.ks_p_value > 1e-3);
  CHECK(ms.kde_at_mean > 0.0);
  const MarginalSmoothness atom = marginal_smoothness_diagnostic(std::vector<double>(1000, 1.0));
  CHECK(!atom.atomless);
}
