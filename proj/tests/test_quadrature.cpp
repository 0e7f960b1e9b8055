#include <doctest.h>

#include <spoisson/errors.hpp>
#include <spoisson/quadrature.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

using namespace spoisson;

namespace {

// Five-point Gauss-Legendre is exact for the piecewise quartic integrands of the
// interval, so splitting at the kinks gives an exact oracle.
double gauss5(double a, double b, const std::function<double(double)>& f) {
  static const std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                       0.9061798459386640};
  static const std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                       0.2369268850561891, 0.2369268850561891};
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += w[i] * f(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
  return 0.5 * (b - a) * s;
}

double piecewise_exact(double b, std::vector<double> kinks, const std::function<double(double)>& f) {
  kinks.push_back(0.0);
  kinks.push_back(b);
  std::sort(kinks.begin(), kinks.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < kinks.size(); ++i) s += gauss5(kinks[i], kinks[i + 1], f);
  return s;
}

double g1(double b, double x, double y) { return std::min(x, y) - x * y / b; }

}  // namespace

TEST_CASE("interval integrals agree with piecewise exact integration") {
  for (double b : {1.0, 2.5}) {
    const Domain dom = Domain::interval(b);
    for (auto [x1, x2] : {std::pair{0.1, 0.3}, {0.25, 0.75}, {0.5, 0.5001}, {0.9, 0.05}}) {
      x1 *= b;
      x2 *= b;
      const double s = piecewise_exact(b, {x1}, [&](double y) { return g1(b, x1, y) * g1(b, x1, y); });
      const double c = piecewise_exact(b, {x1, x2}, [&](double y) { return g1(b, x1, y) * g1(b, x2, y); });
      const double dd = piecewise_exact(b, {x1, x2}, [&](double y) {
        const double t = g1(b, x1, y) - g1(b, x2, y);
        return t * t;
      });
      const SpatialPoint p1{x1}, p2{x2};
      CHECK(norm_sq(dom, p1, 1e-10) == doctest::Approx(s).epsilon(1e-9));
      CHECK(gram_entry(dom, p1, p2, 1e-10) == doctest::Approx(c).epsilon(1e-9));
      CHECK(increment_norm_sq(dom, p1, p2, 1e-10) == doctest::Approx(dd).epsilon(1e-8));
    }
  }
}

TEST_CASE("centre variances of the disk and the ball") {
  const double pi = std::numbers::pi;
  CHECK(norm_sq(Domain::unit_ball(2), SpatialPoint{0.0, 0.0}, 1e-8) == doctest::Approx(1.0 / (8 * pi)).epsilon(1e-7));
  CHECK(norm_sq(Domain::unit_ball(3), SpatialPoint{0.0, 0.0, 0.0}, 1e-7) ==
        doctest::Approx(1.0 / (12 * pi)).epsilon(1e-6));
}

TEST_CASE("variance depends only on the radius") {
  const Domain d3 = Domain::unit_ball(3);
  const double a = norm_sq(d3, SpatialPoint{0.4, 0.0, 0.0}, 1e-7);
  const double b = norm_sq(d3, SpatialPoint{0.0, 0.0, -0.4}, 1e-7);
  const double c = norm_sq(d3, SpatialPoint{0.4 / std::sqrt(3.0), 0.4 / std::sqrt(3.0), 0.4 / std::sqrt(3.0)}, 1e-7);
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
  CHECK(a == doctest::Approx(c).epsilon(1e-6));
  const Domain d2 = Domain::unit_ball(2);
  CHECK(norm_sq(d2, SpatialPoint{0.6, 0.0}, 1e-8) ==
        doctest::Approx(norm_sq(d2, SpatialPoint{0.0, -0.6}, 1e-8)).epsilon(1e-7));
}

TEST_CASE("polarisation: the increment integral equals s1 + s2 - 2 cov") {
  for (int k = 2; k <= 3; ++k) {
    const Domain dom = Domain::unit_ball(k);
    SpatialPoint x1(k), x2(k);
    x1[0] = 0.3;
    x2[0] = 0.25;
    x2[1] = -0.4;
    const double tol = k == 2 ? 1e-8 : 1e-6;
    const double s1 = norm_sq(dom, x1, tol), s2 = norm_sq(dom, x2, tol), c = gram_entry(dom, x1, x2, tol);
    const double dd = increment_norm_sq(dom, x1, x2, tol);
    CHECK(dd == doctest::Approx(s1 + s2 - 2 * c).epsilon(10 * tol));
    CHECK(std::abs(c) <= std::sqrt(s1 * s2));
  }
}

TEST_CASE("close pairs keep the increment accurate") {
  const Domain d = Domain::interval(1.0);
  const SpatialPoint a{0.5}, b{0.5 + 1e-5};
  const double dd = increment_norm_sq(d, a, b, 1e-10);
  const double exact = piecewise_exact(1.0, {0.5, 0.5 + 1e-5}, [](double y) {
    const double t = g1(1.0, 0.5, y) - g1(1.0, 0.5 + 1e-5, y);
    return t * t;
  });
  CHECK(dd == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("generic integrate reproduces polynomial moments") {
  const Domain d3 = Domain::unit_ball(3);
  const auto one = integrate(d3, [](const SpatialPoint&) { return 1.0; }, {}, 1e-10);
  CHECK(one.value == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-9));
  const auto r2 = integrate(Domain::unit_ball(2), [](const SpatialPoint& y) { return y.norm_sq(); }, {}, 1e-10);
  CHECK(r2.value == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-9));
}

TEST_CASE("default tolerances") {
  CHECK(default_rel_tol(Domain::interval(1.0)) == 1e-7);
  CHECK(default_rel_tol(Domain::unit_ball(2)) == 1e-7);
  CHECK(default_rel_tol(Domain::unit_ball(3)) == 1e-5);
}

TEST_CASE("an exhausted budget is reported with the best estimate") {
  const Domain d3 = Domain::unit_ball(3);
  try {
    gram_entry(d3, SpatialPoint{0.3, 0.1, 0.0}, SpatialPoint{-0.2, 0.4, 0.1}, 1e-11, 500);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.best_estimate() > 0.0);
    CHECK(exit_code_for(e.code()) == kExitBudget);
  }
}
