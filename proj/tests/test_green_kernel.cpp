#include <doctest.h>

#include <spoisson/errors.hpp>
#include <spoisson/green_kernel.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace spoisson;

namespace {

SpatialPoint random_in_ball(std::mt19937_64& gen, int k, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    SpatialPoint p(k);
    for (int i = 0; i < k; ++i) p[i] = radius * u(gen);
    if (p.norm() < radius) return p;
  }
}

// Five-point (seven-point in 3D) Laplacian of y -> G(x, y).
double laplacian(const Domain& dom, const SpatialPoint& x, const SpatialPoint& y, double h) {
  double acc = 0.0;
  const double g0 = green(dom, x, y).g;
  for (int a = 0; a < dom.dim(); ++a) {
    SpatialPoint e(dom.dim());
    e[a] = h;
    acc += green(dom, x, y + e).g + green(dom, x, y - e).g - 2.0 * g0;
  }
  return acc / (h * h);
}

}  // namespace

TEST_CASE("interval kernel matches min(x, y) - xy/b") {
  const Domain dom = Domain::interval(2.0);
  const auto v = green(dom, SpatialPoint{0.5}, SpatialPoint{1.5});
  CHECK(v.l_part == doctest::Approx(0.5));
  CHECK(v.s_part == doctest::Approx(0.375));
  CHECK(v.g == doctest::Approx(0.125));
  CHECK(green(Domain::interval(1.0), SpatialPoint{0.25}, SpatialPoint{0.75}).g == doctest::Approx(0.0625));
  CHECK(green(Domain::interval(1.0), SpatialPoint{0.5}, SpatialPoint{0.5}).g == doctest::Approx(0.25));
}

TEST_CASE("ball kernels at the centre reduce to the radial fundamental solution") {
  const double pi = std::numbers::pi;
  const SpatialPoint o2(2), o3(3);
  CHECK(green(Domain::unit_ball(2), o2, SpatialPoint{0.5, 0.0}).g == doctest::Approx(std::log(0.5) / (2 * pi)));
  CHECK(green(Domain::unit_ball(3), o3, SpatialPoint{0.5, 0.0, 0.0}).g == doctest::Approx(1.0 / (4 * pi)));
  CHECK(positive_green(Domain::unit_ball(2), o2, SpatialPoint{0.5, 0.0}) > 0.0);
}

TEST_CASE("kernel vanishes on the boundary") {
  CHECK(green(Domain::interval(1.0), SpatialPoint{0.3}, SpatialPoint{1.0}).g == doctest::Approx(0.0));
  CHECK(green(Domain::interval(1.0), SpatialPoint{0.3}, SpatialPoint{0.0}).g == 0.0);
  CHECK(std::abs(green(Domain::unit_ball(2), SpatialPoint{0.2, 0.1}, SpatialPoint{0.6, 0.8}).g) < 1e-14);
  CHECK(std::abs(green(Domain::unit_ball(3), SpatialPoint{0.2, 0.1, -0.3}, SpatialPoint{0.0, 0.6, 0.8}).g) < 1e-14);
}

TEST_CASE("symmetry and sign on random interior pairs") {
  std::mt19937_64 gen(11);
  for (int k = 1; k <= 3; ++k) {
    const Domain dom = k == 1 ? Domain::interval(1.0) : Domain::unit_ball(k);
    for (int i = 0; i < 200; ++i) {
      SpatialPoint x, y;
      if (k == 1) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        x = SpatialPoint{u(gen)};
        y = SpatialPoint{u(gen)};
      } else {
        x = random_in_ball(gen, k, 0.99);
        y = random_in_ball(gen, k, 0.99);
      }
      const double gxy = green(dom, x, y).g;
      const double gyx = green(dom, y, x).g;
      CHECK(gxy == doctest::Approx(gyx).epsilon(1e-12));
      CHECK(positive_green(dom, x, y) >= 0.0);
      if (k == 2) CHECK(gxy <= 0.0);
    }
  }
}

TEST_CASE("kernel is harmonic away from the pole") {
  for (int k = 2; k <= 3; ++k) {
    const Domain dom = Domain::unit_ball(k);
    SpatialPoint x(k), y(k);
    x[0] = 0.3;
    y[0] = -0.2;
    y[1] = 0.4;
    const double h = 1e-3;
    const double scale = std::abs(green(dom, x, y).g) / (h * h);
    CHECK(std::abs(laplacian(dom, x, y, h)) < 1e-5 * scale);
  }
}

TEST_CASE("second derivative of the interval kernel is a point mass") {
  const Domain dom = Domain::interval(1.0);
  const double h = 1e-4, x = 0.4;
  const auto g = [&](double y) { return green(dom, SpatialPoint{x}, SpatialPoint{y}).g; };
  CHECK(std::abs(g(0.7 + h) + g(0.7 - h) - 2 * g(0.7)) < 1e-12);
  const double jump = (g(x + h) - g(x)) / h - (g(x) - g(x - h)) / h;
  CHECK(jump == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("image modulus") {
  std::mt19937_64 gen(3);
  for (int k = 2; k <= 3; ++k)
    for (int i = 0; i < 100; ++i) {
      const SpatialPoint x = random_in_ball(gen, k, 1.0);
      const SpatialPoint y = random_in_ball(gen, k, 1.0);
      CHECK(image_modulus(k, x, y) == doctest::Approx(image_modulus_literal(x, y)).epsilon(1e-10));
      CHECK(image_modulus(k, x, x) == doctest::Approx(1.0 - x.norm_sq()).epsilon(1e-12));
      CHECK(image_modulus(k, x, y) >= 1.0 - x.norm() * y.norm() - 1e-15);
    }
  CHECK_THROWS_AS(image_modulus_literal(SpatialPoint{0.1, 0.2}, SpatialPoint{0.0, 0.0}), Error);
}

TEST_CASE("argument validation") {
  const Domain d3 = Domain::unit_ball(3);
  try {
    green(d3, SpatialPoint{0.1, 0.0, 0.0}, SpatialPoint{0.1, 0.0, 0.0});
    FAIL("expected a diagonal singularity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DiagonalSingularity);
  }
  CHECK_THROWS_AS(green(d3, SpatialPoint{0.9, 0.9, 0.0}, SpatialPoint{0.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(green(d3, SpatialPoint{0.1, 0.0}, SpatialPoint{0.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(green(Domain::interval(1.0), SpatialPoint{1.5}, SpatialPoint{0.5}), Error);
  CHECK_THROWS_AS(Domain::interval(-1.0), Error);
  CHECK_THROWS_AS(Domain::unit_ball(4), Error);
  CHECK_THROWS_AS(fundamental(2, 0.0), Error);
  CHECK(green(Domain::interval(1.0), SpatialPoint{0.5}, SpatialPoint{0.5}).g > 0.0);
}

TEST_CASE("probe grid respects the margin") {
  const auto g1 = probe_grid(Domain::interval(1.0), 5, 0.1);
  REQUIRE(g1.size() == 5);
  CHECK(g1.front()[0] == doctest::Approx(0.1));
  CHECK(g1.back()[0] == doctest::Approx(0.9));
  const Domain d2 = Domain::unit_ball(2);
  const auto g2 = probe_grid(d2, 9, 0.25);
  CHECK(!g2.empty());
  for (const auto& p : g2) CHECK(boundary_distance(d2, p) >= 0.25 - 1e-12);
  CHECK_THROWS_AS(probe_grid(Domain::interval(1.0), 5, 0.6), Error);
  CHECK_THROWS_AS(probe_grid(Domain::interval(1.0), 1, 0.1), Error);
}
