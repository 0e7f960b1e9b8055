#include <doctest.h>

#include <spoisson/errors.hpp>
#include <spoisson/potential_theory.hpp>

#include <cmath>
#include <limits>

using namespace spoisson;

TEST_CASE("codimension and the critical dimension") {
  CHECK(codimension(1, 2) == doctest::Approx(1.0));
  CHECK(codimension(3, 4) == doctest::Approx(-2.0));
  CHECK(codimension(2, 3, 0.05) == doctest::Approx(3.0 - 2.0 / 0.95));
  CHECK(is_critical_dimension(1, 1));
  CHECK(is_critical_dimension(3, 6));
  CHECK(!is_critical_dimension(1, 2));
}

TEST_CASE("target distances") {
  const TargetSet b = TargetSet::ball({0.0, 0.0}, 1.0);
  const double inside[2] = {0.5, 0.0}, outside[2] = {3.0, 4.0};
  CHECK(b.distance(inside) == 0.0);
  CHECK(b.distance(outside) == doctest::Approx(4.0));
  const TargetSet box = TargetSet::box({0.0, 0.0}, {1.0, 1.0});
  const double corner[2] = {2.0, 2.0};
  CHECK(box.distance(corner) == doctest::Approx(std::sqrt(2.0)));
  const TargetSet pts = TargetSet::point_set({{0.0, 0.0}, {1.0, 0.0}});
  CHECK(pts.distance(inside) == doctest::Approx(0.5));
  CHECK(!TargetSet::whole_space(2).bounded());
  CHECK(TargetSet::whole_space(2).distance(corner) == 0.0);
}

TEST_CASE("Hausdorff measure") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(hausdorff_measure(TargetSet::ball({0.0, 0.0}, 0.1), 1.0) == doctest::Approx(0.2));
  CHECK(hausdorff_measure(TargetSet::ball({0.0, 0.0}, 0.1), 0.0) == inf);
  CHECK(hausdorff_measure(TargetSet::point_set({{0.3, 0.3}}), 1.0) == 0.0);
  CHECK(hausdorff_measure(TargetSet::box({0.0, 0.0}, {1.0, 1.0}), 1.0) == inf);
  // A segment discretised as a point cloud has finite one-dimensional content of the order of its length.
  std::vector<std::vector<double>> seg;
  for (int i = 0; i <= 64; ++i) seg.push_back({i / 64.0, 0.0});
  const double h = hausdorff_measure(TargetSet::point_set(seg), 1.0);
  CHECK(h > 0.5);
  CHECK(h < 3.0);
}

TEST_CASE("capacity scales like r^beta") {
  for (double beta : {0.5, 1.0}) {
    const double c1 = riesz_capacity(TargetSet::ball({0.0, 0.0}, 0.05), beta);
    const double c2 = riesz_capacity(TargetSet::ball({0.0, 0.0}, 0.1), beta);
    CHECK(c2 / c1 == doctest::Approx(std::pow(2.0, beta)).epsilon(0.02));
  }
  CHECK(riesz_capacity(TargetSet::ball({0.0, 0.0}, 0.1), -1.0) == 1.0);
}

TEST_CASE("capacity is monotone under inclusion and the solver converges") {
  const double small = riesz_capacity(TargetSet::ball({0.0, 0.0}, 0.05), 1.0);
  const double big = riesz_capacity(TargetSet::ball({0.0, 0.0}, 0.2), 1.0);
  CHECK(small < big);
  const CapacityResult r = riesz_capacity_detail(TargetSet::ball({0.0, 0.0}, 0.1), 1.0);
  CHECK(r.relative_gap <= 1e-8);
  CHECK(r.capacity == doctest::Approx(1.0 / r.energy));
  CapacityOptions tight;
  tight.max_iterations = 3;
  CHECK_THROWS_AS(riesz_capacity_detail(TargetSet::ball({0.0, 0.0}, 0.1), 1.0, tight), BudgetExceeded);
}

TEST_CASE("capacity of two points follows from the two-point energy") {
  // Equal weights are optimal; energy = (reg^-beta + r^-beta) / 2.
  const double r = 0.4, reg = 0.01;
  CapacityOptions o;
  o.reg = reg;
  const auto res = riesz_capacity_detail(TargetSet::point_set({{0.0, 0.0}, {r, 0.0}}), 1.0, o);
  CHECK(res.capacity == doctest::Approx(2.0 / (1.0 / reg + 1.0 / r)).epsilon(1e-6));
}

namespace {

CovarianceModel small_model() {
  std::vector<SpatialPoint> grid;
  for (int i = 0; i < 201; ++i) grid.push_back(SpatialPoint{0.2 + 0.6 * i / 200.0});
  return build_covariance(Domain::interval(1.0), grid);
}

}  // namespace

TEST_CASE("hitting probabilities are ordered for nested targets") {
  const CovarianceModel m = small_model();
  std::vector<TargetSet> targets;
  for (double r : {0.02, 0.05, 0.1, 0.2}) targets.push_back(TargetSet::ball({0.05, 0.05}, r));
  targets.push_back(TargetSet::whole_space(2));
  const auto reps = hit_probability(m, 2, targets, 2000, 4);
  for (std::size_t i = 0; i + 2 < reps.size(); ++i) CHECK(reps[i].hits <= reps[i + 1].hits);
  CHECK(reps.back().p_hat == 1.0);
  for (const auto& r : reps) {
    CHECK(r.ci_low <= r.p_hat);
    CHECK(r.p_hat <= r.ci_high);
    CHECK(r.hits_no_margin <= r.hits);
  }
  const auto again = hit_probability(m, 2, targets, 2000, 4);
  for (std::size_t i = 0; i < reps.size(); ++i) CHECK(again[i].hits == reps[i].hits);
}

TEST_CASE("a far target is almost never hit") {
  const CovarianceModel m = small_model();
  const auto r = hit_probability(m, 2, TargetSet::ball({3.0, 3.0}, 0.1), 1000, 1);
  CHECK(r.hits == 0);
}

TEST_CASE("polarity scan refuses the critical dimension") {
  const CovarianceModel m = small_model();
  try {
    polarity_scan(m, 1, {0.0}, {0.1, 0.05}, 100, 1);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CriticalDimension);
    CHECK(std::string(e.what()) == kCriticalDimensionNotice);
    CHECK(exit_code_for(e.code()) == kExitCriticalDimension);
  }
  CHECK_THROWS_AS(polarity_scan(m, 2, {0.0, 0.0}, {0.05, 0.1}, 100, 1), Error);
  const PolarityReport pr = polarity_scan(m, 2, {0.05, 0.05}, {0.1, 0.05, 0.025}, 2000, 1);
  CHECK(pr.beta == doctest::Approx(1.0));
  CHECK(pr.slope > 0.5);
  CHECK(pr.verdict.find("polar") != std::string::npos);
}

TEST_CASE("Sandwich summary and CSV") {
  std::vector<HitProbReport> reps(2);
  reps[0].p_hat = 0.1;
  reps[0].capacity_value = 0.01;
  reps[0].hausdorff_value = 0.05;
  reps[0].ratio_capacity = 10.0;
  reps[0].ratio_hausdorff = 2.0;
  reps[1].p_hat = 0.2;
  reps[1].capacity_value = 0.04;
  reps[1].hausdorff_value = 0.1;
  reps[1].ratio_capacity = 5.0;
  reps[1].ratio_hausdorff = 2.0;
  const SandwichSummary s = sandwich_report(reps);
  CHECK(s.capacity_window == doctest::Approx(2.0));
  CHECK(s.hausdorff_window == doctest::Approx(1.0));
  const std::string csv = radius_sweep_csv({0.1, 0.2}, reps);
  CHECK(csv.rfind("r,p_hat,ci_low,ci_high,hausdorff,capacity\n", 0) == 0);
}
