#include <doctest.h>

#include <spoisson/errors.hpp>
#include <spoisson/parallel.hpp>
#include <spoisson/rng.hpp>
#include <spoisson/stats.hpp>

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace spoisson;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(Philox::bijection({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox::bijection({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox::bijection({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of seed and counter") {
  Philox a = make_stream(42, StreamTag::FieldSample, 7, 1);
  Philox b = make_stream(42, StreamTag::FieldSample, 7, 1);
  Philox c = make_stream(42, StreamTag::MonteCarlo, 7, 1);
  Philox d = make_stream(43, StreamTag::FieldSample, 7, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
    CHECK(x != d.normal());
  }
}

TEST_CASE("uniform and normal variates have the right law") {
  Philox g = make_stream(1, StreamTag::Probe, 0);
  std::vector<double> u(50'000), z(50'000);
  for (auto& v : u) {
    v = g.uniform();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
  for (auto& v : z) v = g.normal();
  const MeanSe mu = mean_se(u);
  CHECK(std::abs(mu.mean - 0.5) < 5 * mu.se);
  CHECK(sample_variance(u) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  const MeanSe mz = mean_se(z);
  CHECK(std::abs(mz.mean) < 5 * mz.se);
  CHECK(sample_variance(z) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(ks_normal(z).p_value > 1e-3);
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-9));
  CHECK(kolmogorov_sf(1.3580986393225507) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(kolmogorov_sf(0.0) == 1.0);
  CHECK(kolmogorov_sf(5.0) < 1e-20);
}

TEST_CASE("KS rejects a shifted sample") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0.3, 1.0);
  std::vector<double> xs(2000);
  for (auto& x : xs) x = n(gen);
  CHECK(ks_normal(xs).p_value < 1e-6);
}

TEST_CASE("normal cdf") {
  CHECK(standard_normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(standard_normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(standard_normal_cdf(-8.0) > 0.0);
}

TEST_CASE("Wilson interval covers at the nominal rate") {
  std::mt19937_64 gen(8);
  for (double p : {0.02, 0.3}) {
    std::binomial_distribution<std::size_t> bin(200, p);
    int covered = 0;
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
      const auto [lo, hi] = wilson_interval(bin(gen), 200);
      covered += lo <= p && p <= hi;
    }
    CHECK(covered / double(reps) > 0.925);
    CHECK(covered / double(reps) < 0.975);
  }
  const auto [lo0, hi0] = wilson_interval(0, 100);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  const auto [lo1, hi1] = wilson_interval(100, 100);
  CHECK(hi1 == 1.0);
  CHECK(lo1 < 1.0);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v);
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
  y[1] = 0.0;
  CHECK_THROWS_AS(loglog_slope(x, y), Error);
}

TEST_CASE("parallel_for writes every slot and propagates the first failure") {
  for (std::size_t workers : {1u, 3u}) {
    set_worker_count(workers);
    std::vector<std::size_t> out(1000, 0);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
    try {
      parallel_for(100, [](std::size_t i) {
        if (i == 17 || i == 60) throw std::runtime_error("fail " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "fail 17");
    }
  }
  set_worker_count(0);
}
