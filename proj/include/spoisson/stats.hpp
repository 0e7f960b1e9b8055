#pragma once

#include <span>
#include <utility>
#include <vector>

namespace spoisson {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and its standard error.
MeanSe mean_se(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

/// 95% Wilson score interval for `hits` successes in `n` trials.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

double standard_normal_cdf(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1), asymptotic p-value with
/// Stephens' small-sample correction.
KsResult ks_normal(std::vector<double> xs);
/// Asymptotic Kolmogorov survival function P(K > t).
double kolmogorov_sf(double t);

/// Least-squares slope of log y against log x; pairs with a nonpositive entry are rejected.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spoisson
