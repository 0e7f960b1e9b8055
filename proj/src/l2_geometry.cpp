#include <spoisson/l2_geometry.hpp>

#include <spoisson/errors.hpp>
#include <spoisson/parallel.hpp>
#include <spoisson/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace spoisson {

PairGeometry make_pair_geometry(double sigma1_sq, double sigma2_sq, double cov, double delta_sq) {
  PairGeometry pg;
  pg.sigma1_sq = sigma1_sq;
  pg.sigma2_sq = sigma2_sq;
  pg.cov = cov;
  pg.delta = std::sqrt(std::max(delta_sq, 0.0));
  const double s1 = std::sqrt(sigma1_sq);
  const double s2 = std::sqrt(sigma2_sq);
  pg.rho = (s1 > 0.0 && s2 > 0.0) ? cov / (s1 * s2) : 0.0;
  pg.m = sigma1_sq > 0.0 ? cov / sigma1_sq : 0.0;
  // The determinant s1^2 s2^2 - cov^2 in product form keeps tau^2 accurate for close points.
  const double d2 = pg.delta * pg.delta;
  const double det = 0.25 * (d2 - (s2 - s1) * (s2 - s1)) * ((s2 + s1) * (s2 + s1) - d2);
  pg.tau_sq = sigma1_sq > 0.0 ? std::max(det, 0.0) / sigma1_sq : sigma2_sq;
  return pg;
}

namespace closed_form {

double sigma_sq(double b, double x) { return x * x * (b - x) * (b - x) / (3.0 * b); }

double cov(double b, double x, double y) {
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  return lo * (b - hi) * (2.0 * b * hi - lo * lo - hi * hi) / (6.0 * b);
}

double delta_sq(double b, double x1, double x2) {
  const double lo = std::min(x1, x2);
  const double hi = std::max(x1, x2);
  const double d = hi - lo;
  // The increment is (d/b) y on [0, lo], affine on [lo, hi] and d (1 - y/b) on [hi, b].
  const double alpha = 1.0 - d / b;
  const double beta = lo * d / b;
  return d * d * lo * lo * lo / (3.0 * b * b) + d * d * (b - hi) * (b - hi) * (b - hi) / (3.0 * b * b) +
         alpha * alpha * d * d * d / 3.0 - alpha * beta * d * d + beta * beta * d;
}

double gap_factor(double b, double x, double y) {
  return std::min(x, y) * (b - std::max(x, y)) * (x - y) * (x - y) / (6.0 * b);
}

}  // namespace closed_form

PairGeometry pair_geometry(const Domain& domain, const SpatialPoint& x1, const SpatialPoint& x2, double rel_tol,
                           std::size_t max_evaluations) {
  domain.require_contains(x1);
  domain.require_contains(x2);
  if (x1 == x2) throw Error(ErrorCode::DegeneratePair, "pair_geometry needs distinct points");
  if (domain.kind() == DomainKind::Interval) {
    const double b = domain.length();
    return make_pair_geometry(closed_form::sigma_sq(b, x1[0]), closed_form::sigma_sq(b, x2[0]),
                              closed_form::cov(b, x1[0], x2[0]), closed_form::delta_sq(b, x1[0], x2[0]));
  }
  const double tol = rel_tol > 0.0 ? rel_tol : default_rel_tol(domain);
  return make_pair_geometry(norm_sq(domain, x1, tol, max_evaluations), norm_sq(domain, x2, tol, max_evaluations),
                            gram_entry(domain, x1, x2, tol, max_evaluations),
                            increment_norm_sq(domain, x1, x2, tol, max_evaluations));
}

double variance_identity_residual(const PairGeometry& pg) {
  const double s1 = std::sqrt(pg.sigma1_sq);
  const double s2 = std::sqrt(pg.sigma2_sq);
  const double d2 = pg.delta * pg.delta;
  const double lhs = pg.sigma1_sq * pg.sigma2_sq - pg.cov * pg.cov;
  const double rhs = 0.25 * (d2 - (s2 - s1) * (s2 - s1)) * ((s2 + s1) * (s2 + s1) - d2);
  return lhs - rhs;
}

bool ScanRegion::contains(const SpatialPoint& x) const noexcept {
  if (ball) return x.norm() <= radius * (1.0 + 1e-12);
  return x[0] >= lo && x[0] <= hi;
}

double ScanRegion::diameter() const noexcept { return ball ? 2.0 * radius : hi - lo; }

std::string ScanRegion::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (ball) os << "closed ball radius " << radius;
  else os << "[" << lo << ", " << hi << "]";
  return os.str();
}

void validate_region(const Domain& domain, const ScanRegion& region) {
  if (domain.kind() == DomainKind::Interval) {
    if (region.ball || !(region.lo > 0.0) || !(region.hi < domain.length()) || !(region.hi > region.lo))
      throw Error(ErrorCode::DegenerateRegion, "scan region must be a nondegenerate closed subinterval of (0, b)");
  } else if (!region.ball || !(region.radius > 0.0) || !(region.radius < 1.0)) {
    throw Error(ErrorCode::DegenerateRegion, "scan region must be a closed ball of radius in (0, 1)");
  }
}

namespace {

std::vector<SpatialPoint> region_lattice(const Domain& domain, const ScanRegion& region, int per_axis) {
  const int k = domain.dim();
  std::vector<SpatialPoint> out;
  if (!region.ball) {
    for (int i = 0; i < per_axis; ++i)
      out.push_back(SpatialPoint::scalar(region.lo + (region.hi - region.lo) * i / (per_axis - 1)));
    return out;
  }
  const double r = region.radius;
  const double h = 2.0 * r / (per_axis - 1);
  std::array<int, 3> idx{0, 0, 0};
  const int total = k == 2 ? per_axis * per_axis : per_axis * per_axis * per_axis;
  for (int n = 0; n < total; ++n) {
    int rem = n;
    for (int a = k - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = rem % per_axis;
      rem /= per_axis;
    }
    SpatialPoint p(k);
    for (int a = 0; a < k; ++a) p[a] = -r + h * idx[static_cast<std::size_t>(a)];
    if (region.contains(p)) out.push_back(p);
  }
  return out;
}

SpatialPoint uniform_in_region(const Domain& domain, const ScanRegion& region, Philox& rng) {
  const int k = domain.dim();
  if (!region.ball) return SpatialPoint::scalar(region.lo + (region.hi - region.lo) * rng.uniform());
  for (;;) {
    SpatialPoint p(k);
    for (int a = 0; a < k; ++a) p[a] = region.radius * (2.0 * rng.uniform() - 1.0);
    if (region.contains(p)) return p;
  }
}

SpatialPoint random_direction(int k, Philox& rng) {
  if (k == 1) return SpatialPoint::scalar(rng.uniform() < 0.5 ? -1.0 : 1.0);
  for (;;) {
    SpatialPoint v(k);
    for (int a = 0; a < k; ++a) v[a] = rng.normal();
    const double n = v.norm();
    if (n > 1e-8) return (1.0 / n) * v;
  }
}

struct Extremes {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t imin = 0, imax = 0;
};

BoundScanReport summarize(const ScanRegion& region, std::string normalizer, const std::vector<PointPair>& pairs,
                          const std::vector<double>& ratios) {
  BoundScanReport rep;
  rep.region = region.describe();
  rep.pair_count = pairs.size();
  rep.normalizer = std::move(normalizer);
  Extremes e;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (std::isnan(ratios[i])) continue;
    if (ratios[i] < e.min) { e.min = ratios[i]; e.imin = i; }
    if (ratios[i] > e.max) { e.max = ratios[i]; e.imax = i; }
  }
  rep.min_ratio = e.min;
  rep.max_ratio = e.max;
  if (!pairs.empty()) {
    rep.argmin = pairs[e.imin];
    rep.argmax = pairs[e.imax];
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    rep.samples.push_back({pairs[i], distance(pairs[i].first, pairs[i].second), ratios[i]});
  return rep;
}

double resolved_tol(const Domain& domain, const ScanOptions& o) {
  return o.rel_tol > 0.0 ? o.rel_tol : default_rel_tol(domain);
}

std::vector<double> sigma_sq_at(const Domain& domain, const std::vector<SpatialPoint>& pts, const ScanOptions& o) {
  std::vector<double> out(pts.size());
  const double tol = resolved_tol(domain, o);
  parallel_for(pts.size(), [&](std::size_t i) {
    out[i] = domain.kind() == DomainKind::Interval ? closed_form::sigma_sq(domain.length(), pts[i][0])
                                                   : norm_sq(domain, pts[i], tol, o.max_evaluations);
  });
  return out;
}

std::vector<double> delta_sq_at(const Domain& domain, const std::vector<PointPair>& pairs, const ScanOptions& o) {
  std::vector<double> out(pairs.size());
  const double tol = resolved_tol(domain, o);
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [a, b] = pairs[i];
    out[i] = domain.kind() == DomainKind::Interval ? closed_form::delta_sq(domain.length(), a[0], b[0])
                                                   : increment_norm_sq(domain, a, b, tol, o.max_evaluations);
  });
  return out;
}

std::vector<SpatialPoint> endpoints(const std::vector<PointPair>& pairs) {
  std::vector<SpatialPoint> pts;
  for (const auto& [a, b] : pairs) {
    pts.push_back(a);
    pts.push_back(b);
  }
  return pts;
}

}  // namespace

std::vector<PointPair> sample_pairs(const Domain& domain, const ScanRegion& region, std::size_t count,
                                    std::uint64_t seed) {
  validate_region(domain, region);
  std::vector<PointPair> out;
  const std::size_t lattice_count = count / 2;
  if (lattice_count > 0) {
    std::vector<SpatialPoint> lat;
    for (int per_axis = 3;; ++per_axis) {
      lat = region_lattice(domain, region, per_axis);
      if (lat.size() * (lat.size() - 1) / 2 >= lattice_count) break;
    }
    std::vector<PointPair> all;
    for (std::size_t i = 0; i < lat.size(); ++i)
      for (std::size_t j = i + 1; j < lat.size(); ++j) all.emplace_back(lat[i], lat[j]);
    // Evenly strided subset of all lattice pairs.
    for (std::size_t i = 0; i < lattice_count; ++i) out.push_back(all[i * all.size() / lattice_count]);
  }
  Philox rng = make_stream(seed, StreamTag::PairSampling, 0);
  const double lmin = std::log(1e-4);
  const double lmax = std::log(region.diameter());
  while (out.size() < count) {
    const double sep = std::exp(lmin + (lmax - lmin) * rng.uniform());
    for (;;) {
      const SpatialPoint x1 = uniform_in_region(domain, region, rng);
      const SpatialPoint x2 = x1 + sep * random_direction(domain.dim(), rng);
      if (region.contains(x2) && !(x2 == x1)) {
        out.emplace_back(x1, x2);
        break;
      }
    }
  }
  return out;
}

bool BoundScanReport::bounded() const noexcept {
  return min_ratio > 0.0 && min_ratio <= max_ratio && std::isfinite(max_ratio);
}

double holder_index(int k, double gamma) {
  switch (k) {
    case 1: return 1.0;
    case 2:
      if (!(gamma > 0.0 && gamma < 0.5)) throw Error(ErrorCode::Usage, "gamma must lie in (0, 0.5)");
      return 1.0 - gamma;
    case 3: return 0.5;
    default: throw Error(ErrorCode::Usage, "spatial dimension must be 1, 2 or 3");
  }
}

std::vector<BoundScanReport> metric_ratio_scan(const Domain& domain, const ScanRegion& region,
                                               const ScanOptions& options) {
  const auto pairs = sample_pairs(domain, region, options.pairs, options.seed);
  const auto d2 = delta_sq_at(domain, pairs, options);
  const std::size_t n = pairs.size();
  std::vector<double> sep(n), lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    sep[i] = distance(pairs[i].first, pairs[i].second);
    lower[i] = std::sqrt(d2[i]) / sep[i];
  }
  const int k = domain.dim();
  std::vector<BoundScanReport> out;
  if (k == 1) {
    auto rep = summarize(region, "|x1-x2|", pairs, lower);
    const double b = domain.length();
    rep.paper_constants = {{"stated_lower_constant", std::sqrt(b / 3.0)}, {"stated_upper_constant", std::sqrt(7.0 * b / 3.0)}};
    std::size_t below = 0;
    for (double r : lower) below += r < std::sqrt(b / 3.0) ? 1 : 0;
    rep.extras = {{"pairs_below_stated_lower", static_cast<double>(below)}};
    out.push_back(std::move(rep));
    return out;
  }
  const double r0 = region.radius;
  if (k == 3) {
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) ratio[i] = std::sqrt(d2[i] / sep[i]);
    auto rep = summarize(region, "|x1-x2|^(1/2)", pairs, ratio);
    const double c1 = std::min({(1.0 - r0) / (2.0 * r0), 1.0 / 19.0, std::pow(1.0 - r0, 4)});
    rep.paper_constants = {{"lower_shape_c1_sqrt", std::sqrt(c1)},
                           {"lower_constant_from_proof", std::sqrt(c1 / (38.0 * 8.0 * std::numbers::pi))},
                           {"upper_shape", 1.0 / ((1.0 - r0) * (1.0 - r0))}};
    rep.extras = {{"max_over_min", rep.max_ratio / rep.min_ratio}};
    out.push_back(std::move(rep));
    return out;
  }
  std::vector<double> gap(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = std::log(sep[i]);
    const double factor = std::sqrt(std::abs(l * l - l + 1.0));
    upper[i] = lower[i] / factor;
    gap[i] = factor;
  }
  auto lo = summarize(region, "|x1-x2|", pairs, lower);
  lo.paper_constants = {{"lower_scale_pi^-1/2", 1.0 / std::sqrt(std::numbers::pi)}};
  auto up = summarize(region, "|x1-x2| |log^2|x1-x2| - log|x1-x2| + 1|^(1/2)", pairs, upper);
  up.paper_constants = {{"upper_shape", 1.0 / ((1.0 - r0) * (1.0 - r0))},
                        {"upper_scale_pi^-1/2", 1.0 / std::sqrt(std::numbers::pi)}};
  const auto [gmin, gmax] = std::minmax_element(gap.begin(), gap.end());
  up.extras = {{"normalizer_gap_min", *gmin},
               {"normalizer_gap_max", *gmax},
               {"lower_over_upper_ratio_window", (lo.max_ratio / lo.min_ratio) / (up.max_ratio / up.min_ratio)}};
  out.push_back(std::move(lo));
  out.push_back(std::move(up));
  return out;
}

BoundScanReport sigma_modulus_scan(const Domain& domain, const ScanRegion& region, const ScanOptions& options) {
  const double xi = holder_index(domain.dim(), options.gamma);
  const auto pairs = sample_pairs(domain, region, options.pairs, options.seed);
  const auto s2 = sigma_sq_at(domain, endpoints(pairs), options);
  const auto d2 = delta_sq_at(domain, pairs, options);
  std::vector<double> ratio(pairs.size());
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double ds = std::abs(std::sqrt(s2[2 * i]) - std::sqrt(s2[2 * i + 1]));
    ratio[i] = ds / std::pow(distance(pairs[i].first, pairs[i].second), xi);
    const double delta = std::sqrt(d2[i]);
    const double slack = ds - delta;
    // Quadrature noise allowance.
    if (slack > 1e-6 * std::max(delta, std::sqrt(s2[2 * i]))) ++violations;
    worst = std::max(worst, slack);
  }
  std::ostringstream name;
  name << "|x1-x2|^" << xi;
  auto rep = summarize(region, name.str(), pairs, ratio);
  rep.extras = {{"xi", xi}, {"triangle_violations", static_cast<double>(violations)}, {"max_triangle_slack", worst}};
  return rep;
}

std::vector<BoundScanReport> sigma_sq_increment_scan(const Domain& domain, const ScanRegion& region,
                                                     const std::vector<double>& zetas, const ScanOptions& options) {
  if (domain.kind() != DomainKind::UnitBall || domain.dim() != 3)
    throw Error(ErrorCode::Unsupported, "sigma_sq_increment_scan is defined on the unit ball of R^3");
  for (double z : zetas)
    if (!(z > 0.0 && z < 0.5)) throw Error(ErrorCode::Usage, "zeta must lie in (0, 0.5)");
  const auto pairs = sample_pairs(domain, region, options.pairs, options.seed);
  const auto s2 = sigma_sq_at(domain, endpoints(pairs), options);
  std::vector<BoundScanReport> out;
  for (double z : zetas) {
    std::vector<double> ratio(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
      ratio[i] = std::abs(s2[2 * i] - s2[2 * i + 1]) / std::pow(distance(pairs[i].first, pairs[i].second), 1.0 - z);
    std::ostringstream name;
    name << "|x1-x2|^" << 1.0 - z;
    auto rep = summarize(region, name.str(), pairs, ratio);
    rep.extras = {{"zeta", z}};
    out.push_back(std::move(rep));
  }
  return out;
}

BoundScanReport sigma_sq_increment_scan(const Domain& domain, const ScanRegion& region, double zeta,
                                        const ScanOptions& options) {
  return sigma_sq_increment_scan(domain, region, std::vector<double>{zeta}, options).front();
}

BoundScanReport correlation_gap_scan(const Domain& domain, const ScanRegion& region, const ScanOptions& options) {
  if (domain.kind() != DomainKind::Interval)
    throw Error(ErrorCode::Unsupported, "correlation_gap_scan is defined on the interval");
  const double b = domain.length();
  const auto pairs = sample_pairs(domain, region, options.pairs, options.seed);
  std::vector<double> ratio(pairs.size());
  double dev_min_reading = 0.0;
  double dev_x_reading = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double x = pairs[i].first[0];
    const double y = pairs[i].second[0];
    const PairGeometry pg = pair_geometry(domain, pairs[i].first, pairs[i].second);
    const double d = x - y;
    ratio[i] = (pg.tau_sq / pg.sigma2_sq) / (d * d);
    const double direct = std::sqrt(pg.sigma1_sq * pg.sigma2_sq) - pg.cov;
    dev_min_reading = std::max(dev_min_reading, std::abs(direct - closed_form::gap_factor(b, x, y)));
    // The factor read literally as (x ^ b) = x.
    const double literal = x * (b - std::max(x, y)) * d * d / (6.0 * b);
    dev_x_reading = std::max(dev_x_reading, std::abs(direct - literal));
  }
  auto rep = summarize(region, "|x1-x2|^2", pairs, ratio);
  rep.extras = {{"factorization_max_abs_dev_min_reading", dev_min_reading},
                {"factorization_max_abs_dev_literal_reading", dev_x_reading}};
  return rep;
}

}  // namespace spoisson
