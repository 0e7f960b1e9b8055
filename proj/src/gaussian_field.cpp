#include <spoisson/gaussian_field.hpp>

#include <spoisson/errors.hpp>
#include <spoisson/parallel.hpp>
#include <spoisson/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace spoisson {

CovarianceModel build_covariance(const Domain& domain, const std::vector<SpatialPoint>& grid, double rel_tol,
                                 std::size_t max_evaluations) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "covariance grid is empty");
  for (const auto& x : grid) {
    domain.require_contains(x);
    if (boundary_distance(domain, x) <= 0.0)
      throw Error(ErrorCode::ModelSingular, "grid point " + x.to_string() + " lies on the boundary (zero variance)");
  }
  {
    std::set<SpatialPoint> seen;
    for (const auto& x : grid)
      if (!seen.insert(x).second)
        throw Error(ErrorCode::ModelSingular, "grid contains the point " + x.to_string() + " twice");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  CovarianceModel model;
  model.domain = domain;
  model.grid = grid;
  model.gram.resize(n, n);
  if (domain.kind() == DomainKind::Interval) {
    const double b = domain.length();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double v = i == j ? closed_form::sigma_sq(b, grid[i][0]) : closed_form::cov(b, grid[i][0], grid[j][0]);
        model.gram(i, j) = model.gram(j, i) = v;
      }
  } else {
    const double tol = rel_tol > 0.0 ? rel_tol : default_rel_tol(domain);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) entries.emplace_back(i, j);
    std::vector<double> values(entries.size());
    parallel_for(entries.size(), [&](std::size_t e) {
      const auto [i, j] = entries[e];
      values[e] = i == j ? norm_sq(domain, grid[i], tol, max_evaluations)
                         : gram_entry(domain, grid[i], grid[j], tol, max_evaluations);
    });
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto [i, j] = entries[e];
      model.gram(i, j) = model.gram(j, i) = values[e];
    }
  }
  for (double jitter : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXd a = model.gram;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      model.factor = llt.matrixL();
      model.jitter = jitter;
      return model;
    }
  }
  throw Error(ErrorCode::ModelSingular, "Gram matrix is not positive definite even with jitter 1e-6");
}

std::vector<double> FieldSample::series(std::size_t point, std::size_t component) const {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = at(j, point, component);
  return out;
}

FieldSample sample(const CovarianceModel& model, std::size_t d, std::size_t n, std::uint64_t seed,
                   std::uint64_t first_draw) {
  if (n == 0 || d == 0) throw Error(ErrorCode::Usage, "sample needs n >= 1 and d >= 1");
  FieldSample out;
  out.grid = model.grid;
  out.n = n;
  out.d = d;
  out.seed = seed;
  const std::size_t g = model.grid.size();
  out.values.assign(n * g * d, 0.0);
  const std::size_t chunk = std::max<std::size_t>(1, std::min<std::size_t>(n, (1u << 22) / (g * d) + 1));
  const std::size_t chunks = (n + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    Eigen::MatrixXd z(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>((hi - lo) * d));
    for (std::size_t j = lo; j < hi; ++j)
      for (std::size_t comp = 0; comp < d; ++comp) {
        Philox rng = make_stream(seed, StreamTag::FieldSample, static_cast<std::uint32_t>(first_draw + j),
                                 static_cast<std::uint32_t>(comp));
        const auto col = static_cast<Eigen::Index>((j - lo) * d + comp);
        for (std::size_t p = 0; p < g; ++p) z(static_cast<Eigen::Index>(p), col) = rng.normal();
      }
    const Eigen::MatrixXd v = model.factor.triangularView<Eigen::Lower>() * z;
    for (std::size_t j = lo; j < hi; ++j)
      for (std::size_t comp = 0; comp < d; ++comp)
        for (std::size_t p = 0; p < g; ++p)
          out.at(j, p, comp) = v(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>((j - lo) * d + comp));
  });
  return out;
}

FieldSample sample_1d_exact(double b, const std::vector<SpatialPoint>& grid, std::size_t d, std::size_t n,
                            std::uint64_t seed) {
  if (n == 0 || d == 0) throw Error(ErrorCode::Usage, "sample_1d_exact needs n >= 1 and d >= 1");
  const Domain domain = Domain::interval(b);
  for (const auto& x : grid) domain.require_contains(x);
  // Uniform nodes with step <= 1e-3 b, merged with the grid points.
  const int steps = 1000;
  std::vector<double> nodes;
  for (int i = 0; i <= steps; ++i) nodes.push_back(i == steps ? b : b * i / steps);
  for (const auto& x : grid) nodes.push_back(x[0]);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<std::size_t> where(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p)
    where[p] = static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), grid[p][0]) - nodes.begin());

  FieldSample out;
  out.grid = grid;
  out.n = n;
  out.d = d;
  out.seed = seed;
  out.values.assign(n * grid.size() * d, 0.0);
  parallel_for(n, [&](std::size_t j) {
    std::vector<double> integral(nodes.size(), 0.0);
    for (std::size_t comp = 0; comp < d; ++comp) {
      Philox rng = make_stream(seed, StreamTag::ExactSampler, static_cast<std::uint32_t>(j),
                               static_cast<std::uint32_t>(comp));
      double w = 0.0;
      for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double dt = nodes[i] - nodes[i - 1];
        const double w_next = w + std::sqrt(dt) * rng.normal();
        integral[i] = integral[i - 1] + 0.5 * dt * (w + w_next);
        w = w_next;
      }
      const double total = integral.back();
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const double x = grid[p][0];
        out.at(j, p, comp) = (x / b) * total - integral[where[p]];
      }
    }
  });
  return out;
}

double marginal_density(double sigma_sq, std::span<const double> z) {
  if (!(sigma_sq > 0.0)) throw Error(ErrorCode::DegenerateVariance, "marginal density needs sigma^2 > 0");
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  const double d = static_cast<double>(z.size());
  return std::pow(2.0 * std::numbers::pi * sigma_sq, -0.5 * d) * std::exp(-r2 / (2.0 * sigma_sq));
}

double joint_density(const PairGeometry& pg, std::span<const double> z1, std::span<const double> z2) {
  if (z1.size() != z2.size()) throw Error(ErrorCode::Usage, "joint density arguments differ in dimension");
  if (!(pg.tau_sq > 0.0)) throw Error(ErrorCode::DegeneratePair, "joint density needs tau^2 > 0");
  double cond = 0.0;
  for (std::size_t i = 0; i < z1.size(); ++i) {
    const double r = z2[i] - pg.m * z1[i];
    cond += r * r;
  }
  const double d = static_cast<double>(z1.size());
  const double conditional = std::pow(2.0 * std::numbers::pi * pg.tau_sq, -0.5 * d) * std::exp(-cond / (2.0 * pg.tau_sq));
  return conditional * marginal_density(pg.sigma1_sq, z1);
}

namespace {

std::vector<SpatialPoint> region_points(const Domain& domain, const ScanRegion& region, int per_axis) {
  std::vector<SpatialPoint> pts;
  if (!region.ball) {
    for (int i = 0; i < per_axis; ++i)
      pts.push_back(SpatialPoint::scalar(region.lo + (region.hi - region.lo) * i / (per_axis - 1)));
    return pts;
  }
  const int k = domain.dim();
  const double h = 2.0 * region.radius / (per_axis - 1);
  const int total = k == 2 ? per_axis * per_axis : per_axis * per_axis * per_axis;
  for (int n = 0; n < total; ++n) {
    SpatialPoint p(k);
    int rem = n;
    for (int a = k - 1; a >= 0; --a) {
      p[a] = -region.radius + h * (rem % per_axis);
      rem /= per_axis;
    }
    if (region.contains(p)) pts.push_back(p);
  }
  return pts;
}

}  // namespace

DensitySandwich marginal_density_sandwich(const Domain& domain, const ScanRegion& region, double z_bound,
                                          std::size_t d, int x_points, int z_points, double rel_tol) {
  validate_region(domain, region);
  if (!(z_bound > 0.0) || d == 0 || x_points < 2 || z_points < 2)
    throw Error(ErrorCode::Usage, "density sandwich needs M > 0, d >= 1 and at least two lattice points per axis");
  const auto xs = region_points(domain, region, x_points);
  std::vector<double> s2(xs.size());
  const double tol = rel_tol > 0.0 ? rel_tol : default_rel_tol(domain);
  parallel_for(xs.size(), [&](std::size_t i) {
    s2[i] = domain.kind() == DomainKind::Interval ? closed_form::sigma_sq(domain.length(), xs[i][0])
                                                  : norm_sq(domain, xs[i], tol);
  });
  DensitySandwich out;
  out.sigma_min_sq = *std::min_element(s2.begin(), s2.end());
  out.sigma_max_sq = *std::max_element(s2.begin(), s2.end());
  const double dd = static_cast<double>(d);
  out.upper_bound = std::pow(2.0 * std::numbers::pi * out.sigma_min_sq, -0.5 * dd);
  out.c1 = std::exp(-dd * z_bound * z_bound / (2.0 * out.sigma_min_sq));
  out.lower_bound = out.c1 * std::pow(2.0 * std::numbers::pi * out.sigma_max_sq, -0.5 * dd);
  out.sup_density = 0.0;
  out.inf_density = std::numeric_limits<double>::infinity();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(z_points);
  std::vector<double> z(d);
  for (double s : s2) {
    for (std::size_t c = 0; c < total; ++c) {
      std::size_t rem = c;
      for (std::size_t i = 0; i < d; ++i) {
        z[i] = -z_bound + 2.0 * z_bound * static_cast<double>(rem % static_cast<std::size_t>(z_points)) / (z_points - 1);
        rem /= static_cast<std::size_t>(z_points);
      }
      const double p = marginal_density(s, z);
      out.sup_density = std::max(out.sup_density, p);
      out.inf_density = std::min(out.inf_density, p);
    }
  }
  return out;
}

BoundScanReport joint_density_bound_check(const Domain& domain, const ScanRegion& region, double z_bound,
                                          std::size_t d, const JointBoundOptions& options) {
  const int k = domain.dim();
  if (k == 2) throw Error(ErrorCode::Unsupported, "the joint density bound is checked for k = 1 and k = 3 only");
  if (!(z_bound > 0.0) || d == 0) throw Error(ErrorCode::Usage, "joint density check needs M > 0 and d >= 1");
  const double dd = static_cast<double>(d);
  const double gamma = options.gamma > 0.0 ? options.gamma : (k == 1 ? dd : 0.5 * dd);
  const double alpha = options.alpha > 0.0 ? options.alpha : (k == 1 ? 2.0 : 1.0);
  const auto pairs = sample_pairs(domain, region, options.pairs, options.seed);
  std::vector<PairGeometry> pgs(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    pgs[i] = pair_geometry(domain, pairs[i].first, pairs[i].second, options.rel_tol);
  });
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double sep = distance(pairs[i].first, pairs[i].second);
    c = std::min(c, std::pow(sep, alpha) / (4.0 * pgs[i].tau_sq));
  }
  c *= 0.5;
  std::vector<double> ratio(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Philox rng = make_stream(options.seed, StreamTag::DensityScan, static_cast<std::uint32_t>(i));
    const double sep = distance(pairs[i].first, pairs[i].second);
    std::vector<double> z1(d, 0.0), z2(d, 0.0);
    double best = 0.0;
    for (std::size_t s = 0; s <= options.z_samples; ++s) {
      // Sample 0 is z1 = z2 = 0; the others are uniform in the box.
      if (s > 0) {
        for (std::size_t a = 0; a < d; ++a) {
          z1[a] = z_bound * (2.0 * rng.uniform() - 1.0);
          z2[a] = z_bound * (2.0 * rng.uniform() - 1.0);
        }
      }
      double dz2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) dz2 += (z1[a] - z2[a]) * (z1[a] - z2[a]);
      const double log_value = std::log(joint_density(pgs[i], z1, z2)) + gamma * std::log(sep) + c * dz2 / std::pow(sep, alpha);
      best = std::max(best, std::exp(log_value));
    }
    ratio[i] = best;
  }
  BoundScanReport rep;
  rep.region = region.describe();
  rep.pair_count = pairs.size();
  std::ostringstream name;
  name << "joint * |x1-x2|^" << gamma << " * exp(c |z1-z2|^2 / |x1-x2|^" << alpha << ")";
  rep.normalizer = name.str();
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (ratio[i] < rep.min_ratio) { rep.min_ratio = ratio[i]; rep.argmin = pairs[i]; }
    if (ratio[i] > rep.max_ratio) { rep.max_ratio = ratio[i]; rep.argmax = pairs[i]; }
    rep.samples.push_back({pairs[i], distance(pairs[i].first, pairs[i].second), ratio[i]});
  }
  rep.extras = {{"c", c}, {"gamma", gamma}, {"alpha", alpha}, {"z_bound", z_bound}, {"d", dd}};
  return rep;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

ModulusSummary modulus_diagnostic(const FieldSample& s, double xi) {
  const std::size_t g = s.grid_size();
  if (g < 2) throw Error(ErrorCode::Usage, "modulus diagnostic needs at least two grid points");
  std::vector<std::tuple<std::size_t, std::size_t, double>> pairs;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j) {
      const double t = std::pow(distance(s.grid[i], s.grid[j]), xi);
      pairs.emplace_back(i, j, 1.0 / (t * std::sqrt(std::log(1.0 + 1.0 / t))));
    }
  ModulusSummary out;
  out.draws = s.n;
  out.per_draw.assign(s.n, 0.0);
  parallel_for(s.n, [&](std::size_t j) {
    double best = 0.0;
    for (const auto& [a, b, w] : pairs) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < s.d; ++c) {
        const double diff = s.at(j, a, c) - s.at(j, b, c);
        r2 += diff * diff;
      }
      best = std::max(best, std::sqrt(r2) * w);
    }
    out.per_draw[j] = best;
  });
  double sum = 0.0;
  for (double v : out.per_draw) sum += v;
  out.mean = sum / static_cast<double>(s.n);
  out.median = quantile(out.per_draw, 0.5);
  out.q90 = quantile(out.per_draw, 0.9);
  out.q99 = quantile(out.per_draw, 0.99);
  out.median_first_half = quantile(
      std::vector<double>(out.per_draw.begin(), out.per_draw.begin() + static_cast<std::ptrdiff_t>((s.n + 1) / 2)), 0.5);
  return out;
}

std::vector<double> neighbour_increments(const FieldSample& s) {
  const std::size_t g = s.grid_size();
  std::vector<std::size_t> nearest(g, 0);
  for (std::size_t i = 0; i < g; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g; ++j) {
      if (j == i) continue;
      const double r = distance(s.grid[i], s.grid[j]);
      if (r < best) { best = r; nearest[i] = j; }
    }
  }
  std::vector<double> out(s.n, 0.0);
  if (g < 2) return out;
  for (std::size_t j = 0; j < s.n; ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < s.d; ++c) {
        const double diff = s.at(j, i, c) - s.at(j, nearest[i], c);
        r2 += diff * diff;
      }
      best = std::max(best, r2);
    }
    out[j] = std::sqrt(best);
  }
  return out;
}

std::string to_csv(const FieldSample& s) {
  std::ostringstream os;
  os.precision(17);
  const int k = s.grid.empty() ? 0 : s.grid.front().dim();
  os << "draw";
  for (int a = 0; a < k; ++a) os << ",x" << a + 1;
  for (std::size_t c = 0; c < s.d; ++c) os << ",v" << c + 1;
  os << '\n';
  for (std::size_t j = 0; j < s.n; ++j)
    for (std::size_t p = 0; p < s.grid_size(); ++p) {
      os << j;
      for (int a = 0; a < k; ++a) os << ',' << s.grid[p][a];
      for (std::size_t c = 0; c < s.d; ++c) os << ',' << s.at(j, p, c);
      os << '\n';
    }
  return os.str();
}

}  // namespace spoisson
