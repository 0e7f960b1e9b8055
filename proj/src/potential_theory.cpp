#include <spoisson/potential_theory.hpp>

#include <spoisson/errors.hpp>
#include <spoisson/stats.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace spoisson {

double codimension(int k, int d, double gamma) {
  if (d < 1) throw Error(ErrorCode::Usage, "d must be at least 1");
  return static_cast<double>(d) - static_cast<double>(k) / holder_index(k, gamma);
}

bool is_critical_dimension(int k, int d, double gamma) { return std::abs(codimension(k, d, gamma)) < 1e-12; }

TargetSet TargetSet::ball(std::vector<double> center, double radius) {
  if (center.empty()) throw Error(ErrorCode::Usage, "ball target needs a center");
  if (!(radius > 0.0)) throw Error(ErrorCode::Usage, "ball target needs a positive radius");
  TargetSet t;
  t.kind_ = Kind::Ball;
  t.d_ = center.size();
  t.center_ = std::move(center);
  t.radius_ = radius;
  return t;
}

TargetSet TargetSet::point_set(std::vector<std::vector<double>> points) {
  if (points.empty()) throw Error(ErrorCode::Usage, "point-set target must be nonempty");
  const std::size_t d = points.front().size();
  for (const auto& p : points)
    if (p.size() != d || d == 0) throw Error(ErrorCode::Usage, "point-set target has inconsistent dimensions");
  TargetSet t;
  t.kind_ = Kind::PointSet;
  t.d_ = d;
  t.points_ = std::move(points);
  return t;
}

TargetSet TargetSet::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty()) throw Error(ErrorCode::Usage, "box target bounds differ in dimension");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw Error(ErrorCode::Usage, "box target has lo > hi");
  TargetSet t;
  t.kind_ = Kind::Box;
  t.d_ = lo.size();
  t.lo_ = std::move(lo);
  t.hi_ = std::move(hi);
  return t;
}

TargetSet TargetSet::whole_space(std::size_t d) {
  const double inf = std::numeric_limits<double>::infinity();
  return box(std::vector<double>(d, -inf), std::vector<double>(d, inf));
}

bool TargetSet::bounded() const noexcept {
  if (kind_ != Kind::Box) return true;
  for (std::size_t i = 0; i < d_; ++i)
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i])) return false;
  return true;
}

double TargetSet::distance(const double* z) const noexcept {
  switch (kind_) {
    case Kind::Ball: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < d_; ++i) r2 += (z[i] - center_[i]) * (z[i] - center_[i]);
      return std::max(0.0, std::sqrt(r2) - radius_);
    }
    case Kind::PointSet: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : points_) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < d_; ++i) r2 += (z[i] - p[i]) * (z[i] - p[i]);
        best = std::min(best, r2);
      }
      return std::sqrt(best);
    }
    case Kind::Box: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < d_; ++i) {
        const double e = std::max({lo_[i] - z[i], 0.0, z[i] - hi_[i]});
        r2 += e * e;
      }
      return std::sqrt(r2);
    }
  }
  return 0.0;
}

std::string TargetSet::describe() const {
  std::ostringstream os;
  os.precision(10);
  auto vec = [&](const std::vector<double>& v) {
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
  };
  switch (kind_) {
    case Kind::Ball:
      os << "ball center ";
      vec(center_);
      os << " radius " << radius_;
      break;
    case Kind::PointSet: os << "point set of " << points_.size() << " points in R^" << d_; break;
    case Kind::Box:
      os << "box ";
      vec(lo_);
      os << " to ";
      vec(hi_);
      break;
  }
  return os.str();
}

double hausdorff_measure(const TargetSet& a, double beta) {
  const double inf = std::numeric_limits<double>::infinity();
  if (beta <= 0.0) return inf;
  switch (a.kind()) {
    case TargetSet::Kind::Ball: return std::pow(2.0 * a.radius(), beta);
    case TargetSet::Kind::Box: {
      // A degenerate box is a lower-dimensional box; only full-dimensional boxes are infinite for beta < d.
      std::size_t full = 0;
      double diam2 = 0.0;
      for (std::size_t i = 0; i < a.dim(); ++i) {
        const double w = a.hi()[i] - a.lo()[i];
        if (w > 0.0) ++full;
        diam2 += w * w;
      }
      if (static_cast<double>(full) > beta) return inf;
      return std::pow(std::sqrt(diam2), beta);
    }
    case TargetSet::Kind::PointSet: break;
  }
  const auto& pts = a.points();
  const std::size_t d = a.dim();
  double spacing = inf;
  double diam = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) r2 += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      const double r = std::sqrt(r2);
      if (r > 0.0) spacing = std::min(spacing, r);
      diam = std::max(diam, r);
    }
  if (diam == 0.0) return 0.0;
  std::vector<double> origin(d, inf);
  for (const auto& p : pts)
    for (std::size_t c = 0; c < d; ++c) origin[c] = std::min(origin[c], p[c]);
  double best = inf;
  for (double eps = std::exp2(std::ceil(std::log2(diam))); eps >= 0.5 * spacing; eps *= 0.5) {
    std::map<std::vector<long long>, int> boxes;
    for (const auto& p : pts) {
      std::vector<long long> key(d);
      for (std::size_t c = 0; c < d; ++c) key[c] = static_cast<long long>(std::floor((p[c] - origin[c]) / eps));
      boxes[key] = 1;
    }
    best = std::min(best, static_cast<double>(boxes.size()) * std::pow(eps * std::sqrt(static_cast<double>(d)), beta));
  }
  return best;
}

std::vector<std::vector<double>> discretize(const TargetSet& a, int mesh, double* spacing) {
  if (a.kind() == TargetSet::Kind::PointSet) {
    if (spacing) {
      double s = std::numeric_limits<double>::infinity();
      const auto& pts = a.points();
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
          double r2 = 0.0;
          for (std::size_t c = 0; c < a.dim(); ++c) r2 += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
          if (r2 > 0.0) s = std::min(s, std::sqrt(r2));
        }
      *spacing = s;
    }
    return a.points();
  }
  if (!a.bounded()) throw Error(ErrorCode::Usage, "cannot discretise an unbounded target");
  if (mesh < 8) throw Error(ErrorCode::Usage, "capacity mesh must have at least 8 points per axis");
  const std::size_t d = a.dim();
  std::vector<double> lo(d), hi(d);
  for (std::size_t c = 0; c < d; ++c) {
    if (a.kind() == TargetSet::Kind::Ball) {
      lo[c] = a.center()[c] - a.radius();
      hi[c] = a.center()[c] + a.radius();
    } else {
      lo[c] = a.lo()[c];
      hi[c] = a.hi()[c];
    }
  }
  double h = 0.0;
  for (std::size_t c = 0; c < d; ++c) h = std::max(h, (hi[c] - lo[c]) / (mesh - 1));
  if (spacing) *spacing = h;
  std::vector<std::vector<double>> out;
  std::size_t total = 1;
  for (std::size_t c = 0; c < d; ++c) total *= static_cast<std::size_t>(mesh);
  std::vector<double> p(d);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rem = n;
    for (std::size_t c = d; c-- > 0;) {
      const double t = static_cast<double>(rem % static_cast<std::size_t>(mesh)) / (mesh - 1);
      p[c] = lo[c] + t * (hi[c] - lo[c]);
      rem /= static_cast<std::size_t>(mesh);
    }
    if (a.distance(p.data()) <= 1e-12 * std::max(1.0, h)) out.push_back(p);
  }
  if (out.empty()) out.push_back(a.kind() == TargetSet::Kind::Ball ? a.center() : lo);
  return out;
}

CapacityResult riesz_capacity_detail(const TargetSet& a, double beta, const CapacityOptions& options) {
  CapacityResult res;
  if (beta < 0.0) {
    res.capacity = 1.0;
    res.energy = 1.0;
    return res;
  }
  double spacing = 0.0;
  const auto pts = discretize(a, options.mesh, &spacing);
  const std::size_t n = pts.size();
  double reg = options.reg;
  if (!(reg > 0.0)) reg = std::isfinite(spacing) && spacing > 0.0 ? spacing : 1e-12;
  res.reg = reg;
  res.points = n;
  auto kernel = [&](double r) {
    r = std::max(r, reg);
    if (beta > 0.0) return std::pow(r, -beta);
    return std::log(std::numbers::e / r);
  };
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < a.dim(); ++c) r2 += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = kernel(std::sqrt(r2));
    }
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  Eigen::VectorXd kmu = k * mu;
  double energy = mu.dot(kmu);
  for (std::size_t it = 0;; ++it) {
    Eigen::Index s = 0;
    kmu.minCoeff(&s);
    Eigen::Index v = -1;
    double vmax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < kmu.size(); ++i)
      if (mu(i) > 0.0 && kmu(i) > vmax) {
        vmax = kmu(i);
        v = i;
      }
    // E - min(K mu) bounds E - E*; this is the duality gap of the quadratic program.
    const double gap = 2.0 * (energy - kmu(s));
    res.iterations = it;
    res.relative_gap = gap / energy;
    if (res.relative_gap < options.gap_tol || s == v) break;
    if (it >= options.max_iterations)
      throw BudgetExceeded("capacity optimiser ran out of iterations", 1.0 / energy, res.relative_gap);
    const double slope = kmu(s) - kmu(v);
    const double curv = k(s, s) + k(v, v) - 2.0 * k(s, v);
    double step = curv > 0.0 ? -slope / curv : mu(v);
    step = std::clamp(step, 0.0, mu(v));
    if (step == mu(v)) mu(v) = 0.0;
    else mu(v) -= step;
    mu(s) += step;
    kmu += step * (k.col(s) - k.col(v));
    // Periodic refresh keeps the incremental K mu from drifting.
    if (it % 1000 == 999) kmu = k * mu;
    energy = mu.dot(kmu);
  }
  res.energy = energy;
  res.capacity = 1.0 / energy;
  return res;
}

double riesz_capacity(const TargetSet& a, double beta, int mesh, double reg) {
  CapacityOptions o;
  o.mesh = mesh;
  o.reg = reg;
  return riesz_capacity_detail(a, beta, o).capacity;
}

std::vector<HitProbReport> hit_probability(const CovarianceModel& model, std::size_t d,
                                           const std::vector<TargetSet>& targets, std::size_t n, std::uint64_t seed,
                                           const HitOptions& options) {
  if (n == 0) throw Error(ErrorCode::Usage, "hit_probability needs n >= 1");
  for (const auto& t : targets)
    if (t.dim() != d) throw Error(ErrorCode::Usage, "target dimension differs from the field dimension");
  const std::size_t g = model.grid.size();
  const std::size_t m = targets.size();
  std::vector<double> min_dist(n * m, std::numeric_limits<double>::infinity());
  std::vector<double> nn_inc(n, 0.0);
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk);
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    const std::size_t cnt = std::min(chunk, n - lo);
    const FieldSample s = sample(model, d, cnt, seed, lo);
    const auto inc = neighbour_increments(s);
    for (std::size_t j = 0; j < cnt; ++j) {
      nn_inc[lo + j] = inc[j];
      for (std::size_t t = 0; t < m; ++t) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < g; ++p) best = std::min(best, targets[t].distance(&s.values[(j * g + p) * d]));
        min_dist[(lo + j) * m + t] = best;
      }
    }
  }
  const double margin = options.margin >= 0.0 ? options.margin : 0.5 * quantile(nn_inc, 0.5);
  const int k = model.domain.dim();
  const double beta = codimension(k, static_cast<int>(d), options.gamma);
  std::vector<HitProbReport> out;
  for (std::size_t t = 0; t < m; ++t) {
    HitProbReport r;
    r.target = targets[t].describe();
    r.n_samples = n;
    r.grid_resolution = g;
    r.margin = margin;
    for (std::size_t j = 0; j < n; ++j) {
      const double dist = min_dist[j * m + t];
      r.hits += dist <= margin ? 1 : 0;
      r.hits_no_margin += dist <= 0.0 ? 1 : 0;
    }
    r.p_hat = static_cast<double>(r.hits) / static_cast<double>(n);
    r.p_hat_no_margin = static_cast<double>(r.hits_no_margin) / static_cast<double>(n);
    std::tie(r.ci_low, r.ci_high) = wilson_interval(r.hits, n);
    r.beta = beta;
    r.hausdorff_value = hausdorff_measure(targets[t], beta);
    r.capacity_value = targets[t].bounded() ? riesz_capacity_detail(targets[t], beta, options.capacity).capacity
                                            : std::numeric_limits<double>::infinity();
    r.ratio_capacity = r.p_hat / r.capacity_value;
    r.ratio_hausdorff = std::isfinite(r.hausdorff_value) && r.hausdorff_value > 0.0 ? r.p_hat / r.hausdorff_value : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

HitProbReport hit_probability(const CovarianceModel& model, std::size_t d, const TargetSet& target, std::size_t n,
                              std::uint64_t seed, const HitOptions& options) {
  return hit_probability(model, d, std::vector<TargetSet>{target}, n, seed, options).front();
}

SandwichSummary sandwich_report(const std::vector<HitProbReport>& reports) {
  SandwichSummary s;
  s.reports = reports.size();
  std::vector<double> cap, haus;
  for (const auto& r : reports) {
    if (std::isfinite(r.capacity_value) && r.capacity_value > 0.0) cap.push_back(r.p_hat / r.capacity_value);
    if (std::isfinite(r.hausdorff_value) && r.hausdorff_value > 0.0) haus.push_back(r.p_hat / r.hausdorff_value);
  }
  auto window = [](const std::vector<double>& v) {
    if (v.empty()) return 1.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi == 0.0) return 1.0;
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  };
  s.capacity_window = window(cap);
  s.hausdorff_window = window(haus);
  s.hausdorff_checked = !haus.empty();
  if (!cap.empty()) s.lower_constant = *std::min_element(cap.begin(), cap.end());
  if (!haus.empty()) s.upper_constant = *std::max_element(haus.begin(), haus.end());
  for (const auto& r : reports) {
    if (s.hausdorff_checked && std::isfinite(r.hausdorff_value) && r.p_hat > s.upper_constant * r.hausdorff_value * (1 + 1e-12))
      s.upper_holds = false;
    if (std::isfinite(r.capacity_value) && r.p_hat < s.lower_constant * r.capacity_value * (1 - 1e-12))
      s.lower_holds = false;
  }
  return s;
}

PolarityReport polarity_scan(const CovarianceModel& model, std::size_t d, const std::vector<double>& y0,
                             const std::vector<double>& epsilons, std::size_t n, std::uint64_t seed,
                             const HitOptions& options) {
  const int k = model.domain.dim();
  if (is_critical_dimension(k, static_cast<int>(d), options.gamma))
    throw Error(ErrorCode::CriticalDimension, kCriticalDimensionNotice);
  if (epsilons.empty()) throw Error(ErrorCode::Usage, "polarity scan needs at least one epsilon");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1])) throw Error(ErrorCode::Usage, "polarity scan epsilons must decrease");
  if (y0.size() != d) throw Error(ErrorCode::Usage, "target point dimension differs from d");
  PolarityReport rep;
  rep.beta = codimension(k, static_cast<int>(d), options.gamma);
  rep.epsilons = epsilons;
  std::vector<TargetSet> targets;
  for (double e : epsilons) targets.push_back(TargetSet::ball(y0, e));
  rep.reports = hit_probability(model, d, targets, n, seed, options);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < epsilons.size(); ++i)
    if (rep.reports[i].p_hat > 0.0) {
      xs.push_back(epsilons[i]);
      ys.push_back(rep.reports[i].p_hat);
    }
  rep.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  std::ostringstream v;
  if (rep.beta > 0.0)
    v << "beta = " << rep.beta << " > 0: frequencies decay with fitted slope " << rep.slope
      << ", consistent with points being polar";
  else
    v << "beta = " << rep.beta << " < 0: frequencies stay bounded away from zero (fitted slope " << rep.slope
      << "), consistent with points being non-polar";
  rep.verdict = v.str();
  return rep;
}

std::string radius_sweep_csv(const std::vector<double>& radii, const std::vector<HitProbReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "r,p_hat,ci_low,ci_high,hausdorff,capacity\n";
  for (std::size_t i = 0; i < reports.size() && i < radii.size(); ++i) {
    const auto& r = reports[i];
    os << radii[i] << ',' << r.p_hat << ',' << r.ci_low << ',' << r.ci_high << ',' << r.hausdorff_value << ','
       << r.capacity_value << '\n';
  }
  return os.str();
}

}  // namespace spoisson
