#include <spoisson/quadrature.hpp>

#include <spoisson/errors.hpp>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace spoisson {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

class Budget {
 public:
  explicit Budget(std::size_t limit) : limit_(limit) {}
  void spend(std::size_t n) { used_ += n; }
  bool exhausted() const noexcept { return used_ > limit_; }
  std::size_t used() const noexcept { return used_; }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const noexcept { return error < other.error; }
};

// 21-point Kronrod estimate with the embedded 10-point Gauss rule; error
// estimate scaled as in QUADPACK's qk21.
template <class F>
Panel kronrod_panel(F& f, double a, double b) {
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> fv{};
  // Kronrod abscissae are listed for x >= 0: index 0 is the centre, odd indices are Gauss nodes.
  fv[0] = f(center);
  double kron = wk[0] * fv[0];
  double gauss = 0.0;
  for (std::size_t j = 1; j < xk.size(); ++j) {
    const double dx = half * xk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[2 * j - 1] = f1;
    fv[2 * j] = f2;
    kron += wk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += wg[j / 2] * (f1 + f2);
  }
  const double mean = kron * 0.5;
  double resasc = wk[0] * std::abs(fv[0] - mean);
  for (std::size_t j = 1; j < xk.size(); ++j)
    resasc += wk[j] * (std::abs(fv[2 * j - 1] - mean) + std::abs(fv[2 * j] - mean));
  resasc *= std::abs(half);
  const double result = kron * half;
  double err = std::abs((kron - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return Panel{a, b, result, err};
}

// Global adaptive subdivision over [breaks.front(), breaks.back()].
template <class F>
QuadratureResult adaptive_1d(F&& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                             Budget& budget) {
  std::priority_queue<Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  std::size_t evals = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    Panel p = kronrod_panel(f, breaks[i], breaks[i + 1]);
    evals += 21;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  budget.spend(evals);
  const double span_width = breaks.back() - breaks.front();
  while (!heap.empty()) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (total_err <= tol) break;
    if (budget.exhausted()) {
      throw BudgetExceeded("quadrature evaluation budget exhausted", total, total_err);
    }
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.b - worst.a <= 1e-14 * span_width || mid <= worst.a || mid >= worst.b) {
      // Roundoff floor: the panel cannot be refined further.
      break;
    }
    heap.pop();
    Panel left = kronrod_panel(f, worst.a, mid);
    Panel right = kronrod_panel(f, mid, worst.b);
    budget.spend(42);
    evals += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Recompute sums to shed accumulated cancellation from the running updates.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return QuadratureResult{value, err, evals};
}

// Geometry of rays from an interior centre to the unit sphere.
struct RayFrame {
  SpatialPoint center;
  std::array<SpatialPoint, 3> axes;  // axes[0] (k = 2) or axes[2] (k = 3) is the polar axis
  std::vector<SpatialPoint> others;  // singular points other than the centre, relative to it
  int k = 0;
  // Reflection symmetry across the plane (line for k = 2) spanned by the polar
  // axis and axes[1 or 0]: the integrand is then even in the azimuth.
  bool mirror = false;
  // Every singular point and the origin lie on the polar axis (k = 3 only).
  bool axisymmetric = false;

  double ray_length(const SpatialPoint& dir) const noexcept {
    const double cd = dot(center, dir);
    const double disc = cd * cd + 1.0 - center.norm_sq();
    return -cd + std::sqrt(disc > 0.0 ? disc : 0.0);
  }

  std::vector<double> radial_breaks(const SpatialPoint& dir, double rmax) const {
    std::vector<double> out{0.0};
    auto add = [&](double t) {
      if (t > 1e-9 * rmax && t < (1.0 - 1e-9) * rmax) out.push_back(t);
    };
    for (const auto& s : others) {
      add(dot(s, dir));
      // Geometric grading resolves the near-miss bump when the ray passes the point at distance ~|s|.
      for (double t = 0.5 * s.norm(); t < 0.5 * rmax; t *= 2.0) add(t);
    }
    out.push_back(rmax);
    std::sort(out.begin(), out.end());
    return out;
  }
};

SpatialPoint unit(const SpatialPoint& v) { return (1.0 / v.norm()) * v; }

// Symmetric integrands only: the mirror flags assume the integrand depends on
// y through distances to the singular points and |y| (true for Green-function
// products); user integrands always take the generic path.
RayFrame make_frame(const Domain& domain, std::span<const SpatialPoint> singular, bool radial_integrand) {
  const int k = domain.dim();
  RayFrame fr;
  fr.k = k;
  fr.center = singular.empty() ? SpatialPoint(k) : singular.front();
  for (std::size_t i = 1; i < singular.size(); ++i) {
    const SpatialPoint rel = singular[i] - fr.center;
    if (rel.norm() > 0.0) fr.others.push_back(rel);
  }
  const SpatialPoint to_origin = -1.0 * fr.center;
  const double collinear_tol = 1e-13;
  SpatialPoint polar(k);
  SpatialPoint in_plane(k);
  bool have_plane = false;
  if (!fr.others.empty()) {
    polar = unit(fr.others.front());
    const SpatialPoint perp = to_origin - dot(to_origin, polar) * polar;
    if (perp.norm() > collinear_tol) {
      in_plane = unit(perp);
      have_plane = true;
    }
  } else if (to_origin.norm() > collinear_tol) {
    polar = unit(to_origin);
  } else {
    polar[k - 1] = 1.0;
  }
  if (k == 2) {
    SpatialPoint rot(2);
    rot[0] = -polar[1];
    rot[1] = polar[0];
    fr.axes = {polar, rot, SpatialPoint(2)};
    // Reflection across the polar line fixes the origin only when it lies on that line.
    fr.mirror = radial_integrand && fr.others.size() <= 1 && !have_plane;
    return fr;
  }
  if (!have_plane) {
    SpatialPoint t(3);
    if (std::abs(polar[0]) < 0.9) t[0] = 1.0; else t[1] = 1.0;
    in_plane = unit(t - dot(t, polar) * polar);
  }
  SpatialPoint e2(3);
  e2[0] = polar[1] * in_plane[2] - polar[2] * in_plane[1];
  e2[1] = polar[2] * in_plane[0] - polar[0] * in_plane[2];
  e2[2] = polar[0] * in_plane[1] - polar[1] * in_plane[0];
  fr.axes = {in_plane, e2, polar};
  fr.mirror = radial_integrand && fr.others.size() <= 1;
  fr.axisymmetric = fr.mirror && !have_plane;
  return fr;
}

template <class F>
QuadratureResult ball_pass(const Domain& domain, F& f, const RayFrame& fr, double abs_tol, double rel_tol,
                           Budget& budget) {
  const double pi = std::numbers::pi;
  std::size_t evals = 0;
  if (domain.dim() == 2) {
    const double inner_abs = 0.25 * abs_tol / (2.0 * pi);
    auto angular = [&](double theta) {
      const SpatialPoint dir = std::cos(theta) * fr.axes[0] + std::sin(theta) * fr.axes[1];
      const double rmax = fr.ray_length(dir);
      auto radial = [&](double r) {
        const double v = r * f(fr.center + r * dir);
        return std::isfinite(v) ? v : 0.0;
      };
      auto res = adaptive_1d(radial, fr.radial_breaks(dir, rmax), inner_abs, 0.1 * rel_tol, budget);
      evals += res.evaluations;
      return res.value;
    };
    std::vector<double> breaks = fr.mirror ? std::vector<double>{0.0, pi} : std::vector<double>{0.0, pi, 2.0 * pi};
    const double factor = fr.mirror ? 2.0 : 1.0;
    auto res = adaptive_1d(angular, breaks, 0.5 * abs_tol / factor, rel_tol, budget);
    res.value *= factor;
    res.error_estimate *= factor;
    res.evaluations = evals;
    return res;
  }
  const double inner_abs = 0.125 * abs_tol / (4.0 * pi);
  const double mid_abs = 0.125 * abs_tol;
  auto polar = [&](double theta) {
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    auto azimuth = [&](double phi) {
      const SpatialPoint dir =
          (st * std::cos(phi)) * fr.axes[0] + (st * std::sin(phi)) * fr.axes[1] + ct * fr.axes[2];
      const double rmax = fr.ray_length(dir);
      auto radial = [&](double r) {
        const double v = r * r * f(fr.center + r * dir);
        return std::isfinite(v) ? v : 0.0;
      };
      auto res = adaptive_1d(radial, fr.radial_breaks(dir, rmax), inner_abs, 0.1 * rel_tol, budget);
      evals += res.evaluations;
      return res.value;
    };
    if (fr.axisymmetric) return st * 2.0 * pi * azimuth(0.0);
    if (fr.mirror) {
      auto res = adaptive_1d(azimuth, {0.0, 0.5 * pi, pi}, 0.5 * mid_abs, 0.1 * rel_tol, budget);
      return st * 2.0 * res.value;
    }
    auto res = adaptive_1d(azimuth, {0.0, pi, 2.0 * pi}, mid_abs, 0.1 * rel_tol, budget);
    return st * res.value;
  };
  auto res = adaptive_1d(polar, {0.0, 0.5 * pi, pi}, 0.5 * abs_tol, rel_tol, budget);
  res.evaluations = evals;
  return res;
}

template <class F>
QuadratureResult integrate_impl(const Domain& domain, F&& f, std::span<const SpatialPoint> singular,
                                double rel_tol, std::size_t max_evaluations, bool radial_integrand) {
  if (!(rel_tol > 1e-12 && rel_tol < 1e-2))
    throw Error(ErrorCode::Usage, "quadrature rel_tol must lie in (1e-12, 1e-2)");
  for (const auto& s : singular) domain.require_contains(s);
  Budget budget(max_evaluations);
  if (domain.kind() == DomainKind::Interval) {
    std::vector<double> breaks{0.0, domain.length()};
    for (const auto& s : singular) breaks.push_back(s[0]);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto g = [&](double t) { return f(SpatialPoint::scalar(t)); };
    auto res = adaptive_1d(g, breaks, 0.0, rel_tol, budget);
    res.evaluations = budget.used();
    return res;
  }
  const RayFrame fr = make_frame(domain, singular, radial_integrand);
  // A coarse pass fixes the absolute scale, so nested levels can share one
  // absolute tolerance instead of chasing relative accuracy on tiny rays.
  const auto coarse = ball_pass(domain, f, fr, 0.0, 1e-2, budget);
  const double scale = std::abs(coarse.value);
  auto fine = ball_pass(domain, f, fr, rel_tol * scale, rel_tol, budget);
  fine.evaluations = budget.used();
  return fine;
}

}  // namespace

double default_rel_tol(const Domain& domain) { return domain.dim() == 3 ? 1e-5 : 1e-7; }

QuadratureResult integrate(const Domain& domain, const Integrand& integrand,
                           std::span<const SpatialPoint> singular_points, double rel_tol,
                           std::size_t max_evaluations) {
  return integrate_impl(domain, integrand, singular_points, rel_tol, max_evaluations, false);
}

double norm_sq(const Domain& domain, const SpatialPoint& x, double rel_tol, std::size_t max_evaluations) {
  domain.require_contains(x);
  if (boundary_distance(domain, x) == 0.0) return 0.0;
  const SpatialPoint pts[] = {x};
  auto f = [&](const SpatialPoint& y) {
    const double g = detail::green_unchecked(domain, x, y);
    return g * g;
  };
  return integrate_impl(domain, f, pts, rel_tol, max_evaluations, true).value;
}

double gram_entry(const Domain& domain, const SpatialPoint& x1, const SpatialPoint& x2, double rel_tol,
                  std::size_t max_evaluations) {
  domain.require_contains(x1);
  domain.require_contains(x2);
  if (x1 == x2) return norm_sq(domain, x1, rel_tol, max_evaluations);
  const SpatialPoint pts[] = {x1, x2};
  auto f = [&](const SpatialPoint& y) {
    return detail::green_unchecked(domain, x1, y) * detail::green_unchecked(domain, x2, y);
  };
  return integrate_impl(domain, f, pts, rel_tol, max_evaluations, true).value;
}

double increment_norm_sq(const Domain& domain, const SpatialPoint& x1, const SpatialPoint& x2, double rel_tol,
                         std::size_t max_evaluations) {
  domain.require_contains(x1);
  domain.require_contains(x2);
  if (x1 == x2) return 0.0;
  const SpatialPoint pts[] = {x1, x2};
  auto f = [&](const SpatialPoint& y) {
    const double d = detail::green_unchecked(domain, x1, y) - detail::green_unchecked(domain, x2, y);
    return d * d;
  };
  return integrate_impl(domain, f, pts, rel_tol, max_evaluations, true).value;
}

}  // namespace spoisson
