#include <spoisson/green_kernel.hpp>

#include <spoisson/errors.hpp>

#include <algorithm>
#include <complex>
#include <cstdio>
#include <sstream>

namespace spoisson {

SpatialPoint::SpatialPoint(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
  if (coords.size() == 0 || coords.size() > 3) throw Error(ErrorCode::Usage, "points must have 1 to 3 coordinates");
  std::copy(coords.begin(), coords.end(), c_.begin());
}

std::string SpatialPoint::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < dim_; ++i) os << (i ? ", " : "") << (*this)[i];
  os << ')';
  return os.str();
}

Domain Domain::interval(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::Usage, "interval length b must be positive");
  return Domain(DomainKind::Interval, 1, b);
}

Domain Domain::unit_ball(int k) {
  if (k != 2 && k != 3) throw Error(ErrorCode::Usage, "the unit ball domain requires k = 2 or k = 3");
  return Domain(DomainKind::UnitBall, k, 1.0);
}

double Domain::volume() const noexcept {
  if (kind_ == DomainKind::Interval) return b_;
  return k_ == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0;
}

bool Domain::contains(const SpatialPoint& x, double tol) const noexcept {
  if (x.dim() != k_) return false;
  if (kind_ == DomainKind::Interval) return x[0] >= -tol && x[0] <= b_ + tol;
  return x.norm() <= 1.0 + tol;
}

void Domain::require_contains(const SpatialPoint& x) const {
  if (x.dim() != k_)
    throw Error(ErrorCode::Domain, "point " + x.to_string() + " has the wrong dimension for " + describe());
  if (!contains(x)) throw Error(ErrorCode::Domain, "point " + x.to_string() + " lies outside " + describe());
}

std::string Domain::describe() const {
  char buf[64];
  if (kind_ == DomainKind::Interval)
    std::snprintf(buf, sizeof buf, "interval (0, %.17g)", b_);
  else
    std::snprintf(buf, sizeof buf, "unit ball in R^%d", k_);
  return buf;
}

double fundamental(int k, double r) {
  if (k == 1) throw Error(ErrorCode::Unsupported, "fundamental solution is not used for k = 1");
  if (k != 2 && k != 3) throw Error(ErrorCode::Unsupported, "fundamental solution requires k = 2 or 3");
  if (!(r > 0.0)) throw Error(ErrorCode::SingularArgument, "fundamental solution needs r > 0");
  return detail::fundamental_unchecked(k, r);
}

double image_modulus(int k, const SpatialPoint& x, const SpatialPoint& y) {
  if (k == 2) {
    // |y| |x - y/|y|^2| = |1 - conj(x) y| in complex notation.
    const std::complex<double> zx(x[0], x[1]);
    const std::complex<double> zy(y[0], y[1]);
    return std::abs(1.0 - std::conj(zx) * zy);
  }
  return detail::image_modulus_unchecked(x, y);
}

double image_modulus_literal(const SpatialPoint& x, const SpatialPoint& y) {
  const double ny2 = y.norm_sq();
  if (ny2 == 0.0) throw Error(ErrorCode::SingularArgument, "literal image modulus needs y != 0");
  return std::sqrt(ny2) * (x - (1.0 / ny2) * y).norm();
}

KernelValue green(const Domain& domain, const SpatialPoint& x, const SpatialPoint& y) {
  domain.require_contains(x);
  domain.require_contains(y);
  const int k = domain.dim();
  if (k == 1) {
    const double b = domain.length();
    KernelValue v;
    v.l_part = std::min(x[0], y[0]);
    v.s_part = x[0] * y[0] / b;
    v.g = v.l_part - v.s_part;
    return v;
  }
  const double r = distance(x, y);
  if (r == 0.0) throw Error(ErrorCode::DiagonalSingularity, "Green function is singular at x = y " + x.to_string());
  KernelValue v;
  v.l_part = detail::fundamental_unchecked(k, r);
  if (y.norm() < kOriginBranchRadius) {
    v.s_part = detail::fundamental_unchecked(k, 1.0);
  } else {
    const double q = image_modulus(k, x, y);
    // q >= 1 - |x||y| > 0 unless both points are on the boundary, where G vanishes anyway.
    if (q == 0.0) {
      v.s_part = v.l_part;
    } else {
      v.s_part = detail::fundamental_unchecked(k, q);
    }
  }
  v.g = v.l_part - v.s_part;
  return v;
}

double positive_green(const Domain& domain, const SpatialPoint& x, const SpatialPoint& y) {
  const double g = green(domain, x, y).g;
  return domain.dim() == 2 ? -g : g;
}

double boundary_distance(const Domain& domain, const SpatialPoint& x) {
  if (domain.kind() == DomainKind::Interval) return std::max(0.0, std::min(x[0], domain.length() - x[0]));
  return std::max(0.0, 1.0 - x.norm());
}

std::vector<SpatialPoint> probe_grid(const Domain& domain, int resolution, double margin) {
  if (resolution < 2) throw Error(ErrorCode::Usage, "probe grid resolution must be at least 2");
  if (!(margin > 0.0)) throw Error(ErrorCode::Usage, "probe grid margin must be positive");
  std::vector<SpatialPoint> grid;
  const double eps = 1e-12;
  if (domain.kind() == DomainKind::Interval) {
    const double lo = margin;
    const double hi = domain.length() - margin;
    if (hi < lo - eps) throw Error(ErrorCode::EmptyGrid, "margin leaves no interior points");
    for (int i = 0; i < resolution; ++i) {
      const double t = static_cast<double>(i) / (resolution - 1);
      grid.push_back(SpatialPoint::scalar(lo + t * (hi - lo)));
    }
    return grid;
  }
  const double radius = 1.0 - margin;
  if (radius < 0.0) throw Error(ErrorCode::EmptyGrid, "margin leaves no interior points");
  const int k = domain.dim();
  std::vector<double> axis(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) axis[static_cast<std::size_t>(i)] = -radius + 2.0 * radius * i / (resolution - 1);
  std::array<int, 3> idx{0, 0, 0};
  const auto total = static_cast<long>(std::pow(resolution, k));
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int a = k - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % resolution);
      rem /= resolution;
    }
    SpatialPoint p(k);
    for (int a = 0; a < k; ++a) p[a] = axis[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    if (p.norm() <= radius + eps) grid.push_back(p);
  }
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "margin leaves no lattice points");
  return grid;
}

}  // namespace spoisson
