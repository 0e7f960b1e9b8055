#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <string>
#include <vector>

namespace spoisson {

/// A point of R^k, k <= 3, stored inline.
class SpatialPoint {
 public:
  SpatialPoint() = default;
  explicit SpatialPoint(int dim) : dim_(dim) {}
  SpatialPoint(std::initializer_list<double> coords);

  static SpatialPoint scalar(double x) { return SpatialPoint{x}; }

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }

  double norm_sq() const noexcept { return c_[0] * c_[0] + c_[1] * c_[1] + c_[2] * c_[2]; }
  double norm() const noexcept { return std::sqrt(norm_sq()); }

  friend SpatialPoint operator+(SpatialPoint a, const SpatialPoint& b) noexcept {
    for (std::size_t i = 0; i < 3; ++i) a.c_[i] += b.c_[i];
    return a;
  }
  friend SpatialPoint operator-(SpatialPoint a, const SpatialPoint& b) noexcept {
    for (std::size_t i = 0; i < 3; ++i) a.c_[i] -= b.c_[i];
    return a;
  }
  friend SpatialPoint operator*(double s, SpatialPoint a) noexcept {
    for (auto& v : a.c_) v *= s;
    return a;
  }
  friend double dot(const SpatialPoint& a, const SpatialPoint& b) noexcept {
    return a.c_[0] * b.c_[0] + a.c_[1] * b.c_[1] + a.c_[2] * b.c_[2];
  }
  friend double distance(const SpatialPoint& a, const SpatialPoint& b) noexcept { return (a - b).norm(); }
  friend bool operator==(const SpatialPoint& a, const SpatialPoint& b) noexcept {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }
  friend bool operator<(const SpatialPoint& a, const SpatialPoint& b) noexcept { return a.c_ < b.c_; }

  std::string to_string() const;

 private:
  // Unused trailing coordinates stay zero so norms and dots need no dimension branch.
  std::array<double, 3> c_{0.0, 0.0, 0.0};
  int dim_ = 0;
};

enum class DomainKind { Interval, UnitBall };

/// The open interval (0, b) for k = 1, or the unit ball of R^k for k = 2, 3.
class Domain {
 public:
  static Domain interval(double b);
  static Domain unit_ball(int k);

  DomainKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return k_; }
  /// b for the interval, 1 (the radius) for the ball.
  double length() const noexcept { return b_; }
  double volume() const noexcept;

  bool contains(const SpatialPoint& x, double tol = 1e-12) const noexcept;
  /// Throws a domain error unless x has the right dimension and lies in the closed domain.
  void require_contains(const SpatialPoint& x) const;

  std::string describe() const;

 private:
  Domain(DomainKind kind, int k, double b) : kind_(kind), k_(k), b_(b) {}
  DomainKind kind_;
  int k_;
  double b_;
};

struct KernelValue {
  double g = 0.0;
  double l_part = 0.0;
  double s_part = 0.0;
};

inline constexpr double kOriginBranchRadius = 1e-14;

/// Newtonian kernel: (1/2pi) log r for k = 2, (1/4pi) / r for k = 3.
double fundamental(int k, double r);

/// |y| |x - y/|y|^2|, the distance to the inverted image, written without the division.
double image_modulus(int k, const SpatialPoint& x, const SpatialPoint& y);
/// The same quantity evaluated literally; only meaningful for y != 0.
double image_modulus_literal(const SpatialPoint& x, const SpatialPoint& y);

/// Dirichlet Green function of the Laplacian (sign convention: negative for k = 2).
KernelValue green(const Domain& domain, const SpatialPoint& x, const SpatialPoint& y);
/// green() for k = 1, 3 and its negation for k = 2; nonnegative on the open domain.
double positive_green(const Domain& domain, const SpatialPoint& x, const SpatialPoint& y);

double boundary_distance(const Domain& domain, const SpatialPoint& x);

/// Lattice of interior points with boundary distance >= margin, lexicographically ordered.
std::vector<SpatialPoint> probe_grid(const Domain& domain, int resolution, double margin);

namespace detail {

inline double fundamental_unchecked(int k, double r) noexcept {
  if (k == 2) return std::log(r) / (2.0 * std::numbers::pi);
  return 1.0 / (4.0 * std::numbers::pi * r);
}

inline double image_modulus_unchecked(const SpatialPoint& x, const SpatialPoint& y) noexcept {
  const double q = x.norm_sq() * y.norm_sq() - 2.0 * dot(x, y) + 1.0;
  return std::sqrt(q > 0.0 ? q : 0.0);
}

/// Hot-path evaluation for quadrature: no validation, y != x assumed for k >= 2.
inline double green_unchecked(const Domain& domain, const SpatialPoint& x, const SpatialPoint& y) noexcept {
  const int k = domain.dim();
  if (k == 1) {
    const double b = domain.length();
    return std::min(x[0], y[0]) - x[0] * y[0] / b;
  }
  return fundamental_unchecked(k, distance(x, y)) - fundamental_unchecked(k, image_modulus_unchecked(x, y));
}

}  // namespace detail

}  // namespace spoisson
