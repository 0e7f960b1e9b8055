#include <spoisson/nonlinear_solver.hpp>

#include <spoisson/errors.hpp>
#include <spoisson/parallel.hpp>
#include <spoisson/rng.hpp>
#include <spoisson/stats.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace spoisson {

NemytskiiSpec zero_nonlinearity(std::size_t d) {
  NemytskiiSpec s;
  s.name = "zero";
  s.d = d;
  s.is_zero = true;
  auto zero = [d](const double*, double* out) { std::fill(out, out + d, 0.0); };
  s.f = s.f1 = s.f2 = zero;
  s.jacobian = [d](const double*, double* jac) { std::fill(jac, jac + d * d, 0.0); };
  return s;
}

NemytskiiSpec linear_nonlinearity(std::size_t d, double lambda) {
  NemytskiiSpec s;
  s.name = "linear";
  s.d = d;
  auto lin = [d, lambda](const double* z, double* out) {
    for (std::size_t i = 0; i < d; ++i) out[i] = lambda * z[i];
  };
  auto zero = [d](const double*, double* out) { std::fill(out, out + d, 0.0); };
  s.f = lin;
  if (lambda >= 0.0) {
    s.f1 = lin;
    s.f2 = zero;
  } else {
    s.f1 = zero;
    s.f2 = lin;
    s.L = -lambda;
  }
  s.jacobian = [d, lambda](const double*, double* jac) {
    std::fill(jac, jac + d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) jac[i * d + i] = lambda;
  };
  return s;
}

NemytskiiSpec arctan_nonlinearity(std::size_t d) {
  NemytskiiSpec s;
  s.name = "arctan";
  s.d = d;
  auto f = [d](const double* z, double* out) {
    for (std::size_t i = 0; i < d; ++i) out[i] = std::atan(z[i]);
  };
  s.f = s.f1 = f;
  s.f2 = [d](const double*, double* out) { std::fill(out, out + d, 0.0); };
  s.jacobian = [d](const double* z, double* jac) {
    std::fill(jac, jac + d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) jac[i * d + i] = 1.0 / (1.0 + z[i] * z[i]);
  };
  return s;
}

NemytskiiSpec sine_nonlinearity(std::size_t d, double c) {
  NemytskiiSpec s;
  s.name = "sine";
  s.d = d;
  auto f = [d, c](const double* z, double* out) {
    for (std::size_t i = 0; i < d; ++i) out[i] = -c * std::sin(z[i]);
  };
  s.f = s.f2 = f;
  s.f1 = [d](const double*, double* out) { std::fill(out, out + d, 0.0); };
  s.L = std::abs(c);
  s.jacobian = [d, c](const double* z, double* jac) {
    std::fill(jac, jac + d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) jac[i * d + i] = -c * std::cos(z[i]);
  };
  return s;
}

SpecCheck check_spec(const NemytskiiSpec& spec, std::size_t samples, std::uint64_t seed, double scale) {
  SpecCheck out;
  const std::size_t d = spec.d;
  std::vector<double> a(d), b(d), fa(d), f1a(d), f2a(d), f1b(d), f2b(d);
  Philox rng = make_stream(seed, StreamTag::Probe, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = scale * (2.0 * rng.uniform() - 1.0);
      b[i] = scale * (2.0 * rng.uniform() - 1.0);
    }
    spec.f(a.data(), fa.data());
    spec.f1(a.data(), f1a.data());
    spec.f2(a.data(), f2a.data());
    spec.f1(b.data(), f1b.data());
    spec.f2(b.data(), f2b.data());
    double dist2 = 0.0, lip2 = 0.0, mono = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      out.decomposition_error = std::max(out.decomposition_error, std::abs(fa[i] - f1a[i] - f2a[i]));
      dist2 += (a[i] - b[i]) * (a[i] - b[i]);
      lip2 += (f2a[i] - f2b[i]) * (f2a[i] - f2b[i]);
      mono += (a[i] - b[i]) * (f1a[i] - f1b[i]);
    }
    out.lipschitz_excess = std::max(out.lipschitz_excess, std::sqrt(lip2) - spec.L * std::sqrt(dist2));
    out.monotonicity_defect = std::max(out.monotonicity_defect, -mono);
  }
  return out;
}

namespace {

double smallest_tridiagonal_eigenvalue(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Eigensolver, "tridiagonal eigensolver failed");
  return es.eigenvalues().minCoeff();
}

// -u'' on (0, b) with n cells of width h = b/n, Dirichlet at both ends (n - 1 unknowns).
double interval_eigenvalue(double b, int cells) {
  const double h = b / cells;
  const int m = cells - 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(m, 2.0 / (h * h));
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(m - 1, -1.0 / (h * h));
  return smallest_tridiagonal_eigenvalue(diag, sub);
}

// Radial -(1/r)(r u')' on the unit disk, cell-centred finite volumes, u(1) = 0 by reflection.
double disk_eigenvalue(int cells) {
  const double h = 1.0 / cells;
  Eigen::VectorXd diag(cells), sub(cells - 1);
  for (int i = 0; i < cells; ++i) {
    const double rc = (i + 0.5) * h;
    const double rm = i * h;
    const double rp = (i + 1) * h;
    const double outer = i == cells - 1 ? 2.0 * rp : rp;
    diag(i) = (rm + outer) / (h * h * rc);
    if (i + 1 < cells) sub(i) = -rp / (h * h * std::sqrt(rc * (i + 1.5) * h));
  }
  return smallest_tridiagonal_eigenvalue(diag, sub);
}

}  // namespace

double poincare_constant(const Domain& domain, int n) {
  if (n < 32) throw Error(ErrorCode::Usage, "poincare_constant needs n >= 32");
  auto at = [&](int cells) {
    if (domain.kind() == DomainKind::Interval) return interval_eigenvalue(domain.length(), cells);
    if (domain.dim() == 2) return disk_eigenvalue(cells);
    // In three dimensions w = r u turns the radial problem into -w'' on (0, 1).
    return interval_eigenvalue(1.0, cells);
  };
  const double coarse = at(n);
  const double fine = at(2 * n);
  return (4.0 * fine - coarse) / 3.0;
}

NodeSet quadrature_nodes(const Domain& domain, int resolution) {
  NodeSet out;
  if (resolution <= 0) return out;
  const double pi = std::numbers::pi;
  if (domain.kind() == DomainKind::Interval) {
    const double h = domain.length() / (resolution + 1);
    for (int i = 1; i <= resolution; ++i) {
      out.points.push_back(SpatialPoint::scalar(i * h));
      out.weights.push_back(h);
    }
    return out;
  }
  const int nr = resolution;
  const double dr = 1.0 / nr;
  if (domain.dim() == 2) {
    const int nt = 4 * nr;
    const double dt = 2.0 * pi / nt;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        const double r = (i + 0.5) * dr;
        const double t = (j + 0.5) * dt;
        out.points.push_back(SpatialPoint{r * std::cos(t), r * std::sin(t)});
        out.weights.push_back(r * dr * dt);
      }
    return out;
  }
  const int nu = 2 * nr;
  const int np = 4 * nr;
  const double du = 2.0 / nu;
  const double dp = 2.0 * pi / np;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nu; ++j)
      for (int l = 0; l < np; ++l) {
        const double r = (i + 0.5) * dr;
        const double shell = (std::pow((i + 1) * dr, 3) - std::pow(i * dr, 3)) / 3.0;
        const double u = -1.0 + (j + 0.5) * du;
        const double s = std::sqrt(1.0 - u * u);
        const double p = (l + 0.5) * dp;
        out.points.push_back(SpatialPoint{r * s * std::cos(p), r * s * std::sin(p), r * u});
        out.weights.push_back(shell * du * dp);
      }
  return out;
}

namespace {

// Integral of positive_green(x, .) over the ball of volume w centred at x, with the
// image part frozen at its value at x.
double diagonal_entry(const Domain& domain, const SpatialPoint& x, double w) {
  const int k = domain.dim();
  if (k == 1) return positive_green(domain, x, x) * w;
  const double img = 1.0 - x.norm_sq();
  if (k == 2) {
    const double rho = std::sqrt(w / std::numbers::pi);
    return -0.5 * rho * rho * (std::log(rho) - 0.5) + w * fundamental(2, img);
  }
  const double rho = std::cbrt(3.0 * w / (4.0 * std::numbers::pi));
  return 0.5 * rho * rho - w * fundamental(3, img);
}

}  // namespace

SystemFamily::SystemFamily(SystemSpec spec) : spec_(std::move(spec)) {
  const Domain& domain = spec_.domain;
  if (spec_.d == 0) throw Error(ErrorCode::Usage, "system needs d >= 1");
  if (spec_.sigma.size() == 0) spec_.sigma = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(spec_.d), static_cast<Eigen::Index>(spec_.d));
  if (spec_.sigma.rows() != static_cast<Eigen::Index>(spec_.d) || spec_.sigma.cols() != static_cast<Eigen::Index>(spec_.d))
    throw Error(ErrorCode::Usage, "sigma must be d x d");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(spec_.sigma);
  if (lu.rank() < static_cast<Eigen::Index>(spec_.d))
    throw Error(ErrorCode::SingularNoise, "noise matrix sigma is singular");

  const NodeSet nodes = quadrature_nodes(domain, spec_.resolution);
  grid_ = nodes.points;
  weights_ = nodes.weights;
  for (const auto& x : spec_.extra_points) {
    grid_.push_back(x);
    weights_.push_back(0.0);
  }
  if (grid_.empty()) throw Error(ErrorCode::EmptyGrid, "system has no nodes");
  const auto n = static_cast<Eigen::Index>(grid_.size());
  // Covariance first: it rejects repeated points before any Green function is evaluated on the diagonal.
  cov_ = build_covariance(domain, grid_, spec_.rel_tol);
  k_ = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights_[static_cast<std::size_t>(j)];
      if (w == 0.0) continue;
      k_(i, j) = i == j ? diagonal_entry(domain, grid_[static_cast<std::size_t>(i)], w)
                        : positive_green(domain, grid_[static_cast<std::size_t>(i)], grid_[static_cast<std::size_t>(j)]) * w;
    }
  a_ = poincare_constant(domain, spec_.poincare_resolution);
  if (spec_.g) {
    const std::size_t d = spec_.d;
    Eigen::MatrixXd gv(n, static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto v = spec_.g(grid_[static_cast<std::size_t>(j)]);
      if (v.size() != d) throw Error(ErrorCode::Usage, "forcing g must return d values");
      for (std::size_t c = 0; c < d; ++c) gv(j, static_cast<Eigen::Index>(c)) = v[c];
    }
    const Eigen::MatrixXd kg = k_ * gv;
    deterministic_.resize(static_cast<std::size_t>(n) * d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) deterministic_[static_cast<std::size_t>(i) * d + c] = kg(i, static_cast<Eigen::Index>(c));
  }
}

DiscreteSystem SystemFamily::system(std::uint64_t seed, std::uint64_t draw) const {
  const std::size_t d = spec_.d;
  const std::size_t n = grid_.size();
  DiscreteSystem s;
  s.grid = grid_;
  s.weights = weights_;
  s.K = k_;
  s.a = a_;
  s.d = d;
  const FieldSample v = sample(cov_, d, 1, seed, draw);
  const bool identity = spec_.sigma.isIdentity(0.0);
  s.noise.resize(n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) {
      if (identity) {
        s.noise[i * d + c] = v.at(0, i, c);
        continue;
      }
      double acc = 0.0;
      for (std::size_t c2 = 0; c2 < d; ++c2)
        acc += spec_.sigma(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c2)) * v.at(0, i, c2);
      s.noise[i * d + c] = acc;
    }
  s.deterministic = deterministic_;
  s.b_vec = s.noise;
  if (!deterministic_.empty())
    for (std::size_t i = 0; i < n * d; ++i) s.b_vec[i] += deterministic_[i];
  return s;
}

DiscreteSystem assemble(const Domain& domain, int grid_resolution, const Forcing& g, const Eigen::MatrixXd& sigma,
                        std::size_t d, std::uint64_t seed) {
  SystemSpec spec;
  spec.domain = domain;
  spec.resolution = grid_resolution;
  spec.g = g;
  spec.sigma = sigma;
  spec.d = d;
  return SystemFamily(std::move(spec)).system(seed, 0);
}

namespace {

Eigen::MatrixXd apply_f(const DiscreteSystem& s, const NemytskiiSpec& spec, const std::vector<double>& u) {
  const auto n = static_cast<Eigen::Index>(s.grid.size());
  Eigen::MatrixXd fu(n, static_cast<Eigen::Index>(s.d));
  std::vector<double> out(s.d);
  for (Eigen::Index i = 0; i < n; ++i) {
    spec.f(&u[static_cast<std::size_t>(i) * s.d], out.data());
    for (std::size_t c = 0; c < s.d; ++c) fu(i, static_cast<Eigen::Index>(c)) = out[c];
  }
  return fu;
}

// K f(u) in the point-major layout.
std::vector<double> kf(const DiscreteSystem& s, const NemytskiiSpec& spec, const std::vector<double>& u) {
  const Eigen::MatrixXd prod = s.K * apply_f(s, spec, u);
  std::vector<double> out(u.size());
  for (Eigen::Index i = 0; i < prod.rows(); ++i)
    for (std::size_t c = 0; c < s.d; ++c) out[static_cast<std::size_t>(i) * s.d + c] = prod(i, static_cast<Eigen::Index>(c));
  return out;
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> defect(const DiscreteSystem& s, const NemytskiiSpec& spec, const std::vector<double>& u) {
  std::vector<double> r = kf(s, spec, u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = u[i] + r[i] - s.b_vec[i];
  return r;
}

}  // namespace

double residual(const DiscreteSystem& system, const NemytskiiSpec& spec, const std::vector<double>& u) {
  if (u.size() != system.b_vec.size() || spec.d != system.d) throw Error(ErrorCode::Usage, "residual: shape mismatch");
  return sup_norm(defect(system, spec, u));
}

SolveResult solve_mild(const DiscreteSystem& system, const NemytskiiSpec& spec, const SolverConfig& config) {
  if (spec.d != system.d) throw Error(ErrorCode::Usage, "nonlinearity dimension differs from the system");
  if (spec.L >= system.a)
    throw Error(ErrorCode::MonotonicityViolation,
                "Lipschitz constant L = " + std::to_string(spec.L) + " is not below the Poincare constant a = " +
                    std::to_string(system.a));
  SolveResult res;
  res.theta0 = std::min(1.0, (system.a - spec.L) / (system.a + spec.L));
  const bool newton = config.use_newton && static_cast<bool>(spec.jacobian);
  res.method = newton ? "damped-newton" : "damped-fixed-point";
  std::vector<double> u = config.initial.empty() ? system.b_vec : config.initial;
  if (u.size() != system.b_vec.size()) throw Error(ErrorCode::Usage, "initial guess has the wrong size");
  std::vector<double> f_res = defect(system, spec, u);
  double r = sup_norm(f_res);
  res.log.push_back({0, r, 0.0});
  const std::size_t d = system.d;
  const std::size_t n = system.grid.size();
  double theta = res.theta0;
  for (std::size_t it = 1; r >= config.tol; ++it) {
    if (it > config.max_iterations) throw NonConvergence("mild solver exceeded its iteration budget", r);
    std::vector<double> step(u.size());
    if (newton) {
      const auto m = static_cast<Eigen::Index>(n * d);
      Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(m, m);
      std::vector<double> jf(d * d);
      for (std::size_t j = 0; j < n; ++j) {
        if (system.weights[j] == 0.0) continue;
        spec.jacobian(&u[j * d], jf.data());
        for (std::size_t i = 0; i < n; ++i) {
          const double kij = system.K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (kij == 0.0) continue;
          for (std::size_t c = 0; c < d; ++c)
            for (std::size_t c2 = 0; c2 < d; ++c2)
              jac(static_cast<Eigen::Index>(i * d + c), static_cast<Eigen::Index>(j * d + c2)) += kij * jf[c * d + c2];
        }
      }
      Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(f_res.data(), m);
      const Eigen::VectorXd s = jac.partialPivLu().solve(rhs);
      for (std::size_t i = 0; i < u.size(); ++i) step[i] = s(static_cast<Eigen::Index>(i));
    } else {
      // Fixed-point direction: (b - K f(u)) - u = -defect.
      for (std::size_t i = 0; i < u.size(); ++i) step[i] = -f_res[i];
      theta = res.theta0;
    }
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      std::vector<double> trial(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + theta * step[i];
      std::vector<double> tr = defect(system, spec, trial);
      const double rt = sup_norm(tr);
      if (rt < r) {
        u = std::move(trial);
        f_res = std::move(tr);
        r = rt;
        accepted = true;
        break;
      }
      theta *= 0.5;
    }
    if (!accepted) throw NonConvergence("mild solver line search stalled", r);
    res.log.push_back({it, r, theta});
    res.iterations = it;
    if (newton) theta = std::min(1.0, 2.0 * theta);
  }
  res.u = std::move(u);
  res.residual = r;
  return res;
}

double property_p_ratio(const DiscreteSystem& s, const std::vector<double>& phi) {
  const auto n = static_cast<Eigen::Index>(s.grid.size());
  if (phi.size() != static_cast<std::size_t>(n)) throw Error(ErrorCode::Usage, "probe must have one value per node");
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(phi.data(), n);
  const Eigen::VectorXd kp = s.K * p;
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = s.weights[static_cast<std::size_t>(i)];
    num += w * kp(i) * p(i);
    den += w * kp(i) * kp(i);
  }
  return num / den;
}

namespace {

void require_moment_regime(const SystemFamily& family, const NemytskiiSpec& spec) {
  if (spec.L == 0.0) return;
  const DiscreteSystem s = family.system(0, 0);
  double k_bound = 0.0;
  double volume = 0.0;
  for (std::size_t j = 0; j < s.grid.size(); ++j) volume += s.weights[j];
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.grid.size(); ++j)
      if (s.weights[j] > 0.0) {
        const double kij = s.K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        acc += kij * kij / s.weights[j];
      }
    k_bound = std::max(k_bound, std::sqrt(acc));
  }
  const double limit = std::min(s.a, 1.0 / (k_bound * std::sqrt(volume)));
  if (!(spec.L < limit))
    throw Error(ErrorCode::MonotonicityViolation, "moment estimate needs L < min(a, 1/(K |D|^1/2))");
}

std::vector<double> solve_draw(const SystemFamily& family, const NemytskiiSpec& spec, std::uint64_t seed,
                               std::uint64_t draw, const SolverConfig& config) {
  const DiscreteSystem s = family.system(seed, draw);
  if (spec.is_zero) return s.b_vec;
  try {
    return solve_mild(s, spec, config).u;
  } catch (const NonConvergence& e) {
    throw NonConvergence(std::string(e.what()) + " (seed " + std::to_string(seed) + ", draw " + std::to_string(draw) + ")",
                         e.residual());
  }
}

}  // namespace

MomentEstimate moment_estimate(const SystemFamily& family, const NemytskiiSpec& spec, int p, std::size_t n,
                               std::uint64_t seed, const SolverConfig& config) {
  if (p != 2 && p != 4 && p != 6 && p != 8) throw Error(ErrorCode::Usage, "moment order must be 2, 4, 6 or 8");
  if (n < 2) throw Error(ErrorCode::Usage, "moment estimate needs n >= 2");
  require_moment_regime(family, spec);
  const std::size_t d = family.spec().d;
  const std::size_t g = family.grid().size();
  std::vector<std::vector<double>> sols(n);
  parallel_for(n, [&](std::size_t j) { sols[j] = solve_draw(family, spec, seed, j, config); });
  const DiscreteSystem s0 = family.system(seed, 0);
  std::vector<double> l2(n);
  std::vector<std::vector<double>> pt(g, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) r2 += sols[j][i * d + c] * sols[j][i * d + c];
      acc += s0.weights[i] * r2;
      pt[i][j] = std::pow(r2, 0.5 * p);
    }
    l2[j] = std::pow(acc, 0.5 * p);
  }
  MomentEstimate out;
  out.draws = n;
  const MeanSe ml2 = mean_se(l2);
  out.l2_norm_moment = ml2.mean;
  out.l2_norm_se = ml2.se;
  for (std::size_t i = 0; i < g; ++i) {
    const MeanSe m = mean_se(pt[i]);
    if (m.mean > out.sup_point_moment) {
      out.sup_point_moment = m.mean;
      out.sup_point_se = m.se;
    }
  }
  return out;
}

HolderEstimate holder_estimate(const Domain& domain, const NemytskiiSpec& spec, const std::vector<PointPair>& pairs,
                               int p, std::size_t n, std::uint64_t seed, int resolution, double gamma, double rel_tol) {
  if (pairs.empty()) throw Error(ErrorCode::Usage, "holder estimate needs pairs");
  if (p < 1) throw Error(ErrorCode::Usage, "moment order must be positive");
  std::vector<SpatialPoint> pts;
  std::map<SpatialPoint, std::size_t> index;
  auto add = [&](const SpatialPoint& x) {
    if (!index.count(x)) {
      index[x] = pts.size();
      pts.push_back(x);
    }
  };
  for (const auto& [a, b] : pairs) {
    add(a);
    add(b);
  }
  SystemSpec ss;
  ss.domain = domain;
  ss.resolution = resolution;
  ss.extra_points = pts;
  ss.d = spec.d;
  ss.rel_tol = rel_tol;
  const SystemFamily family(ss);
  const std::size_t offset = family.grid().size() - pts.size();
  const std::size_t d = spec.d;
  std::vector<std::vector<double>> vals(pairs.size(), std::vector<double>(n));
  std::vector<std::vector<double>> sols(n);
  parallel_for(n, [&](std::size_t j) { sols[j] = solve_draw(family, spec, seed, j, SolverConfig{}); });
  HolderEstimate out;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const std::size_t ia = offset + index[pairs[q].first];
    const std::size_t ib = offset + index[pairs[q].second];
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = sols[j][ia * d + c] - sols[j][ib * d + c];
        r2 += diff * diff;
      }
      vals[q][j] = std::pow(r2, 0.5 * p);
    }
    const MeanSe m = mean_se(vals[q]);
    out.separations.push_back(distance(pairs[q].first, pairs[q].second));
    out.moments.push_back(m.mean);
    out.se.push_back(m.se);
  }
  out.slope = loglog_slope(out.separations, out.moments);
  out.expected = p * holder_index(domain.dim(), gamma);
  return out;
}

MarginalSmoothness marginal_smoothness_diagnostic(const std::vector<double>& values) {
  if (values.size() < 1000) throw Error(ErrorCode::Usage, "marginal smoothness diagnostic needs at least 1000 draws");
  MarginalSmoothness out;
  out.n = values.size();
  std::map<double, std::size_t> counts;
  std::size_t top = 0;
  for (double v : values) top = std::max(top, ++counts[v]);
  out.atom_mass = static_cast<double>(top) / static_cast<double>(out.n);
  out.atomless = top <= 2;
  const MeanSe m = mean_se(values);
  const double sd = std::sqrt(sample_variance(values));
  if (sd > 0.0) {
    std::vector<double> z(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - m.mean) / sd;
    out.ks_p_value = ks_normal(z).p_value;
    const double h = 1.06 * sd * std::pow(static_cast<double>(out.n), -0.2);
    double acc = 0.0;
    for (double v : values) {
      const double t = (v - m.mean) / h;
      acc += std::exp(-0.5 * t * t);
    }
    out.kde_at_mean = acc / (static_cast<double>(out.n) * h * std::sqrt(2.0 * std::numbers::pi));
  }
  return out;
}

}  // namespace spoisson
