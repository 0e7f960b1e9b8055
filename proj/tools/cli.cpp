#include "cli.hpp"

#include <spoisson/errors.hpp>
#include <spoisson/gaussian_field.hpp>
#include <spoisson/green_kernel.hpp>
#include <spoisson/l2_geometry.hpp>
#include <spoisson/nonlinear_solver.hpp>
#include <spoisson/parallel.hpp>
#include <spoisson/potential_theory.hpp>
#include <spoisson/stats.hpp>
#include <spoisson/verify.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

namespace spoisson::cli {

namespace {

double parse_double(const std::string& s) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) throw Error(ErrorCode::Usage, "not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
  return out;
}

SpatialPoint parse_point(const std::string& s, int k) {
  const auto c = parse_list(s);
  if (static_cast<int>(c.size()) != k)
    throw Error(ErrorCode::Usage, "point '" + s + "' needs " + std::to_string(k) + " coordinates");
  SpatialPoint p(k);
  for (int i = 0; i < k; ++i) p[i] = c[static_cast<std::size_t>(i)];
  return p;
}

std::vector<SpatialPoint> parse_points(const std::string& s, int k) {
  std::vector<SpatialPoint> out;
  for (const auto& part : split(s, ';')) out.push_back(parse_point(part, k));
  return out;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

std::string fmt(const SpatialPoint& p) {
  std::string s = "(";
  for (int i = 0; i < p.dim(); ++i) s += (i ? "," : "") + fmt(p[i]);
  return s + ")";
}

Domain make_domain(const RunConfig& c) {
  if (c.domain == "interval") return Domain::interval(c.b);
  if (c.domain == "ball") return Domain::unit_ball(c.k);
  throw Error(ErrorCode::Usage, "unknown domain '" + c.domain + "' (interval or ball)");
}

ScanRegion make_region(const RunConfig& c) {
  const auto v = parse_list(c.region);
  if (c.domain == "interval") {
    if (v.size() != 2) throw Error(ErrorCode::Usage, "interval region needs 'lo,hi'");
    return ScanRegion::interval(v[0], v[1]);
  }
  if (v.size() != 1) throw Error(ErrorCode::Usage, "ball region needs a radius");
  return ScanRegion::centered_ball(v[0]);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Usage, "cannot write " + path);
  f << text;
}

std::string csv_path(const RunConfig& c) {
  if (!c.csv.empty()) return c.csv;
  if (c.out.empty()) return {};
  const auto dot = c.out.rfind('.');
  const auto slash = c.out.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? c.out.substr(0, dot) : c.out) + ".csv";
}

void add_scan(Report& rep, const std::string& tag, const BoundScanReport& r, const std::string& ref) {
  rep.add(tag + ".min_ratio", r.min_ratio, ref);
  rep.add(tag + ".max_ratio", r.max_ratio, ref);
  for (const auto& [name, v] : r.paper_constants) rep.add(tag + "." + name, v, ref);
  for (const auto& [name, v] : r.extras) rep.add(tag + "." + name, v, "invented: scan diagnostic");
  rep.add(tag + ".pairs", static_cast<double>(r.pair_count), "invented: scan size");
}

void scan_csv(std::ostringstream& csv, const std::string& tag, const BoundScanReport& r) {
  csv.precision(17);
  for (const auto& smp : r.samples) {
    csv << tag;
    for (const SpatialPoint* p : {&smp.pair.first, &smp.pair.second})
      for (int i = 0; i < p->dim(); ++i) csv << ',' << (*p)[i];
    csv << ',' << smp.separation << ',' << smp.ratio << '\n';
  }
}

void cmd_green(const RunConfig& c, Report& rep) {
  const Domain dom = make_domain(c);
  const SpatialPoint x = parse_point(c.x, dom.dim());
  const auto ys = parse_points(c.y, dom.dim());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const KernelValue kv = green(dom, x, ys[i]);
    const std::string tag = "y" + std::to_string(i);
    rep.add(tag + ".green", kv.g, "G(x, y) = L(x, y) - S(x, y)");
    rep.add(tag + ".l_part", kv.l_part, dom.dim() == 1 ? "x ^ y" : "Gamma(|x - y|)");
    rep.add(tag + ".s_part", kv.s_part, dom.dim() == 1 ? "xy/b" : "Gamma(|y| |x - y/|y|^2|)");
    rep.add(tag + ".positive_green", positive_green(dom, x, ys[i]), "|G(x, y)|, sign fixed for k = 2");
  }
}

void cmd_scan(const RunConfig& c, Report& rep, std::ostringstream& csv) {
  const Domain dom = make_domain(c);
  const ScanRegion region = make_region(c);
  ScanOptions so;
  so.pairs = c.samples;
  so.seed = c.seed;
  so.rel_tol = c.tol;
  so.gamma = c.gamma;
  so.max_evaluations = c.budget;
  csv << "scan";
  for (const char* end : {"a", "b"})
    for (int i = 1; i <= dom.dim(); ++i) csv << ",x" << end << i;
  csv << ",separation,ratio\n";
  const bool all = c.scan == "all";
  bool known = all;
  if (all || c.scan == "metric") {
    known = true;
    const auto reps = metric_ratio_scan(dom, region, so);
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& r = reps[i];
      const std::string tag = reps.size() == 1 ? "metric" : i == 0 ? "metric.lower" : "metric.upper";
      rep.notes.push_back(tag + " normalizer: " + r.normalizer);
      add_scan(rep, tag, r, "c N(|D|) <= delta(x1, x2) <= C N(|D|)");
      scan_csv(csv, tag, r);
    }
  }
  if (all || c.scan == "modulus") {
    known = true;
    const auto r = sigma_modulus_scan(dom, region, so);
    add_scan(rep, "modulus", r, "|sigma_1 - sigma_2| <= C |D|^xi");
    scan_csv(csv, "modulus", r);
  }
  if ((all && dom.dim() == 3) || c.scan == "increment") {
    known = true;
    const auto reps = sigma_sq_increment_scan(dom, region, parse_list(c.zeta), so);
    for (const auto& r : reps) {
      const std::string tag = "increment.zeta" + fmt(r.extras.front().second);
      add_scan(rep, tag, r, "|sigma_1^2 - sigma_2^2| <= C |D|^(1 - zeta)");
      scan_csv(csv, tag, r);
    }
  }
  if ((all && dom.dim() == 1) || c.scan == "gap") {
    known = true;
    const auto r = correlation_gap_scan(dom, region, so);
    add_scan(rep, "gap", r, "c |D|^2 <= 1 - rho^2 <= C |D|^2");
    scan_csv(csv, "gap", r);
  }
  if (!known) throw Error(ErrorCode::Usage, "unknown scan '" + c.scan + "' (metric, modulus, increment, gap, all)");
}

std::vector<double> products(const FieldSample& s, std::size_t i, std::size_t j, std::size_t comp) {
  std::vector<double> out(s.n);
  for (std::size_t t = 0; t < s.n; ++t) out[t] = s.at(t, i, comp) * s.at(t, j, comp);
  return out;
}

void cmd_field(const RunConfig& c, Report& rep, std::ostringstream& csv) {
  const Domain dom = make_domain(c);
  const auto grid = c.points.empty() ? probe_grid(dom, c.grid, c.margin) : parse_points(c.points, dom.dim());
  const CovarianceModel model = build_covariance(dom, grid, c.tol, c.budget);
  if (c.exact && dom.kind() != DomainKind::Interval)
    throw Error(ErrorCode::Unsupported, "the Brownian representation exists only on the interval");
  const FieldSample fs = c.exact ? sample_1d_exact(c.b, grid, c.d, c.samples, c.seed) : sample(model, c.d, c.samples, c.seed);
  rep.add("jitter", model.jitter, "invented: Cholesky regularisation");
  double worst_z = 0.0, worst_abs = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i; j < grid.size(); ++j)
      for (std::size_t comp = 0; comp < c.d; ++comp) {
        const MeanSe m = mean_se(products(fs, i, j, comp));
        const double ref = model.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        worst_abs = std::max(worst_abs, std::abs(m.mean - ref));
        if (m.se > 0.0) worst_z = std::max(worst_z, std::abs(m.mean - ref) / m.se);
      }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mean = 0.0, se = 0.0;
    for (std::size_t comp = 0; comp < c.d; ++comp) {
      const MeanSe m = mean_se(products(fs, i, i, comp));
      mean += m.mean / static_cast<double>(c.d);
      se += m.se * m.se / static_cast<double>(c.d * c.d);
    }
    se = std::sqrt(se);
    const std::string tag = "x=" + fmt(grid[i]);
    rep.add(tag + ".gram_variance", model.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)),
            dom.dim() == 1 ? "sigma_x^2 = x^2(b-x)^2/(3b)" : "sigma_x^2 = ||G(x, .)||^2");
    rep.add(tag + ".empirical_variance", mean, mean - 1.959963984540054 * se, mean + 1.959963984540054 * se,
            "E |v(x)|^2 / d = sigma_x^2");
  }
  rep.add("max_abs_cov_dev", worst_abs, "E v(x)v(y) = sigma_xy");
  rep.add("max_cov_dev_in_se", worst_z, "E v(x)v(y) = sigma_xy");
  const std::size_t mid = grid.size() / 2;
  const double sd = std::sqrt(model.gram(static_cast<Eigen::Index>(mid), static_cast<Eigen::Index>(mid)));
  if (sd > 0.0) {
    auto series = fs.series(mid, 0);
    for (double& v : series) v /= sd;
    const KsResult ks = ks_normal(series);
    rep.add("ks_p_value.x=" + fmt(grid[mid]), ks.p_value, "v(x) ~ N(0, sigma_x^2 I_d)");
  }
  csv << to_csv(fs);
}

std::vector<SpatialPoint> hit_grid(const Domain& dom, const ScanRegion& region, int points) {
  if (!region.ball) {
    std::vector<SpatialPoint> g;
    for (int i = 0; i < points; ++i)
      g.push_back(SpatialPoint::scalar(region.lo + (region.hi - region.lo) * i / (points - 1)));
    return g;
  }
  return probe_grid(dom, points, 1.0 - region.radius);
}

void cmd_hitprob(const RunConfig& c, Report& rep, std::ostringstream& csv) {
  const Domain dom = make_domain(c);
  const int k = dom.dim();
  const int d = static_cast<int>(c.d);
  const double beta = codimension(k, d, c.gamma);
  rep.add("beta", beta, "beta = d - k/xi");
  if (is_critical_dimension(k, d, c.gamma)) throw Error(ErrorCode::CriticalDimension, kCriticalDimensionNotice);
  const ScanRegion region = make_region(c);
  validate_region(dom, region);
  const CovarianceModel model = build_covariance(dom, hit_grid(dom, region, c.grid), c.tol, c.budget);
  std::vector<double> center = parse_list(c.center);
  if (center.size() != c.d) throw Error(ErrorCode::Usage, "--center needs d coordinates");
  HitOptions ho;
  ho.gamma = c.gamma;
  ho.margin = c.margin;
  const auto radii = parse_list(c.radii);
  std::vector<TargetSet> targets;
  for (double r : radii) targets.push_back(TargetSet::ball(center, r));
  if (c.whole_space) targets.push_back(TargetSet::whole_space(c.d));
  const auto reps = hit_probability(model, c.d, targets, c.samples, c.seed, ho);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    const std::string tag = i < radii.size() ? "r=" + fmt(radii[i]) : "whole_space";
    rep.add(tag + ".p_hat", r.p_hat, r.ci_low, r.ci_high, "c Cap_beta(A) <= P(v(I) hits A) <= C H_beta(A)");
    rep.add(tag + ".p_hat_no_margin", r.p_hat_no_margin, "invented: grid estimate without inflation");
    rep.add(tag + ".capacity", r.capacity_value, "Bessel-Riesz capacity Cap_beta");
    rep.add(tag + ".hausdorff", r.hausdorff_value, "Hausdorff measure H_beta");
  }
  rep.add("margin", reps.front().margin, "invented: grid inflation margin");
  std::vector<HitProbReport> sweep(reps.begin(), reps.begin() + static_cast<std::ptrdiff_t>(radii.size()));
  if (radii.size() >= 2) {
    std::vector<double> xs, ps;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (sweep[i].p_hat > 0.0) {
        xs.push_back(radii[i]);
        ps.push_back(sweep[i].p_hat);
      }
    if (xs.size() >= 2) rep.add("radius_slope", loglog_slope(xs, ps), "P(hit B_r) ~ r^beta");
    const SandwichSummary s = sandwich_report(sweep);
    rep.add("capacity_window", s.capacity_window, "c Cap_beta(A) <= P(v(I) hits A)");
    rep.add("hausdorff_window", s.hausdorff_window, "P(v(I) hits A) <= C H_beta(A)");
    rep.add("lower_constant", s.lower_constant, "c Cap_beta(A) <= P(v(I) hits A)");
    rep.add("upper_constant", s.upper_constant, "P(v(I) hits A) <= C H_beta(A)");
  }
  const auto eps = parse_list(c.eps);
  if (!eps.empty()) {
    const PolarityReport pr = polarity_scan(model, c.d, center, eps, c.samples, c.seed, ho);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const auto& r = pr.reports[i];
      rep.add("eps=" + fmt(eps[i]) + ".p_hat", r.p_hat, r.ci_low, r.ci_high, "points polar iff d > k/xi");
    }
    rep.add("eps_slope", pr.slope, "P(hit B_eps(y)) ~ eps^beta");
    rep.notes.push_back(pr.verdict);
  }
  csv << radius_sweep_csv(radii, sweep);
}

NemytskiiSpec make_nonlinearity(const RunConfig& c) {
  if (c.f == "zero") return zero_nonlinearity(c.d);
  if (c.f == "linear") return linear_nonlinearity(c.d, c.lambda);
  if (c.f == "arctan") return arctan_nonlinearity(c.d);
  if (c.f == "sine") return sine_nonlinearity(c.d, c.lambda);
  throw Error(ErrorCode::Usage, "unknown nonlinearity '" + c.f + "' (zero, linear, arctan, sine)");
}

nlohmann::ordered_json iteration_log(const SolveResult& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["theta0"] = r.theta0;
  auto& it = j["iterations"] = nlohmann::ordered_json::array();
  for (const auto& rec : r.log) it.push_back({{"iteration", rec.iteration}, {"residual", encode_number(rec.residual)},
                                              {"theta", rec.theta}});
  return j;
}

void cmd_solve(const RunConfig& c, Report& rep, std::ostringstream& csv) {
  const Domain dom = make_domain(c);
  const NemytskiiSpec f = make_nonlinearity(c);
  SystemSpec ss;
  ss.domain = dom;
  ss.resolution = c.grid;
  ss.d = c.d;
  ss.rel_tol = c.tol;
  if (c.forcing != 0.0) {
    const double g = c.forcing;
    const std::size_t d = c.d;
    ss.g = [g, d](const SpatialPoint&) { return std::vector<double>(d, g); };
  }
  const SystemFamily family(ss);
  const DiscreteSystem sys = family.system(c.seed, 0);
  SolverConfig sc;
  sc.tol = c.solver_tol;
  sc.use_newton = c.newton;
  if (c.start) sc.initial.assign(sys.b_vec.size(), *c.start);
  const SolveResult r = solve_mild(sys, f, sc);
  rep.add("poincare_constant", sys.a, "a = first Dirichlet eigenvalue");
  rep.add("lipschitz_constant", f.L, "0 <= L < a");
  rep.add("theta0", r.theta0, "invented: initial damping min(1, (a - L)/(a + L))");
  rep.add("iterations", static_cast<double>(r.iterations), "invented: solver iterations");
  rep.add("residual", r.residual, "u + G(f(u)) = v");
  double sup = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < sys.grid.size(); ++i)
    for (std::size_t q = 0; q < c.d; ++q) {
      const double v = r.u[i * c.d + q];
      sup = std::max(sup, std::abs(v));
      l2 += sys.weights[i] * v * v;
    }
  rep.add("sup_norm", sup, "invented: solution summary");
  rep.add("l2_norm", std::sqrt(l2), "||u||_{L^2(D)}");
  rep.notes.push_back("method: " + r.method);
  if (f.is_zero && c.forcing == 0.0) {
    const FieldSample fs = sample(family.covariance(), c.d, 1, c.seed, 0);
    const bool same = fs.values.size() == r.u.size() &&
                      std::memcmp(fs.values.data(), r.u.data(), r.u.size() * sizeof(double)) == 0;
    rep.add("matches_field_sample", same ? 1.0 : 0.0, "f = 0: u = v");
  }
  if (c.moments > 0) {
    const MomentEstimate m = moment_estimate(family, f, c.moments, c.samples, c.seed, sc);
    const double z = 1.959963984540054;
    rep.add("moment.l2_norm", m.l2_norm_moment, m.l2_norm_moment - z * m.l2_norm_se, m.l2_norm_moment + z * m.l2_norm_se,
            "E ||u||^p < inf");
    rep.add("moment.sup_point", m.sup_point_moment, m.sup_point_moment - z * m.sup_point_se,
            m.sup_point_moment + z * m.sup_point_se, "sup_x E |u(x)|^p < inf");
  }
  if (c.holder) {
    const std::vector<double> seps = parse_list(c.eps);
    std::vector<PointPair> pairs;
    const SpatialPoint mid = dom.kind() == DomainKind::Interval ? SpatialPoint::scalar(0.5 * c.b) : SpatialPoint(dom.dim());
    for (double s : seps) {
      SpatialPoint h(dom.dim());
      h[0] = 0.5 * s;
      pairs.push_back({mid - h, mid + h});
    }
    const HolderEstimate he = holder_estimate(dom, f, pairs, 2, c.samples, c.seed, f.is_zero ? 0 : c.grid, c.gamma, c.tol);
    for (std::size_t i = 0; i < seps.size(); ++i)
      rep.add("holder.sep=" + fmt(seps[i]), he.moments[i], he.moments[i] - 1.96 * he.se[i],
              he.moments[i] + 1.96 * he.se[i], "E |u(x) - u(y)|^2 <= C |x - y|^(2 xi)");
    rep.add("holder.slope", he.slope, "E |u(x) - u(y)|^p ~ |x - y|^(p xi)");
    rep.add("holder.expected", he.expected, "p xi");
  }
  if (!c.log.empty()) write_file(c.log, iteration_log(r).dump(2) + "\n");
  csv << "node";
  for (int a = 0; a < dom.dim(); ++a) csv << ",x" << a + 1;
  for (std::size_t q = 0; q < c.d; ++q) csv << ",u" << q + 1;
  csv << '\n';
  csv.precision(17);
  for (std::size_t i = 0; i < sys.grid.size(); ++i) {
    csv << i;
    for (int a = 0; a < dom.dim(); ++a) csv << ',' << sys.grid[i][a];
    for (std::size_t q = 0; q < c.d; ++q) csv << ',' << r.u[i * c.d + q];
    csv << '\n';
  }
}

int cmd_verify(const RunConfig& c, Report& rep, std::ostream& log) {
  VerifyOptions vo;
  vo.seed = c.seed;
  vo.tol_scale = c.tol;
  vo.budget = c.budget;
  for (double id : parse_list(c.criteria)) vo.criteria.push_back(static_cast<int>(id));
  VerifyRun run = run_verify(vo, [&](const CriterionOutcome& o) { log << format_outcome(o) << std::endl; });
  const auto config = rep.config;
  rep = std::move(run.report);
  rep.config = config;
  return run.exit_code();
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--domain", c.domain, "interval or ball")->group("Domain");
  app.add_option("--b", c.b, "interval length")->group("Domain");
  app.add_option("--k", c.k, "ball dimension (2 or 3)")->group("Domain");
  app.add_option("--d", c.d, "number of field components")->group("Model");
  app.add_option("--gamma", c.gamma, "Hoelder defect for k = 2")->group("Model");
  app.add_option("--grid", c.grid, "grid points (per axis on the ball); solver radial resolution")->group("Model");
  app.add_option("--margin", c.margin,
                 "field: boundary distance of the probe grid; hitprob: inflation margin (< 0 automatic)")
      ->group("Model");
  app.add_option("--points", c.points, "field: explicit grid 'x;y;...', coordinates comma separated")->group("Model");
  app.add_option("--seed", c.seed, "master seed")->group("Run");
  app.add_option("--tol", c.tol, "quadrature relative tolerance (< 0 default); verify: tolerance multiplier")
      ->group("Run");
  app.add_option("--samples", c.samples, "Monte Carlo draws, or scan pairs")->group("Run");
  app.add_option("--budget", c.budget, "quadrature evaluation budget")->group("Run");
  app.add_option("--threads", c.threads, "worker threads (0: environment or hardware)")->group("Run");
  app.add_option("--out", c.out, "JSON report path (default stdout)")->group("Output");
  app.add_option("--csv", c.csv, "CSV data path (default derived from --out)")->group("Output");
  app.add_option("--x", c.x, "green: source point")->group("green");
  app.add_option("--y", c.y, "green: evaluation points 'y1;y2;...'")->group("green");
  app.add_option("--scan", c.scan, "metric, modulus, increment, gap or all")->group("scan");
  app.add_option("--region", c.region, "'lo,hi' on the interval, radius on the ball")->group("scan / hitprob");
  app.add_option("--zeta", c.zeta, "increment scan exponents")->group("scan");
  app.add_flag("--exact", c.exact, "field: Brownian representation instead of Gram sampling")->group("field");
  app.add_option("--center", c.center, "hitprob: target centre in R^d")->group("hitprob");
  app.add_option("--radii", c.radii, "hitprob: target radii")->group("hitprob");
  app.add_option("--eps", c.eps, "hitprob: polarity radii (decreasing); solve: Hoelder separations")->group("hitprob");
  app.add_flag("--whole-space", c.whole_space, "hitprob: add the whole-space target")->group("hitprob");
  app.add_option("--f", c.f, "zero, linear, arctan or sine")->group("solve");
  app.add_option("--lambda", c.lambda, "slope of the linear map, amplitude of the sine map")->group("solve");
  app.add_option("--forcing", c.forcing, "constant deterministic forcing g")->group("solve");
  app.add_option("--solver-tol", c.solver_tol, "sup-norm residual tolerance")->group("solve");
  app.add_option("--start", c.start, "constant initial guess (default: the right-hand side)")->group("solve");
  app.add_option("--newton", c.newton, "use Newton steps when a Jacobian exists")->group("solve");
  app.add_option("--moments", c.moments, "moment order p in {2, 4, 6, 8} (0: none)")->group("solve");
  app.add_flag("--holder", c.holder, "estimate second increment moments")->group("solve");
  app.add_option("--log", c.log, "iteration log JSON path")->group("solve");
  app.add_option("--criteria", c.criteria, "verify: comma-separated criterion numbers")->group("verify");
}

}  // namespace

void RunConfig::resolve() {
  if (domain == "interval") k = 1;
  if (domain == "ball" && k != 2 && k != 3) throw Error(ErrorCode::Usage, "ball dimension must be 2 or 3");
  if (d == 0) throw Error(ErrorCode::Usage, "d must be positive");
  if (command == "field") {
    if (grid <= 0) grid = 5;
    if (margin < 0.0) margin = domain == "interval" ? 0.1 * b : 0.3;
    if (samples == 0) samples = 10'000;
  } else if (command == "scan") {
    if (samples == 0) samples = 100;
    if (region.empty()) region = domain == "interval" ? fmt(0.2 * b) + "," + fmt(0.8 * b) : "0.7";
  } else if (command == "hitprob") {
    if (grid <= 0) grid = domain == "interval" ? 2401 : 9;
    if (samples == 0) samples = 20'000;
    if (region.empty()) region = domain == "interval" ? fmt(0.2 * b) + "," + fmt(0.8 * b) : "0.5";
    if (center.empty()) {
      for (std::size_t i = 0; i < d; ++i) center += (i ? ",0.05" : "0.05");
    }
  } else if (command == "solve") {
    if (grid <= 0) grid = domain == "interval" ? 64 : 8;
    if (samples == 0) samples = 1000;
  } else if (command == "verify") {
    if (tol <= 0.0) tol = 1.0;
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["domain"] = domain;
  j["b"] = b;
  j["k"] = k;
  j["d"] = d;
  j["gamma"] = gamma;
  j["grid"] = grid;
  j["margin"] = margin;
  j["seed"] = seed;
  j["tol"] = tol;
  j["samples"] = samples;
  j["budget"] = budget;
  j["threads"] = threads;
  j["out"] = out;
  j["csv"] = csv;
  if (command == "green") {
    j["x"] = x;
    j["y"] = y;
  } else if (command == "scan") {
    j["scan"] = scan;
    j["region"] = region;
    j["zeta"] = zeta;
  } else if (command == "field") {
    j["points"] = points;
    j["exact"] = exact;
  } else if (command == "hitprob") {
    j["region"] = region;
    j["center"] = center;
    j["radii"] = radii;
    j["eps"] = eps;
    j["whole_space"] = whole_space;
  } else if (command == "solve") {
    j["f"] = f;
    j["lambda"] = lambda;
    j["forcing"] = forcing;
    j["solver_tol"] = solver_tol;
    j["start"] = start ? nlohmann::ordered_json(*start) : nlohmann::ordered_json("rhs");
    j["newton"] = newton;
    j["moments"] = moments;
    j["holder"] = holder;
    j["eps"] = eps;
    j["log"] = log;
  } else if (command == "verify") {
    j["criteria"] = criteria;
  }
  return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  RunConfig c;
  CLI::App app{"Gaussian fields driven by white noise on bounded domains: kernels, scans, sampling, hitting "
               "probabilities and nonlinear solves.",
               "spoisson"};
  app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();
  add_options(app, c);
  app.add_subcommand("green", "evaluate the Green function");
  app.add_subcommand("scan", "metric, modulus and correlation scans over point pairs");
  app.add_subcommand("field", "sample the field on a grid and compare with its covariance");
  app.add_subcommand("hitprob", "hitting probabilities of balls, capacity and Hausdorff sandwich, polarity");
  app.add_subcommand("solve", "solve the nonlinear mild equation for one noise draw");
  app.add_subcommand("verify", "run the acceptance suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, err;
    const int code = app.exit(e, o, err);
    out << o.str();
    log << err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }
  c.command = app.get_subcommands().front()->get_name();

  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.command = c.command;
  std::ostringstream csv;
  int status = kExitOk;
  try {
    c.resolve();
    if (c.threads > 0) set_worker_count(c.threads);
    rep.config = c.to_json();
    if (c.command == "green") cmd_green(c, rep);
    else if (c.command == "scan") cmd_scan(c, rep, csv);
    else if (c.command == "field") cmd_field(c, rep, csv);
    else if (c.command == "hitprob") cmd_hitprob(c, rep, csv);
    else if (c.command == "solve") cmd_solve(c, rep, csv);
    else status = cmd_verify(c, rep, log);
  } catch (const BudgetExceeded& e) {
    status = kExitBudget;
    rep.notes.push_back(std::string("budget-exceeded: ") + e.what());
    rep.add("best_estimate", e.best_estimate(), "invented: value reached before the budget ran out");
    rep.add("error_estimate", e.error_estimate(), "invented: error estimate at that point");
  } catch (const Error& e) {
    status = exit_code_for(e.code());
    rep.notes.push_back(std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    status = kExitNumerical;
    rep.notes.push_back(std::string("error: ") + e.what());
  }
  if (rep.config.empty()) rep.config = c.to_json();
  rep.walltime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& n : rep.notes) log << n << '\n';

  const std::string text = serialize(rep);
  try {
    if (c.out.empty())
      out << text;
    else
      write_file(c.out, text);
    const std::string cp = csv_path(c);
    if (!cp.empty() && csv.tellp() > 0) write_file(cp, csv.str());
  } catch (const Error& e) {
    log << e.what() << '\n';
    return kExitUsage;
  }
  return status;
}

}  // namespace spoisson::cli
