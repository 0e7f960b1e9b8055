#include <doctest.h>

#include "cli.hpp"

#include <spoisson/errors.hpp>
#include <spoisson/report.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace spoisson;

namespace {

struct Run {
  int code;
  std::string out;
  std::string log;
};

Run cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, log;
  const int code = cli::run(args, out, log);
  return {code, out.str(), log.str()};
}

Report report_of(const Run& r) { return parse_report(r.out); }

double value(const Report& r, const std::string& name) {
  const ResultEntry* e = r.find(name);
  REQUIRE_MESSAGE(e != nullptr, name);
  return e->value;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "spoisson_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("reports round-trip losslessly, non-finite values included") {
  Report r;
  r.command = "scan";
  r.config = {{"seed", 7}, {"tol", 1e-7}};
  r.add("plain", 0.1 + 0.2, "a");
  r.add("ci", 1.0 / 3.0, 0.25, 0.5, "b");
  r.add("inf", std::numeric_limits<double>::infinity(), "c");
  r.add("ninf", -std::numeric_limits<double>::infinity(), "d");
  r.add("tiny", 4.9406564584124654e-324, "e");
  r.notes.push_back("note");
  r.walltime_ms = 12.5;
  const Report back = parse_report(serialize(r));
  CHECK(back == r);
  r.add("nan", std::numeric_limits<double>::quiet_NaN(), "f");
  const Report with_nan = parse_report(serialize(r));
  CHECK(std::isnan(with_nan.results.back().value));
  CHECK(to_json(r)["results"].back()["value"] == "nan");
  CHECK(serialize(r, false).find("walltime_ms") == std::string::npos);
  CHECK_THROWS_AS(parse_report("{\"command\": 1}"), Error);
}

TEST_CASE("green evaluates the interval kernel and echoes the config") {
  const Run r = cli_run({"green", "--x", "0.25", "--y", "0.75;1.0"});
  REQUIRE(r.code == kExitOk);
  const Report rep = report_of(r);
  CHECK(rep.command == "green");
  CHECK(value(rep, "y0.green") == doctest::Approx(0.0625));
  CHECK(value(rep, "y1.green") == 0.0);
  CHECK(rep.config["seed"] == 1);
  CHECK(rep.config["domain"] == "interval");
  for (const auto& e : rep.results) CHECK(!e.paper_ref.empty());
}

TEST_CASE("green on the balls") {
  const Run r3 = cli_run({"--domain", "ball", "--k", "3", "green", "--x", "0,0,0", "--y", "0.5,0,0"});
  REQUIRE(r3.code == kExitOk);
  CHECK(value(report_of(r3), "y0.green") == doctest::Approx(0.25 / std::acos(-1.0)));
  const Run r2 = cli_run({"--domain", "ball", "--k", "2", "green", "--x", "0,0", "--y", "0.5,0"});
  CHECK(value(report_of(r2), "y0.positive_green") == doctest::Approx(-std::log(0.5) / (2 * std::acos(-1.0))));
}

TEST_CASE("usage errors exit with the usage status") {
  CHECK(cli_run({"green", "--x", "0.2a"}).code == kExitUsage);
  CHECK(cli_run({"green", "--x", "0.1,0.2"}).code == kExitUsage);
  CHECK(cli_run({"green", "--x", "1.5"}).code == kExitUsage);
  CHECK(cli_run({"nonsense"}).code == kExitUsage);
  CHECK(cli_run({}).code == kExitUsage);
  CHECK(cli_run({"green", "--no-such-flag"}).code == kExitUsage);
  CHECK(cli_run({"--domain", "torus", "green"}).code == kExitUsage);
  CHECK(cli_run({"scan", "--region", "0.5,0.5"}).code == kExitUsage);
  CHECK(cli_run({"--help"}).code == kExitOk);
}

TEST_CASE("scan reports min and max ratios, both normalisers on the disk") {
  const Run r1 = cli_run({"scan", "--samples", "40"});
  REQUIRE(r1.code == kExitOk);
  const Report a = report_of(r1);
  CHECK(value(a, "metric.min_ratio") > 0.0);
  CHECK(value(a, "metric.max_ratio") >= value(a, "metric.min_ratio"));
  const Run r2 = cli_run({"--domain", "ball", "--k", "2", "scan", "--samples", "8"});
  REQUIRE(r2.code == kExitOk);
  const Report b = report_of(r2);
  CHECK(b.find("metric.lower.min_ratio") != nullptr);
  CHECK(b.find("metric.upper.max_ratio") != nullptr);
  CHECK(b.find("metric.upper.normalizer_gap_max") != nullptr);
}

TEST_CASE("field sampling: variance at the midpoint, identical CSV for a repeated seed") {
  const auto out1 = scratch("field1.json"), out2 = scratch("field2.json");
  const Run a = cli_run({"field", "--out", out1.string(), "--samples", "4000"});
  const Run b = cli_run({"field", "--out", out2.string(), "--samples", "4000"});
  REQUIRE(a.code == kExitOk);
  REQUIRE(b.code == kExitOk);
  const std::string csv1 = slurp(scratch("field1.csv")), csv2 = slurp(scratch("field2.csv"));
  CHECK(!csv1.empty());
  CHECK(csv1 == csv2);
  const Report rep = parse_report(slurp(out1));
  CHECK(value(rep, "x=(0.5).gram_variance") == doctest::Approx(1.0 / 48.0).epsilon(1e-14));
  const ResultEntry* e = rep.find("x=(0.5).empirical_variance");
  REQUIRE(e != nullptr);
  CHECK(*e->ci_low <= 1.0 / 48.0);
  CHECK(1.0 / 48.0 <= *e->ci_high);
  CHECK(value(rep, "max_cov_dev_in_se") < 5.0);
}

TEST_CASE("duplicate grid points are an error") {
  const Run r = cli_run({"field", "--points", "0.1;0.5;0.5"});
  CHECK(r.code != kExitOk);
  CHECK(report_of(r).notes.front().find("twice") != std::string::npos);
}

TEST_CASE("hitprob: whole space is always hit, critical dimension is refused") {
  const Run r = cli_run({"hitprob", "--grid", "201", "--samples", "500", "--whole-space", "--eps", ""});
  REQUIRE(r.code == kExitOk);
  const Report rep = report_of(r);
  CHECK(value(rep, "whole_space.p_hat") == 1.0);
  CHECK(std::isinf(value(rep, "whole_space.capacity")));
  const Run c = cli_run({"hitprob", "--d", "1", "--grid", "51", "--samples", "10"});
  CHECK(c.code == kExitCriticalDimension);
  CHECK(report_of(c).notes.front().find("not informative") != std::string::npos);
}

TEST_CASE("solve: f = 0 reproduces the field, L >= a is rejected, arctan converges") {
  const Run z = cli_run({"solve", "--grid", "32"});
  REQUIRE(z.code == kExitOk);
  CHECK(value(report_of(z), "matches_field_sample") == 1.0);
  const Run bad = cli_run({"solve", "--f", "sine", "--lambda", "20"});
  CHECK(bad.code == kExitMonotonicity);
  const auto logp = scratch("iterations.json");
  const Run a = cli_run({"solve", "--f", "arctan", "--start", "3", "--log", logp.string()});
  REQUIRE(a.code == kExitOk);
  CHECK(value(report_of(a), "residual") < 1e-10);
  const auto log = nlohmann::json::parse(slurp(logp));
  CHECK(log["iterations"].size() >= 2);
}

TEST_CASE("config file: flags override file, file overrides defaults") {
  const auto cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "seed = 9\nsamples = 300\ngrid = 4\n";
  }
  const Run r = cli_run({"--config", cfg.string(), "field", "--grid", "3"});
  REQUIRE(r.code == kExitOk);
  const Report rep = report_of(r);
  CHECK(rep.config["seed"] == 9);
  CHECK(rep.config["samples"] == 300);
  CHECK(rep.config["grid"] == 3);
  CHECK(rep.config["d"] == 2);
  {
    std::ofstream f(cfg);
    f << "sead = 9\n";
  }
  CHECK(cli_run({"--config", cfg.string(), "field"}).code == kExitUsage);
}

TEST_CASE("identical arguments give identical reports apart from wall time") {
  const std::vector<std::string> args{"hitprob", "--grid", "101", "--samples", "300"};
  const Report a = report_of(cli_run(args));
  const Report b = report_of(cli_run(args));
  CHECK(serialize(a, false) == serialize(b, false));
}

TEST_CASE("verify surfaces a budget that is too small") {
  const Run r = cli_run({"verify", "--criteria", "2", "--budget", "50"});
  CHECK(r.code == kExitBudget);
  CHECK(r.log.find("budget") != std::string::npos);
  const Run ok = cli_run({"verify", "--criteria", "1,4", "--tol", "10"});
  CHECK(ok.code == kExitOk);
  CHECK(value(report_of(ok), "criterion_1.pass") == 1.0);
}
