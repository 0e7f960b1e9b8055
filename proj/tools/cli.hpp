#pragma once

#include <spoisson/report.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spoisson::cli {

/// Effective settings of one run. Zero or negative sizes and tolerances mean
/// "command default" until resolve() replaces them.
struct RunConfig {
  std::string command;
  std::string domain = "interval";
  double b = 1.0;
  int k = 1;
  std::size_t d = 2;
  double gamma = 0.05;
  int grid = 0;
  double margin = -1.0;
  std::uint64_t seed = 1;
  double tol = -1.0;
  std::size_t samples = 0;
  std::string out;
  std::string csv;
  std::size_t threads = 0;
  std::size_t budget = 10'000'000;

  // green
  std::string x = "0.25";
  std::string y = "0.75";
  // scan
  std::string scan = "metric";
  std::string region;
  std::string zeta = "0.1,0.25,0.4";
  // field
  std::string points;
  bool exact = false;
  // hitprob
  std::string center;
  std::string radii = "0.02,0.04,0.08,0.16";
  std::string eps = "0.04,0.02,0.01,0.005";
  bool whole_space = false;
  // solve
  std::string f = "zero";
  double lambda = 1.0;
  double forcing = 0.0;
  double solver_tol = 1e-10;
  std::optional<double> start;
  bool newton = true;
  int moments = 0;
  bool holder = false;
  std::string log;
  // verify
  std::string criteria;

  /// Fills command defaults in place.
  void resolve();
  nlohmann::ordered_json to_json() const;
};

/// Parses arguments (argv[0] excluded), runs the command, writes the report and
/// data files, and returns the process exit status. Human-readable lines go to `log`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace spoisson::cli
