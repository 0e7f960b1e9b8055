#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace spoisson {

const char* version();

struct ResultEntry {
  std::string name;
  double value = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::string paper_ref;

  friend bool operator==(const ResultEntry&, const ResultEntry&) = default;
};

/// Machine-readable outcome of one command. `notes` carries refusals and error
/// messages; `timings` holds per-stage wall clock and, like walltime_ms, is
/// excluded from the deterministic serialisation.
struct Report {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<ResultEntry> results;
  std::vector<std::string> notes;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  double walltime_ms = 0.0;
  std::string version = spoisson::version();

  void add(std::string name, double value, std::string paper_ref);
  void add(std::string name, double value, double ci_low, double ci_high, std::string paper_ref);
  /// First entry with this name, or nullptr.
  const ResultEntry* find(const std::string& name) const;

  friend bool operator==(const Report&, const Report&) = default;
};

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
nlohmann::ordered_json encode_number(double x);
double decode_number(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const Report& report, bool with_walltime = true);
Report report_from_json(const nlohmann::ordered_json& j);

/// Pretty-printed JSON; without wall time (and timings) the text depends only on config and seed.
std::string serialize(const Report& report, bool with_walltime = true);
Report parse_report(const std::string& text);

}  // namespace spoisson
