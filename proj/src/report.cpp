#include <spoisson/errors.hpp>
#include <spoisson/report.hpp>

#include <cmath>
#include <limits>

namespace spoisson {

const char* version() { return "0.1.0"; }

void Report::add(std::string name, double value, std::string paper_ref) {
  results.push_back({std::move(name), value, std::nullopt, std::nullopt, std::move(paper_ref)});
}

void Report::add(std::string name, double value, double ci_low, double ci_high, std::string paper_ref) {
  results.push_back({std::move(name), value, ci_low, ci_high, std::move(paper_ref)});
}

const ResultEntry* Report::find(const std::string& name) const {
  for (const auto& r : results)
    if (r.name == name) return &r;
  return nullptr;
}

nlohmann::ordered_json encode_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double decode_number(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::Usage, "report: not a number: " + j.dump());
}

nlohmann::ordered_json to_json(const Report& report, bool with_walltime) {
  nlohmann::ordered_json j;
  j["command"] = report.command;
  j["config"] = report.config;
  auto& results = j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["value"] = encode_number(r.value);
    if (r.ci_low) e["ci_low"] = encode_number(*r.ci_low);
    if (r.ci_high) e["ci_high"] = encode_number(*r.ci_high);
    e["paper_ref"] = r.paper_ref;
    results.push_back(std::move(e));
  }
  if (!report.notes.empty()) j["notes"] = report.notes;
  if (with_walltime) {
    if (!report.timings.empty()) j["timings"] = report.timings;
    j["walltime_ms"] = report.walltime_ms;
  }
  j["version"] = report.version;
  return j;
}

Report report_from_json(const nlohmann::ordered_json& j) {
  try {
    Report r;
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    for (const auto& e : j.at("results")) {
      ResultEntry re;
      re.name = e.at("name").get<std::string>();
      re.value = decode_number(e.at("value"));
      if (e.contains("ci_low")) re.ci_low = decode_number(e["ci_low"]);
      if (e.contains("ci_high")) re.ci_high = decode_number(e["ci_high"]);
      re.paper_ref = e.at("paper_ref").get<std::string>();
      r.results.push_back(std::move(re));
    }
    if (j.contains("notes")) r.notes = j["notes"].get<std::vector<std::string>>();
    if (j.contains("timings")) r.timings = j["timings"];
    r.walltime_ms = j.contains("walltime_ms") ? j["walltime_ms"].get<double>() : 0.0;
    r.version = j.at("version").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("malformed report: ") + e.what());
  }
}

std::string serialize(const Report& report, bool with_walltime) { return to_json(report, with_walltime).dump(2) + "\n"; }

Report parse_report(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("malformed report: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace spoisson
