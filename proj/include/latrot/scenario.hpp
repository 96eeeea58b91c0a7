#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "latrot/beams.hpp"
#include "latrot/core.hpp"
#include "latrot/error_model.hpp"

// Scenario files and reports for the batch front-end. Scenarios are JSON with
// a fixed vocabulary; unknown fields are rejected so a typo in a physics
// parameter cannot silently fall back to a default.

namespace latrot {

inline constexpr const char* version = "0.1.0";
inline constexpr const char* tool_id = "latrot 0.1.0";

namespace cli {

using json = nlohmann::json;

/// Malformed scenario input (missing/unknown/ill-typed fields, broken
/// constraints). Maps to exit code 2.
class scenario_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { plan, synthesize, simulate, sweep, verify };
enum class ReportFormat { csv, structured };

struct SweepRange {
  double r_min;
  double r_max;
  int steps;
  bool worst_case = true;
};

struct Scenario {
  std::string name;
  Mode mode = Mode::verify;
  std::optional<LatticeSpec> lattice;
  std::optional<RotationSpec> rotation;
  std::optional<Scheme> scheme;
  AmplitudeProfile profile = Uniform{};
  std::optional<MismatchSpec> mismatch;
  std::optional<SweepRange> sweep;
  std::optional<std::vector<int>> schedule_sigma;
  std::uint64_t seed = 987654321u;
  double tolerance = simulation_tol;
  std::optional<std::string> out_path;
  ReportFormat format = ReportFormat::csv;
  bool with_timestamp = true;
  json raw;  // verbatim echo for reports

  static Scenario from_json(const json& doc);
  static Scenario from_file(const std::string& path);
};

// ---------------------------------------------------------------------------
// Parsing helpers.
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw scenario_error(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const std::string& k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw scenario_error("unknown field \"" + item.key() + "\" in " + where);
  }
}

inline double get_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw scenario_error(where + " needs field \"" + key + "\"");
  if (!obj[key].is_number()) throw scenario_error(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

inline int get_int(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw scenario_error(where + " needs field \"" + key + "\"");
  if (!obj[key].is_number_integer())
    throw scenario_error(where + "." + key + " must be an integer");
  return obj[key].get<int>();
}

inline std::string get_string(const json& obj, const std::string& key,
                              const std::string& where) {
  if (!obj.contains(key)) throw scenario_error(where + " needs field \"" + key + "\"");
  if (!obj[key].is_string()) throw scenario_error(where + "." + key + " must be a string");
  return obj[key].get<std::string>();
}

inline Mode parse_mode(const std::string& s) {
  if (s == "plan") return Mode::plan;
  if (s == "synthesize") return Mode::synthesize;
  if (s == "simulate") return Mode::simulate;
  if (s == "sweep") return Mode::sweep;
  if (s == "verify") return Mode::verify;
  throw scenario_error("unknown mode \"" + s + "\"");
}

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::plan: return "plan";
    case Mode::synthesize: return "synthesize";
    case Mode::simulate: return "simulate";
    case Mode::sweep: return "sweep";
    case Mode::verify: return "verify";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "interference") return Scheme::interference;
  if (s == "sequential") return Scheme::sequential;
  throw scenario_error("unknown scheme \"" + s + "\" (interference|sequential)");
}

inline LatticeSpec parse_lattice(const json& obj) {
  check_keys(obj, {"N", "L", "dims", "wavelength_ratio"}, "lattice");
  int half_width = -1;
  if (obj.contains("N")) half_width = get_int(obj, "N", "lattice");
  if (obj.contains("L")) {
    const int level = get_int(obj, "L", "lattice");
    if (level < 1 || level > 12) throw scenario_error("lattice.L must be in 1..12");
    const int from_level = (1 << level) - 1;
    if (half_width >= 0 && half_width != from_level)
      throw scenario_error("lattice.N and lattice.L disagree");
    half_width = from_level;
  }
  if (half_width < 0) throw scenario_error("lattice needs N or L");
  if (half_width > 4095) throw scenario_error("lattice.N must be at most 4095");
  const int dims = obj.contains("dims") ? get_int(obj, "dims", "lattice") : 1;
  const double ratio =
      obj.contains("wavelength_ratio") ? get_number(obj, "wavelength_ratio", "lattice") : 1.0;
  try {
    return LatticeSpec(half_width, ratio, dims);
  } catch (const std::invalid_argument& e) {
    throw scenario_error(std::string("lattice: ") + e.what());
  }
}

inline AmplitudeProfile parse_profile(const json& obj) {
  check_keys(obj, {"kind", "omega0", "waist", "table"}, "profile");
  const std::string kind = get_string(obj, "kind", "profile");
  const double omega0 = obj.contains("omega0") ? get_number(obj, "omega0", "profile") : 1.0;
  if (kind == "uniform") {
    if (obj.contains("waist") || obj.contains("table"))
      throw scenario_error("uniform profile takes no waist/table");
    return Uniform{omega0};
  }
  if (kind == "gaussian") {
    const double waist = get_number(obj, "waist", "profile");
    if (!(waist > 0.0)) throw scenario_error("profile.waist must be > 0");
    return Gaussian{omega0, waist};
  }
  if (kind == "explicit") {
    if (!obj.contains("table") || !obj["table"].is_object())
      throw scenario_error("explicit profile needs a table object");
    Explicit e{omega0, {}};
    for (const auto& item : obj["table"].items()) {
      int m = 0;
      try {
        std::size_t pos = 0;
        m = std::stoi(item.key(), &pos);
        if (pos != item.key().size()) throw std::invalid_argument("");
      } catch (...) {
        throw scenario_error("profile.table keys must be integer site indices");
      }
      if (!item.value().is_number())
        throw scenario_error("profile.table values must be numbers");
      e.ratio[m] = item.value().get<double>();
    }
    return e;
  }
  throw scenario_error("unknown profile kind \"" + kind + "\"");
}

inline std::vector<int> parse_sigma_array(const json& arr) {
  if (!arr.is_array() || arr.empty())
    throw scenario_error("schedule sigma must be a non-empty array");
  std::vector<int> sigma;
  sigma.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_number_integer())
      throw scenario_error("schedule sigma entries must be integers");
    sigma.push_back(v.get<int>());
  }
  return sigma;
}

/// A schedule can be inline ([1,3,2,4] or {"sigma": [...]}) or the path of a
/// structured report written by the synthesize command.
inline std::vector<int> parse_schedule(const json& value) {
  if (value.is_array()) return parse_sigma_array(value);
  if (value.is_object()) {
    check_keys(value, {"sigma"}, "schedule");
    if (!value.contains("sigma")) throw scenario_error("schedule needs a sigma array");
    return parse_sigma_array(value["sigma"]);
  }
  if (value.is_string()) {
    const std::string path = value.get<std::string>();
    std::ifstream in(path);
    if (!in) throw scenario_error("cannot open schedule file " + path);
    json doc;
    try {
      in >> doc;
    } catch (const json::parse_error& e) {
      throw scenario_error("schedule file " + path + " is not valid JSON: " + e.what());
    }
    if (doc.is_object() && doc.contains("schedule") && doc["schedule"].is_object() &&
        doc["schedule"].contains("sigma"))
      return parse_sigma_array(doc["schedule"]["sigma"]);
    if (doc.is_object() && doc.contains("sigma")) return parse_sigma_array(doc["sigma"]);
    throw scenario_error("schedule file " + path + " carries no sigma permutation");
  }
  throw scenario_error("schedule must be an array, object or file path");
}

}  // namespace detail

inline Scenario Scenario::from_json(const json& doc) {
  using namespace detail;
  check_keys(doc,
             {"name", "mode", "lattice", "rotation", "scheme", "profile", "mismatch",
              "schedule", "seed", "tolerance", "output"},
             "scenario");
  Scenario s;
  s.raw = doc;
  s.name = get_string(doc, "name", "scenario");
  s.mode = parse_mode(get_string(doc, "mode", "scenario"));

  if (doc.contains("lattice")) s.lattice = parse_lattice(doc["lattice"]);
  if (doc.contains("rotation")) {
    check_keys(doc["rotation"], {"xi", "phi"}, "rotation");
    const double xi = get_number(doc["rotation"], "xi", "rotation");
    const double phi =
        doc["rotation"].contains("phi") ? get_number(doc["rotation"], "phi", "rotation") : 0.0;
    try {
      s.rotation = RotationSpec(xi, phi);
    } catch (const std::invalid_argument& e) {
      throw scenario_error(std::string("rotation: ") + e.what());
    }
  }
  if (doc.contains("scheme")) s.scheme = parse_scheme(get_string(doc, "scheme", "scenario"));
  if (doc.contains("profile")) s.profile = parse_profile(doc["profile"]);
  if (doc.contains("mismatch")) {
    const json& mm = doc["mismatch"];
    check_keys(mm, {"r", "r_min", "r_max", "steps", "worst_case", "neighbor_scale"},
               "mismatch");
    const bool worst_case = mm.contains("worst_case") ? mm["worst_case"].get<bool>() : true;
    if (mm.contains("r_min") || mm.contains("r_max") || mm.contains("steps")) {
      SweepRange range;
      range.r_min = get_number(mm, "r_min", "mismatch");
      range.r_max = get_number(mm, "r_max", "mismatch");
      range.steps = get_int(mm, "steps", "mismatch");
      range.worst_case = worst_case;
      if (!(range.r_min > 0.0) || range.r_min > range.r_max)
        throw scenario_error("mismatch range needs 0 < r_min <= r_max");
      if (range.steps < 1) throw scenario_error("mismatch.steps must be >= 1");
      s.sweep = range;
    } else {
      const double r = get_number(mm, "r", "mismatch");
      const double scale =
          mm.contains("neighbor_scale") ? mm["neighbor_scale"].get<double>() : 1.0;
      try {
        s.mismatch = MismatchSpec(r, worst_case, scale);
      } catch (const std::invalid_argument& e) {
        throw scenario_error(std::string("mismatch: ") + e.what());
      }
    }
  }
  if (doc.contains("schedule")) s.schedule_sigma = parse_schedule(doc["schedule"]);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw scenario_error("seed must be an integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tolerance")) {
    s.tolerance = get_number(doc, "tolerance", "scenario");
    if (!(s.tolerance > 0.0)) throw scenario_error("tolerance must be > 0");
  }
  if (doc.contains("output")) {
    const json& out = doc["output"];
    check_keys(out, {"path", "format"}, "output");
    if (out.contains("path")) s.out_path = get_string(out, "path", "output");
    if (out.contains("format")) {
      const std::string f = get_string(out, "format", "output");
      if (f == "csv")
        s.format = ReportFormat::csv;
      else if (f == "structured")
        s.format = ReportFormat::structured;
      else
        throw scenario_error("output.format must be csv or structured");
    }
  }
  return s;
}

inline Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw scenario_error("cannot open scenario file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw scenario_error("scenario file " + path + " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

/// Round-trip-safe decimal rendering for doubles (17 significant digits).
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string format_cell(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

struct Report {
  std::string tool = tool_id;
  json scenario_echo;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  double max_residual = 0.0;
  double min_fidelity = 1.0;
  bool pass = true;
  std::vector<std::string> failures;
  std::optional<json> schedule;  // synthesize: re-ingestable ordering
  std::optional<std::string> generated_at;

  void add_row(std::vector<json> cells) { rows.push_back(std::move(cells)); }

  json to_json() const {
    json doc;
    doc["tool"] = tool;
    doc["scenario"] = scenario_echo;
    doc["columns"] = columns;
    doc["rows"] = rows;
    json summary;
    summary["max_residual"] = max_residual;
    summary["min_fidelity"] = min_fidelity;
    summary["pass"] = pass;
    if (!failures.empty()) summary["failures"] = failures;
    doc["summary"] = summary;
    if (schedule) doc["schedule"] = *schedule;
    if (generated_at) doc["generated_at"] = *generated_at;
    return doc;
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "# tool: " << tool << "\n";
    out << "# scenario: " << scenario_echo.dump() << "\n";
    if (generated_at) out << "# generated_at: " << *generated_at << "\n";
    if (schedule) out << "# schedule: " << schedule->dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const std::vector<json>& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << format_cell(row[i]);
      out << "\n";
    }
    out << "# summary: pass=" << (pass ? "true" : "false")
        << " max_residual=" << format_double(max_residual)
        << " min_fidelity=" << format_double(min_fidelity);
    if (!failures.empty()) {
      out << " failures=";
      for (std::size_t i = 0; i < failures.size(); ++i) out << (i ? ";" : "") << failures[i];
    }
    out << "\n";
    return out.str();
  }

  std::string render(ReportFormat format) const {
    if (format == ReportFormat::csv) return to_csv();
    return to_json().dump(2) + "\n";
  }
};

}  // namespace cli
}  // namespace latrot
