#pragma once

// Document formats shared by the command-line tool and the Python module:
// JSON preference-system, credal-set, act and run-configuration documents,
// the long evaluation CSV (subject,instance,metric,value), DOT export.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsd/credal.hpp"
#include "gsd/dominance.hpp"
#include "gsd/preference.hpp"
#include "gsd/stats.hpp"

namespace gsd::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "gsdbench.report/1";

// Reads and parses a JSON file. Errors: ParseError (with the path).
Json load_json(const std::filesystem::path& path);

// {"elements": [...], "r1": [[a,b],...], "r2": [[[a,b],[c,d]],...],
//  "bounds": [a_star, a_sup]}   (bounds optional)
PreferenceSystem parse_system(const Json& doc);

// {"kind": "singleton", "states": [...], "probs": [...]}      probs optional: uniform
// {"kind": "vertices", "states": [...], "vertices": [[...], ...]}
// {"kind": "linear_vacuous", "states": [...], "base": [...], "zeta": z}
// {"kind": "ordering_chain", "states": [...], "chain": [...]}
// {"kind": "constraints", "states": [...],
//  "constraints": [{"values": [...], "lower": l, "upper": u}, ...]}
CredalSet parse_credal(const Json& doc);

// {"states": [...], "acts": [{"name": "X", "outcomes": {"s1": "a", ...}}, ...]}
// The state list must equal the credal set's.
std::vector<Act> parse_acts(const Json& doc, const PreferenceSystem& ps, const std::vector<StateId>& states);

struct RunConfig {
  std::vector<double> delta{0.0};
  std::size_t B = 199;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Design design = Design::Paired;
  std::vector<double> zeta_grid{0.0};
  double epsilon = 0.0;
  ScaleSpec metrics;
  std::vector<std::string> subjects;
  std::optional<std::string> candidate;
  std::optional<std::vector<std::string>> opponents;
  unsigned workers = 1;

  // Throws InvalidArgument when a field is out of range.
  void validate() const;
};

// Field names mirror RunConfig. "delta" may be a number or a list.
RunConfig parse_config(const Json& doc);
Json to_json(const RunConfig& config);

// Long-format CSV with header subject,instance,metric,value. Subjects and
// instances keep first-appearance order; metrics keep the config order.
// Errors: ParseError (line number), UndeclaredMetric, UnknownOrdinalLevel,
// MissingCell.
EvaluationTable read_evaluations(std::istream& in, const ScaleSpec& metrics);
EvaluationTable read_evaluations(const std::filesystem::path& path, const ScaleSpec& metrics);
void write_evaluations(std::ostream& out, const EvaluationTable& table);

// Shortest decimal that parses back to the same double.
std::string format_number(double value);

// Digraph over subjects with the covering pairs of the strict dominance
// relation as edges. Members of `front` are drawn with a double border.
std::string to_dot(const std::vector<std::string>& subjects, const MarginMatrix& margins,
                   const std::vector<std::size_t>& front);

}  // namespace gsd::io
