#include "gsd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gsd/error.hpp"

namespace gsd::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const Json& field(const Json& doc, const char* key, const std::string& where) {
  if (!doc.is_object()) parse_error(where + " must be an object");
  auto it = doc.find(key);
  if (it == doc.end()) parse_error(where + " lacks field '" + key + "'");
  return *it;
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) parse_error(where + " must be a string");
  return v.get<std::string>();
}

double as_number(const Json& v, const std::string& where) {
  if (!v.is_number()) parse_error(where + " must be a number");
  return v.get<double>();
}

std::vector<std::string> as_strings(const Json& v, const std::string& where) {
  if (!v.is_array()) parse_error(where + " must be a list");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(as_string(e, where + " entry"));
  return out;
}

std::vector<double> as_numbers(const Json& v, const std::string& where) {
  if (!v.is_array()) parse_error(where + " must be a list");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e, where + " entry"));
  return out;
}

ElementPair as_pair(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) parse_error(where + " must be a pair [a, b]");
  return {as_string(v[0], where), as_string(v[1], where)};
}

}  // namespace

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    parse_error("'" + path.string() + "': " + e.what());
  }
}

PreferenceSystem parse_system(const Json& doc) {
  const auto elements = as_strings(field(doc, "elements", "system"), "elements");
  std::vector<ElementPair> r1;
  std::vector<PairOfPairs> r2;
  if (doc.contains("r1")) {
    const Json& v = doc["r1"];
    if (!v.is_array()) parse_error("r1 must be a list");
    for (const auto& p : v) r1.push_back(as_pair(p, "r1 entry"));
  }
  if (doc.contains("r2")) {
    const Json& v = doc["r2"];
    if (!v.is_array()) parse_error("r2 must be a list");
    for (const auto& pp : v) {
      if (!pp.is_array() || pp.size() != 2) parse_error("r2 entry must be [[a,b],[c,d]]");
      r2.push_back({as_pair(pp[0], "r2 entry"), as_pair(pp[1], "r2 entry")});
    }
  }
  std::optional<std::pair<ElementId, ElementId>> bounds;
  if (doc.contains("bounds") && !doc["bounds"].is_null()) {
    const auto b = as_pair(doc["bounds"], "bounds");
    bounds = std::make_pair(b.better, b.worse);
  }
  return build_system(elements, r1, r2, bounds);
}

CredalSet parse_credal(const Json& doc) {
  const std::string kind = as_string(field(doc, "kind", "credal set"), "kind");
  const auto states = as_strings(field(doc, "states", "credal set"), "states");
  auto pmf = [&](const Json& v, const std::string& where) {
    Pmf p{states, as_numbers(v, where)};
    p.validate();
    return p;
  };
  if (kind == "singleton") {
    if (!doc.contains("probs")) return CredalSet(credal::Singleton{Pmf::uniform(states)});
    return CredalSet(credal::Singleton{pmf(doc["probs"], "probs")});
  }
  if (kind == "vertices") {
    const Json& v = field(doc, "vertices", "credal set");
    if (!v.is_array()) parse_error("vertices must be a list");
    credal::VertexList list;
    for (const auto& p : v) list.vertices.push_back(pmf(p, "vertex"));
    return CredalSet(std::move(list));
  }
  if (kind == "linear_vacuous") {
    return CredalSet(credal::LinearVacuous{pmf(field(doc, "base", "credal set"), "base"),
                                           as_number(field(doc, "zeta", "credal set"), "zeta")});
  }
  if (kind == "ordering_chain") {
    return CredalSet(credal::OrderingChain{states, as_strings(field(doc, "chain", "credal set"), "chain")});
  }
  if (kind == "constraints") {
    const Json& v = field(doc, "constraints", "credal set");
    if (!v.is_array()) parse_error("constraints must be a list");
    credal::ConstraintForm form{states, {}};
    for (const auto& c : v)
      form.bounds.push_back({as_numbers(field(c, "values", "constraint"), "values"),
                             as_number(field(c, "lower", "constraint"), "lower"),
                             as_number(field(c, "upper", "constraint"), "upper")});
    return CredalSet(std::move(form));
  }
  parse_error("unknown credal kind '" + kind + "'");
}

std::vector<Act> parse_acts(const Json& doc, const PreferenceSystem& ps, const std::vector<StateId>& states) {
  const auto doc_states = as_strings(field(doc, "states", "acts document"), "states");
  if (doc_states != states) throw Error(ErrorKind::StateMismatch, "act states differ from the credal set's states");
  const Json& list = field(doc, "acts", "acts document");
  if (!list.is_array() || list.empty()) parse_error("acts must be a non-empty list");
  std::vector<Act> acts;
  std::set<std::string> names;
  for (const auto& a : list) {
    const std::string name = as_string(field(a, "name", "act"), "act name");
    if (!names.insert(name).second) parse_error("duplicate act '" + name + "'");
    const Json& outcomes = field(a, "outcomes", "act");
    if (!outcomes.is_object()) parse_error("outcomes of act '" + name + "' must be an object");
    std::map<StateId, ElementId> mapping;
    for (const auto& [s, e] : outcomes.items()) mapping[s] = as_string(e, "outcome");
    acts.push_back(make_act(name, ps, states, mapping));
  }
  return acts;
}

void RunConfig::validate() const {
  if (delta.empty()) throw Error(ErrorKind::InvalidArgument, "delta list is empty");
  for (double d : delta)
    if (!(d >= 0.0 && d < 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must lie in [0, 1)");
  if (B < 1) throw Error(ErrorKind::InvalidArgument, "B must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  if (zeta_grid.empty()) throw Error(ErrorKind::InvalidArgument, "zeta_grid is empty");
  for (std::size_t i = 0; i < zeta_grid.size(); ++i) {
    if (!(zeta_grid[i] >= 0.0 && zeta_grid[i] <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "zeta_grid values must lie in [0, 1]");
    if (i > 0 && !(zeta_grid[i] > zeta_grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "zeta_grid must be strictly ascending");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw Error(ErrorKind::InvalidArgument, "epsilon must be >= 0");
  if (workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be at least 1");
  metrics.validate();
}

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object()) parse_error("config must be an object");
  static const std::set<std::string> known{"delta",    "B",       "alpha",    "seed",     "design",   "zeta_grid",
                                           "epsilon",  "metrics", "subjects", "candidate", "opponents", "workers"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) parse_error("unknown config field '" + key + "'");

  RunConfig c;
  if (doc.contains("delta")) {
    const Json& d = doc["delta"];
    c.delta = d.is_array() ? as_numbers(d, "delta") : std::vector<double>{as_number(d, "delta")};
  }
  auto count = [&](const char* key) -> std::uint64_t {
    const Json& v = doc[key];
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      parse_error(std::string(key) + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
  };
  if (doc.contains("B")) c.B = static_cast<std::size_t>(count("B"));
  if (doc.contains("alpha")) c.alpha = as_number(doc["alpha"], "alpha");
  if (doc.contains("seed")) c.seed = count("seed");
  if (doc.contains("design")) c.design = parse_design(as_string(doc["design"], "design"));
  if (doc.contains("zeta_grid")) c.zeta_grid = as_numbers(doc["zeta_grid"], "zeta_grid");
  if (doc.contains("epsilon")) c.epsilon = as_number(doc["epsilon"], "epsilon");
  if (doc.contains("workers")) c.workers = static_cast<unsigned>(count("workers"));
  if (doc.contains("subjects")) c.subjects = as_strings(doc["subjects"], "subjects");
  if (doc.contains("candidate") && !doc["candidate"].is_null()) c.candidate = as_string(doc["candidate"], "candidate");
  if (doc.contains("opponents") && !doc["opponents"].is_null())
    c.opponents = as_strings(doc["opponents"], "opponents");

  const Json& metrics = field(doc, "metrics", "config");
  if (!metrics.is_array()) parse_error("metrics must be a list");
  for (const auto& m : metrics) {
    Dimension d;
    d.name = as_string(field(m, "name", "metric"), "metric name");
    if (m.contains("scale")) {
      const auto scale = as_string(m["scale"], "scale");
      if (scale == "cardinal")
        d.scale = Scale::Cardinal;
      else if (scale == "ordinal")
        d.scale = Scale::Ordinal;
      else
        parse_error("metric '" + d.name + "': scale must be cardinal or ordinal");
    }
    if (m.contains("direction")) {
      const auto dir = as_string(m["direction"], "direction");
      if (dir == "higher" || dir == "higher_better")
        d.direction = Direction::HigherBetter;
      else if (dir == "lower" || dir == "lower_better")
        d.direction = Direction::LowerBetter;
      else
        parse_error("metric '" + d.name + "': direction must be higher or lower");
    }
    if (m.contains("levels")) d.levels = as_strings(m["levels"], "levels");
    c.metrics.dimensions.push_back(std::move(d));
  }
  c.validate();
  return c;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["delta"] = c.delta;
  j["B"] = c.B;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["design"] = to_string(c.design);
  j["zeta_grid"] = c.zeta_grid;
  j["epsilon"] = c.epsilon;
  Json metrics = Json::array();
  for (const auto& d : c.metrics.dimensions) {
    Json m;
    m["name"] = d.name;
    m["scale"] = d.scale == Scale::Cardinal ? "cardinal" : "ordinal";
    m["direction"] = d.direction == Direction::HigherBetter ? "higher" : "lower";
    if (d.scale == Scale::Ordinal) m["levels"] = d.levels;
    metrics.push_back(std::move(m));
  }
  j["metrics"] = std::move(metrics);
  j["subjects"] = c.subjects;
  j["candidate"] = c.candidate ? Json(*c.candidate) : Json(nullptr);
  j["opponents"] = c.opponents ? Json(*c.opponents) : Json(nullptr);
  j["workers"] = c.workers;
  return j;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// Splits one CSV record; double quotes may enclose fields and "" escapes a
// quote inside them.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  auto finish = [&] {
    if (!was_quoted) {
      const auto b = cur.find_first_not_of(" \t");
      const auto e = cur.find_last_not_of(" \t");
      cur = b == std::string::npos ? std::string() : cur.substr(b, e - b + 1);
    }
    fields.push_back(cur);
    cur.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      if (was_quoted || cur.find_first_not_of(" \t") != std::string::npos)
        parse_error("line " + std::to_string(line_no) + ": stray quote");
      cur.clear();
      quoted = was_quoted = true;
    } else if (ch == ',') {
      finish();
    } else if (was_quoted) {
      if (ch != ' ' && ch != '\t') parse_error("line " + std::to_string(line_no) + ": text after closing quote");
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) parse_error("line " + std::to_string(line_no) + ": unterminated quote");
  finish();
  return fields;
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && (s.empty() || (s.front() != ' ' && s.back() != ' ')))
    return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

EvaluationTable read_evaluations(std::istream& in, const ScaleSpec& metrics) {
  metrics.validate();
  std::map<std::string, std::size_t> metric_index;
  for (std::size_t j = 0; j < metrics.r(); ++j) metric_index[metrics.dimensions[j].name] = j;

  EvaluationTable table;
  table.metrics = metrics;
  std::map<std::string, std::size_t> subject_index;
  std::map<std::string, std::size_t> instance_index;
  // cells[(subject, instance)][metric]
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::optional<MetricValue>>> cells;

  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto f = split_record(line, line_no);
    if (!header) {
      if (f != std::vector<std::string>{"subject", "instance", "metric", "value"})
        parse_error("line " + std::to_string(line_no) + ": header must be subject,instance,metric,value");
      header = true;
      continue;
    }
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (f.size() != 4) parse_error(at + "expected 4 fields, found " + std::to_string(f.size()));
    if (f[0].empty() || f[1].empty() || f[2].empty()) parse_error(at + "empty subject, instance or metric");
    auto mit = metric_index.find(f[2]);
    if (mit == metric_index.end()) throw Error(ErrorKind::UndeclaredMetric, at + "metric '" + f[2] + "' is not declared");
    const Dimension& dim = metrics.dimensions[mit->second];
    MetricValue value;
    if (dim.scale == Scale::Cardinal) {
      double v = 0.0;
      const char* first = f[3].data();
      const char* last = first + f[3].size();
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        parse_error(at + "value '" + f[3] + "' of metric '" + f[2] + "' is not a finite number");
      value = v;
    } else {
      if (std::find(dim.levels.begin(), dim.levels.end(), f[3]) == dim.levels.end())
        throw Error(ErrorKind::UnknownOrdinalLevel, at + "'" + f[3] + "' is not a level of metric '" + f[2] + "'");
      value = f[3];
    }
    const auto s = subject_index.emplace(f[0], table.subjects.size());
    if (s.second) table.subjects.push_back(f[0]);
    const auto i = instance_index.emplace(f[1], table.instances.size());
    if (i.second) table.instances.push_back(f[1]);
    auto& cell = cells[{s.first->second, i.first->second}];
    cell.resize(metrics.r());
    if (cell[mit->second]) parse_error(at + "duplicate value for (" + f[0] + ", " + f[1] + ", " + f[2] + ")");
    cell[mit->second] = std::move(value);
  }
  if (!header) parse_error("empty evaluation file");
  if (table.subjects.empty()) parse_error("evaluation file has no data rows");

  table.values.assign(table.subjects.size(), std::vector<Point>(table.instances.size()));
  for (std::size_t s = 0; s < table.subjects.size(); ++s) {
    for (std::size_t i = 0; i < table.instances.size(); ++i) {
      auto it = cells.find({s, i});
      for (std::size_t j = 0; j < metrics.r(); ++j) {
        if (it == cells.end() || !it->second[j])
          throw Error(ErrorKind::MissingCell, "no value for (" + table.subjects[s] + ", " + table.instances[i] + ", " +
                                                  metrics.dimensions[j].name + ")");
      }
      RawPoint raw;
      for (auto& v : it->second) raw.push_back(*v);
      table.values[s][i] = encode_point(raw, metrics);
    }
  }
  return table;
}

EvaluationTable read_evaluations(const std::filesystem::path& path, const ScaleSpec& metrics) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open '" + path.string() + "'");
  return read_evaluations(in, metrics);
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_evaluations(std::ostream& out, const EvaluationTable& table) {
  table.validate();
  out << "subject,instance,metric,value\n";
  for (std::size_t s = 0; s < table.subjects.size(); ++s)
    for (std::size_t i = 0; i < table.instances.size(); ++i) {
      const RawPoint raw = decode_point(table.values[s][i], table.metrics);
      for (std::size_t j = 0; j < raw.size(); ++j) {
        out << quote_field(table.subjects[s]) << ',' << quote_field(table.instances[i]) << ','
            << quote_field(table.metrics.dimensions[j].name) << ',';
        if (const double* v = std::get_if<double>(&raw[j]))
          out << format_number(*v);
        else
          out << quote_field(std::get<std::string>(raw[j]));
        out << '\n';
      }
    }
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_id(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string to_dot(const std::vector<std::string>& subjects, const MarginMatrix& margins,
                   const std::vector<std::size_t>& front) {
  const std::size_t n = subjects.size();
  if (margins.size() != n) throw Error(ErrorKind::InvalidArgument, "margin matrix does not match subjects");
  auto strict = [&](std::size_t a, std::size_t b) {
    return a != b && classify(margins[a][b], margins[b][a]) == DominanceRelation::StrictForward;
  };
  std::ostringstream out;
  out << "digraph gsd {\n  rankdir=TB;\n  node [shape=box];\n";
  for (std::size_t s = 0; s < n; ++s) {
    out << "  " << dot_id(subjects[s]);
    if (std::find(front.begin(), front.end(), s) != front.end()) out << " [peripheries=2]";
    out << ";\n";
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (!strict(a, b)) continue;
      bool covered = true;
      for (std::size_t c = 0; c < n && covered; ++c)
        if (c != a && c != b && strict(a, c) && strict(c, b)) covered = false;
      if (covered) out << "  " << dot_id(subjects[a]) << " -> " << dot_id(subjects[b]) << ";\n";
    }
  out << "}\n";
  return out.str();
}

}  // namespace gsd::io
