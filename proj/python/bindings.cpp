#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gsd/credal.hpp"
#include "gsd/dominance.hpp"
#include "gsd/error.hpp"
#include "gsd/io.hpp"
#include "gsd/preference.hpp"
#include "gsd/stats.hpp"

namespace py = pybind11;
using gsd::io::Json;

namespace {

// Documents cross the boundary as JSON text; the Python wrapper serializes
// dicts before calling in.
Json parse_text(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw gsd::Error(gsd::ErrorKind::ParseError, std::string(what) + ": " + e.what());
  }
}

gsd::ScaleSpec parse_metrics(const std::string& metrics_json) {
  Json doc;
  doc["metrics"] = parse_text(metrics_json, "metrics");
  return gsd::io::parse_config(doc).metrics;
}

gsd::Point encode(const py::handle& raw, const gsd::ScaleSpec& spec) {
  gsd::RawPoint point;
  for (const auto& v : raw) {
    if (py::isinstance<py::str>(v))
      point.emplace_back(v.cast<std::string>());
    else
      point.emplace_back(v.cast<double>());
  }
  return gsd::encode_point(point, spec);
}

std::vector<gsd::Point> encode_all(const py::sequence& raws, const gsd::ScaleSpec& spec) {
  std::vector<gsd::Point> out;
  for (const auto& r : raws) out.push_back(encode(r, spec));
  return out;
}

py::object nullable(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict check_consistency(const std::string& system_json, double delta) {
  const auto ps = gsd::io::parse_system(parse_text(system_json, "system"));
  const auto r = gsd::check_consistency(ps, delta);
  py::dict out;
  out["delta"] = r.delta;
  out["feasible"] = r.feasible;
  out["consistent"] = r.consistent;
  out["delta_max"] = nullable(r.delta_max);
  if (r.witness) {
    py::dict w;
    for (std::size_t i = 0; i < ps.size(); ++i) w[py::str(ps.elements().id(i))] = (*r.witness)[i];
    out["witness"] = w;
  } else {
    out["witness"] = py::none();
  }
  out["bounds_note"] = r.bounds_note;
  return out;
}

std::vector<std::vector<double>> extreme_points(const std::string& credal_json) {
  std::vector<std::vector<double>> out;
  for (const auto& p : gsd::extreme_points(gsd::io::parse_credal(parse_text(credal_json, "credal set"))))
    out.push_back(p.probs);
  return out;
}

py::dict compare(const std::string& system_json, const std::string& credal_json, const std::string& acts_json,
                 double delta, unsigned workers) {
  const auto ps = gsd::io::parse_system(parse_text(system_json, "system"));
  const auto m = gsd::io::parse_credal(parse_text(credal_json, "credal set"));
  const auto acts = gsd::io::parse_acts(parse_text(acts_json, "acts"), ps, m.states());
  const gsd::GsdModel model(ps, m, delta);
  std::vector<std::vector<double>> margins;
  {
    py::gil_scoped_release release;
    margins = gsd::margin_matrix(acts, model, workers);
  }
  std::vector<std::string> names;
  for (const auto& a : acts) names.push_back(a.name);
  py::list verdicts;
  for (std::size_t i = 0; i < acts.size(); ++i)
    for (std::size_t j = i + 1; j < acts.size(); ++j) {
      py::dict v;
      v["x"] = names[i];
      v["y"] = names[j];
      v["forward_margin"] = margins[i][j];
      v["backward_margin"] = margins[j][i];
      v["relation"] = gsd::to_string(gsd::classify(margins[i][j], margins[j][i]));
      verdicts.append(v);
    }
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(names[i]);
    return out;
  };
  py::dict out;
  out["acts"] = names;
  out["margins"] = margins;
  out["verdicts"] = verdicts;
  out["choice_und"] = pick(gsd::choice_und(acts, model, workers));
  out["choice_max"] = pick(gsd::choice_max(acts, model, workers));
  return out;
}

py::dict test_result(const gsd::TestResult& r) {
  py::dict out;
  out["statistic"] = r.statistic;
  out["p_value"] = r.p_value;
  out["replicates"] = r.replicates;
  out["delta"] = r.delta;
  out["design"] = gsd::to_string(r.design);
  out["seed"] = r.seed;
  return out;
}

py::dict permutation_test(const py::sequence& x, const py::sequence& y, const std::string& metrics_json,
                          double delta, std::size_t replicates, std::uint64_t seed, const std::string& design,
                          unsigned workers) {
  const auto spec = parse_metrics(metrics_json);
  const auto pooled = gsd::pool_samples(encode_all(x, spec), encode_all(y, spec), spec);
  gsd::TestOptions opts{delta, gsd::parse_design(design), replicates, seed, workers};
  gsd::TestResult r;
  {
    py::gil_scoped_release release;
    r = gsd::permutation_test(pooled.x, pooled.y, pooled.embedded.system, opts);
  }
  return test_result(r);
}

py::dict robust_test(const py::sequence& x, const py::sequence& y, const std::string& metrics_json, double delta,
                     const std::vector<double>& zeta_grid, double alpha, std::size_t replicates, std::uint64_t seed,
                     const std::string& design, unsigned workers) {
  const auto spec = parse_metrics(metrics_json);
  const auto pooled = gsd::pool_samples(encode_all(x, spec), encode_all(y, spec), spec);
  gsd::TestOptions opts{delta, gsd::parse_design(design), replicates, seed, workers};
  gsd::RobustTestResult r;
  {
    py::gil_scoped_release release;
    r = gsd::robust_test(pooled.x, pooled.y, pooled.embedded.system, opts, zeta_grid, alpha);
  }
  py::dict out;
  out["zeta"] = r.zeta;
  out["statistic"] = r.observed;
  out["p_value"] = r.p_values;
  out["zeta_star"] = nullable(r.zeta_star);
  out["uncontaminated"] = test_result(r.uncontaminated);
  return out;
}

gsd::EvaluationTable read_table(const std::string& csv_text, const std::string& metrics_json) {
  std::istringstream in(csv_text);
  return gsd::io::read_evaluations(in, parse_metrics(metrics_json));
}

py::dict front(const std::string& csv_text, const std::string& metrics_json, double delta, double epsilon,
               unsigned workers) {
  const auto table = read_table(csv_text, metrics_json);
  gsd::FrontResult f;
  {
    py::gil_scoped_release release;
    f = gsd::gsd_front(table, delta, epsilon, workers);
  }
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(table.subjects[i]);
    return out;
  };
  py::dict out;
  out["subjects"] = table.subjects;
  out["gsd_front"] = pick(f.gsd_front);
  out["pareto_front"] = pick(f.pareto_front);
  out["margins"] = f.margins;
  out["dot"] = gsd::io::to_dot(table.subjects, f.margins, f.gsd_front);
  return out;
}

py::dict membership_test(const std::string& csv_text, const std::string& metrics_json, const std::string& candidate,
                         double delta, std::size_t replicates, std::uint64_t seed, double alpha,
                         const std::optional<std::vector<std::string>>& opponents, unsigned workers) {
  const auto table = read_table(csv_text, metrics_json);
  gsd::MembershipResult r;
  {
    py::gil_scoped_release release;
    r = gsd::front_membership_test(table, candidate, delta, replicates, seed, alpha, opponents, workers);
  }
  std::vector<std::string> opp;
  for (auto i : r.opponents) opp.push_back(table.subjects[i]);
  py::dict out;
  out["candidate"] = table.subjects[r.candidate];
  out["opponents"] = opp;
  out["statistics"] = r.statistics;
  out["p_values"] = r.p_values;
  out["rejected"] = std::vector<bool>(r.rejected.begin(), r.rejected.end());
  out["in_front"] = r.in_front;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized stochastic dominance: consistency, comparison, tests and fronts";
  m.attr("__version__") = gsd::io::kToolVersion;

  static PyObject* error_type = py::exception<gsd::Error>(m, "GsdError").release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const gsd::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(py::str(e.what()));
      exc.attr("kind") = std::string(gsd::to_string(e.kind()));
      exc.attr("exit_code") = gsd::exit_code(e.kind());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("check_consistency", &check_consistency, py::arg("system_json"), py::arg("delta") = 0.0);
  m.def("extreme_points", &extreme_points, py::arg("credal_json"));
  m.def("compare", &compare, py::arg("system_json"), py::arg("credal_json"), py::arg("acts_json"),
        py::arg("delta") = 0.0, py::arg("workers") = 1);
  m.def("permutation_test", &permutation_test, py::arg("x"), py::arg("y"), py::arg("metrics_json"),
        py::arg("delta") = 0.0, py::arg("replicates") = 199, py::arg("seed") = 0, py::arg("design") = "two-sample",
        py::arg("workers") = 1);
  m.def("robust_test", &robust_test, py::arg("x"), py::arg("y"), py::arg("metrics_json"), py::arg("delta"),
        py::arg("zeta_grid"), py::arg("alpha") = 0.05, py::arg("replicates") = 199, py::arg("seed") = 0,
        py::arg("design") = "two-sample", py::arg("workers") = 1);
  m.def("front", &front, py::arg("csv_text"), py::arg("metrics_json"), py::arg("delta") = 0.0,
        py::arg("epsilon") = 0.0, py::arg("workers") = 1);
  m.def("membership_test", &membership_test, py::arg("csv_text"), py::arg("metrics_json"), py::arg("candidate"),
        py::arg("delta") = 0.0, py::arg("replicates") = 199, py::arg("seed") = 0, py::arg("alpha") = 0.05,
        py::arg("opponents") = std::nullopt, py::arg("workers") = 1);
}
