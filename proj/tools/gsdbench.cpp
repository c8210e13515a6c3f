// gsdbench: generalized stochastic dominance analyses from the command line.
//
//   gsdbench consistency --system sys.json [--delta d]
//   gsdbench compare --system sys.json --credal m.json --acts acts.json [--delta d]
//   gsdbench test --evals evals.csv --config cfg.json --subjects A,B
//   gsdbench robust-test --evals evals.csv --config cfg.json --subjects A,B --zeta-grid 0,0.05,0.1
//   gsdbench front --evals evals.csv --config cfg.json [--epsilon e] [--candidate X [--opponents Y,Z]] [--dot out.dot]
//
// Reports are JSON on stdout (or --output). Exit codes: 0 success, 2 input
// error, 3 infeasible or inconsistent model, 4 numeric failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gsd/credal.hpp"
#include "gsd/dominance.hpp"
#include "gsd/error.hpp"
#include "gsd/io.hpp"
#include "gsd/preference.hpp"
#include "gsd/stats.hpp"

namespace {

using gsd::io::Json;

constexpr int kExitInput = 2;
constexpr int kExitModel = 3;

struct Overrides {
  std::vector<double> delta;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::size_t> replicates;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::vector<std::string> subjects;
  std::optional<std::string> candidate;
  std::optional<std::vector<std::string>> opponents;
  std::optional<std::vector<double>> zeta_grid;
};

Json report_header(const std::string& command) {
  Json j;
  j["schema"] = gsd::io::kReportSchema;
  j["tool_version"] = gsd::io::kToolVersion;
  j["command"] = command;
  return j;
}

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json bounds_json(const gsd::PreferenceSystem& ps) {
  Json b;
  if (ps.bounds()) {
    b["bottom"] = ps.elements().id(ps.bounds()->bottom);
    b["top"] = ps.elements().id(ps.bounds()->top);
  } else {
    b = nullptr;
  }
  return b;
}

void emit(const Json& report, const std::string& output) {
  const std::string text = report.dump(2) + "\n";
  if (output.empty() || output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw gsd::Error(gsd::ErrorKind::InvalidArgument, "cannot write '" + output + "'");
  out << text;
}

// ---------------------------------------------------------------------------

int run_consistency(const std::string& system_path, const std::vector<double>& deltas, const std::string& output) {
  const auto ps = gsd::io::parse_system(gsd::io::load_json(system_path));
  ps.require_bounds();
  Json report = report_header("consistency");
  report["config"] = {{"system", system_path}, {"delta", deltas.empty() ? std::vector<double>{0.0} : deltas}};
  Json results = Json::array();
  bool all_feasible = true;
  for (double delta : deltas.empty() ? std::vector<double>{0.0} : deltas) {
    const auto r = gsd::check_consistency(ps, delta);
    Json e;
    e["delta"] = delta;
    e["feasible"] = r.feasible;
    e["delta_max"] = nullable(r.delta_max);
    e["consistent"] = r.consistent;
    if (r.witness) {
      Json w;
      for (std::size_t i = 0; i < ps.size(); ++i) w[ps.elements().id(i)] = (*r.witness)[i];
      e["witness"] = std::move(w);
    } else {
      e["witness"] = nullptr;
    }
    all_feasible = all_feasible && r.feasible;
    results.push_back(std::move(e));
  }
  report["results"] = std::move(results);
  report["provenance"] = {{"elements", ps.size()},
                          {"r1_pairs", ps.r1().pair_count()},
                          {"r2_pairs", ps.r2().pair_count()},
                          {"bounds", bounds_json(ps)},
                          {"bounds_note", ps.bounds_note()}};
  emit(report, output);
  return all_feasible ? 0 : kExitModel;
}

int run_compare(const std::string& system_path, const std::string& credal_path, const std::string& acts_path,
                double delta, unsigned workers, const std::string& output) {
  const auto ps = gsd::io::parse_system(gsd::io::load_json(system_path));
  const auto m = gsd::io::parse_credal(gsd::io::load_json(credal_path));
  const auto acts = gsd::io::parse_acts(gsd::io::load_json(acts_path), ps, m.states());
  const gsd::GsdModel model(ps, m, delta);
  const auto margins = gsd::margin_matrix(acts, model, workers);

  Json report = report_header("compare");
  report["config"] = {{"system", system_path}, {"credal", credal_path}, {"acts", acts_path}, {"delta", delta}};
  Json verdicts = Json::array();
  for (std::size_t i = 0; i < acts.size(); ++i)
    for (std::size_t j = i + 1; j < acts.size(); ++j) {
      Json v;
      v["x"] = acts[i].name;
      v["y"] = acts[j].name;
      v["forward_margin"] = margins[i][j];
      v["backward_margin"] = margins[j][i];
      v["relation"] = gsd::to_string(gsd::classify(margins[i][j], margins[j][i]));
      verdicts.push_back(std::move(v));
    }
  auto names = [&](const std::vector<std::size_t>& idx) {
    Json out = Json::array();
    for (auto i : idx) out.push_back(acts[i].name);
    return out;
  };
  const auto und = gsd::choice_und(acts, model, workers);
  const auto max = gsd::choice_max(acts, model, workers);
  report["results"] = {{"verdicts", std::move(verdicts)}, {"choice_und", names(und)}, {"choice_max", names(max)}};
  Json vertices = Json::array();
  for (const auto& p : model.extreme_points()) vertices.push_back(p.probs);
  report["provenance"] = {{"credal_kind", m.kind()},
                          {"states", m.states()},
                          {"extreme_points", std::move(vertices)},
                          {"bounds", bounds_json(ps)},
                          {"bounds_note", ps.bounds_note()}};
  emit(report, output);
  return 0;
}

// ---------------------------------------------------------------------------
// Table commands

struct TableInputs {
  gsd::io::RunConfig config;
  gsd::EvaluationTable table;
  std::string evals_path;
  std::string config_path;
};

TableInputs load_table_inputs(const std::string& evals_path, const std::string& config_path, const Overrides& o) {
  TableInputs in;
  in.evals_path = evals_path;
  in.config_path = config_path;
  in.config = gsd::io::parse_config(gsd::io::load_json(config_path));
  auto& c = in.config;
  if (!o.delta.empty()) c.delta = o.delta;
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.replicates) c.B = *o.replicates;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (!o.subjects.empty()) c.subjects = o.subjects;
  if (o.candidate) c.candidate = o.candidate;
  if (o.opponents) c.opponents = o.opponents;
  if (o.zeta_grid) c.zeta_grid = *o.zeta_grid;
  c.validate();
  in.table = gsd::io::read_evaluations(evals_path, c.metrics);
  return in;
}

// The config echo leaves out `workers`: it changes scheduling, not results.
Json config_echo(const TableInputs& in) {
  Json j = gsd::io::to_json(in.config);
  j.erase("workers");
  j["evals"] = in.evals_path;
  j["config_file"] = in.config_path;
  return j;
}

gsd::EvaluationTable restrict_subjects(const gsd::EvaluationTable& table, const std::vector<std::string>& names) {
  if (names.empty()) return table;
  gsd::EvaluationTable out;
  out.instances = table.instances;
  out.metrics = table.metrics;
  for (const auto& n : names) {
    out.subjects.push_back(n);
    out.values.push_back(table.values[table.subject_index(n)]);
  }
  return out;
}

Json synthetic_points(const gsd::EmbeddedSystem& e) {
  Json out = Json::array();
  for (std::size_t i = 0; i < e.system.size(); ++i)
    if (e.system.is_synthetic(i)) out.push_back(e.system.elements().id(i));
  return out;
}

Json delta_max_json(const gsd::PreferenceSystem& ps) {
  const auto r = gsd::check_consistency(ps, 0.0);
  return nullable(r.delta_max);
}

std::pair<std::size_t, std::size_t> two_subjects(const TableInputs& in) {
  if (in.config.subjects.size() != 2)
    throw gsd::Error(gsd::ErrorKind::InvalidArgument, "exactly two subjects are required (--subjects A,B)");
  return {in.table.subject_index(in.config.subjects[0]), in.table.subject_index(in.config.subjects[1])};
}

int run_test(const TableInputs& in, const std::string& output) {
  const auto [a, b] = two_subjects(in);
  const auto pooled = gsd::pool_samples(in.table.values[a], in.table.values[b], in.table.metrics);
  Json report = report_header("test");
  report["config"] = config_echo(in);
  Json results = Json::array();
  bool inconsistent = false;
  for (double delta : in.config.delta) {
    Json e;
    e["delta"] = delta;
    try {
      gsd::TestOptions opts{delta, in.config.design, in.config.B, in.config.seed, in.config.workers};
      const auto r = gsd::permutation_test(pooled.x, pooled.y, pooled.embedded.system, opts);
      e["statistic"] = r.statistic;
      e["p_value"] = r.p_value;
      e["replicates"] = r.replicates;
      e["design"] = gsd::to_string(r.design);
      e["seed"] = r.seed;
    } catch (const gsd::Error& err) {
      if (err.kind() != gsd::ErrorKind::InconsistentAtDelta) throw;
      inconsistent = true;
      e["error"] = err.what();
    }
    results.push_back(std::move(e));
  }
  report["results"] = std::move(results);
  report["note"] = "per-delta p-values, no multiplicity correction; null hypothesis: exchangeability of the two "
                   "subjects' evaluations; small p is evidence that the first subject dominates the second";
  report["provenance"] = {{"subjects", in.config.subjects},
                          {"instances", in.table.instances.size()},
                          {"elements", pooled.embedded.system.size()},
                          {"synthetic_points", synthetic_points(pooled.embedded)},
                          {"delta_max", delta_max_json(pooled.embedded.system)}};
  emit(report, output);
  return inconsistent ? kExitModel : 0;
}

int run_robust_test(const TableInputs& in, const std::string& output) {
  const auto [a, b] = two_subjects(in);
  const auto pooled = gsd::pool_samples(in.table.values[a], in.table.values[b], in.table.metrics);
  Json report = report_header("robust-test");
  report["config"] = config_echo(in);
  Json results = Json::array();
  bool inconsistent = false;
  for (double delta : in.config.delta) {
    Json e;
    e["delta"] = delta;
    try {
      gsd::TestOptions opts{delta, in.config.design, in.config.B, in.config.seed, in.config.workers};
      const auto r =
          gsd::robust_test(pooled.x, pooled.y, pooled.embedded.system, opts, in.config.zeta_grid, in.config.alpha);
      Json grid = Json::array();
      for (std::size_t k = 0; k < r.zeta.size(); ++k)
        grid.push_back({{"zeta", r.zeta[k]}, {"statistic", r.observed[k]}, {"p_value", r.p_values[k]}});
      e["grid"] = std::move(grid);
      e["zeta_star"] = nullable(r.zeta_star);
      e["replicates"] = r.uncontaminated.replicates;
      e["design"] = gsd::to_string(r.uncontaminated.design);
      e["seed"] = r.uncontaminated.seed;
    } catch (const gsd::Error& err) {
      if (err.kind() != gsd::ErrorKind::InconsistentAtDelta) throw;
      inconsistent = true;
      e["error"] = err.what();
    }
    results.push_back(std::move(e));
  }
  report["results"] = std::move(results);
  report["note"] = "only the observed statistic is contaminated (least favorable pair at zeta for both samples); "
                   "zeta_star is the largest grid value with p <= alpha";
  report["provenance"] = {{"subjects", in.config.subjects},
                          {"instances", in.table.instances.size()},
                          {"elements", pooled.embedded.system.size()},
                          {"synthetic_points", synthetic_points(pooled.embedded)},
                          {"delta_max", delta_max_json(pooled.embedded.system)}};
  emit(report, output);
  return inconsistent ? kExitModel : 0;
}

int run_front(const TableInputs& in, const std::string& dot_path, const std::string& output) {
  const auto table = restrict_subjects(in.table, in.config.subjects);
  const auto ts = gsd::embed_table(table);
  Json report = report_header("front");
  report["config"] = config_echo(in);
  auto names = [&](const std::vector<std::size_t>& idx) {
    Json out = Json::array();
    for (auto i : idx) out.push_back(table.subjects[i]);
    return out;
  };
  Json results = Json::array();
  bool inconsistent = false;
  bool dot_written = false;
  for (double delta : in.config.delta) {
    Json e;
    e["delta"] = delta;
    try {
      const auto f = gsd::gsd_front(table, delta, in.config.epsilon, in.config.workers);
      e["epsilon"] = f.epsilon;
      e["gsd_front"] = names(f.gsd_front);
      e["pareto_front"] = names(f.pareto_front);
      Json margins = Json::object();
      for (std::size_t i = 0; i < table.subjects.size(); ++i) {
        Json row = Json::object();
        for (std::size_t j = 0; j < table.subjects.size(); ++j) row[table.subjects[j]] = f.margins[i][j];
        margins[table.subjects[i]] = std::move(row);
      }
      e["margins"] = std::move(margins);
      if (in.config.candidate) {
        const auto mt = gsd::front_membership_test(table, *in.config.candidate, delta, in.config.B, in.config.seed,
                                                   in.config.alpha, in.config.opponents, in.config.workers);
        Json subs = Json::array();
        for (std::size_t k = 0; k < mt.opponents.size(); ++k)
          subs.push_back({{"opponent", table.subjects[mt.opponents[k]]},
                          {"statistic", mt.statistics[k]},
                          {"p_value", mt.p_values[k]},
                          {"rejected", static_cast<bool>(mt.rejected[k])}});
        e["membership"] = {{"candidate", table.subjects[mt.candidate]},
                           {"alpha", mt.alpha},
                           {"replicates", mt.replicates},
                           {"seed", mt.seed},
                           {"in_front", mt.in_front},
                           {"sub_tests", std::move(subs)}};
      }
      if (!dot_path.empty() && !dot_written) {
        std::ofstream dot(dot_path, std::ios::binary);
        if (!dot) throw gsd::Error(gsd::ErrorKind::InvalidArgument, "cannot write '" + dot_path + "'");
        dot << gsd::io::to_dot(table.subjects, f.margins, f.gsd_front);
        dot_written = true;
        e["dot"] = dot_path;
      }
    } catch (const gsd::Error& err) {
      if (err.kind() != gsd::ErrorKind::InconsistentAtDelta) throw;
      inconsistent = true;
      e["error"] = err.what();
    }
    results.push_back(std::move(e));
  }
  report["results"] = std::move(results);
  report["note"] = "margin(i, j) is the minimal expected-utility difference of subject i over subject j; the GSD "
                   "front excludes subjects strictly dominated beyond epsilon";
  report["provenance"] = {{"subjects", table.subjects},
                          {"instances", table.instances.size()},
                          {"elements", ts.embedded.system.size()},
                          {"synthetic_points", synthetic_points(ts.embedded)},
                          {"delta_max", delta_max_json(ts.embedded.system)}};
  emit(report, output);
  return inconsistent ? kExitModel : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized stochastic dominance for mixed-scale comparisons"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gsd::io::kToolVersion);

  std::string output;
  Overrides o;
  std::string system_path, credal_path, acts_path, evals_path, config_path, dot_path;
  std::vector<std::string> opponents;
  std::vector<double> zeta_grid;
  double single_delta = 0.0;
  unsigned compare_workers = 1;

  auto* consistency = app.add_subcommand("consistency", "Consistency and maximal slack of a preference system");
  consistency->add_option("--system", system_path, "Preference-system JSON")->required()->check(CLI::ExistingFile);
  consistency->add_option("--delta", o.delta, "Regularization strength(s)")->delimiter(',');

  auto* compare = app.add_subcommand("compare", "Pairwise GSD verdicts and choice sets of acts");
  compare->add_option("--system", system_path, "Preference-system JSON")->required()->check(CLI::ExistingFile);
  compare->add_option("--credal", credal_path, "Credal-set JSON")->required()->check(CLI::ExistingFile);
  compare->add_option("--acts", acts_path, "Acts JSON")->required()->check(CLI::ExistingFile);
  compare->add_option("--delta", single_delta, "Regularization strength");
  compare->add_option("--workers", compare_workers, "Worker threads")->check(CLI::PositiveNumber);

  auto add_table_options = [&](CLI::App* cmd) {
    cmd->add_option("--evals", evals_path, "Evaluation CSV (subject,instance,metric,value)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--config", config_path, "Run configuration JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--delta", o.delta, "Regularization strength(s), overrides the config")->delimiter(',');
    cmd->add_option("--seed", o.seed, "Random seed, overrides the config");
    cmd->add_option("--workers", o.workers, "Worker threads, overrides the config")->check(CLI::PositiveNumber);
    cmd->add_option("--B", o.replicates, "Permutation replicates, overrides the config")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", o.alpha, "Test level, overrides the config");
  };

  auto* test = app.add_subcommand("test", "Permutation test of GSD between two subjects");
  add_table_options(test);
  test->add_option("--subjects", o.subjects, "Two subjects A,B")->delimiter(',');

  auto* robust = app.add_subcommand("robust-test", "Contamination-robustified permutation test");
  add_table_options(robust);
  robust->add_option("--subjects", o.subjects, "Two subjects A,B")->delimiter(',');
  robust->add_option("--zeta-grid", zeta_grid, "Contamination grid, ascending from 0")->delimiter(',');

  auto* front = app.add_subcommand("front", "GSD front, Pareto front and optional membership test");
  add_table_options(front);
  front->add_option("--subjects", o.subjects, "Restrict to these subjects")->delimiter(',');
  front->add_option("--epsilon", o.epsilon, "Front relaxation epsilon >= 0");
  front->add_option("--candidate", o.candidate, "Candidate for the membership test");
  auto* opp = front->add_option("--opponents", opponents, "Opponents of the candidate")->delimiter(',');
  front->add_option("--dot", dot_path, "Write the strict-dominance Hasse graph as DOT");

  for (auto* cmd : {consistency, compare, test, robust, front})
    cmd->add_option("--output,-o", output, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }
  if (opp->count() > 0) o.opponents = opponents;
  if (!zeta_grid.empty()) o.zeta_grid = zeta_grid;

  try {
    if (*consistency) return run_consistency(system_path, o.delta, output);
    if (*compare) return run_compare(system_path, credal_path, acts_path, single_delta, compare_workers, output);
    const auto in = load_table_inputs(evals_path, config_path, o);
    if (*test) return run_test(in, output);
    if (*robust) return run_robust_test(in, output);
    return run_front(in, dot_path, output);
  } catch (const gsd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gsd::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
