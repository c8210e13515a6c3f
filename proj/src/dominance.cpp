#include "gsd/dominance.hpp"

#include <algorithm>
#include <limits>

#include "gsd/error.hpp"
#include "gsd/parallel.hpp"

namespace gsd {

Act make_act(std::string name, const PreferenceSystem& ps, const std::vector<StateId>& states,
             const std::map<StateId, ElementId>& mapping) {
  Act act;
  act.name = std::move(name);
  act.states = states;
  for (const auto& s : states) {
    auto it = mapping.find(s);
    if (it == mapping.end()) throw Error(ErrorKind::StateMismatch, "act '" + act.name + "' has no consequence for '" + s + "'");
    act.outcomes.push_back(ps.elements().index_of(it->second));
  }
  if (mapping.size() != states.size())
    throw Error(ErrorKind::StateMismatch, "act '" + act.name + "' maps states outside the state list");
  return act;
}

std::string to_string(DominanceRelation relation) {
  switch (relation) {
    case DominanceRelation::StrictForward: return "strict_forward";
    case DominanceRelation::StrictBackward: return "strict_backward";
    case DominanceRelation::Indifferent: return "indifferent";
    case DominanceRelation::Incomparable: return "incomparable";
  }
  return "unknown";
}

DominanceRelation classify(double forward_margin, double backward_margin) {
  const bool forward = forward_margin >= -lp::kSignTol;
  const bool backward = backward_margin >= -lp::kSignTol;
  if (forward && backward) return DominanceRelation::Indifferent;
  if (forward) return DominanceRelation::StrictForward;
  if (backward) return DominanceRelation::StrictBackward;
  return DominanceRelation::Incomparable;
}

namespace {

lp::PreparedProgram prepare_or_throw(const PreferenceSystem& ps, double delta) {
  auto prepared = lp::PreparedProgram::prepare(constraints_for(ps, delta).to_linear_program());
  if (!prepared)
    throw Error(ErrorKind::InconsistentAtDelta,
                "no normalized representation with slack " + std::to_string(delta) + " exists");
  return std::move(*prepared);
}

}  // namespace

GsdModel::GsdModel(const PreferenceSystem& ps, const CredalSet& m, double delta)
    : ps_(&ps), states_(m.states()), vertices_(gsd::extreme_points(m)), delta_(delta), program_(prepare_or_throw(ps, delta)) {}

void GsdModel::check_act(const Act& a) const {
  if (a.states != states_) throw Error(ErrorKind::StateMismatch, "act '" + a.name + "' is defined on other states");
  if (a.outcomes.size() != states_.size())
    throw Error(ErrorKind::StateMismatch, "act '" + a.name + "' is not total on the states");
  for (auto e : a.outcomes)
    if (e >= ps_->size()) throw Error(ErrorKind::UnknownElement, "act '" + a.name + "' references an unknown element");
}

double GsdModel::margin(const Act& x, const Act& y) const {
  check_act(x);
  check_act(y);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> objective(ps_->size());
  for (const auto& pi : vertices_) {
    std::fill(objective.begin(), objective.end(), 0.0);
    for (std::size_t s = 0; s < states_.size(); ++s) {
      objective[x.outcomes[s]] += pi.probs[s];
      objective[y.outcomes[s]] -= pi.probs[s];
    }
    if (std::all_of(objective.begin(), objective.end(), [](double c) { return c == 0.0; })) {
      best = std::min(best, 0.0);
      continue;
    }
    const auto outcome = program_.optimize(objective, lp::Sense::Minimize);
    if (outcome.status != lp::Status::Optimal)
      throw Error(ErrorKind::NumericFailure, "bounded dominance LP did not reach an optimum");
    best = std::min(best, outcome.objective_value);
  }
  return best;
}

DominanceVerdict GsdModel::compare(const Act& x, const Act& y) const {
  DominanceVerdict v;
  v.forward_margin = margin(x, y);
  v.backward_margin = margin(y, x);
  v.relation = classify(v.forward_margin, v.backward_margin);
  return v;
}

double dominance_margin(const Act& x, const Act& y, const PreferenceSystem& ps, const CredalSet& m, double delta) {
  return GsdModel(ps, m, delta).margin(x, y);
}

DominanceVerdict gsd_compare(const Act& x, const Act& y, const PreferenceSystem& ps, const CredalSet& m,
                             double delta) {
  return GsdModel(ps, m, delta).compare(x, y);
}

std::vector<std::vector<double>> margin_matrix(const std::vector<Act>& acts, const GsdModel& model, unsigned workers) {
  const std::size_t n = acts.size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  parallel_for(n * n, workers, [&](std::size_t k) {
    const std::size_t i = k / n;
    const std::size_t j = k % n;
    if (i != j) out[i][j] = model.margin(acts[i], acts[j]);
  });
  return out;
}

std::vector<std::size_t> choice_und(const std::vector<Act>& acts, const GsdModel& model, unsigned workers) {
  if (acts.empty()) throw Error(ErrorKind::InvalidArgument, "choice over an empty act set");
  const auto margins = margin_matrix(acts, model, workers);
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < acts.size(); ++x) {
    bool dominated = false;
    for (std::size_t y = 0; y < acts.size() && !dominated; ++y)
      dominated = y != x && classify(margins[y][x], margins[x][y]) == DominanceRelation::StrictForward;
    if (!dominated) out.push_back(x);
  }
  return out;
}

std::vector<std::size_t> choice_max(const std::vector<Act>& acts, const GsdModel& model, unsigned workers) {
  if (acts.empty()) throw Error(ErrorKind::InvalidArgument, "choice over an empty act set");
  const auto margins = margin_matrix(acts, model, workers);
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < acts.size(); ++x) {
    bool dominates_all = true;
    for (std::size_t y = 0; y < acts.size() && dominates_all; ++y) {
      if (y == x) continue;
      const auto rel = classify(margins[x][y], margins[y][x]);
      dominates_all = rel == DominanceRelation::StrictForward || rel == DominanceRelation::Indifferent;
    }
    if (dominates_all) out.push_back(x);
  }
  return out;
}

std::vector<std::size_t> choice_und(const std::vector<Act>& acts, const PreferenceSystem& ps, const CredalSet& m,
                                    double delta) {
  return choice_und(acts, GsdModel(ps, m, delta));
}

std::vector<std::size_t> choice_max(const std::vector<Act>& acts, const PreferenceSystem& ps, const CredalSet& m,
                                    double delta) {
  return choice_max(acts, GsdModel(ps, m, delta));
}

std::vector<std::size_t> eu_choice(const std::vector<Act>& acts, const RepresentationVector& u, const Pmf& pi) {
  if (acts.empty()) throw Error(ErrorKind::InvalidArgument, "choice over an empty act set");
  std::vector<double> value;
  for (const auto& a : acts) {
    if (a.states != pi.states) throw Error(ErrorKind::StateMismatch, "act '" + a.name + "' is defined on other states");
    double e = 0.0;
    for (std::size_t s = 0; s < a.outcomes.size(); ++s) {
      if (a.outcomes[s] >= u.size()) throw Error(ErrorKind::UnknownElement, "utility undefined on an act image");
      e += pi.probs[s] * u[a.outcomes[s]];
    }
    value.push_back(e);
  }
  const double best = *std::max_element(value.begin(), value.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < acts.size(); ++i)
    if (value[i] >= best - lp::kSignTol) out.push_back(i);
  return out;
}

std::vector<std::size_t> fsd_choice(const std::vector<Act>& acts, const PreferenceSystem& ps, const Pmf& pi) {
  const Relation& r2 = ps.r2();
  for (const auto& [p, q] : r2.pairs())
    if (p != q) throw Error(ErrorKind::InvalidArgument, "first-order dominance needs a trivial R2");
  return choice_und(acts, ps, CredalSet(credal::Singleton{pi}), 0.0);
}

}  // namespace gsd
