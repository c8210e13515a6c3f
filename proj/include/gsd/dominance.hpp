#pragma once

// Generalized stochastic dominance between acts X: S -> A. X dominates Y when
// E_pi(u o X) >= E_pi(u o Y) for every normalized delta-regularized
// representation u and every pi in the credal set. The expectation difference
// is linear in pi for fixed u, so the minimum over the credal set is attained
// at an extreme point: one LP per extreme point.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gsd/credal.hpp"
#include "gsd/lp.hpp"
#include "gsd/preference.hpp"

namespace gsd {

struct Act {
  std::string name;
  std::vector<StateId> states;
  std::vector<std::size_t> outcomes;  // element index per state
};

// Errors: StateMismatch when the mapping is not total on `states`,
// UnknownElement for consequences outside the system.
Act make_act(std::string name, const PreferenceSystem& ps, const std::vector<StateId>& states,
             const std::map<StateId, ElementId>& mapping);

enum class DominanceRelation { StrictForward, StrictBackward, Indifferent, Incomparable };

std::string to_string(DominanceRelation relation);

struct DominanceVerdict {
  double forward_margin = 0.0;
  double backward_margin = 0.0;
  DominanceRelation relation = DominanceRelation::Indifferent;
};

// Pure function of the margins at tolerance kSignTol.
DominanceRelation classify(double forward_margin, double backward_margin);

// A preference system, credal set and regularization strength with the
// representation polyhedron prepared once for all pairwise LPs.
class GsdModel {
 public:
  // Errors: MissingBounds, InconsistentAtDelta, credal errors.
  GsdModel(const PreferenceSystem& ps, const CredalSet& m, double delta);

  const PreferenceSystem& system() const noexcept { return *ps_; }
  const std::vector<Pmf>& extreme_points() const noexcept { return vertices_; }
  const std::vector<StateId>& states() const noexcept { return states_; }
  double delta() const noexcept { return delta_; }

  // min over extreme points pi and u in N^delta of E_pi(u o x) - E_pi(u o y).
  double margin(const Act& x, const Act& y) const;
  DominanceVerdict compare(const Act& x, const Act& y) const;

 private:
  void check_act(const Act& a) const;

  const PreferenceSystem* ps_;
  std::vector<StateId> states_;
  std::vector<Pmf> vertices_;
  double delta_;
  lp::PreparedProgram program_;
};

double dominance_margin(const Act& x, const Act& y, const PreferenceSystem& ps, const CredalSet& m, double delta);
DominanceVerdict gsd_compare(const Act& x, const Act& y, const PreferenceSystem& ps, const CredalSet& m,
                             double delta);

// margins[i][j] = margin(acts[i], acts[j]); the diagonal is 0.
std::vector<std::vector<double>> margin_matrix(const std::vector<Act>& acts, const GsdModel& model,
                                               unsigned workers = 1);

// Indices of the acts that no other act strictly dominates.
std::vector<std::size_t> choice_und(const std::vector<Act>& acts, const GsdModel& model, unsigned workers = 1);
// Indices of the acts that dominate every other act (strictly or indifferently).
std::vector<std::size_t> choice_max(const std::vector<Act>& acts, const GsdModel& model, unsigned workers = 1);

std::vector<std::size_t> choice_und(const std::vector<Act>& acts, const PreferenceSystem& ps, const CredalSet& m,
                                    double delta);
std::vector<std::size_t> choice_max(const std::vector<Act>& acts, const PreferenceSystem& ps, const CredalSet& m,
                                    double delta);

// Expected-utility maximizers for a single utility u and pmf pi, ties within
// kSignTol.
std::vector<std::size_t> eu_choice(const std::vector<Act>& acts, const RepresentationVector& u, const Pmf& pi);

// First-order stochastic dominance choice: choice_und with the singleton
// credal set {pi} and delta = 0. Requires R2 to be the trivial preorder
// (InvalidArgument otherwise).
std::vector<std::size_t> fsd_choice(const std::vector<Act>& acts, const PreferenceSystem& ps, const Pmf& pi);

}  // namespace gsd
