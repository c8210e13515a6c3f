#pragma once

// Finitely generated credal sets over a finite state space, in forms whose
// extreme points can be listed explicitly.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace gsd {

using StateId = std::string;

struct Pmf {
  std::vector<StateId> states;
  std::vector<double> probs;

  // Throws InvalidArgument unless |probs| = |states|, probs >= -tol and the
  // sum is 1 within tol.
  void validate() const;

  static Pmf uniform(std::vector<StateId> states);
};

namespace credal {

struct Singleton {
  Pmf pmf;
};

// Convex hull of the listed pmfs.
struct VertexList {
  std::vector<Pmf> vertices;
};

// {(1 - zeta) * base + zeta * p : p any pmf}.
struct LinearVacuous {
  Pmf base;
  double zeta = 0.0;
};

// {p : p(chain[0]) >= p(chain[1]) >= ... }, states not in the chain get 0.
// `states` fixes the coordinate order of the resulting pmfs.
struct OrderingChain {
  std::vector<StateId> states;
  std::vector<StateId> chain;
};

// {p : lower_l <= sum_s f_l(s) p(s) <= upper_l for every l}.
struct ExpectationBound {
  std::vector<double> values;  // f_l per state
  double lower = 0.0;
  double upper = 0.0;
};

struct ConstraintForm {
  std::vector<StateId> states;
  std::vector<ExpectationBound> bounds;
};

// State cap for vertex enumeration of ConstraintForm.
inline constexpr std::size_t kMaxConstraintFormStates = 8;

}  // namespace credal

class CredalSet {
 public:
  using Form = std::variant<credal::Singleton, credal::VertexList, credal::LinearVacuous, credal::OrderingChain,
                            credal::ConstraintForm>;

  // Validates the form (shared state lists, zeta in [0,1], lower <= upper).
  explicit CredalSet(Form form);

  const Form& form() const noexcept { return form_; }
  const std::vector<StateId>& states() const noexcept { return states_; }
  std::string kind() const;

 private:
  Form form_;
  std::vector<StateId> states_;
};

// Vertex set of the credal polytope, duplicates removed within the
// feasibility tolerance. Errors: TooManyStates (ConstraintForm above the cap),
// EmptyCredalSet.
std::vector<Pmf> extreme_points(const CredalSet& m);

// Membership via the defining constraints, or a convex-hull LP for
// VertexList. Throws StateMismatch when the state lists differ.
bool contains(const CredalSet& m, const Pmf& p);

// True when `point` is a convex combination of `others` (LP feasibility).
bool in_convex_hull(const std::vector<std::vector<double>>& others, const std::vector<double>& point);

}  // namespace gsd
