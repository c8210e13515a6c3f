#pragma once

// Preference systems [A, R1, R2]: A finite consequence set, R1 a preorder on A
// (ordinal information) and R2 a preorder on the pairs of R1 (intensity
// information). Utility representations u: A -> [0,1] are the points of a
// polyhedron described by RepresentationConstraintSet; every dominance and
// test statistic in this library is an LP over that polyhedron.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gsd/lp.hpp"
#include "gsd/order.hpp"

namespace gsd {

struct ElementPair {
  ElementId better;
  ElementId worse;
};

struct PairOfPairs {
  ElementPair first;   // the more intense exchange
  ElementPair second;
};

// Indices of the bottom element a_* and the top element a^*.
struct Bounds {
  std::size_t bottom = 0;
  std::size_t top = 0;
};

class PreferenceSystem {
 public:
  PreferenceSystem(Universe elements, Relation r1, std::vector<IndexPair> r1_pairs, Relation r2,
                   std::optional<Bounds> bounds, std::vector<bool> synthetic, std::string bounds_note);

  const Universe& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }

  // Closed preorder over elements.
  const Relation& r1() const noexcept { return r1_; }
  // Universe of r2: the pairs of r1 in sorted order. r2 indexes into it.
  const std::vector<IndexPair>& r1_pairs() const noexcept { return r1_pairs_; }
  const Relation& r2() const noexcept { return r2_; }
  // Position of (a, b) within r1_pairs(), if present.
  std::optional<std::size_t> r1_pair_index(std::size_t a, std::size_t b) const;

  const std::optional<Bounds>& bounds() const noexcept { return bounds_; }
  // Throws Error(MissingBounds).
  const Bounds& require_bounds() const;

  // Elements that were added to close the system rather than observed.
  bool is_synthetic(std::size_t element) const { return synthetic_.at(element); }
  const std::vector<bool>& synthetic() const noexcept { return synthetic_; }
  // How the bounds were obtained, for reports.
  const std::string& bounds_note() const noexcept { return bounds_note_; }

 private:
  Universe elements_;
  Relation r1_;
  std::vector<IndexPair> r1_pairs_;
  Relation r2_;
  std::optional<Bounds> bounds_;
  std::vector<bool> synthetic_;
  std::string bounds_note_;
};

// Closes r1 and r2 reflexively and transitively and detects bounds.
// Explicit bounds (bottom, top) must be weakly below/above every element of
// the closed r1; automatic detection additionally requires top to be strictly
// preferred to bottom and picks the first member of each extreme indifference
// class. Errors: UnknownElement, DanglingR2Pair (an r2 member that is not a
// pair of the closed r1), MissingBounds for invalid explicit bounds.
PreferenceSystem build_system(const std::vector<ElementId>& elements, const std::vector<ElementPair>& r1,
                              const std::vector<PairOfPairs>& r2,
                              const std::optional<std::pair<ElementId, ElementId>>& explicit_bounds = std::nullopt);

// One sparse row over the element variables.
struct RepresentationRow {
  std::vector<std::pair<std::size_t, double>> terms;
  lp::Comparator comparator = lp::Comparator::GreaterEqual;
  double rhs = 0.0;
  // Strict rows carry the uniform slack: rhs is the regularization strength.
  bool strict = false;
};

enum class RowSelection {
  // Covering strict pairs of both quotients plus one equality per indifference
  // class member, with rows implied by R1 dropped. Same polyhedron as Full.
  Reduced,
  // One row per strict pair and per off-diagonal indifference pair.
  Full,
};

// Rows of the normalized, delta-regularized representation polyhedron:
// u(a) - u(b) >= delta for strict R1 pairs, u(c) - u(d) - u(e) + u(f) >= delta
// for strict R2 pairs, equalities for indifference, u(a_*) = 0, u(a^*) = 1 and
// 0 <= u <= 1.
class RepresentationConstraintSet {
 public:
  std::size_t num_vars() const noexcept { return num_vars_; }
  double delta() const noexcept { return delta_; }
  const std::vector<RepresentationRow>& rows() const noexcept { return rows_; }
  const Bounds& bounds() const noexcept { return bounds_; }

  // The rows as a linear program with zero objective.
  lp::LinearProgram to_linear_program() const;

  // LP with one extra variable eps in [0, 1] replacing the slack of every
  // strict row; its last variable is eps.
  lp::LinearProgram slack_program() const;

  // Whether a utility vector satisfies every row and bound within tol.
  bool satisfied_by(const std::vector<double>& u, double tol = lp::kFeasibilityTol) const;

 private:
  friend RepresentationConstraintSet constraints_for(const PreferenceSystem&, double, RowSelection);

  std::size_t num_vars_ = 0;
  double delta_ = 0.0;
  Bounds bounds_;
  std::vector<RepresentationRow> rows_;
};

// Throws Error(MissingBounds) for unbounded systems, InvalidArgument for
// delta outside [0, 1).
RepresentationConstraintSet constraints_for(const PreferenceSystem& ps, double delta,
                                            RowSelection selection = RowSelection::Reduced);

using RepresentationVector = std::vector<double>;

struct ConsistencyReport {
  double delta = 0.0;
  // N^delta is nonempty.
  bool feasible = false;
  std::optional<RepresentationVector> witness;
  // sup{d : N^d nonempty}; empty when even N^0 is empty.
  std::optional<double> delta_max;
  // Consistency in the strict sense: delta_max > kSignTol.
  bool consistent = false;
  std::string bounds_note;
};

ConsistencyReport check_consistency(const PreferenceSystem& ps, double delta);

// Mixed-scale metric spaces.
enum class Scale { Cardinal, Ordinal };
enum class Direction { HigherBetter, LowerBetter };

struct Dimension {
  std::string name;
  Scale scale = Scale::Cardinal;
  Direction direction = Direction::HigherBetter;
  // Ordinal levels from worst to best (before applying direction).
  std::vector<std::string> levels;
};

struct ScaleSpec {
  std::vector<Dimension> dimensions;

  std::size_t r() const noexcept { return dimensions.size(); }
  std::size_t cardinal_count() const noexcept;
  bool is_cardinal(std::size_t j) const { return dimensions.at(j).scale == Scale::Cardinal; }

  // Throws InvalidArgument for an empty spec, duplicate names or ordinal
  // dimensions without levels.
  void validate() const;

  // Convenience: r cardinal higher-is-better dimensions named m0, m1, ...
  static ScaleSpec all_cardinal(std::size_t r);
};

// A raw metric observation: number for cardinal, level name for ordinal.
using MetricValue = std::variant<double, std::string>;
using RawPoint = std::vector<MetricValue>;
// Encoded points are oriented so that larger is better in every coordinate;
// ordinal coordinates hold level ranks and are only ever compared.
using Point = std::vector<double>;

// Errors: DimensionMismatch, UnknownOrdinalLevel, InvalidArgument when a value
// kind does not match its dimension.
Point encode_point(const RawPoint& raw, const ScaleSpec& spec);
RawPoint decode_point(const Point& point, const ScaleSpec& spec);

struct EmbeddedSystem {
  PreferenceSystem system;
  // Encoded vector of every element (synthetic bounds included).
  std::vector<Point> element_points;
  // Element index of each input point.
  std::vector<std::size_t> point_element;
};

// Builds the bounded subsystem of pref(R^r) on the distinct input points plus
// the component-wise minimum and maximum: R1 is component-wise dominance;
// ((x,y),(x',y')) is in R2 when x_j - y_j >= x'_j - y'_j on cardinal
// coordinates and x_j >= x'_j >= y'_j >= y_j on ordinal coordinates.
// Points must already be encoded; ordinal coordinates must be valid ranks.
EmbeddedSystem embed_vectors(const std::vector<Point>& points, const ScaleSpec& spec);

// Renders an encoded point as an element id, e.g. "(0.25,high)".
std::string point_label(const Point& point, const ScaleSpec& spec);

}  // namespace gsd
