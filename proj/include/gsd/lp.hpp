#pragma once

// Dense two-phase simplex on the compact (Tucker) tableau with explicit
// variable bounds.
//
// Every row i carries a logical variable s_i = a_i . x whose bounds encode the
// comparator and right-hand side, so the tableau has one row per constraint
// and one column per nonbasic variable; structural bounds never become rows.
// Phase 1 minimizes the sum of bound violations of the basic variables,
// phase 2 the objective. Pricing is Dantzig's largest reduced cost; after a
// run of degenerate pivots the solver switches to Bland's smallest-index rule
// (for both entering and leaving choice) until the objective strictly
// improves, which rules out cycling.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace gsd::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Constraint satisfaction.
inline constexpr double kFeasibilityTol = 1e-9;
// Reduced-cost optimality.
inline constexpr double kOptimalityTol = 1e-9;
// Semantic sign decisions made by callers on LP optima.
inline constexpr double kSignTol = 1e-7;

enum class Sense { Minimize, Maximize };
enum class Comparator { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

struct Constraint {
  std::vector<double> coefficients;
  Comparator comparator = Comparator::GreaterEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  Sense sense = Sense::Minimize;
  std::vector<Constraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  // num_vars variables, zero objective, bounds [0, +inf).
  static LinearProgram with_variables(std::size_t n);

  // Throws Error(InvalidArgument) on length mismatches, NaNs or lower > upper.
  void validate() const;
};

struct Outcome {
  Status status = Status::Infeasible;
  double objective_value = 0.0;
  std::vector<double> solution;
  std::size_t iterations = 0;
};

Outcome solve(const LinearProgram& lp);

// Phase 1 only.
bool feasible(const LinearProgram& lp);

// Feasible basis of a fixed constraint system, reusable across objectives.
// Every optimize() call restarts from the stored phase-1 basis, so results do
// not depend on call order and concurrent calls are safe.
class PreparedProgram {
 public:
  // Runs phase 1; std::nullopt when the constraint set is infeasible.
  // The objective and sense of `lp` are ignored.
  static std::optional<PreparedProgram> prepare(const LinearProgram& lp);

  std::size_t num_vars() const noexcept { return num_vars_; }
  const std::vector<double>& feasible_point() const noexcept { return start_point_; }

  Outcome optimize(std::span<const double> objective, Sense sense) const;

 private:
  struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> coef;          // rows x cols, basic = sum coef * nonbasic
    std::vector<std::size_t> basic;    // row -> variable
    std::vector<std::size_t> nonbasic; // column -> variable
    std::vector<double> value;         // all variables
  };

  PreparedProgram() = default;
  void slack_basis(const LinearProgram& lp);
  double max_violation(const std::vector<double>& value) const;

  std::size_t num_vars_ = 0;
  std::vector<double> matrix_;  // original rows, m x n
  std::vector<double> lower_;
  std::vector<double> upper_;
  Tableau start_;
  std::vector<double> start_point_;

  friend class SimplexEngine;
};

}  // namespace gsd::lp
