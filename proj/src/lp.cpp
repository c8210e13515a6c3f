#include "gsd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsd/error.hpp"

namespace gsd::lp {

namespace {

constexpr double kPivotTol = 1e-7;
constexpr double kStepTol = 1e-12;
constexpr std::size_t kDegenerateRunBeforeBland = 100;
constexpr std::size_t kReinvertPeriod = 100;
constexpr double kSingularTol = 1e-11;
constexpr double kHarrisTol = 0.5e-9;
// Final points are checked against the original rows at this tolerance.
constexpr double kVerifyTol = 1e-7;

}  // namespace

LinearProgram LinearProgram::with_variables(std::size_t n) {
  LinearProgram lp;
  lp.num_vars = n;
  lp.objective.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, kInfinity);
  return lp;
}

void LinearProgram::validate() const {
  if (objective.size() != num_vars)
    throw Error(ErrorKind::InvalidArgument, "objective length differs from num_vars");
  if (lower.size() != num_vars || upper.size() != num_vars)
    throw Error(ErrorKind::InvalidArgument, "bound vectors differ from num_vars");
  for (std::size_t j = 0; j < num_vars; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || std::isnan(objective[j]))
      throw Error(ErrorKind::InvalidArgument, "NaN in objective or bounds");
    if (lower[j] > upper[j])
      throw Error(ErrorKind::InvalidArgument, "lower bound exceeds upper bound for variable " + std::to_string(j));
    if (lower[j] == kInfinity || upper[j] == -kInfinity)
      throw Error(ErrorKind::InvalidArgument, "empty bound interval for variable " + std::to_string(j));
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& row = constraints[i];
    if (row.coefficients.size() != num_vars)
      throw Error(ErrorKind::InvalidArgument, "constraint " + std::to_string(i) + " has wrong length");
    if (!std::isfinite(row.rhs)) throw Error(ErrorKind::InvalidArgument, "non-finite right-hand side");
    for (double c : row.coefficients)
      if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
  }
}

class SimplexEngine {
 public:
  using Tableau = PreparedProgram::Tableau;

  SimplexEngine(Tableau& t, const std::vector<double>& matrix, const std::vector<double>& lower,
                const std::vector<double>& upper, bool force_bland = false)
      : t_(t), matrix_(matrix), lower_(lower), upper_(upper), force_bland_(force_bland), bland_(force_bland) {}

  // Returns false when the constraint set is infeasible.
  bool phase_one() {
    std::vector<double> cost(lower_.size(), 0.0);
    bool fresh = false;
    bool stalled = false;
    while (true) {
      bool any = false;
      std::fill(cost.begin(), cost.end(), 0.0);
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < t_.rows; ++i) {
        const std::size_t v = t_.basic[i];
        const double x = t_.value[v];
        if (x < lower_[v] - kFeasibilityTol) {
          cost[v] = -1.0;
          infeasibility += lower_[v] - x;
          any = true;
        } else if (x > upper_[v] + kFeasibilityTol) {
          cost[v] = 1.0;
          infeasibility += x - upper_[v];
          any = true;
        }
      }
      if (!any || stalled) {
        // Confirm the verdict on a freshly rebuilt tableau.
        if (fresh) return !any;
        reinvert();
        fresh = true;
        stalled = false;
        continue;
      }
      if (infeasibility < best_objective_ - kStepTol) {
        best_objective_ = infeasibility;
        degenerate_run_ = 0;
        bland_ = force_bland_;
      }
      const auto step = iterate(cost, /*phase_one=*/true);
      if (step == StepResult::Optimal) stalled = true;
      else fresh = false;
      if (step == StepResult::Unbounded)
        throw Error(ErrorKind::NumericFailure, "phase 1 ray without breakpoint");
    }
  }

  // Minimizes cost . x from the current feasible basis.
  Status phase_two(const std::vector<double>& cost) {
    best_objective_ = kInfinity;
    degenerate_run_ = 0;
    bland_ = force_bland_;
    while (true) {
      const auto step = iterate(cost, /*phase_one=*/false);
      if (step == StepResult::Optimal) {
        refresh_basic_values();
        return Status::Optimal;
      }
      if (step == StepResult::Unbounded) return Status::Unbounded;
    }
  }

  std::size_t iterations() const noexcept { return iterations_; }
  // True when a reinversion met a numerically singular basis.
  bool saw_singular_basis() const noexcept { return singular_; }

 private:
  enum class StepResult { Moved, Optimal, Unbounded };

  bool can_increase(std::size_t v) const { return t_.value[v] < upper_[v] - kStepTol; }
  bool can_decrease(std::size_t v) const { return t_.value[v] > lower_[v] + kStepTol; }

  StepResult iterate(const std::vector<double>& cost, bool phase_one) {
    if (++iterations_ > iteration_limit())
      throw Error(ErrorKind::NumericFailure, "simplex iteration limit exceeded");

    const std::size_t rows = t_.rows;
    const std::size_t cols = t_.cols;

    // Reduced costs over the nonbasic columns.
    reduced_.assign(cols, 0.0);
    for (std::size_t k = 0; k < cols; ++k) reduced_[k] = cost[t_.nonbasic[k]];
    for (std::size_t i = 0; i < rows; ++i) {
      const double c = cost[t_.basic[i]];
      if (c == 0.0) continue;
      const double* row = &t_.coef[i * cols];
      for (std::size_t k = 0; k < cols; ++k) reduced_[k] += c * row[k];
    }

    // Entering column.
    std::size_t enter = cols;
    double best = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const std::size_t v = t_.nonbasic[k];
      const double d = reduced_[k];
      const bool improving = (d < -kOptimalityTol && can_increase(v)) || (d > kOptimalityTol && can_decrease(v));
      if (!improving) continue;
      if (bland_) {
        if (enter == cols || v < t_.nonbasic[enter]) enter = k;
      } else if (std::abs(d) > best) {
        best = std::abs(d);
        enter = k;
      }
    }
    if (enter == cols) return StepResult::Optimal;

    const std::size_t entering_var = t_.nonbasic[enter];
    const double dir = reduced_[enter] < 0.0 ? 1.0 : -1.0;

    // Ratio test. The entering variable's own bound span is the first limit.
    // Outside Bland mode a Harris two-pass test picks, among rows blocking
    // within a kHarrisTol-relaxed step, the one with the largest pivot.
    double span = upper_[entering_var] - lower_[entering_var];
    if (!std::isfinite(span)) span = kInfinity;
    candidates_.clear();
    double relaxed_max = span;
    for (std::size_t i = 0; i < rows; ++i) {
      const double rate = t_.coef[i * cols + enter] * dir;
      if (std::abs(rate) <= kPivotTol) continue;
      const std::size_t v = t_.basic[i];
      const double x = t_.value[v];
      const double lo = lower_[v];
      const double hi = upper_[v];
      double distance = kInfinity;
      double bound = 0.0;
      if (rate < 0.0) {
        if (phase_one && x > hi + kFeasibilityTol) {
          distance = x - hi;
          bound = hi;
        } else if (std::isfinite(lo) && x >= lo - kFeasibilityTol) {
          distance = std::max(x - lo, 0.0);
          bound = lo;
        }
      } else {
        if (phase_one && x < lo - kFeasibilityTol) {
          distance = lo - x;
          bound = lo;
        } else if (std::isfinite(hi) && x <= hi + kFeasibilityTol) {
          distance = std::max(hi - x, 0.0);
          bound = hi;
        }
      }
      if (distance == kInfinity) continue;
      const double magnitude = std::abs(rate);
      candidates_.push_back({i, distance / magnitude, bound, magnitude});
      relaxed_max = std::min(relaxed_max, (distance + kHarrisTol) / magnitude);
    }

    double step = span;
    std::size_t leave = rows;
    double leave_bound = 0.0;
    if (bland_) {
      for (const auto& c : candidates_) {
        const bool take = c.limit < step - kStepTol ||
                          (c.limit <= step + kStepTol && leave != rows && t_.basic[c.row] < t_.basic[leave]);
        if (take) {
          step = std::min(step, c.limit);
          leave = c.row;
          leave_bound = c.bound;
        }
      }
    } else if (!(span <= relaxed_max)) {
      double best_rate = 0.0;
      for (const auto& c : candidates_) {
        if (c.limit > relaxed_max || c.rate <= best_rate) continue;
        best_rate = c.rate;
        step = c.limit;
        leave = c.row;
        leave_bound = c.bound;
      }
      if (leave == rows) step = kInfinity;
    }

    if (step == kInfinity) return StepResult::Unbounded;

    track_degeneracy(step);

    // Move. Basic values follow the entering column; a full recomputation
    // every kRefreshPeriod iterations bounds the drift.
    const double old_value = t_.value[entering_var];
    double new_value = old_value + dir * step;
    if (leave == rows) new_value = dir > 0 ? upper_[entering_var] : lower_[entering_var];
    const double delta = new_value - old_value;
    t_.value[entering_var] = new_value;
    if (delta != 0.0)
      for (std::size_t i = 0; i < rows; ++i) t_.value[t_.basic[i]] += t_.coef[i * cols + enter] * delta;
    if (leave != rows) {
      const std::size_t leaving_var = t_.basic[leave];
      pivot(leave, enter);
      t_.value[leaving_var] = leave_bound;
    }
    if (iterations_ % kReinvertPeriod == 0) reinvert();
    return StepResult::Moved;
  }

  void track_degeneracy(double step) {
    if (step <= kStepTol) {
      if (++degenerate_run_ >= kDegenerateRunBeforeBland) bland_ = true;
    } else {
      degenerate_run_ = 0;
      bland_ = force_bland_;
    }
  }

  void pivot(std::size_t r, std::size_t k) {
    const std::size_t rows = t_.rows;
    const std::size_t cols = t_.cols;
    double* prow = &t_.coef[r * cols];
    const double p = prow[k];
    const double inv = 1.0 / p;
    for (std::size_t j = 0; j < cols; ++j) prow[j] = -prow[j] * inv;
    prow[k] = inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      double* row = &t_.coef[i * cols];
      const double f = row[k];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) row[j] += f * prow[j];
      row[k] = f * inv;
    }
    std::swap(t_.basic[r], t_.nonbasic[k]);
  }

  // Rebuilds the tableau of the current basis from the original rows, then
  // recomputes basic values. With k basic structural variables the basis
  // reduces to the k x k block of the nonbasic logical rows.
  void reinvert() {
    const std::size_t n = t_.cols;
    const std::size_t m = t_.rows;
    std::vector<std::size_t> bs;
    std::vector<std::size_t> bs_row;
    std::vector<std::size_t> nl;
    for (std::size_t i = 0; i < m; ++i)
      if (t_.basic[i] < n) {
        bs.push_back(t_.basic[i]);
        bs_row.push_back(i);
      }
    for (std::size_t c = 0; c < n; ++c)
      if (t_.nonbasic[c] >= n) nl.push_back(t_.nonbasic[c] - n);
    const std::size_t k = bs.size();
    if (nl.size() != k) throw Error(ErrorKind::NumericFailure, "inconsistent simplex basis");

    // Solve M X = R with M[a][b] = A[nl[a]][bs[b]] and R holding, per
    // nonbasic column, the unit vector of a logical or minus the structural
    // column restricted to the rows nl.
    std::vector<double> mat(k * k);
    std::vector<double> rhs(k * n, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      const double* arow = &matrix_[nl[a] * n];
      for (std::size_t b = 0; b < k; ++b) mat[a * k + b] = arow[bs[b]];
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t v = t_.nonbasic[c];
        rhs[a * n + c] = v >= n ? (v - n == nl[a] ? 1.0 : 0.0) : -arow[v];
      }
    }
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < k; ++r)
        if (std::abs(mat[r * k + col]) > std::abs(mat[piv * k + col])) piv = r;
      if (std::abs(mat[piv * k + col]) < kSingularTol) {
        singular_ = true;
        refresh_basic_values();
        return;
      }
      if (piv != col) {
        std::swap_ranges(mat.begin() + static_cast<std::ptrdiff_t>(piv * k),
                         mat.begin() + static_cast<std::ptrdiff_t>((piv + 1) * k),
                         mat.begin() + static_cast<std::ptrdiff_t>(col * k));
        std::swap_ranges(rhs.begin() + static_cast<std::ptrdiff_t>(piv * n),
                         rhs.begin() + static_cast<std::ptrdiff_t>((piv + 1) * n),
                         rhs.begin() + static_cast<std::ptrdiff_t>(col * n));
      }
      const double inv = 1.0 / mat[col * k + col];
      for (std::size_t r = 0; r < k; ++r) {
        if (r == col) continue;
        const double f = mat[r * k + col] * inv;
        if (f == 0.0) continue;
        for (std::size_t c = col; c < k; ++c) mat[r * k + c] -= f * mat[col * k + c];
        for (std::size_t c = 0; c < n; ++c) rhs[r * n + c] -= f * rhs[col * n + c];
      }
    }
    // X[b] = rhs[b] / mat[b][b] expresses basic structural bs[b].
    std::vector<double> x(k * n);
    for (std::size_t b = 0; b < k; ++b) {
      const double inv = 1.0 / mat[b * k + b];
      for (std::size_t c = 0; c < n; ++c) x[b * n + c] = rhs[b * n + c] * inv;
    }
    std::vector<std::size_t> x_index(n + m, k);
    for (std::size_t b = 0; b < k; ++b) x_index[bs[b]] = b;
    for (std::size_t b = 0; b < k; ++b)
      std::copy(x.begin() + static_cast<std::ptrdiff_t>(b * n), x.begin() + static_cast<std::ptrdiff_t>((b + 1) * n),
                t_.coef.begin() + static_cast<std::ptrdiff_t>(bs_row[b] * n));
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t v = t_.basic[i];
      if (v < n) continue;
      const double* arow = &matrix_[(v - n) * n];
      double* row = &t_.coef[i * n];
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t u = t_.nonbasic[c];
        row[c] = u < n ? arow[u] : 0.0;
      }
      for (std::size_t b = 0; b < k; ++b) {
        const double a = arow[bs[b]];
        if (a == 0.0) continue;
        const double* xr = &x[b * n];
        for (std::size_t c = 0; c < n; ++c) row[c] += a * xr[c];
      }
    }
    refresh_basic_values();
  }

  void refresh_basic_values() {
    const std::size_t cols = t_.cols;
    for (std::size_t i = 0; i < t_.rows; ++i) {
      const double* row = &t_.coef[i * cols];
      double sum = 0.0;
      for (std::size_t k = 0; k < cols; ++k) {
        const double x = t_.value[t_.nonbasic[k]];
        if (x != 0.0) sum += row[k] * x;
      }
      t_.value[t_.basic[i]] = sum;
    }
  }

  std::size_t iteration_limit() const { return 1000 + 50 * (t_.rows + t_.cols); }

  Tableau& t_;
  const std::vector<double>& matrix_;
  const std::vector<double>& lower_;
  const std::vector<double>& upper_;
  struct Candidate {
    std::size_t row;
    double limit;
    double bound;
    double rate;
  };

  std::vector<double> reduced_;
  std::vector<Candidate> candidates_;
  std::size_t iterations_ = 0;
  std::size_t degenerate_run_ = 0;
  bool force_bland_ = false;
  bool bland_ = false;
  bool singular_ = false;
  double best_objective_ = kInfinity;
};

std::optional<PreparedProgram> PreparedProgram::prepare(const LinearProgram& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.constraints.size();

  PreparedProgram prepared;
  prepared.num_vars_ = n;
  prepared.lower_.resize(n + m);
  prepared.upper_.resize(n + m);
  for (std::size_t j = 0; j < n; ++j) {
    prepared.lower_[j] = lp.lower[j];
    prepared.upper_[j] = lp.upper[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.constraints[i];
    double lo = -kInfinity;
    double hi = kInfinity;
    switch (row.comparator) {
      case Comparator::LessEqual: hi = row.rhs; break;
      case Comparator::Equal: lo = hi = row.rhs; break;
      case Comparator::GreaterEqual: lo = row.rhs; break;
    }
    prepared.lower_[n + i] = lo;
    prepared.upper_[n + i] = hi;
  }

  prepared.matrix_.resize(m * n);
  for (std::size_t i = 0; i < m; ++i)
    std::copy(lp.constraints[i].coefficients.begin(), lp.constraints[i].coefficients.end(),
              prepared.matrix_.begin() + static_cast<std::ptrdiff_t>(i * n));

  // A run that met a singular basis is repeated once under Bland's rule; a
  // second breakdown is reported rather than trusted.
  for (const bool force_bland : {false, true}) {
    Tableau& t = prepared.start_;
    prepared.slack_basis(lp);
    SimplexEngine engine(t, prepared.matrix_, prepared.lower_, prepared.upper_, force_bland);
    const bool ok = engine.phase_one();
    const bool trusted = ok ? prepared.max_violation(t.value) <= kVerifyTol : !engine.saw_singular_basis();
    if (!trusted) continue;
    if (!ok) return std::nullopt;
    prepared.start_point_.assign(t.value.begin(), t.value.begin() + static_cast<std::ptrdiff_t>(n));
    return prepared;
  }
  throw Error(ErrorKind::NumericFailure, "phase 1 lost numerical accuracy");
}

void PreparedProgram::slack_basis(const LinearProgram& lp) {
  const std::size_t n = num_vars_;
  const std::size_t m = lp.constraints.size();
  Tableau& t = start_;
  t.rows = m;
  t.cols = n;
  t.coef = matrix_;
  t.basic.resize(m);
  t.nonbasic.resize(n);
  t.value.assign(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    t.nonbasic[j] = j;
    if (std::isfinite(lp.lower[j]))
      t.value[j] = lp.lower[j];
    else if (std::isfinite(lp.upper[j]))
      t.value[j] = lp.upper[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    t.basic[i] = n + i;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += t.coef[i * n + j] * t.value[j];
    t.value[n + i] = sum;
  }
}

double PreparedProgram::max_violation(const std::vector<double>& value) const {
  const std::size_t n = num_vars_;
  const std::size_t m = lower_.size() - n;
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    worst = std::max({worst, lower_[j] - value[j], value[j] - upper_[j]});
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = &matrix_[i * n];
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += row[j] * value[j];
    worst = std::max({worst, lower_[n + i] - sum, sum - upper_[n + i]});
  }
  return worst;
}

Outcome PreparedProgram::optimize(std::span<const double> objective, Sense sense) const {
  if (objective.size() != num_vars_)
    throw Error(ErrorKind::InvalidArgument, "objective length differs from num_vars");
  Tableau t;
  std::vector<double> cost(lower_.size(), 0.0);
  const double sign = sense == Sense::Maximize ? -1.0 : 1.0;
  for (std::size_t j = 0; j < num_vars_; ++j) {
    if (!std::isfinite(objective[j])) throw Error(ErrorKind::InvalidArgument, "non-finite objective coefficient");
    cost[j] = sign * objective[j];
  }
  Outcome out;
  for (const bool force_bland : {false, true}) {
    t = start_;
    SimplexEngine engine(t, matrix_, lower_, upper_, force_bland);
    out.status = engine.phase_two(cost);
    out.iterations = engine.iterations();
    if (out.status != Status::Optimal || max_violation(t.value) <= kVerifyTol) break;
    if (force_bland) throw Error(ErrorKind::NumericFailure, "phase 2 lost numerical accuracy");
  }
  if (out.status != Status::Optimal) return out;
  out.solution.assign(t.value.begin(), t.value.begin() + static_cast<std::ptrdiff_t>(num_vars_));
  double value = 0.0;
  for (std::size_t j = 0; j < num_vars_; ++j) value += objective[j] * out.solution[j];
  out.objective_value = value;
  return out;
}

Outcome solve(const LinearProgram& lp) {
  auto prepared = PreparedProgram::prepare(lp);
  if (!prepared) return Outcome{Status::Infeasible, 0.0, {}, 0};
  return prepared->optimize(lp.objective, lp.sense);
}

bool feasible(const LinearProgram& lp) { return PreparedProgram::prepare(lp).has_value(); }

}  // namespace gsd::lp
