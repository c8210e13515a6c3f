#pragma once

// Empirical GSD statistics and their permutation (observation-randomization)
// tests, contamination-robustified tests, and GSD/Pareto fronts of benchmark
// subjects evaluated on a sample of instances.
//
// Hypothesis orientation: the permutation null is exchangeability of the two
// samples. Large values of the statistic are evidence that the first sample
// dominates the second; p = (1 + #{d_b >= d_obs}) / (B + 1).
//
// Replicate b draws its randomness from an mt19937_64 seeded with
// replicate_seed(seed, b), so replicates are pure functions of (seed, b) and
// results do not depend on the worker count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsd/lp.hpp"
#include "gsd/preference.hpp"

namespace gsd {

// Weighted atoms over the elements of a companion preference system.
struct WeightedSample {
  std::vector<std::pair<std::size_t, double>> atoms;

  // Throws InvalidArgument for negative weights, a total differing from 1, or
  // atoms outside [0, num_elements).
  void validate(std::size_t num_elements) const;
};

// Uniform weights over observations, duplicates aggregated.
WeightedSample uniform_sample(std::span<const std::size_t> observations);

enum class Design { Paired, TwoSample };

std::string to_string(Design design);
// Accepts "paired" and "two-sample"; throws InvalidArgument otherwise.
Design parse_design(std::string_view text);

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index);

// The representation polyhedron N^delta of one system, prepared once and
// evaluated against many weight vectors.
class StatisticModel {
 public:
  // Errors: MissingBounds, InconsistentAtDelta.
  StatisticModel(const PreferenceSystem& ps, double delta);

  double delta() const noexcept { return delta_; }
  std::size_t num_elements() const noexcept { return num_elements_; }
  const Bounds& bounds() const noexcept { return bounds_; }

  // min over u in N^delta of sum_e coefficient[e] * u(e).
  double minimum(std::span<const double> coefficients) const;

  double statistic(const WeightedSample& sx, const WeightedSample& sy) const;

  // Least favorable pair of the linear-vacuous neighbourhoods: zeta_x mass of
  // the first sample moved to the bottom element, zeta_y mass of the second
  // moved to the top element.
  double robust_statistic(const WeightedSample& sx, const WeightedSample& sy, double zeta_x, double zeta_y) const;

 private:
  std::size_t num_elements_;
  double delta_;
  Bounds bounds_;
  lp::PreparedProgram program_;
};

// d = min over u in N^delta of E_sx(u) - E_sy(u).
double empirical_statistic(const WeightedSample& sx, const WeightedSample& sy, const PreferenceSystem& ps,
                           double delta);

// min over u in N^delta of (1 - zeta_x) E_sx(u) - (1 - zeta_y) E_sy(u) - zeta_y.
double robust_statistic(const WeightedSample& sx, const WeightedSample& sy, const PreferenceSystem& ps, double delta,
                        double zeta_x, double zeta_y);

struct TestOptions {
  double delta = 0.0;
  Design design = Design::TwoSample;
  std::size_t replicates = 199;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct TestResult {
  double statistic = 0.0;
  std::size_t replicates = 0;
  double p_value = 1.0;
  double delta = 0.0;
  Design design = Design::TwoSample;
  std::uint64_t seed = 0;
  std::vector<double> replicate_statistics;
};

// Observations are element indices into ps. Two-sample replicates reshuffle
// group labels over the pooled observations keeping group sizes; paired
// replicates swap each pair independently with probability 1/2.
// Errors: DesignMismatch, InvalidArgument (B = 0, empty samples),
// InconsistentAtDelta.
TestResult permutation_test(std::span<const std::size_t> x_obs, std::span<const std::size_t> y_obs,
                            const PreferenceSystem& ps, const TestOptions& options);

struct RobustTestResult {
  TestResult uncontaminated;
  double alpha = 0.05;
  std::vector<double> zeta;
  std::vector<double> observed;  // robust statistic per zeta
  std::vector<double> p_values;
  // Largest zeta with p <= alpha.
  std::optional<double> zeta_star;
};

// The replicate distribution is computed once without contamination; the
// observed statistic is replaced by the robust statistic at (zeta, zeta).
// zeta_grid must be sorted ascending, start at 0 and lie in [0, 1].
RobustTestResult robust_test(std::span<const std::size_t> x_obs, std::span<const std::size_t> y_obs,
                             const PreferenceSystem& ps, const TestOptions& options,
                             const std::vector<double>& zeta_grid, double alpha);

// Two point samples embedded into one system.
struct PooledSamples {
  EmbeddedSystem embedded;
  std::vector<std::size_t> x;  // element index per x observation
  std::vector<std::size_t> y;
};

PooledSamples pool_samples(const std::vector<Point>& x, const std::vector<Point>& y, const ScaleSpec& spec);

// ---------------------------------------------------------------------------
// Benchmark tables

struct EvaluationTable {
  std::vector<std::string> subjects;
  std::vector<std::string> instances;
  ScaleSpec metrics;
  // values[subject][instance], encoded (larger is better in every coordinate).
  std::vector<std::vector<Point>> values;

  // Throws InvalidArgument/MissingCell/DimensionMismatch.
  void validate() const;
  // Throws UnknownSubject.
  std::size_t subject_index(std::string_view subject) const;
};

using MarginMatrix = std::vector<std::vector<double>>;

// All cells of a table embedded into one system.
struct TableSystem {
  EmbeddedSystem embedded;
  // element[subject][instance]
  std::vector<std::vector<std::size_t>> element;
};

TableSystem embed_table(const EvaluationTable& table);

// Entry (i, j): statistic of subject i's evaluations against subject j's,
// weighted by instance_weights (uniform when empty).
MarginMatrix pairwise_margins(const EvaluationTable& table, double delta,
                              const std::vector<double>& instance_weights = {}, unsigned workers = 1);

// Subjects C for which no C' has margin(C', C) >= eps - tol and
// margin(C, C') < -eps - tol (tol = kSignTol).
std::vector<std::size_t> front_from_margins(const MarginMatrix& margins, double epsilon);

// Subjects not Pareto-dominated: C' dominates C when it is component-wise at
// least as good on every instance and strictly better somewhere.
std::vector<std::size_t> pareto_front(const EvaluationTable& table);

struct FrontResult {
  std::vector<std::size_t> gsd_front;
  std::vector<std::size_t> pareto_front;
  double epsilon = 0.0;
  double delta = 0.0;
  MarginMatrix margins;
};

FrontResult gsd_front(const EvaluationTable& table, double delta, double epsilon, unsigned workers = 1);

struct MembershipResult {
  std::size_t candidate = 0;
  std::vector<std::size_t> opponents;
  std::vector<double> statistics;  // margin(opponent, candidate)
  std::vector<double> p_values;
  std::vector<bool> rejected;
  bool in_front = true;
  double alpha = 0.05;
  double delta = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

// Intersection-union test: for each opponent C', the sub-null "C' weakly
// dominates the candidate" is rejected when
// p' = (1 + #{s_b <= s_obs}) / (B + 1) <= alpha under paired swaps of the two
// subjects' evaluations. In front iff every sub-null is rejected.
// opponents defaults to all other subjects. Errors: UnknownSubject.
MembershipResult front_membership_test(const EvaluationTable& table, std::string_view candidate, double delta,
                                       std::size_t replicates, std::uint64_t seed, double alpha,
                                       const std::optional<std::vector<std::string>>& opponents = std::nullopt,
                                       unsigned workers = 1);

}  // namespace gsd
