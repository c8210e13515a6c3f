#include "gsd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gsd/error.hpp"
#include "gsd/parallel.hpp"

namespace gsd {

namespace {

// Replicate statistics within this distance of the observed one count as ties.
constexpr double kTieTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Unbiased draw from [0, n) by rejection; independent of the standard
// library's distribution implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

lp::PreparedProgram prepare_or_throw(const PreferenceSystem& ps, double delta) {
  auto prepared = lp::PreparedProgram::prepare(constraints_for(ps, delta).to_linear_program());
  if (!prepared)
    throw Error(ErrorKind::InconsistentAtDelta,
                "no normalized representation with slack " + std::to_string(delta) + " exists");
  return std::move(*prepared);
}

void add_sample(std::vector<double>& coefficients, const WeightedSample& s, double scale) {
  for (const auto& [e, w] : s.atoms) coefficients[e] += scale * w;
}

// Group weights 1/size per observation; sums of equal addends do not depend
// on summation order.
std::vector<double> group_difference(std::size_t num_elements, std::span<const std::size_t> x,
                                     std::span<const std::size_t> y) {
  std::vector<double> wx(num_elements, 0.0);
  std::vector<double> wy(num_elements, 0.0);
  const double ix = 1.0 / static_cast<double>(x.size());
  const double iy = 1.0 / static_cast<double>(y.size());
  for (auto e : x) wx[e] += ix;
  for (auto e : y) wy[e] += iy;
  for (std::size_t e = 0; e < num_elements; ++e) wx[e] -= wy[e];
  return wx;
}

double p_value_upper(const std::vector<double>& replicates, double observed) {
  std::size_t count = 0;
  for (double d : replicates)
    if (d >= observed - kTieTol) ++count;
  return static_cast<double>(1 + count) / static_cast<double>(replicates.size() + 1);
}

double p_value_lower(const std::vector<double>& replicates, double observed) {
  std::size_t count = 0;
  for (double d : replicates)
    if (d <= observed + kTieTol) ++count;
  return static_cast<double>(1 + count) / static_cast<double>(replicates.size() + 1);
}

}  // namespace

void WeightedSample::validate(std::size_t num_elements) const {
  double total = 0.0;
  for (const auto& [e, w] : atoms) {
    if (e >= num_elements) throw Error(ErrorKind::InvalidArgument, "sample atom outside the preference system");
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "negative sample weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "sample weights do not sum to 1");
}

WeightedSample uniform_sample(std::span<const std::size_t> observations) {
  if (observations.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  std::vector<std::size_t> sorted(observations.begin(), observations.end());
  std::sort(sorted.begin(), sorted.end());
  const double w = 1.0 / static_cast<double>(sorted.size());
  WeightedSample out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    double weight = 0.0;
    for (std::size_t k = i; k < j; ++k) weight += w;
    out.atoms.emplace_back(sorted[i], weight);
    i = j;
  }
  return out;
}

std::string to_string(Design design) { return design == Design::Paired ? "paired" : "two-sample"; }

Design parse_design(std::string_view text) {
  if (text == "paired") return Design::Paired;
  if (text == "two-sample" || text == "two_sample") return Design::TwoSample;
  throw Error(ErrorKind::InvalidArgument, "unknown design '" + std::string(text) + "'");
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

StatisticModel::StatisticModel(const PreferenceSystem& ps, double delta)
    : num_elements_(ps.size()), delta_(delta), bounds_(ps.require_bounds()), program_(prepare_or_throw(ps, delta)) {}

double StatisticModel::minimum(std::span<const double> coefficients) const {
  if (coefficients.size() != num_elements_)
    throw Error(ErrorKind::InvalidArgument, "coefficient vector does not match the system");
  if (std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; })) return 0.0;
  const auto outcome = program_.optimize(coefficients, lp::Sense::Minimize);
  if (outcome.status != lp::Status::Optimal)
    throw Error(ErrorKind::NumericFailure, "bounded statistic LP did not reach an optimum");
  return outcome.objective_value;
}

double StatisticModel::statistic(const WeightedSample& sx, const WeightedSample& sy) const {
  sx.validate(num_elements_);
  sy.validate(num_elements_);
  std::vector<double> c(num_elements_, 0.0);
  add_sample(c, sx, 1.0);
  add_sample(c, sy, -1.0);
  return minimum(c);
}

double StatisticModel::robust_statistic(const WeightedSample& sx, const WeightedSample& sy, double zeta_x,
                                        double zeta_y) const {
  if (!(zeta_x >= 0.0 && zeta_x <= 1.0 && zeta_y >= 0.0 && zeta_y <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "contamination degrees must lie in [0, 1]");
  sx.validate(num_elements_);
  sy.validate(num_elements_);
  std::vector<double> c(num_elements_, 0.0);
  add_sample(c, sx, 1.0 - zeta_x);
  add_sample(c, sy, -(1.0 - zeta_y));
  return minimum(c) - zeta_y;
}

double empirical_statistic(const WeightedSample& sx, const WeightedSample& sy, const PreferenceSystem& ps,
                           double delta) {
  return StatisticModel(ps, delta).statistic(sx, sy);
}

double robust_statistic(const WeightedSample& sx, const WeightedSample& sy, const PreferenceSystem& ps, double delta,
                        double zeta_x, double zeta_y) {
  return StatisticModel(ps, delta).robust_statistic(sx, sy, zeta_x, zeta_y);
}

namespace {

void check_test_inputs(std::span<const std::size_t> x_obs, std::span<const std::size_t> y_obs,
                       const PreferenceSystem& ps, const TestOptions& options) {
  if (options.replicates == 0) throw Error(ErrorKind::InvalidArgument, "at least one replicate is required");
  if (x_obs.empty() || y_obs.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  if (options.design == Design::Paired && x_obs.size() != y_obs.size())
    throw Error(ErrorKind::DesignMismatch, "paired design needs samples of equal length");
  for (auto e : x_obs)
    if (e >= ps.size()) throw Error(ErrorKind::InvalidArgument, "observation outside the preference system");
  for (auto e : y_obs)
    if (e >= ps.size()) throw Error(ErrorKind::InvalidArgument, "observation outside the preference system");
}

std::vector<double> replicate_statistics(const StatisticModel& model, std::span<const std::size_t> x_obs,
                                         std::span<const std::size_t> y_obs, const TestOptions& options) {
  std::vector<double> out(options.replicates);
  const std::size_t n = x_obs.size();
  const std::size_t m = y_obs.size();
  parallel_for(options.replicates, options.workers, [&](std::size_t b) {
    std::mt19937_64 rng(replicate_seed(options.seed, b));
    std::vector<std::size_t> gx;
    std::vector<std::size_t> gy;
    if (options.design == Design::TwoSample) {
      std::vector<std::size_t> pooled(x_obs.begin(), x_obs.end());
      pooled.insert(pooled.end(), y_obs.begin(), y_obs.end());
      shuffle(pooled, rng);
      gx.assign(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(n));
      gy.assign(pooled.begin() + static_cast<std::ptrdiff_t>(n), pooled.end());
    } else {
      gx.resize(n);
      gy.resize(m);
      for (std::size_t i = 0; i < n; ++i) {
        const bool swap = (rng() >> 63) != 0;
        gx[i] = swap ? y_obs[i] : x_obs[i];
        gy[i] = swap ? x_obs[i] : y_obs[i];
      }
    }
    out[b] = model.minimum(group_difference(model.num_elements(), gx, gy));
  });
  return out;
}

}  // namespace

TestResult permutation_test(std::span<const std::size_t> x_obs, std::span<const std::size_t> y_obs,
                            const PreferenceSystem& ps, const TestOptions& options) {
  check_test_inputs(x_obs, y_obs, ps, options);
  const StatisticModel model(ps, options.delta);
  TestResult result;
  result.replicates = options.replicates;
  result.delta = options.delta;
  result.design = options.design;
  result.seed = options.seed;
  result.statistic = model.minimum(group_difference(ps.size(), x_obs, y_obs));
  result.replicate_statistics = replicate_statistics(model, x_obs, y_obs, options);
  result.p_value = p_value_upper(result.replicate_statistics, result.statistic);
  return result;
}

RobustTestResult robust_test(std::span<const std::size_t> x_obs, std::span<const std::size_t> y_obs,
                             const PreferenceSystem& ps, const TestOptions& options,
                             const std::vector<double>& zeta_grid, double alpha) {
  if (zeta_grid.empty() || zeta_grid.front() != 0.0)
    throw Error(ErrorKind::InvalidArgument, "contamination grid must start at 0");
  for (std::size_t i = 0; i < zeta_grid.size(); ++i) {
    if (!(zeta_grid[i] >= 0.0 && zeta_grid[i] <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "contamination degrees must lie in [0, 1]");
    if (i > 0 && !(zeta_grid[i] > zeta_grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "contamination grid must be strictly ascending");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  check_test_inputs(x_obs, y_obs, ps, options);

  const StatisticModel model(ps, options.delta);
  RobustTestResult out;
  out.alpha = alpha;
  TestResult& base = out.uncontaminated;
  base.replicates = options.replicates;
  base.delta = options.delta;
  base.design = options.design;
  base.seed = options.seed;
  base.statistic = model.minimum(group_difference(ps.size(), x_obs, y_obs));
  base.replicate_statistics = replicate_statistics(model, x_obs, y_obs, options);
  base.p_value = p_value_upper(base.replicate_statistics, base.statistic);

  const WeightedSample sx = uniform_sample(x_obs);
  const WeightedSample sy = uniform_sample(y_obs);
  for (double zeta : zeta_grid) {
    const double observed = zeta == 0.0 ? base.statistic : model.robust_statistic(sx, sy, zeta, zeta);
    const double p = p_value_upper(base.replicate_statistics, observed);
    out.zeta.push_back(zeta);
    out.observed.push_back(observed);
    out.p_values.push_back(p);
    if (p <= alpha) out.zeta_star = zeta;
  }
  return out;
}

PooledSamples pool_samples(const std::vector<Point>& x, const std::vector<Point>& y, const ScaleSpec& spec) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  std::vector<Point> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  PooledSamples out{embed_vectors(pooled, spec), {}, {}};
  const auto& idx = out.embedded.point_element;
  out.x.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(x.size()));
  out.y.assign(idx.begin() + static_cast<std::ptrdiff_t>(x.size()), idx.end());
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark tables

void EvaluationTable::validate() const {
  metrics.validate();
  if (subjects.empty()) throw Error(ErrorKind::InvalidArgument, "table has no subjects");
  if (instances.empty()) throw Error(ErrorKind::InvalidArgument, "table has no instances");
  auto unique = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (!unique(subjects)) throw Error(ErrorKind::InvalidArgument, "duplicate subject id");
  if (!unique(instances)) throw Error(ErrorKind::InvalidArgument, "duplicate instance id");
  if (values.size() != subjects.size()) throw Error(ErrorKind::MissingCell, "table rows do not match subjects");
  for (const auto& row : values) {
    if (row.size() != instances.size()) throw Error(ErrorKind::MissingCell, "table row does not cover every instance");
    for (const auto& p : row)
      if (p.size() != metrics.r()) throw Error(ErrorKind::DimensionMismatch, "cell dimension differs from metrics");
  }
}

std::size_t EvaluationTable::subject_index(std::string_view subject) const {
  auto it = std::find(subjects.begin(), subjects.end(), subject);
  if (it == subjects.end()) throw Error(ErrorKind::UnknownSubject, "'" + std::string(subject) + "'");
  return static_cast<std::size_t>(it - subjects.begin());
}

TableSystem embed_table(const EvaluationTable& table) {
  table.validate();
  std::vector<Point> points;
  for (const auto& row : table.values) points.insert(points.end(), row.begin(), row.end());
  TableSystem out{embed_vectors(points, table.metrics), {}};
  const std::size_t ni = table.instances.size();
  out.element.resize(table.subjects.size());
  for (std::size_t s = 0; s < table.subjects.size(); ++s)
    out.element[s].assign(out.embedded.point_element.begin() + static_cast<std::ptrdiff_t>(s * ni),
                          out.embedded.point_element.begin() + static_cast<std::ptrdiff_t>((s + 1) * ni));
  return out;
}

namespace {

std::vector<double> normalized_weights(const EvaluationTable& table, const std::vector<double>& weights) {
  const std::size_t ni = table.instances.size();
  if (weights.empty()) return std::vector<double>(ni, 1.0 / static_cast<double>(ni));
  if (weights.size() != ni) throw Error(ErrorKind::InvalidArgument, "one weight per instance is required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "negative instance weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "instance weights do not sum to 1");
  return weights;
}

std::vector<double> subject_difference(const TableSystem& ts, std::size_t a, std::size_t b,
                                       const std::vector<double>& weights) {
  std::vector<double> wa(ts.embedded.system.size(), 0.0);
  std::vector<double> wb(ts.embedded.system.size(), 0.0);
  for (std::size_t d = 0; d < weights.size(); ++d) {
    wa[ts.element[a][d]] += weights[d];
    wb[ts.element[b][d]] += weights[d];
  }
  for (std::size_t e = 0; e < wa.size(); ++e) wa[e] -= wb[e];
  return wa;
}

}  // namespace

MarginMatrix pairwise_margins(const EvaluationTable& table, double delta, const std::vector<double>& instance_weights,
                              unsigned workers) {
  const TableSystem ts = embed_table(table);
  const auto weights = normalized_weights(table, instance_weights);
  const StatisticModel model(ts.embedded.system, delta);
  const std::size_t n = table.subjects.size();
  MarginMatrix out(n, std::vector<double>(n, 0.0));
  parallel_for(n * n, workers, [&](std::size_t k) {
    const std::size_t i = k / n;
    const std::size_t j = k % n;
    if (i != j) out[i][j] = model.minimum(subject_difference(ts, i, j, weights));
  });
  return out;
}

std::vector<std::size_t> front_from_margins(const MarginMatrix& margins, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be nonnegative");
  const std::size_t n = margins.size();
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < n; ++c) {
    bool excluded = false;
    for (std::size_t other = 0; other < n && !excluded; ++other) {
      if (other == c) continue;
      excluded = margins[other][c] >= epsilon - lp::kSignTol && margins[c][other] < -epsilon - lp::kSignTol;
    }
    if (!excluded) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> pareto_front(const EvaluationTable& table) {
  table.validate();
  const std::size_t n = table.subjects.size();
  auto dominates = [&](std::size_t a, std::size_t b) {
    bool strict = false;
    for (std::size_t d = 0; d < table.instances.size(); ++d) {
      const Point& pa = table.values[a][d];
      const Point& pb = table.values[b][d];
      for (std::size_t j = 0; j < pa.size(); ++j) {
        if (pa[j] < pb[j]) return false;
        if (pa[j] > pb[j]) strict = true;
      }
    }
    return strict;
  };
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < n; ++c) {
    bool dominated = false;
    for (std::size_t other = 0; other < n && !dominated; ++other) dominated = other != c && dominates(other, c);
    if (!dominated) out.push_back(c);
  }
  return out;
}

FrontResult gsd_front(const EvaluationTable& table, double delta, double epsilon, unsigned workers) {
  FrontResult out;
  out.epsilon = epsilon;
  out.delta = delta;
  out.margins = pairwise_margins(table, delta, {}, workers);
  out.gsd_front = front_from_margins(out.margins, epsilon);
  out.pareto_front = pareto_front(table);
  return out;
}

MembershipResult front_membership_test(const EvaluationTable& table, std::string_view candidate, double delta,
                                       std::size_t replicates, std::uint64_t seed, double alpha,
                                       const std::optional<std::vector<std::string>>& opponents, unsigned workers) {
  if (replicates == 0) throw Error(ErrorKind::InvalidArgument, "at least one replicate is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  MembershipResult out;
  out.candidate = table.subject_index(candidate);
  out.alpha = alpha;
  out.delta = delta;
  out.replicates = replicates;
  out.seed = seed;
  if (opponents) {
    for (const auto& name : *opponents) {
      const std::size_t o = table.subject_index(name);
      if (o == out.candidate) throw Error(ErrorKind::InvalidArgument, "the candidate cannot be its own opponent");
      if (std::find(out.opponents.begin(), out.opponents.end(), o) == out.opponents.end()) out.opponents.push_back(o);
    }
  } else {
    for (std::size_t s = 0; s < table.subjects.size(); ++s)
      if (s != out.candidate) out.opponents.push_back(s);
  }
  if (out.opponents.empty()) return out;

  const TableSystem ts = embed_table(table);
  const StatisticModel model(ts.embedded.system, delta);
  const std::size_t ni = table.instances.size();
  const std::vector<double> weights(ni, 1.0 / static_cast<double>(ni));

  for (std::size_t o : out.opponents) {
    const double observed = model.minimum(subject_difference(ts, o, out.candidate, weights));
    const std::uint64_t stream = replicate_seed(seed, (std::uint64_t{1} << 32) + o);
    std::vector<double> reps(replicates);
    parallel_for(replicates, workers, [&](std::size_t b) {
      std::mt19937_64 rng(replicate_seed(stream, b));
      std::vector<double> wo(ts.embedded.system.size(), 0.0);
      std::vector<double> wc(ts.embedded.system.size(), 0.0);
      for (std::size_t d = 0; d < ni; ++d) {
        const bool swap = (rng() >> 63) != 0;
        const std::size_t eo = ts.element[o][d];
        const std::size_t ec = ts.element[out.candidate][d];
        wo[swap ? ec : eo] += weights[d];
        wc[swap ? eo : ec] += weights[d];
      }
      for (std::size_t e = 0; e < wo.size(); ++e) wo[e] -= wc[e];
      reps[b] = model.minimum(wo);
    });
    const double p = p_value_lower(reps, observed);
    out.statistics.push_back(observed);
    out.p_values.push_back(p);
    out.rejected.push_back(p <= alpha);
    if (p > alpha) out.in_front = false;
  }
  return out;
}

}  // namespace gsd
