#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "gsd/error.hpp"
#include "gsd/stats.hpp"

using namespace gsd;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

std::vector<Point> points1(const std::vector<double>& v) {
  std::vector<Point> out;
  for (double x : v) out.push_back({x});
  return out;
}

bool near_any(const std::set<double>& values, double v) {
  auto it = values.lower_bound(v - 1e-9);
  return it != values.end() && *it <= v + 1e-9;
}

EvaluationTable random_table(std::mt19937_64& rng, std::size_t subjects, std::size_t instances) {
  std::uniform_int_distribution<int> level(0, 4);
  EvaluationTable t;
  t.metrics = ScaleSpec{{{"acc", Scale::Cardinal, Direction::HigherBetter, {}},
                         {"rob", Scale::Ordinal, Direction::HigherBetter, {"0", "1", "2"}}}};
  for (std::size_t s = 0; s < subjects; ++s) t.subjects.push_back("C" + std::to_string(s));
  for (std::size_t i = 0; i < instances; ++i) t.instances.push_back("d" + std::to_string(i));
  for (std::size_t s = 0; s < subjects; ++s) {
    std::vector<Point> row;
    for (std::size_t i = 0; i < instances; ++i)
      row.push_back({0.1 * level(rng) + 0.05 * static_cast<double>(s), static_cast<double>(level(rng) % 3)});
    t.values.push_back(row);
  }
  return t;
}

}  // namespace

TEST_CASE("designs and seeds") {
  CHECK(parse_design("paired") == Design::Paired);
  CHECK(parse_design("two-sample") == Design::TwoSample);
  CHECK(to_string(Design::TwoSample) == "two-sample");
  CHECK(kind_of([] { (void)parse_design("blocked"); }) == ErrorKind::InvalidArgument);
  CHECK(replicate_seed(1, 2) == replicate_seed(1, 2));
  CHECK(replicate_seed(1, 2) != replicate_seed(1, 3));
  CHECK(replicate_seed(1, 2) != replicate_seed(2, 2));
}

TEST_CASE("weighted samples") {
  const std::vector<std::size_t> obs{2, 0, 2, 2};
  const auto s = uniform_sample(obs);
  REQUIRE(s.atoms.size() == 2);
  CHECK(s.atoms[0] == std::pair<std::size_t, double>{0, 0.25});
  CHECK(s.atoms[1] == std::pair<std::size_t, double>{2, 0.75});
  s.validate(3);
  CHECK(kind_of([&] { s.validate(2); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { WeightedSample{{{0, 0.5}}}.validate(1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { WeightedSample{{{0, -0.5}, {1, 1.5}}}.validate(2); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { (void)uniform_sample({}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("one-dimensional statistic on a full grid is the normalized mean difference") {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> level(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x{0, 1, 2};
    std::vector<double> y{3, 4, 5};
    for (int k = 0; k < 5; ++k) {
      x.push_back(level(rng));
      y.push_back(level(rng));
    }
    const auto pooled = pool_samples(points1(x), points1(y), ScaleSpec::all_cardinal(1));
    const double d = empirical_statistic(uniform_sample(pooled.x), uniform_sample(pooled.y), pooled.embedded.system, 0.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mean += (x[i] - y[i]) / 5.0 / static_cast<double>(x.size());
    CHECK(d == doctest::Approx(mean).epsilon(1e-9));
  }
}

TEST_CASE("robust statistic identity and contamination of unequal degrees") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> x;
    std::vector<Point> y;
    for (int k = 0; k < 6; ++k) {
      x.push_back({std::round(unif(rng) * 10) / 10, std::round(unif(rng) * 10) / 10});
      y.push_back({std::round(unif(rng) * 10) / 10, std::round(unif(rng) * 10) / 10});
    }
    const auto pooled = pool_samples(x, y, ScaleSpec::all_cardinal(2));
    const auto& ps = pooled.embedded.system;
    const auto sx = uniform_sample(pooled.x);
    const auto sy = uniform_sample(pooled.y);
    const StatisticModel model(ps, 0.0);
    const double d0 = model.statistic(sx, sy);
    CHECK(d0 == doctest::Approx(empirical_statistic(sx, sy, ps, 0.0)));
    for (double z = 0.0; z <= 1.0 + 1e-12; z += 0.1) {
      CHECK(model.robust_statistic(sx, sy, z, z) == doctest::Approx((1 - z) * d0 - z).epsilon(1e-9));
      CHECK(robust_statistic(sx, sy, ps, 0.0, z, z) == doctest::Approx((1 - z) * d0 - z).epsilon(1e-9));
    }
    // Moving mass of x to the bottom only lowers the statistic.
    CHECK(model.robust_statistic(sx, sy, 0.2, 0.0) <= d0 + 1e-12);
    CHECK(kind_of([&] { (void)model.robust_statistic(sx, sy, 1.2, 0.0); }) == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("paired replicates are swap statistics and p follows its formula") {
  const std::vector<double> xv{0.9, 0.4, 0.7, 0.6};
  const std::vector<double> yv{0.3, 0.5, 0.1, 0.6};
  const ScaleSpec spec = ScaleSpec::all_cardinal(1);
  const auto pooled = pool_samples(points1(xv), points1(yv), spec);
  const auto& ps = pooled.embedded.system;
  std::set<double> swaps;
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<std::size_t> a = pooled.x;
    std::vector<std::size_t> b = pooled.y;
    for (std::size_t i = 0; i < 4; ++i)
      if (mask >> i & 1u) std::swap(a[i], b[i]);
    swaps.insert(empirical_statistic(uniform_sample(a), uniform_sample(b), ps, 0.0));
  }
  TestOptions opts{0.0, Design::Paired, 99, 5, 1};
  const auto r = permutation_test(pooled.x, pooled.y, ps, opts);
  CHECK(r.replicates == 99);
  REQUIRE(r.replicate_statistics.size() == 99);
  std::size_t ge = 0;
  for (double d : r.replicate_statistics) {
    CHECK(near_any(swaps, d));
    ge += d >= r.statistic - 1e-12;
  }
  CHECK(r.p_value == doctest::Approx((1.0 + ge) / 100.0));
  opts.workers = 3;
  const auto again = permutation_test(pooled.x, pooled.y, ps, opts);
  CHECK(again.replicate_statistics == r.replicate_statistics);
  CHECK(again.p_value == r.p_value);
}

TEST_CASE("two-sample replicates are label reassignments") {
  const std::vector<double> xv{0.9, 0.4, 0.7};
  const std::vector<double> yv{0.3, 0.5, 0.1, 0.2};
  const auto pooled = pool_samples(points1(xv), points1(yv), ScaleSpec::all_cardinal(1));
  const auto& ps = pooled.embedded.system;
  std::vector<std::size_t> all = pooled.x;
  all.insert(all.end(), pooled.y.begin(), pooled.y.end());
  std::set<double> splits;
  for (unsigned mask = 0; mask < 128; ++mask) {
    if (__builtin_popcount(mask) != 3) continue;
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
    for (std::size_t i = 0; i < 7; ++i) (mask >> i & 1u ? a : b).push_back(all[i]);
    splits.insert(empirical_statistic(uniform_sample(a), uniform_sample(b), ps, 0.0));
  }
  const auto r = permutation_test(pooled.x, pooled.y, ps, TestOptions{0.0, Design::TwoSample, 60, 9, 2});
  for (double d : r.replicate_statistics) CHECK(near_any(splits, d));
  CHECK(r.design == Design::TwoSample);
  CHECK(r.seed == 9);
}

TEST_CASE("separated samples are significant, swapped roles are not") {
  std::vector<double> xv;
  std::vector<double> yv;
  for (int i = 0; i < 12; ++i) {
    xv.push_back(0.6 + 0.02 * i);
    yv.push_back(0.1 + 0.02 * i);
  }
  const auto pooled = pool_samples(points1(xv), points1(yv), ScaleSpec::all_cardinal(1));
  const auto& ps = pooled.embedded.system;
  for (auto design : {Design::Paired, Design::TwoSample}) {
    const auto r = permutation_test(pooled.x, pooled.y, ps, TestOptions{0.0, design, 199, 1, 1});
    CHECK(r.statistic > 0.0);
    CHECK(r.p_value == doctest::Approx(1.0 / 200.0));
    const auto back = permutation_test(pooled.y, pooled.x, ps, TestOptions{0.0, design, 199, 1, 1});
    CHECK(back.p_value > 0.5);
  }
}

TEST_CASE("permutation test errors") {
  const auto pooled = pool_samples(points1({0.1, 0.5}), points1({0.2}), ScaleSpec::all_cardinal(1));
  const auto& ps = pooled.embedded.system;
  CHECK(kind_of([&] { (void)permutation_test(pooled.x, pooled.y, ps, TestOptions{0.0, Design::Paired, 9, 0, 1}); }) ==
        ErrorKind::DesignMismatch);
  CHECK(kind_of([&] { (void)permutation_test(pooled.x, pooled.y, ps, TestOptions{0.0, Design::TwoSample, 0, 0, 1}); }) ==
        ErrorKind::InvalidArgument);
  const std::vector<std::size_t> none;
  CHECK(kind_of([&] { (void)permutation_test(none, pooled.y, ps, TestOptions{}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)permutation_test(pooled.x, pooled.y, ps, TestOptions{0.9, Design::TwoSample, 9, 0, 1}); }) ==
        ErrorKind::InconsistentAtDelta);
  CHECK(kind_of([] { (void)pool_samples({}, points1({0.2}), ScaleSpec::all_cardinal(1)); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("robust test p-values are nondecreasing in zeta") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Point> x;
    std::vector<Point> y;
    for (int k = 0; k < 10; ++k) {
      x.push_back({0.6 + noise(rng), 0.5 + noise(rng)});
      y.push_back({0.4 + noise(rng), 0.5 + noise(rng)});
    }
    const auto pooled = pool_samples(x, y, ScaleSpec::all_cardinal(2));
    const std::vector<double> grid{0.0, 0.05, 0.1, 0.2, 0.5};
    const auto r = robust_test(pooled.x, pooled.y, pooled.embedded.system, TestOptions{0.0, Design::Paired, 99, 4, 2},
                               grid, 0.05);
    CHECK(r.zeta == grid);
    CHECK(std::is_sorted(r.p_values.begin(), r.p_values.end()));
    CHECK(r.observed[0] == r.uncontaminated.statistic);
    CHECK(r.p_values[0] == r.uncontaminated.p_value);
    std::optional<double> star;
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (r.p_values[k] <= 0.05) star = grid[k];
    CHECK(r.zeta_star == star);
  }
  const auto pooled = pool_samples(points1({0.1, 0.5}), points1({0.2, 0.3}), ScaleSpec::all_cardinal(1));
  const auto& ps = pooled.embedded.system;
  const TestOptions o{0.0, Design::Paired, 9, 0, 1};
  CHECK(kind_of([&] { (void)robust_test(pooled.x, pooled.y, ps, o, {0.1, 0.2}, 0.05); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)robust_test(pooled.x, pooled.y, ps, o, {0.0, 0.2, 0.1}, 0.05); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)robust_test(pooled.x, pooled.y, ps, o, {0.0, 1.5}, 0.05); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)robust_test(pooled.x, pooled.y, ps, o, {0.0}, 1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pairwise margins are statistics over the shared table system") {
  std::mt19937_64 rng(15);
  const auto t = random_table(rng, 4, 6);
  const auto ts = embed_table(t);
  const auto m = pairwise_margins(t, 0.0, {}, 1);
  CHECK(m == pairwise_margins(t, 0.0, {}, 3));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m[i][i] == 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double d =
          empirical_statistic(uniform_sample(ts.element[i]), uniform_sample(ts.element[j]), ts.embedded.system, 0.0);
      CHECK(m[i][j] == doctest::Approx(d).epsilon(1e-12));
    }
  }
  // Weights concentrated on one instance reduce to that instance's comparison.
  std::vector<double> w(6, 0.0);
  w[2] = 1.0;
  const auto single = pairwise_margins(t, 0.0, w, 1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const std::vector<std::size_t> a{ts.element[i][2]};
      const std::vector<std::size_t> b{ts.element[j][2]};
      CHECK(single[i][j] == doctest::Approx(empirical_statistic(uniform_sample(a), uniform_sample(b),
                                                                ts.embedded.system, 0.0)));
    }
  CHECK(kind_of([&] { (void)pairwise_margins(t, 0.0, {0.5, 0.5}, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("front from a hand-made margin matrix") {
  // 0 dominates 1 by 0.2; 2 dominates 1 by 0.05; 2 and 0 incomparable.
  const MarginMatrix m{{0.0, 0.2, -0.1}, {-0.3, 0.0, -0.4}, {-0.2, 0.05, 0.0}};
  CHECK(front_from_margins(m, 0.0) == std::vector<std::size_t>{0, 2});
  CHECK(front_from_margins(m, 0.1) == std::vector<std::size_t>{0, 2});
  CHECK(front_from_margins(m, 0.25) == std::vector<std::size_t>{0, 1, 2});
  CHECK(kind_of([&] { (void)front_from_margins(m, -0.1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pareto front") {
  EvaluationTable t;
  t.metrics = ScaleSpec::all_cardinal(1);
  t.subjects = {"A", "B", "C", "D"};
  t.instances = {"i1", "i2"};
  t.values = {{{1}, {0}}, {{0}, {1}}, {{0}, {0}}, {{1}, {0}}};
  CHECK(pareto_front(t) == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("gsd front lies inside the pareto front and grows with epsilon") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    const auto t = random_table(rng, 4, 5);
    const auto pareto = pareto_front(t);
    std::vector<std::size_t> previous;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      const auto f = gsd_front(t, 0.0, eps, 2);
      CHECK(f.pareto_front == pareto);
      if (eps == 0.0) CHECK(std::includes(pareto.begin(), pareto.end(), f.gsd_front.begin(), f.gsd_front.end()));
      CHECK(std::includes(f.gsd_front.begin(), f.gsd_front.end(), previous.begin(), previous.end()));
      CHECK_FALSE(f.gsd_front.empty());
      previous = f.gsd_front;
    }
  }
}

TEST_CASE("table validation and lookup") {
  std::mt19937_64 rng(1);
  auto t = random_table(rng, 2, 3);
  t.validate();
  CHECK(t.subject_index("C1") == 1);
  CHECK(kind_of([&] { (void)t.subject_index("Z"); }) == ErrorKind::UnknownSubject);
  auto bad = t;
  bad.values[1].pop_back();
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::MissingCell);
  bad = t;
  bad.values[0][0] = {0.5};
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::DimensionMismatch);
  bad = t;
  bad.subjects[1] = "C0";
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("front membership test") {
  EvaluationTable t;
  t.metrics = ScaleSpec::all_cardinal(1);
  t.subjects = {"best", "worst", "mid"};
  for (int i = 0; i < 15; ++i) t.instances.push_back("i" + std::to_string(i));
  t.values.resize(3);
  for (int i = 0; i < 15; ++i) {
    t.values[0].push_back({0.8 + 0.01 * i});
    t.values[1].push_back({0.1 + 0.01 * i});
    t.values[2].push_back({0.45 + 0.01 * ((i * 7) % 15)});
  }
  const auto r = front_membership_test(t, "best", 0.0, 99, 3, 0.05, std::nullopt, 2);
  CHECK(r.candidate == 0);
  CHECK(r.opponents == std::vector<std::size_t>{1, 2});
  CHECK(r.in_front);
  for (std::size_t k = 0; k < r.opponents.size(); ++k) {
    CHECK(r.statistics[k] < 0.0);
    CHECK(r.rejected[k] == (r.p_values[k] <= 0.05));
  }

  const auto w = front_membership_test(t, "worst", 0.0, 99, 3, 0.05, std::vector<std::string>{"best"}, 1);
  CHECK_FALSE(w.in_front);
  CHECK(w.p_values[0] > 0.05);

  const auto again = front_membership_test(t, "best", 0.0, 99, 3, 0.05, std::nullopt, 1);
  CHECK(again.p_values == r.p_values);

  const auto alone = front_membership_test(t, "mid", 0.0, 19, 0, 0.05, std::vector<std::string>{}, 1);
  CHECK(alone.in_front);
  CHECK(alone.opponents.empty());
  CHECK(kind_of([&] { (void)front_membership_test(t, "nobody", 0.0, 9, 0, 0.05); }) == ErrorKind::UnknownSubject);
  CHECK(kind_of([&] {
          (void)front_membership_test(t, "mid", 0.0, 9, 0, 0.05, std::vector<std::string>{"mid"});
        }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)front_membership_test(t, "mid", 0.0, 0, 0, 0.05); }) == ErrorKind::InvalidArgument);
}
