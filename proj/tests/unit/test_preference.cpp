#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "gsd/error.hpp"
#include "gsd/preference.hpp"

using namespace gsd;

namespace {

// Direct reading of the representation conditions, independent of the row
// construction: bounds, every R1 pair, every R2 pair of pairs.
bool represents(const PreferenceSystem& ps, const std::vector<double>& u, double delta, double tol = 1e-9) {
  const auto& b = ps.require_bounds();
  if (std::abs(u[b.bottom]) > tol || std::abs(u[b.top] - 1.0) > tol) return false;
  for (double v : u)
    if (v < -tol || v > 1.0 + tol) return false;
  const std::size_t n = ps.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c) {
      if (!ps.r1().contains(a, c)) continue;
      const double d = u[a] - u[c];
      if (ps.r1().contains(c, a) ? std::abs(d) > tol : d < delta - tol) return false;
    }
  const auto& pairs = ps.r1_pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      if (!ps.r2().contains(p, q)) continue;
      const double d = (u[pairs[p].first] - u[pairs[p].second]) - (u[pairs[q].first] - u[pairs[q].second]);
      if (ps.r2().contains(q, p) ? std::abs(d) > tol : d < delta - tol) return false;
    }
  return true;
}

bool grid_feasible(const PreferenceSystem& ps, double delta, int steps) {
  const std::size_t n = ps.size();
  std::vector<int> idx(n, 0);
  std::vector<double> u(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<double>(idx[i]) / steps;
    if (represents(ps, u, delta)) return true;
    std::size_t k = 0;
    while (k < n && ++idx[k] > steps) idx[k++] = 0;
    if (k == n) return false;
  }
}

// Four elements, e0 strictly below and e3 strictly above everything, random
// R1 among the middle and random R2 over the closed R1.
PreferenceSystem random_system4(std::mt19937_64& rng) {
  const std::vector<ElementId> ids{"e0", "e1", "e2", "e3"};
  std::vector<ElementPair> r1{{"e1", "e0"}, {"e2", "e0"}, {"e3", "e1"}, {"e3", "e2"}};
  const int mid = static_cast<int>(rng() % 4);
  if (mid == 1) r1.push_back({"e1", "e2"});
  if (mid == 2) r1.push_back({"e2", "e1"});
  if (mid == 3) {
    r1.push_back({"e1", "e2"});
    r1.push_back({"e2", "e1"});
  }
  const auto base = build_system(ids, r1, {});
  const auto& pairs = base.r1_pairs();
  std::vector<PairOfPairs> r2;
  const int count = static_cast<int>(rng() % 4);
  for (int k = 0; k < count; ++k) {
    const auto p = pairs[rng() % pairs.size()];
    const auto q = pairs[rng() % pairs.size()];
    r2.push_back({{ids[p.first], ids[p.second]}, {ids[q.first], ids[q.second]}});
  }
  return build_system(ids, r1, r2);
}

double lp_extreme(const RepresentationConstraintSet& cs, const std::vector<double>& objective, lp::Sense sense) {
  auto lp = cs.to_linear_program();
  lp.objective = objective;
  lp.sense = sense;
  const auto out = lp::solve(lp);
  REQUIRE(out.status == lp::Status::Optimal);
  return out.objective_value;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("build_system closes relations and detects bounds") {
  const auto ps = build_system({"a", "b", "c"}, {{"b", "a"}, {"c", "b"}}, {});
  CHECK(ps.r1().contains(2, 0));
  CHECK(ps.r1().contains(1, 1));
  REQUIRE(ps.bounds());
  CHECK(ps.bounds()->bottom == 0);
  CHECK(ps.bounds()->top == 2);
  CHECK(ps.bounds_note().find("auto-detected") != std::string::npos);
  CHECK(ps.r1_pair_index(2, 0).has_value());
  CHECK_FALSE(ps.r1_pair_index(0, 2).has_value());
  // r2 is reflexive over the r1 pairs.
  CHECK(ps.r2().size() == ps.r1_pairs().size());
  for (std::size_t p = 0; p < ps.r1_pairs().size(); ++p) CHECK(ps.r2().contains(p, p));
}

TEST_CASE("bounds: ties, explicit choice, absence") {
  const auto tied = build_system({"a", "b", "c", "d"}, {{"c", "a"}, {"c", "b"}, {"d", "c"}, {"a", "b"}, {"b", "a"}}, {});
  REQUIRE(tied.bounds());
  CHECK(tied.bounds()->bottom == 0);
  CHECK(tied.bounds_note().find("lexicographically first used") != std::string::npos);
  // Declaration order does not matter, the smallest id wins.
  const auto reordered = build_system({"z", "y", "m"}, {{"m", "z"}, {"m", "y"}, {"z", "y"}, {"y", "z"}}, {});
  REQUIRE(reordered.bounds());
  CHECK(reordered.bounds()->bottom == 1);
  CHECK(reordered.bounds()->top == 2);

  const auto expl = build_system({"a", "b", "c", "d"}, {{"c", "a"}, {"c", "b"}, {"d", "c"}, {"a", "b"}, {"b", "a"}},
                                 {}, std::make_pair(ElementId("b"), ElementId("d")));
  CHECK(expl.bounds()->bottom == 1);

  const auto open = build_system({"a", "b", "c"}, {{"b", "a"}}, {});
  CHECK_FALSE(open.bounds());
  CHECK(kind_of([&] { (void)open.require_bounds(); }) == ErrorKind::MissingBounds);
  CHECK(kind_of([&] { (void)check_consistency(open, 0.0); }) == ErrorKind::MissingBounds);
  CHECK(kind_of([&] {
          (void)build_system({"a", "b", "c"}, {{"b", "a"}, {"c", "b"}}, {}, std::make_pair(ElementId("b"), ElementId("c")));
        }) == ErrorKind::MissingBounds);
}

TEST_CASE("input errors") {
  CHECK(kind_of([] { (void)build_system({"a", "b"}, {{"a", "z"}}, {}); }) == ErrorKind::UnknownElement);
  CHECK(kind_of([] { (void)build_system({"a", "b"}, {{"b", "a"}}, {{{"a", "b"}, {"b", "a"}}}); }) ==
        ErrorKind::DanglingR2Pair);
  CHECK(kind_of([] { (void)build_system({}, {}, {}); }) == ErrorKind::InvalidArgument);
  const auto ps = build_system({"a", "b"}, {{"b", "a"}}, {});
  CHECK(kind_of([&] { (void)constraints_for(ps, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)constraints_for(ps, -0.1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("chain with intensity information has the expected maximal slack") {
  // 0 < 1 < 2 < 3 < 4 with (4,3) more intense than (2,1): 5 delta <= 1.
  const auto ps = build_system({"a0", "a1", "a2", "a3", "a4"},
                               {{"a1", "a0"}, {"a2", "a1"}, {"a3", "a2"}, {"a4", "a3"}},
                               {{{"a4", "a3"}, {"a2", "a1"}}});
  const auto r = check_consistency(ps, 0.1);
  CHECK(r.feasible);
  CHECK(r.consistent);
  REQUIRE(r.delta_max);
  CHECK(*r.delta_max == doctest::Approx(0.2));
  REQUIRE(r.witness);
  CHECK(represents(ps, *r.witness, 0.1));
  CHECK_FALSE(check_consistency(ps, 0.21).feasible);
  CHECK_FALSE(check_consistency(ps, 0.21).witness);
}

TEST_CASE("delta zero consistency without strict slack") {
  // (b,a) strictly more intense than (c,a) although c is above b.
  const auto ps = build_system({"a", "b", "c", "d"}, {{"b", "a"}, {"c", "b"}, {"d", "c"}}, {{{"b", "a"}, {"c", "a"}}});
  const auto r = check_consistency(ps, 0.0);
  CHECK(r.feasible);
  REQUIRE(r.delta_max);
  CHECK(*r.delta_max == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_FALSE(r.consistent);
  CHECK_FALSE(check_consistency(ps, 0.01).feasible);
}

TEST_CASE("LP consistency agrees with grid brute force on four elements") {
  std::mt19937_64 rng(31);
  int feasible_count = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto ps = random_system4(rng);
    for (double delta : {0.0, 0.1}) {
      const auto r = check_consistency(ps, delta);
      CHECK(r.feasible == grid_feasible(ps, delta, 20));
      if (r.feasible) {
        ++feasible_count;
        REQUIRE(r.witness);
        CHECK(represents(ps, *r.witness, delta, 1e-7));
      }
    }
  }
  CHECK(feasible_count > 10);
  CHECK(feasible_count < 120);
}

TEST_CASE("reduced rows describe the same polyhedron as full rows") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto ps = random_system4(rng);
    const double delta = 0.02 * (trial % 3);
    if (!check_consistency(ps, delta).feasible) continue;
    const auto reduced = constraints_for(ps, delta, RowSelection::Reduced);
    const auto full = constraints_for(ps, delta, RowSelection::Full);
    CHECK(reduced.rows().size() <= full.rows().size());
    for (int k = 0; k < 6; ++k) {
      std::vector<double> c(ps.size());
      for (auto& v : c) v = coef(rng);
      CHECK(lp_extreme(reduced, c, lp::Sense::Minimize) == doctest::Approx(lp_extreme(full, c, lp::Sense::Minimize)));
      CHECK(lp_extreme(reduced, c, lp::Sense::Maximize) == doctest::Approx(lp_extreme(full, c, lp::Sense::Maximize)));
    }
  }
}

TEST_CASE("systems induced by an additive utility are consistent") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> level(0, 20);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 3 + trial % 5;
    std::vector<double> w(n);
    for (auto& v : w) v = level(rng) / 20.0;
    w[0] = 0.0;
    w[n - 1] = 1.0;
    std::vector<ElementId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
    std::vector<ElementPair> r1;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b && w[a] >= w[b]) r1.push_back({ids[a], ids[b]});
    const auto base = build_system(ids, r1, {});
    std::vector<PairOfPairs> r2;
    for (const auto& p : base.r1_pairs())
      for (const auto& q : base.r1_pairs())
        if (rng() % 3 == 0 && w[p.first] - w[p.second] >= w[q.first] - w[q.second] - 1e-12)
          r2.push_back({{ids[p.first], ids[p.second]}, {ids[q.first], ids[q.second]}});
    const auto ps = build_system(ids, r1, r2, std::make_pair(ids[0], ids[n - 1]));
    CHECK(represents(ps, w, 0.0));
    const auto r = check_consistency(ps, 0.0);
    CHECK(r.feasible);
    CHECK(constraints_for(ps, 0.0, RowSelection::Full).satisfied_by(w));
    CHECK(constraints_for(ps, 0.0).satisfied_by(w));
  }
}

TEST_CASE("feasibility is monotone in delta and in the relations") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ps = random_system4(rng);
    const auto r0 = check_consistency(ps, 0.0);
    if (!r0.delta_max) {
      CHECK_FALSE(r0.feasible);
      continue;
    }
    const double dmax = *r0.delta_max;
    bool previous = true;
    for (double d = 0.0; d < 0.99; d += 0.05) {
      const bool f = check_consistency(ps, d).feasible;
      CHECK(f <= previous);
      CHECK(f == (d <= dmax + 1e-9));
      previous = f;
    }
    // Dropping R2 can only enlarge the polyhedron.
    std::vector<ElementPair> r1;
    for (const auto& [a, b] : ps.r1().pairs())
      if (a != b) r1.push_back({ps.elements().id(a), ps.elements().id(b)});
    const auto sub = build_system(ps.elements().ids(), r1, {});
    const auto rs = check_consistency(sub, 0.0);
    REQUIRE(rs.delta_max);
    CHECK(*rs.delta_max >= dmax - 1e-9);
  }
}

TEST_CASE("slack program exposes delta_max as its last variable") {
  const auto ps = build_system({"a", "b", "c"}, {{"b", "a"}, {"c", "b"}}, {});
  const auto cs = constraints_for(ps, 0.0);
  auto lp = cs.slack_program();
  CHECK(lp.num_vars == ps.size() + 1);
  lp.objective.assign(lp.num_vars, 0.0);
  lp.objective.back() = 1.0;
  lp.sense = lp::Sense::Maximize;
  const auto out = lp::solve(lp);
  REQUIRE(out.status == lp::Status::Optimal);
  CHECK(out.objective_value == doctest::Approx(0.5));
}

TEST_CASE("scale specs and point encoding") {
  ScaleSpec spec{{{"acc", Scale::Cardinal, Direction::HigherBetter, {}},
                  {"time", Scale::Cardinal, Direction::LowerBetter, {}},
                  {"rob", Scale::Ordinal, Direction::HigherBetter, {"lo", "mid", "hi"}}}};
  spec.validate();
  CHECK(spec.r() == 3);
  CHECK(spec.cardinal_count() == 2);
  const RawPoint raw{0.8, 2.5, std::string("mid")};
  const auto p = encode_point(raw, spec);
  CHECK(p == Point{0.8, -2.5, 1.0});
  CHECK(decode_point(p, spec) == raw);
  CHECK(point_label(p, spec) == "(0.8,2.5,mid)");

  CHECK(kind_of([&] { (void)encode_point({0.8, 2.5, std::string("top")}, spec); }) == ErrorKind::UnknownOrdinalLevel);
  CHECK(kind_of([&] { (void)encode_point({0.8, 2.5}, spec); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { (void)encode_point({std::string("x"), 2.5, std::string("lo")}, spec); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([] { ScaleSpec{}.validate(); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { ScaleSpec{{{"o", Scale::Ordinal, Direction::HigherBetter, {}}}}.validate(); }) ==
        ErrorKind::InvalidArgument);

  ScaleSpec lower_ord{{{"grade", Scale::Ordinal, Direction::LowerBetter, {"a", "b", "c"}}}};
  const auto q = encode_point({std::string("a")}, lower_ord);
  const auto r = encode_point({std::string("c")}, lower_ord);
  CHECK(q[0] > r[0]);
  CHECK(decode_point(q, lower_ord) == RawPoint{std::string("a")});
}

TEST_CASE("embedding follows component-wise order and difference dominance") {
  const ScaleSpec spec{{{"c", Scale::Cardinal, Direction::HigherBetter, {}},
                        {"o", Scale::Ordinal, Direction::HigherBetter, {"0", "1", "2", "3"}}}};
  const std::vector<Point> pts{{0.2, 1}, {0.5, 2}, {0.4, 0}, {0.9, 3}, {0.5, 2}};
  const auto e = embed_vectors(pts, spec);
  const auto& ps = e.system;
  CHECK(e.point_element[1] == e.point_element[4]);
  REQUIRE(ps.bounds());
  CHECK(ps.is_synthetic(ps.bounds()->bottom));
  CHECK(e.element_points[ps.bounds()->bottom] == Point{0.2, 0});
  CHECK(e.element_points[ps.bounds()->top] == Point{0.9, 3});
  CHECK_FALSE(ps.is_synthetic(ps.bounds()->top));

  const std::size_t n = ps.size();
  const auto& x = e.element_points;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      CHECK(ps.r1().contains(a, b) == (x[a][0] >= x[b][0] && x[a][1] >= x[b][1]));
  const auto& pairs = ps.r1_pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto& [a, b] = pairs[p];
      const auto& [c, d] = pairs[q];
      const bool card = x[a][0] - x[b][0] >= x[c][0] - x[d][0] - 1e-12;
      const bool ord = x[a][1] >= x[c][1] && x[c][1] >= x[d][1] && x[d][1] >= x[b][1];
      CHECK(ps.r2().contains(p, q) == (card && ord));
    }
  CHECK(check_consistency(ps, 0.0).feasible);
}

TEST_CASE("one-dimensional cardinal embedding on an equally spaced grid") {
  // Every representation is affine here, so the maximal slack is one step.
  const ScaleSpec spec = ScaleSpec::all_cardinal(1);
  std::vector<Point> pts;
  for (int i = 0; i <= 4; ++i) pts.push_back({i * 0.25});
  const auto e = embed_vectors(pts, spec);
  const auto r = check_consistency(e.system, 0.0);
  REQUIRE(r.delta_max);
  CHECK(*r.delta_max == doctest::Approx(0.25));
  REQUIRE(r.witness);
  for (std::size_t i = 0; i < e.system.size(); ++i) CHECK((*r.witness)[i] == doctest::Approx(e.element_points[i][0]));
}
