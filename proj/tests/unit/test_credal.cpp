#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "gsd/credal.hpp"
#include "gsd/error.hpp"

using namespace gsd;

namespace {

using Vec = std::vector<double>;

std::optional<Vec> solve_square(std::vector<Vec> m, Vec r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    if (std::abs(m[piv][c]) < 1e-10) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(r[piv], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = m[i][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
      r[i] -= f * r[c];
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = r[i] / m[i][i];
  return x;
}

// Vertices of {p >= 0, sum p = 1, lower <= f.p <= upper} by trying every set
// of k - 1 tight inequalities next to the simplex equation.
std::vector<Vec> brute_vertices(const credal::ConstraintForm& form) {
  const std::size_t k = form.states.size();
  std::vector<std::pair<Vec, double>> ineq;  // a.p >= b
  for (std::size_t s = 0; s < k; ++s) {
    Vec e(k, 0.0);
    e[s] = 1.0;
    ineq.push_back({e, 0.0});
  }
  for (const auto& b : form.bounds) {
    ineq.push_back({b.values, b.lower});
    Vec neg = b.values;
    for (auto& v : neg) v = -v;
    ineq.push_back({neg, -b.upper});
  }
  std::vector<Vec> out;
  std::vector<std::size_t> pick(k - 1);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
    if (depth + 1 == k) {
      std::vector<Vec> m{Vec(k, 1.0)};
      Vec r{1.0};
      for (auto i : pick) {
        m.push_back(ineq[i].first);
        r.push_back(ineq[i].second);
      }
      const auto p = solve_square(m, r);
      if (!p) return;
      for (const auto& [a, b] : ineq) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += a[j] * (*p)[j];
        if (s < b - 1e-9) return;
      }
      for (const auto& q : out) {
        bool same = true;
        for (std::size_t j = 0; j < k; ++j) same = same && std::abs(q[j] - (*p)[j]) < 1e-9;
        if (same) return;
      }
      out.push_back(*p);
      return;
    }
    for (std::size_t i = from; i < ineq.size(); ++i) {
      pick[depth] = i;
      rec(depth + 1, i + 1);
    }
  };
  rec(0, 0);
  return out;
}

bool same_sets(std::vector<Vec> a, std::vector<Vec> b) {
  if (a.size() != b.size()) return false;
  auto key = [](const Vec& v) {
    std::vector<long long> k;
    for (double x : v) k.push_back(std::llround(x * 1e8));
    return k;
  };
  std::vector<std::vector<long long>> ka;
  std::vector<std::vector<long long>> kb;
  for (const auto& v : a) ka.push_back(key(v));
  for (const auto& v : b) kb.push_back(key(v));
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  return ka == kb;
}

std::vector<Vec> probs_of(const std::vector<Pmf>& pmfs) {
  std::vector<Vec> out;
  for (const auto& p : pmfs) out.push_back(p.probs);
  return out;
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

const std::vector<StateId> kStates4{"s1", "s2", "s3", "s4"};

}  // namespace

TEST_CASE("pmf validation") {
  Pmf{{"a", "b"}, {0.25, 0.75}}.validate();
  CHECK(kind_of([] { Pmf{{"a", "b"}, {0.5}}.validate(); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Pmf{{"a", "b"}, {-0.5, 1.5}}.validate(); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Pmf{{"a", "b"}, {0.5, 0.6}}.validate(); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Pmf{{}, {}}.validate(); }) == ErrorKind::InvalidArgument);
  const auto u = Pmf::uniform({"a", "b", "c", "d"});
  CHECK(u.probs == Vec{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("ordering chain vertices are prefix-uniform") {
  const CredalSet m(credal::OrderingChain{kStates4, kStates4});
  CHECK(m.kind() == "ordering_chain");
  const auto v = probs_of(extreme_points(m));
  CHECK(same_sets(v, {{1, 0, 0, 0}, {0.5, 0.5, 0, 0}, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0}, {0.25, 0.25, 0.25, 0.25}}));
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(contains(m, Pmf{kStates4, v[i]}));
    std::vector<Vec> others = v;
    others.erase(others.begin() + static_cast<std::ptrdiff_t>(i));
    CHECK_FALSE(in_convex_hull(others, v[i]));
  }
  CHECK_FALSE(contains(m, Pmf{kStates4, {0.2, 0.3, 0.25, 0.25}}));
  CHECK(contains(m, Pmf{kStates4, {0.4, 0.3, 0.2, 0.1}}));
}

TEST_CASE("partial chains put zero mass outside the chain") {
  const CredalSet m(credal::OrderingChain{kStates4, {"s3", "s1"}});
  CHECK(same_sets(probs_of(extreme_points(m)), {{0, 0, 1, 0}, {0.5, 0, 0.5, 0}}));
  CHECK_FALSE(contains(m, Pmf{kStates4, {0.25, 0.25, 0.5, 0}}));
  CHECK(kind_of([] { CredalSet(credal::OrderingChain{kStates4, {"s9"}}); }) == ErrorKind::StateMismatch);
  CHECK(kind_of([] { CredalSet(credal::OrderingChain{kStates4, {}}); }) == ErrorKind::EmptyCredalSet);
}

TEST_CASE("ordering chain equals its constraint form") {
  credal::ConstraintForm form{kStates4, {}};
  for (std::size_t i = 0; i + 1 < 4; ++i) {
    Vec f(4, 0.0);
    f[i] = 1.0;
    f[i + 1] = -1.0;
    form.bounds.push_back({f, 0.0, 1.0});
  }
  const auto a = probs_of(extreme_points(CredalSet(form)));
  const auto b = probs_of(extreme_points(CredalSet(credal::OrderingChain{kStates4, kStates4})));
  CHECK(same_sets(a, b));
}

TEST_CASE("linear vacuous vertices") {
  const Pmf base{{"a", "b", "c"}, {0.5, 0.3, 0.2}};
  const CredalSet m(credal::LinearVacuous{base, 0.2});
  CHECK(same_sets(probs_of(extreme_points(m)), {{0.6, 0.24, 0.16}, {0.4, 0.44, 0.16}, {0.4, 0.24, 0.36}}));
  CHECK(contains(m, base));
  CHECK_FALSE(contains(m, Pmf{{"a", "b", "c"}, {0.3, 0.4, 0.3}}));
  CHECK(extreme_points(CredalSet(credal::LinearVacuous{base, 0.0})).size() == 1);
  CHECK(kind_of([&] { CredalSet(credal::LinearVacuous{base, 1.5}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("vertex lists drop duplicates and interior points") {
  const std::vector<StateId> st{"a", "b"};
  const CredalSet m(credal::VertexList{{{st, {1, 0}}, {st, {0.5, 0.5}}, {st, {0.2, 0.8}}, {st, {1, 0}}}});
  CHECK(same_sets(probs_of(extreme_points(m)), {{1, 0}, {0.2, 0.8}}));
  CHECK(contains(m, Pmf{st, {0.7, 0.3}}));
  CHECK_FALSE(contains(m, Pmf{st, {0.1, 0.9}}));
  CHECK(kind_of([] { CredalSet(credal::VertexList{}); }) == ErrorKind::EmptyCredalSet);
  CHECK(kind_of([&] { (void)contains(m, Pmf{{"a", "z"}, {0.5, 0.5}}); }) == ErrorKind::StateMismatch);
}

TEST_CASE("double description agrees with brute-force vertex enumeration") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 2 + trial % 4;
    credal::ConstraintForm form;
    for (std::size_t s = 0; s < k; ++s) form.states.push_back("s" + std::to_string(s));
    const std::size_t nb = 1 + trial % 3;
    for (std::size_t b = 0; b < nb; ++b) {
      Vec f(k);
      for (auto& v : f) v = coef(rng);
      const double lo = std::round(unif(rng) * 8 - 4) / 4;
      form.bounds.push_back({f, lo, lo + std::round(unif(rng) * 8) / 4});
    }
    const auto oracle = brute_vertices(form);
    const CredalSet m(form);
    if (oracle.empty()) {
      CHECK(kind_of([&] { (void)extreme_points(m); }) == ErrorKind::EmptyCredalSet);
      continue;
    }
    ++nonempty;
    const auto v = probs_of(extreme_points(m));
    CHECK(same_sets(v, oracle));
    for (const auto& p : v) CHECK(contains(m, Pmf{form.states, p}));
  }
  CHECK(nonempty >= 20);
}

TEST_CASE("constraint form limits") {
  credal::ConstraintForm big;
  for (int s = 0; s < 9; ++s) big.states.push_back("s" + std::to_string(s));
  CHECK(kind_of([&] { (void)extreme_points(CredalSet(big)); }) == ErrorKind::TooManyStates);
  CHECK(kind_of([] { CredalSet(credal::ConstraintForm{{"a", "b"}, {{{1.0}, 0.0, 1.0}}}); }) ==
        ErrorKind::StateMismatch);
  CHECK(kind_of([] { CredalSet(credal::ConstraintForm{{"a", "b"}, {{{1.0, 0.0}, 0.7, 0.2}}}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([] { CredalSet(credal::ConstraintForm{{"a", "a"}, {}}); }) == ErrorKind::InvalidArgument);
  // Unconstrained: the simplex corners.
  CHECK(same_sets(probs_of(extreme_points(CredalSet(credal::ConstraintForm{{"a", "b", "c"}, {}}))),
                  {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
}

TEST_CASE("convex hull membership") {
  const std::vector<Vec> tri{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(in_convex_hull(tri, {0.2, 0.3, 0.5}));
  CHECK_FALSE(in_convex_hull(tri, {0.6, 0.6, -0.2}));
  CHECK_FALSE(in_convex_hull({}, {1.0}));
}
