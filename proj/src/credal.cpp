#include "gsd/credal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <boost/multiprecision/gmp.hpp>

#include "gsd/error.hpp"
#include "gsd/lp.hpp"

namespace gsd {

using Rational = boost::multiprecision::mpq_rational;

void Pmf::validate() const {
  if (probs.size() != states.size())
    throw Error(ErrorKind::InvalidArgument, "pmf has " + std::to_string(probs.size()) + " probabilities for " +
                                                std::to_string(states.size()) + " states");
  if (states.empty()) throw Error(ErrorKind::InvalidArgument, "pmf over an empty state set");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < -lp::kFeasibilityTol) throw Error(ErrorKind::InvalidArgument, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9 * static_cast<double>(probs.size()))
    throw Error(ErrorKind::InvalidArgument, "probabilities do not sum to 1");
}

Pmf Pmf::uniform(std::vector<StateId> states) {
  Pmf p;
  p.probs.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  p.states = std::move(states);
  return p;
}

namespace {

void check_states(const std::vector<StateId>& expected, const std::vector<StateId>& got) {
  if (expected != got) throw Error(ErrorKind::StateMismatch, "state lists differ");
}

void check_unique(const std::vector<StateId>& states) {
  if (states.empty()) throw Error(ErrorKind::InvalidArgument, "empty state list");
  std::vector<StateId> sorted = states;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::InvalidArgument, "duplicate state id");
}

struct StateListOf {
  std::vector<StateId> operator()(const credal::Singleton& s) const {
    s.pmf.validate();
    check_unique(s.pmf.states);
    return s.pmf.states;
  }
  std::vector<StateId> operator()(const credal::VertexList& v) const {
    if (v.vertices.empty()) throw Error(ErrorKind::EmptyCredalSet, "vertex list is empty");
    for (const auto& p : v.vertices) {
      p.validate();
      check_states(v.vertices.front().states, p.states);
    }
    check_unique(v.vertices.front().states);
    return v.vertices.front().states;
  }
  std::vector<StateId> operator()(const credal::LinearVacuous& l) const {
    l.base.validate();
    check_unique(l.base.states);
    if (!(l.zeta >= 0.0 && l.zeta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "zeta must lie in [0, 1]");
    return l.base.states;
  }
  std::vector<StateId> operator()(const credal::OrderingChain& c) const {
    check_unique(c.states);
    if (c.chain.empty()) throw Error(ErrorKind::EmptyCredalSet, "ordering chain is empty");
    check_unique(c.chain);
    for (const auto& s : c.chain)
      if (std::find(c.states.begin(), c.states.end(), s) == c.states.end())
        throw Error(ErrorKind::StateMismatch, "chain state '" + s + "' is not in the state list");
    return c.states;
  }
  std::vector<StateId> operator()(const credal::ConstraintForm& c) const {
    check_unique(c.states);
    for (const auto& b : c.bounds) {
      if (b.values.size() != c.states.size())
        throw Error(ErrorKind::StateMismatch, "expectation bound has wrong number of values");
      if (!(b.lower <= b.upper)) throw Error(ErrorKind::InvalidArgument, "expectation bound has lower > upper");
      for (double v : b.values)
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite expectation coefficient");
    }
    return c.states;
  }
};

// Double description method on the homogenized cone
// {(p, t) : p >= 0, t >= 0, sum p = t, lower t <= f.p <= upper t},
// in exact rational arithmetic. Vertices are the rays with t > 0.
class DoubleDescription {
 public:
  explicit DoubleDescription(std::size_t dim) : dim_(dim) {
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<Rational> e(dim, Rational(0));
      e[i] = 1;
      lines_.push_back(std::move(e));
    }
  }

  void add_inequality(const std::vector<Rational>& h) {
    const std::size_t index = processed_++;
    // A line not orthogonal to h becomes a ray; everything else is projected.
    for (std::size_t li = 0; li < lines_.size(); ++li) {
      const Rational hl = dot(h, lines_[li]);
      if (hl == 0) continue;
      std::vector<Rational> line = lines_[li];
      if (hl < 0)
        for (auto& x : line) x = -x;
      const Rational hline = hl < 0 ? Rational(-hl) : hl;
      lines_.erase(lines_.begin() + static_cast<std::ptrdiff_t>(li));
      for (auto& g : lines_) project(g, h, line, hline);
      for (auto& ray : rays_) project(ray.v, h, line, hline);
      for (auto& ray : rays_) ray.zero |= bit(index);
      rays_.push_back(Ray{normalized(line), zero_set_of_line()});
      return;
    }

    std::vector<Ray> positive;
    std::vector<Ray> negative;
    std::vector<Ray> next;
    std::vector<Rational> values;
    for (auto& ray : rays_) {
      const Rational v = dot(h, ray.v);
      if (v > 0)
        positive.push_back(ray);
      else if (v < 0)
        negative.push_back(ray);
      else
        next.push_back(Ray{ray.v, ray.zero | bit(index)});
    }
    for (const auto& rp : positive) next.push_back(rp);
    for (const auto& rp : positive) {
      for (const auto& rn : negative) {
        if (!adjacent(rp, rn)) continue;
        const Rational hp = dot(h, rp.v);
        const Rational hn = dot(h, rn.v);
        std::vector<Rational> combo(dim_);
        for (std::size_t i = 0; i < dim_; ++i) combo[i] = hp * rn.v[i] - hn * rp.v[i];
        next.push_back(Ray{normalized(combo), (rp.zero & rn.zero) | bit(index)});
      }
    }
    rays_ = std::move(next);
  }

  bool has_lines() const { return !lines_.empty(); }

  std::vector<std::vector<Rational>> rays() const {
    std::vector<std::vector<Rational>> out;
    for (const auto& r : rays_) out.push_back(r.v);
    return out;
  }

 private:
  struct Ray {
    std::vector<Rational> v;
    std::uint64_t zero = 0;  // processed inequalities tight at v
  };

  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

  // A fresh ray from a line is tight on every earlier constraint.
  std::uint64_t zero_set_of_line() const { return processed_ == 0 ? 0 : bit(processed_ - 1) - 1; }

  Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    Rational s = 0;
    for (std::size_t i = 0; i < dim_; ++i) s += a[i] * b[i];
    return s;
  }

  void project(std::vector<Rational>& g, const std::vector<Rational>& h, const std::vector<Rational>& line,
               const Rational& hline) const {
    const Rational hg = dot(h, g);
    if (hg == 0) return;
    const Rational f = hg / hline;
    for (std::size_t i = 0; i < dim_; ++i) g[i] -= f * line[i];
  }

  std::vector<Rational> normalized(std::vector<Rational> v) const {
    Rational scale = 0;
    for (const auto& x : v) scale += abs(x);
    if (scale != 0)
      for (auto& x : v) x /= scale;
    return v;
  }

  bool adjacent(const Ray& a, const Ray& b) const {
    const std::uint64_t common = a.zero & b.zero;
    for (const auto& r : rays_) {
      if (&r == &a || &r == &b) continue;
      if (r.v == a.v || r.v == b.v) continue;
      if ((r.zero & common) == common) return false;
    }
    return true;
  }

  std::size_t dim_;
  std::size_t processed_ = 0;
  std::vector<std::vector<Rational>> lines_;
  std::vector<Ray> rays_;
};

std::vector<std::vector<double>> constraint_form_vertices(const credal::ConstraintForm& form) {
  const std::size_t k = form.states.size();
  if (k > credal::kMaxConstraintFormStates)
    throw Error(ErrorKind::TooManyStates, std::to_string(k) + " states exceed the cap of " +
                                              std::to_string(credal::kMaxConstraintFormStates));
  if (k + 3 + 2 * form.bounds.size() > 64)
    throw Error(ErrorKind::TooManyStates, "too many expectation bounds for vertex enumeration");
  const std::size_t dim = k + 1;  // (p, t)
  DoubleDescription dd(dim);
  auto unit = [&](std::size_t i) {
    std::vector<Rational> h(dim, Rational(0));
    h[i] = 1;
    return h;
  };
  for (std::size_t s = 0; s < k; ++s) dd.add_inequality(unit(s));
  dd.add_inequality(unit(k));
  std::vector<Rational> sum(dim, Rational(1));
  sum[k] = -1;
  dd.add_inequality(sum);
  for (auto& x : sum) x = -x;
  dd.add_inequality(sum);
  for (const auto& b : form.bounds) {
    std::vector<Rational> lo(dim);
    std::vector<Rational> hi(dim);
    for (std::size_t s = 0; s < k; ++s) {
      lo[s] = Rational(b.values[s]);
      hi[s] = -Rational(b.values[s]);
    }
    lo[k] = -Rational(b.lower);
    hi[k] = Rational(b.upper);
    dd.add_inequality(lo);
    dd.add_inequality(hi);
  }
  if (dd.has_lines()) throw Error(ErrorKind::NumericFailure, "credal cone is not pointed");
  std::vector<std::vector<double>> out;
  for (const auto& ray : dd.rays()) {
    if (ray[k] <= 0) continue;
    std::vector<double> p(k);
    for (std::size_t s = 0; s < k; ++s) p[s] = static_cast<double>(Rational(ray[s] / ray[k]));
    out.push_back(std::move(p));
  }
  if (out.empty()) throw Error(ErrorKind::EmptyCredalSet, "expectation bounds admit no pmf");
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

bool near(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > lp::kFeasibilityTol) return false;
  return true;
}

std::vector<Pmf> to_pmfs(const std::vector<StateId>& states, const std::vector<std::vector<double>>& points) {
  std::vector<Pmf> out;
  for (const auto& p : points) {
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Pmf& q) { return near(q.probs, p); });
    if (!duplicate) out.push_back(Pmf{states, p});
  }
  return out;
}

bool is_pmf(const Pmf& p) {
  double sum = 0.0;
  for (double x : p.probs) {
    if (!std::isfinite(x) || x < -lp::kFeasibilityTol) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= 1e-9 * static_cast<double>(p.probs.size());
}

}  // namespace

CredalSet::CredalSet(Form form) : form_(std::move(form)) { states_ = std::visit(StateListOf{}, form_); }

std::string CredalSet::kind() const {
  switch (form_.index()) {
    case 0: return "singleton";
    case 1: return "vertices";
    case 2: return "linear_vacuous";
    case 3: return "ordering_chain";
    default: return "constraints";
  }
}

std::vector<Pmf> extreme_points(const CredalSet& m) {
  const auto& states = m.states();
  const std::size_t k = states.size();
  std::vector<std::vector<double>> points;
  if (const auto* s = std::get_if<credal::Singleton>(&m.form())) {
    points.push_back(s->pmf.probs);
  } else if (const auto* v = std::get_if<credal::VertexList>(&m.form())) {
    std::vector<std::vector<double>> listed;
    for (const auto& p : v->vertices) listed.push_back(p.probs);
    std::vector<std::vector<double>> unique;
    for (const auto& q : to_pmfs(states, listed)) unique.push_back(q.probs);
    // Listed points that are mixtures of the others are not extreme.
    for (std::size_t i = 0; i < unique.size(); ++i) {
      std::vector<std::vector<double>> others;
      for (std::size_t j = 0; j < unique.size(); ++j)
        if (j != i) others.push_back(unique[j]);
      if (!in_convex_hull(others, unique[i])) points.push_back(unique[i]);
    }
  } else if (const auto* l = std::get_if<credal::LinearVacuous>(&m.form())) {
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<double> p(k);
      for (std::size_t t = 0; t < k; ++t) p[t] = (1.0 - l->zeta) * l->base.probs[t];
      p[s] += l->zeta;
      points.push_back(std::move(p));
    }
  } else if (const auto* c = std::get_if<credal::OrderingChain>(&m.form())) {
    std::vector<std::size_t> positions;
    for (const auto& id : c->chain)
      positions.push_back(static_cast<std::size_t>(std::find(states.begin(), states.end(), id) - states.begin()));
    for (std::size_t len = 1; len <= positions.size(); ++len) {
      std::vector<double> p(k, 0.0);
      for (std::size_t i = 0; i < len; ++i) p[positions[i]] = 1.0 / static_cast<double>(len);
      points.push_back(std::move(p));
    }
  } else {
    points = constraint_form_vertices(std::get<credal::ConstraintForm>(m.form()));
  }
  return to_pmfs(states, points);
}

bool in_convex_hull(const std::vector<std::vector<double>>& others, const std::vector<double>& point) {
  if (others.empty()) return false;
  const std::size_t n = others.size();
  lp::LinearProgram prog = lp::LinearProgram::with_variables(n);
  lp::Constraint total;
  total.coefficients.assign(n, 1.0);
  total.comparator = lp::Comparator::Equal;
  total.rhs = 1.0;
  prog.constraints.push_back(total);
  for (std::size_t d = 0; d < point.size(); ++d) {
    lp::Constraint row;
    row.coefficients.resize(n);
    for (std::size_t i = 0; i < n; ++i) row.coefficients[i] = others[i].at(d);
    row.comparator = lp::Comparator::Equal;
    row.rhs = point[d];
    prog.constraints.push_back(std::move(row));
  }
  return lp::feasible(prog);
}

bool contains(const CredalSet& m, const Pmf& p) {
  check_states(m.states(), p.states);
  if (!is_pmf(p)) return false;
  constexpr double tol = lp::kFeasibilityTol;
  const std::size_t k = p.probs.size();
  if (const auto* s = std::get_if<credal::Singleton>(&m.form())) return near(s->pmf.probs, p.probs);
  if (const auto* v = std::get_if<credal::VertexList>(&m.form())) {
    std::vector<std::vector<double>> vertices;
    for (const auto& q : v->vertices) vertices.push_back(q.probs);
    return in_convex_hull(vertices, p.probs);
  }
  if (const auto* l = std::get_if<credal::LinearVacuous>(&m.form())) {
    for (std::size_t s = 0; s < k; ++s)
      if (p.probs[s] < (1.0 - l->zeta) * l->base.probs[s] - tol) return false;
    return true;
  }
  if (const auto* c = std::get_if<credal::OrderingChain>(&m.form())) {
    const auto& states = m.states();
    std::vector<bool> in_chain(k, false);
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& id : c->chain) {
      const auto s = static_cast<std::size_t>(std::find(states.begin(), states.end(), id) - states.begin());
      in_chain[s] = true;
      if (p.probs[s] > previous + tol) return false;
      previous = p.probs[s];
    }
    for (std::size_t s = 0; s < k; ++s)
      if (!in_chain[s] && p.probs[s] > tol) return false;
    return true;
  }
  const auto& form = std::get<credal::ConstraintForm>(m.form());
  for (const auto& b : form.bounds) {
    const double e = std::inner_product(b.values.begin(), b.values.end(), p.probs.begin(), 0.0);
    if (e < b.lower - tol || e > b.upper + tol) return false;
  }
  return true;
}

}  // namespace gsd
