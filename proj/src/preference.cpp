#include "gsd/preference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_set>

#include "gsd/error.hpp"

namespace gsd {

PreferenceSystem::PreferenceSystem(Universe elements, Relation r1, std::vector<IndexPair> r1_pairs, Relation r2,
                                   std::optional<Bounds> bounds, std::vector<bool> synthetic,
                                   std::string bounds_note)
    : elements_(std::move(elements)),
      r1_(std::move(r1)),
      r1_pairs_(std::move(r1_pairs)),
      r2_(std::move(r2)),
      bounds_(bounds),
      synthetic_(std::move(synthetic)),
      bounds_note_(std::move(bounds_note)) {
  if (synthetic_.empty()) synthetic_.assign(elements_.size(), false);
}

std::optional<std::size_t> PreferenceSystem::r1_pair_index(std::size_t a, std::size_t b) const {
  const IndexPair key{a, b};
  auto it = std::lower_bound(r1_pairs_.begin(), r1_pairs_.end(), key);
  if (it == r1_pairs_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - r1_pairs_.begin());
}

const Bounds& PreferenceSystem::require_bounds() const {
  if (!bounds_) throw Error(ErrorKind::MissingBounds, "preference system has no global top and bottom element");
  return *bounds_;
}

namespace {

bool is_top(const Relation& r1, std::size_t t) {
  for (std::size_t a = 0; a < r1.size(); ++a)
    if (!r1.contains(t, a)) return false;
  return true;
}

bool is_bottom(const Relation& r1, std::size_t b) {
  for (std::size_t a = 0; a < r1.size(); ++a)
    if (!r1.contains(a, b)) return false;
  return true;
}

std::string join_ids(const Universe& u, const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ",";
    out += u.id(idx[i]);
  }
  return out;
}

}  // namespace

PreferenceSystem build_system(const std::vector<ElementId>& elements, const std::vector<ElementPair>& r1_input,
                              const std::vector<PairOfPairs>& r2_input,
                              const std::optional<std::pair<ElementId, ElementId>>& explicit_bounds) {
  if (elements.empty()) throw Error(ErrorKind::InvalidArgument, "preference system needs at least one element");
  Universe universe(elements);
  const std::size_t n = universe.size();

  Relation r1(n);
  for (const auto& p : r1_input) r1.insert(universe.index_of(p.better), universe.index_of(p.worse));
  r1 = reflexive_transitive_closure(r1);
  std::vector<IndexPair> r1_pairs = r1.pairs();

  auto pair_index = [&](const ElementPair& p) {
    const std::size_t a = universe.index_of(p.better);
    const std::size_t b = universe.index_of(p.worse);
    const IndexPair key{a, b};
    auto it = std::lower_bound(r1_pairs.begin(), r1_pairs.end(), key);
    if (it == r1_pairs.end() || *it != key)
      throw Error(ErrorKind::DanglingR2Pair, "(" + p.better + "," + p.worse + ") is not a pair of the closed R1");
    return static_cast<std::size_t>(it - r1_pairs.begin());
  };
  Relation r2(r1_pairs.size());
  for (const auto& pp : r2_input) r2.insert(pair_index(pp.first), pair_index(pp.second));
  r2 = reflexive_transitive_closure(r2);

  std::optional<Bounds> bounds;
  std::string note;
  if (explicit_bounds) {
    const std::size_t bottom = universe.index_of(explicit_bounds->first);
    const std::size_t top = universe.index_of(explicit_bounds->second);
    if (!is_bottom(r1, bottom))
      throw Error(ErrorKind::MissingBounds, "'" + explicit_bounds->first + "' is not below every element");
    if (!is_top(r1, top))
      throw Error(ErrorKind::MissingBounds, "'" + explicit_bounds->second + "' is not above every element");
    bounds = Bounds{bottom, top};
    note = "explicit bounds: bottom=" + universe.id(bottom) + ", top=" + universe.id(top);
    if (r1.contains(bottom, top)) note += " (bottom and top are indifferent)";
  } else {
    std::vector<std::size_t> tops;
    std::vector<std::size_t> bottoms;
    for (std::size_t a = 0; a < n; ++a) {
      if (is_top(r1, a)) tops.push_back(a);
      if (is_bottom(r1, a)) bottoms.push_back(a);
    }
    // Mutually indifferent extremes: the lexicographically smallest id represents the class.
    auto smallest = [&](const std::vector<std::size_t>& cls) {
      return *std::min_element(cls.begin(), cls.end(),
                               [&](std::size_t x, std::size_t y) { return universe.id(x) < universe.id(y); });
    };
    if (!tops.empty() && !bottoms.empty() && !r1.contains(bottoms.front(), tops.front())) {
      const std::size_t bottom = smallest(bottoms);
      const std::size_t top = smallest(tops);
      bounds = Bounds{bottom, top};
      note = "auto-detected bounds: bottom=" + universe.id(bottom) + ", top=" + universe.id(top);
      if (tops.size() > 1) note += "; top class {" + join_ids(universe, tops) + "}, lexicographically first used";
      if (bottoms.size() > 1) note += "; bottom class {" + join_ids(universe, bottoms) + "}, lexicographically first used";
    } else {
      note = "unbounded: no strictly ordered global top and bottom";
    }
  }
  return PreferenceSystem(std::move(universe), std::move(r1), std::move(r1_pairs), std::move(r2), bounds,
                          std::vector<bool>(n, false), std::move(note));
}

// ---------------------------------------------------------------------------
// Representation rows

namespace {

class RowBuilder {
 public:
  void add(std::vector<std::pair<std::size_t, double>> terms, lp::Comparator cmp, double rhs, bool strict) {
    std::sort(terms.begin(), terms.end());
    std::vector<std::pair<std::size_t, double>> merged;
    for (const auto& [var, c] : terms) {
      if (!merged.empty() && merged.back().first == var)
        merged.back().second += c;
      else
        merged.emplace_back(var, c);
    }
    std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
    if (merged.empty() && !strict && cmp == lp::Comparator::Equal && rhs == 0.0) return;
    Key key{merged, static_cast<int>(cmp), rhs, strict};
    if (!seen_.insert(key).second) return;
    rows_.push_back(RepresentationRow{std::move(merged), cmp, rhs, strict});
  }

  std::vector<RepresentationRow> take() { return std::move(rows_); }

 private:
  using Key = std::tuple<std::vector<std::pair<std::size_t, double>>, int, double, bool>;
  std::set<Key> seen_;
  std::vector<RepresentationRow> rows_;
};

using Terms = std::vector<std::pair<std::size_t, double>>;

Terms difference_terms(const IndexPair& p, const IndexPair& q) {
  return {{p.first, 1.0}, {p.second, -1.0}, {q.first, -1.0}, {q.second, 1.0}};
}

}  // namespace

RepresentationConstraintSet constraints_for(const PreferenceSystem& ps, double delta, RowSelection selection) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must lie in [0, 1)");
  const Bounds& bounds = ps.require_bounds();
  const Relation& r1 = ps.r1();
  const auto& pairs = ps.r1_pairs();
  const Relation& r2 = ps.r2();

  RowBuilder rows;
  const auto ge = lp::Comparator::GreaterEqual;
  const auto eq = lp::Comparator::Equal;

  if (selection == RowSelection::Full) {
    const auto parts1 = strict_and_indifference_parts(r1);
    for (const auto& [a, b] : parts1.strict.pairs()) rows.add({{a, 1.0}, {b, -1.0}}, ge, delta, true);
    for (const auto& [a, b] : parts1.indifference.pairs())
      if (a < b) rows.add({{a, 1.0}, {b, -1.0}}, eq, 0.0, false);
    const auto parts2 = strict_and_indifference_parts(r2);
    for (const auto& [p, q] : parts2.strict.pairs()) rows.add(difference_terms(pairs[p], pairs[q]), ge, delta, true);
    for (const auto& [p, q] : parts2.indifference.pairs())
      if (p < q) rows.add(difference_terms(pairs[p], pairs[q]), eq, 0.0, false);
  } else {
    const auto skeleton1 = preorder_skeleton(r1);
    for (std::size_t a = 0; a < ps.size(); ++a)
      if (skeleton1.representative[a] != a) rows.add({{a, 1.0}, {skeleton1.representative[a], -1.0}}, eq, 0.0, false);
    for (const auto& [a, b] : skeleton1.covering) rows.add({{a, 1.0}, {b, -1.0}}, ge, delta, true);

    auto indifferent = [&](std::size_t a, std::size_t b) { return r1.contains(a, b) && r1.contains(b, a); };
    auto strictly = [&](std::size_t a, std::size_t b) { return r1.contains(a, b) && !r1.contains(b, a); };

    const auto skeleton2 = preorder_skeleton(r2);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const std::size_t q = skeleton2.representative[p];
      if (q == p) continue;
      const auto& pp = pairs[p];
      const auto& qq = pairs[q];
      if (indifferent(pp.first, qq.first) && indifferent(pp.second, qq.second)) continue;
      rows.add(difference_terms(pp, qq), eq, 0.0, false);
    }
    for (const auto& [p, q] : skeleton2.covering) {
      const auto& pp = pairs[p];
      const auto& qq = pairs[q];
      // u(pa) - u(qa) >= 0 and u(qb) - u(pb) >= 0 already hold; one strict
      // step contributes the delta slack.
      const bool weak_outer = r1.contains(pp.first, qq.first) && r1.contains(qq.second, pp.second);
      if (weak_outer && (strictly(pp.first, qq.first) || strictly(qq.second, pp.second))) continue;
      if (weak_outer && delta == 0.0) continue;
      rows.add(difference_terms(pp, qq), ge, delta, true);
    }
  }
  rows.add({{bounds.bottom, 1.0}}, eq, 0.0, false);
  rows.add({{bounds.top, 1.0}}, eq, 1.0, false);

  RepresentationConstraintSet out;
  out.num_vars_ = ps.size();
  out.delta_ = delta;
  out.bounds_ = bounds;
  out.rows_ = rows.take();
  return out;
}

lp::LinearProgram RepresentationConstraintSet::to_linear_program() const {
  lp::LinearProgram lp = lp::LinearProgram::with_variables(num_vars_);
  lp.upper.assign(num_vars_, 1.0);
  lp.constraints.reserve(rows_.size());
  for (const auto& row : rows_) {
    lp::Constraint c;
    c.coefficients.assign(num_vars_, 0.0);
    for (const auto& [var, coef] : row.terms) c.coefficients[var] = coef;
    c.comparator = row.comparator;
    c.rhs = row.rhs;
    lp.constraints.push_back(std::move(c));
  }
  return lp;
}

lp::LinearProgram RepresentationConstraintSet::slack_program() const {
  const std::size_t eps = num_vars_;
  lp::LinearProgram lp = lp::LinearProgram::with_variables(num_vars_ + 1);
  lp.upper.assign(num_vars_ + 1, 1.0);
  lp.objective[eps] = 1.0;
  lp.sense = lp::Sense::Maximize;
  for (const auto& row : rows_) {
    lp::Constraint c;
    c.coefficients.assign(num_vars_ + 1, 0.0);
    for (const auto& [var, coef] : row.terms) c.coefficients[var] = coef;
    c.comparator = row.comparator;
    c.rhs = row.rhs;
    if (row.strict) {
      c.coefficients[eps] = -1.0;
      c.rhs = 0.0;
    }
    lp.constraints.push_back(std::move(c));
  }
  return lp;
}

bool RepresentationConstraintSet::satisfied_by(const std::vector<double>& u, double tol) const {
  if (u.size() != num_vars_) return false;
  for (double x : u)
    if (x < -tol || x > 1.0 + tol) return false;
  for (const auto& row : rows_) {
    double lhs = 0.0;
    for (const auto& [var, coef] : row.terms) lhs += coef * u[var];
    switch (row.comparator) {
      case lp::Comparator::GreaterEqual:
        if (lhs < row.rhs - tol) return false;
        break;
      case lp::Comparator::LessEqual:
        if (lhs > row.rhs + tol) return false;
        break;
      case lp::Comparator::Equal:
        if (std::abs(lhs - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

ConsistencyReport check_consistency(const PreferenceSystem& ps, double delta) {
  ConsistencyReport report;
  report.delta = delta;
  report.bounds_note = ps.bounds_note();
  const auto cs = constraints_for(ps, delta);
  const auto prepared = lp::PreparedProgram::prepare(cs.to_linear_program());
  report.feasible = prepared.has_value();

  const auto slack_lp = cs.slack_program();
  const auto outcome = lp::solve(slack_lp);
  std::optional<RepresentationVector> slack_point;
  if (outcome.status == lp::Status::Optimal) {
    report.delta_max = outcome.objective_value;
    slack_point.emplace(outcome.solution.begin(), outcome.solution.end() - 1);
  }
  report.consistent = report.delta_max && *report.delta_max > lp::kSignTol;

  if (report.feasible) {
    // Prefer the maximal-slack point: it separates strict pairs whenever possible.
    if (slack_point && cs.satisfied_by(*slack_point, 1e-8))
      report.witness = *slack_point;
    else
      report.witness = prepared->feasible_point();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Mixed-scale embedding

std::size_t ScaleSpec::cardinal_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(dimensions.begin(), dimensions.end(),
                                                 [](const Dimension& d) { return d.scale == Scale::Cardinal; }));
}

void ScaleSpec::validate() const {
  if (dimensions.empty()) throw Error(ErrorKind::InvalidArgument, "scale spec has no dimensions");
  std::unordered_set<std::string> names;
  for (const auto& d : dimensions) {
    if (!names.insert(d.name).second) throw Error(ErrorKind::InvalidArgument, "duplicate metric '" + d.name + "'");
    if (d.scale == Scale::Ordinal) {
      if (d.levels.empty()) throw Error(ErrorKind::InvalidArgument, "ordinal metric '" + d.name + "' has no levels");
      std::unordered_set<std::string> seen(d.levels.begin(), d.levels.end());
      if (seen.size() != d.levels.size())
        throw Error(ErrorKind::InvalidArgument, "ordinal metric '" + d.name + "' repeats a level");
    }
  }
}

ScaleSpec ScaleSpec::all_cardinal(std::size_t r) {
  ScaleSpec spec;
  for (std::size_t j = 0; j < r; ++j) spec.dimensions.push_back(Dimension{"m" + std::to_string(j), Scale::Cardinal, Direction::HigherBetter, {}});
  return spec;
}

Point encode_point(const RawPoint& raw, const ScaleSpec& spec) {
  if (raw.size() != spec.r())
    throw Error(ErrorKind::DimensionMismatch,
                "point has " + std::to_string(raw.size()) + " coordinates, expected " + std::to_string(spec.r()));
  Point out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const auto& dim = spec.dimensions[j];
    const double sign = dim.direction == Direction::LowerBetter ? -1.0 : 1.0;
    if (dim.scale == Scale::Cardinal) {
      const double* v = std::get_if<double>(&raw[j]);
      if (!v) throw Error(ErrorKind::InvalidArgument, "metric '" + dim.name + "' expects a number");
      if (!std::isfinite(*v)) throw Error(ErrorKind::InvalidArgument, "metric '" + dim.name + "' is not finite");
      out[j] = sign * *v;
    } else {
      const std::string* level = std::get_if<std::string>(&raw[j]);
      if (!level) throw Error(ErrorKind::InvalidArgument, "metric '" + dim.name + "' expects a level name");
      auto it = std::find(dim.levels.begin(), dim.levels.end(), *level);
      if (it == dim.levels.end())
        throw Error(ErrorKind::UnknownOrdinalLevel, "'" + *level + "' is not a level of '" + dim.name + "'");
      out[j] = sign * static_cast<double>(it - dim.levels.begin());
    }
  }
  return out;
}

namespace {

std::size_t ordinal_rank(double value, const Dimension& dim) {
  const double rank = dim.direction == Direction::LowerBetter ? -value : value;
  if (!(rank >= 0.0) || rank != std::floor(rank) || rank >= static_cast<double>(dim.levels.size()))
    throw Error(ErrorKind::UnknownOrdinalLevel, "value is not a level rank of '" + dim.name + "'");
  return static_cast<std::size_t>(rank);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

RawPoint decode_point(const Point& point, const ScaleSpec& spec) {
  if (point.size() != spec.r()) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from spec");
  RawPoint out(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) {
    const auto& dim = spec.dimensions[j];
    if (dim.scale == Scale::Cardinal)
      out[j] = dim.direction == Direction::LowerBetter ? -point[j] : point[j];
    else
      out[j] = dim.levels[ordinal_rank(point[j], dim)];
  }
  return out;
}

std::string point_label(const Point& point, const ScaleSpec& spec) {
  const RawPoint raw = decode_point(point, spec);
  std::string out = "(";
  for (std::size_t j = 0; j < raw.size(); ++j) {
    if (j) out += ",";
    if (const double* v = std::get_if<double>(&raw[j]))
      out += format_double(*v + 0.0);
    else
      out += std::get<std::string>(raw[j]);
  }
  return out + ")";
}

EmbeddedSystem embed_vectors(const std::vector<Point>& points, const ScaleSpec& spec) {
  spec.validate();
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "no points to embed");
  const std::size_t r = spec.r();
  for (const auto& p : points) {
    if (p.size() != r)
      throw Error(ErrorKind::DimensionMismatch,
                  "point has " + std::to_string(p.size()) + " coordinates, expected " + std::to_string(r));
    for (std::size_t j = 0; j < r; ++j) {
      if (!std::isfinite(p[j])) throw Error(ErrorKind::InvalidArgument, "non-finite coordinate");
      if (!spec.is_cardinal(j)) ordinal_rank(p[j], spec.dimensions[j]);
    }
  }

  // Distinct points in order of first appearance; -0.0 folds into 0.0.
  std::vector<Point> element_points;
  std::map<Point, std::size_t> index;
  std::vector<std::size_t> point_element;
  point_element.reserve(points.size());
  auto intern = [&](Point p) {
    for (double& x : p) x += 0.0;
    auto [it, inserted] = index.emplace(p, element_points.size());
    if (inserted) element_points.push_back(std::move(p));
    return it->second;
  };
  for (const auto& p : points) point_element.push_back(intern(p));
  const std::size_t observed = element_points.size();

  Point lowest = points.front();
  Point highest = points.front();
  for (const auto& p : points)
    for (std::size_t j = 0; j < r; ++j) {
      lowest[j] = std::min(lowest[j], p[j]);
      highest[j] = std::max(highest[j], p[j]);
    }
  const std::size_t bottom = intern(lowest);
  const std::size_t top = intern(highest);
  const std::size_t n = element_points.size();
  std::vector<bool> synthetic(n, false);
  for (std::size_t e = observed; e < n; ++e) synthetic[e] = true;

  auto dominates = [&](const Point& x, const Point& y) {
    for (std::size_t j = 0; j < r; ++j)
      if (x[j] < y[j]) return false;
    return true;
  };

  Relation r1(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (dominates(element_points[a], element_points[b])) r1.insert(a, b);
  std::vector<IndexPair> r1_pairs = r1.pairs();

  // Per-pair cardinal differences, reused across the quadratic scan.
  const std::size_t pcount = r1_pairs.size();
  std::vector<std::size_t> cardinal_dims;
  std::vector<std::size_t> ordinal_dims;
  for (std::size_t j = 0; j < r; ++j) (spec.is_cardinal(j) ? cardinal_dims : ordinal_dims).push_back(j);
  std::vector<double> diffs(pcount * cardinal_dims.size());
  for (std::size_t p = 0; p < pcount; ++p)
    for (std::size_t c = 0; c < cardinal_dims.size(); ++c) {
      const std::size_t j = cardinal_dims[c];
      diffs[p * cardinal_dims.size() + c] =
          element_points[r1_pairs[p].first][j] - element_points[r1_pairs[p].second][j];
    }

  Relation r2(pcount);
  for (std::size_t p = 0; p < pcount; ++p) {
    const Point& x = element_points[r1_pairs[p].first];
    const Point& y = element_points[r1_pairs[p].second];
    const double* dp = diffs.data() + p * cardinal_dims.size();
    for (std::size_t q = 0; q < pcount; ++q) {
      const double* dq = diffs.data() + q * cardinal_dims.size();
      bool ok = true;
      for (std::size_t c = 0; c < cardinal_dims.size() && ok; ++c) ok = dp[c] >= dq[c];
      if (!ok) continue;
      const Point& xq = element_points[r1_pairs[q].first];
      const Point& yq = element_points[r1_pairs[q].second];
      for (std::size_t j : ordinal_dims) {
        if (!(x[j] >= xq[j] && xq[j] >= yq[j] && yq[j] >= y[j])) {
          ok = false;
          break;
        }
      }
      if (ok) r2.insert(p, q);
    }
  }

  std::optional<Bounds> bounds;
  std::string note;
  if (bottom != top) {
    bounds = Bounds{bottom, top};
    note = "bounds are the component-wise minimum and maximum";
    if (synthetic[bottom]) note += "; bottom is synthetic";
    if (synthetic[top]) note += "; top is synthetic";
  } else {
    note = "unbounded: all points coincide";
  }

  std::vector<ElementId> ids;
  ids.reserve(n);
  for (const auto& p : element_points) ids.push_back(point_label(p, spec));
  PreferenceSystem system(Universe(std::move(ids)), std::move(r1), std::move(r1_pairs), std::move(r2), bounds,
                          std::move(synthetic), std::move(note));
  return EmbeddedSystem{std::move(system), std::move(element_points), std::move(point_element)};
}

}  // namespace gsd
