#include "gsd/order.hpp"

#include <bit>

#include "gsd/error.hpp"

namespace gsd {

Universe::Universe(std::vector<ElementId> ids) : ids_(std::move(ids)) {
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) throw Error(ErrorKind::InvalidArgument, "empty element id");
    if (!index_.emplace(ids_[i], i).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate element id '" + ids_[i] + "'");
  }
}

std::size_t Universe::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorKind::UnknownElement, "'" + std::string(id) + "'");
  return it->second;
}

bool Universe::contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

Relation::Relation(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

Relation::Relation(std::size_t n, const std::vector<IndexPair>& pairs) : Relation(n) {
  for (const auto& [a, b] : pairs) insert(a, b);
}

void Relation::check_index(std::size_t a, std::size_t b) const {
  if (a >= n_ || b >= n_) throw Error(ErrorKind::UnknownElement, "pair index outside universe");
}

void Relation::insert(std::size_t a, std::size_t b) {
  check_index(a, b);
  bits_[a * words_ + (b >> 6)] |= std::uint64_t{1} << (b & 63);
}

void Relation::erase(std::size_t a, std::size_t b) {
  check_index(a, b);
  bits_[a * words_ + (b >> 6)] &= ~(std::uint64_t{1} << (b & 63));
}

std::vector<IndexPair> Relation::pairs() const {
  std::vector<IndexPair> out;
  for (std::size_t a = 0; a < n_; ++a) {
    const std::uint64_t* r = row(a);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t word = r[w];
      while (word) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(word));
        out.emplace_back(a, w * 64 + bit);
        word &= word - 1;
      }
    }
  }
  return out;
}

std::size_t Relation::pair_count() const {
  std::size_t count = 0;
  for (auto word : bits_) count += static_cast<std::size_t>(std::popcount(word));
  return count;
}

bool is_reflexive(const Relation& rel) {
  for (std::size_t a = 0; a < rel.size(); ++a)
    if (!rel.contains(a, a)) return false;
  return true;
}

bool is_transitive(const Relation& rel) {
  const std::size_t words = rel.words_per_row();
  for (std::size_t a = 0; a < rel.size(); ++a) {
    const std::uint64_t* ra = rel.row(a);
    for (std::size_t b = 0; b < rel.size(); ++b) {
      if (!rel.contains(a, b)) continue;
      const std::uint64_t* rb = rel.row(b);
      for (std::size_t w = 0; w < words; ++w)
        if (rb[w] & ~ra[w]) return false;
    }
  }
  return true;
}

bool is_antisymmetric(const Relation& rel) {
  for (std::size_t a = 0; a < rel.size(); ++a)
    for (std::size_t b = a + 1; b < rel.size(); ++b)
      if (rel.contains(a, b) && rel.contains(b, a)) return false;
  return true;
}

bool is_preorder(const Relation& rel) { return is_reflexive(rel) && is_transitive(rel); }

bool is_partial_order(const Relation& rel) { return is_preorder(rel) && is_antisymmetric(rel); }

Relation reflexive_transitive_closure(const Relation& rel) {
  Relation out = rel;
  const std::size_t n = out.size();
  const std::size_t words = out.words_per_row();
  for (std::size_t a = 0; a < n; ++a) out.insert(a, a);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t* rk = out.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || !out.contains(i, k)) continue;
      std::uint64_t* ri = out.row(i);
      for (std::size_t w = 0; w < words; ++w) ri[w] |= rk[w];
    }
  }
  return out;
}

PreorderParts strict_and_indifference_parts(const Relation& rel) {
  if (!is_preorder(rel)) throw Error(ErrorKind::NotPreorder, "relation is not reflexive and transitive");
  PreorderParts parts{Relation(rel.size()), Relation(rel.size())};
  for (const auto& [a, b] : rel.pairs()) {
    if (rel.contains(b, a))
      parts.indifference.insert(a, b);
    else
      parts.strict.insert(a, b);
  }
  return parts;
}

namespace {

// Covering pairs of the strict part, restricted to `nodes`.
std::vector<IndexPair> covering_strict_pairs(const Relation& rel, const std::vector<std::size_t>& nodes) {
  const std::size_t n = rel.size();
  Relation succ(n);
  Relation pred(n);
  std::vector<bool> active(n, false);
  for (auto v : nodes) active[v] = true;
  for (auto a : nodes)
    for (auto b : nodes)
      if (a != b && rel.contains(a, b) && !rel.contains(b, a)) {
        succ.insert(a, b);
        pred.insert(b, a);
      }
  std::vector<IndexPair> out;
  const std::size_t words = succ.words_per_row();
  for (auto a : nodes) {
    const std::uint64_t* sa = succ.row(a);
    for (auto b : nodes) {
      if (!succ.contains(a, b)) continue;
      const std::uint64_t* pb = pred.row(b);
      bool covered = true;
      for (std::size_t w = 0; w < words && covered; ++w)
        if (sa[w] & pb[w]) covered = false;
      if (covered) out.emplace_back(a, b);
    }
  }
  return out;
}

}  // namespace

std::vector<IndexPair> hasse_edges(const Relation& partial_order) {
  if (!is_partial_order(partial_order))
    throw Error(ErrorKind::NotPartialOrder, "relation is not a partial order");
  std::vector<std::size_t> nodes(partial_order.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  return covering_strict_pairs(partial_order, nodes);
}

PreorderSkeleton preorder_skeleton(const Relation& preorder) {
  if (!is_preorder(preorder)) throw Error(ErrorKind::NotPreorder, "relation is not reflexive and transitive");
  const std::size_t n = preorder.size();
  PreorderSkeleton out;
  out.representative.assign(n, n);
  std::vector<std::size_t> reps;
  for (std::size_t a = 0; a < n; ++a) {
    if (out.representative[a] != n) continue;
    out.representative[a] = a;
    reps.push_back(a);
    for (std::size_t b = a + 1; b < n; ++b)
      if (out.representative[b] == n && preorder.contains(a, b) && preorder.contains(b, a))
        out.representative[b] = a;
  }
  out.covering = covering_strict_pairs(preorder, reps);
  return out;
}

}  // namespace gsd
