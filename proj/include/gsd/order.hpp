#pragma once

// Finite binary relations over {0, ..., n-1}: closures, strict/indifference
// decomposition, order predicates and covering (Hasse) pairs.
//
// Elements are addressed by position in a canonical universe ordering; the
// Universe type maps string ids onto those positions. All iteration is in
// ascending index order so outputs are reproducible.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gsd {

using ElementId = std::string;
using IndexPair = std::pair<std::size_t, std::size_t>;

// Ordered list of unique, non-empty element ids.
class Universe {
 public:
  Universe() = default;
  explicit Universe(std::vector<ElementId> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  const ElementId& id(std::size_t index) const { return ids_.at(index); }
  const std::vector<ElementId>& ids() const noexcept { return ids_; }

  // Throws Error(UnknownElement) for ids that are not members.
  std::size_t index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

 private:
  std::vector<ElementId> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Dense bit-matrix relation. pairs() gives the sorted pair-set view.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n);
  Relation(std::size_t n, const std::vector<IndexPair>& pairs);

  std::size_t size() const noexcept { return n_; }

  bool contains(std::size_t a, std::size_t b) const noexcept {
    return (bits_[a * words_ + (b >> 6)] >> (b & 63)) & 1u;
  }
  void insert(std::size_t a, std::size_t b);
  void erase(std::size_t a, std::size_t b);

  std::vector<IndexPair> pairs() const;
  std::size_t pair_count() const;

  // Raw word access for the closure kernels.
  std::size_t words_per_row() const noexcept { return words_; }
  const std::uint64_t* row(std::size_t a) const noexcept { return bits_.data() + a * words_; }
  std::uint64_t* row(std::size_t a) noexcept { return bits_.data() + a * words_; }

  friend bool operator==(const Relation& lhs, const Relation& rhs) = default;

 private:
  void check_index(std::size_t a, std::size_t b) const;

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

bool is_reflexive(const Relation& rel);
bool is_transitive(const Relation& rel);
bool is_antisymmetric(const Relation& rel);
bool is_preorder(const Relation& rel);
bool is_partial_order(const Relation& rel);

// Smallest reflexive and transitive superset (Warshall over bit rows).
Relation reflexive_transitive_closure(const Relation& rel);

struct PreorderParts {
  Relation strict;
  Relation indifference;
};

// Throws Error(NotPreorder) unless rel is reflexive and transitive.
PreorderParts strict_and_indifference_parts(const Relation& rel);

// Covering pairs of a partial order. Throws Error(NotPartialOrder).
std::vector<IndexPair> hasse_edges(const Relation& partial_order);

// Quotient of a preorder by its indifference part. Each class is represented
// by its smallest member; `covering` holds the covering strict pairs between
// representatives, i.e. the Hasse edges of the quotient partial order.
struct PreorderSkeleton {
  std::vector<std::size_t> representative;  // element -> class representative
  std::vector<IndexPair> covering;
};

// Throws Error(NotPreorder).
PreorderSkeleton preorder_skeleton(const Relation& preorder);

}  // namespace gsd
