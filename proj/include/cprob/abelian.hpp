#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include "cprob/errors.hpp"
#include "cprob/group.hpp"

namespace cprob {

using Coords = std::vector<std::uint64_t>;

/// A character of Z/d1 x ... x Z/dk (d1 | ... | dk), given by exponents
/// c_i mod d_i. Only the predicate gamma(a) = 1 is ever evaluated; it is
/// sum_i c_i a_i (d/d_i) = 0 mod d with d = dk.
class Character {
 public:
  Character(std::vector<std::uint64_t> factors, Coords exponents)
      : factors_(std::move(factors)), exponents_(std::move(exponents)) {
    if (factors_.size() != exponents_.size()) throw DomainError("character exponent count mismatch");
  }

  const std::vector<std::uint64_t>& factors() const { return factors_; }
  const Coords& exponents() const { return exponents_; }

  bool is_trivial() const {
    return std::all_of(exponents_.begin(), exponents_.end(), [](auto c) { return c == 0; });
  }

  /// Phase of gamma(a) as a residue mod the exponent d.
  std::uint64_t phase(std::span<const std::uint64_t> coords) const {
    if (factors_.empty()) return 0;
    const std::uint64_t d = factors_.back();
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      const std::uint64_t term = (exponents_[i] % factors_[i]) * (coords[i] % factors_[i]) % d;
      acc = (acc + term * (d / factors_[i])) % d;
    }
    return acc;
  }

  /// gamma(a) = 1
  bool kernel_contains(std::span<const std::uint64_t> coords) const { return phase(coords) == 0; }

  friend bool operator==(const Character&, const Character&) = default;

 private:
  std::vector<std::uint64_t> factors_;
  Coords exponents_;
};

/// Every character of Z/d1 x ... x Z/dk in lexicographic exponent order; the
/// trivial character comes first.
inline std::vector<Character> characters(const std::vector<std::uint64_t>& factors) {
  std::vector<Character> out;
  Coords c(factors.size(), 0);
  for (;;) {
    out.emplace_back(factors, c);
    std::size_t i = factors.size();
    while (i > 0) {
      --i;
      if (++c[i] < factors[i]) break;
      c[i] = 0;
      if (i == 0) return out;
    }
    if (factors.empty()) return out;
  }
}

/// An abelian subgroup of a FiniteGroup with an explicit isomorphism onto
/// Z/d1 x ... x Z/dk, d1 | d2 | ... | dk.
class AbelianStructure {
 public:
  AbelianStructure(Subgroup source, std::vector<std::uint64_t> factors, std::vector<Element> generators)
      : source_(std::move(source)), factors_(std::move(factors)), generators_(std::move(generators)) {
    const auto& g = source_.parent();
    std::size_t total = 1;
    for (auto d : factors_) total *= d;
    if (total != source_.size()) throw InternalInvariantViolation("invariant factors do not multiply to |A|");
    coords_.assign(g.order(), {});
    from_.assign(total, 0);
    Coords c(factors_.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      Element x = 0;
      for (std::size_t i = 0; i < factors_.size(); ++i)
        for (std::uint64_t k = 0; k < c[i]; ++k) x = g.mul(x, generators_[i]);
      if (!source_.contains(x) || !coords_[x].empty() || (x == 0 && idx != 0))
        throw InternalInvariantViolation("coordinate map is not a bijection");
      coords_[x] = c;
      from_[idx] = x;
      for (std::size_t i = factors_.size(); i > 0; --i) {
        if (++c[i - 1] < factors_[i - 1]) break;
        c[i - 1] = 0;
      }
    }
    coords_[0] = Coords(factors_.size(), 0);
    // homomorphism check on all pairs
    const auto m = source_.members();
    for (auto x : m) {
      for (auto y : m) {
        const Coords& cx = coords_[x];
        const Coords& cy = coords_[y];
        const Coords& cz = coords_[g.mul(x, y)];
        for (std::size_t i = 0; i < factors_.size(); ++i)
          if ((cx[i] + cy[i]) % factors_[i] != cz[i])
            throw InternalInvariantViolation("coordinate map is not a homomorphism");
      }
    }
  }

  const Subgroup& source() const { return source_; }
  const std::vector<std::uint64_t>& factors() const { return factors_; }
  const std::vector<Element>& generators() const { return generators_; }

  const Coords& to_coords(Element x) const {
    if (!source_.contains(x)) throw DomainError("element is not in the abelian subgroup");
    return coords_[x];
  }

  Element from_coords(std::span<const std::uint64_t> c) const {
    if (c.size() != factors_.size()) throw DomainError("coordinate tuple has wrong length");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) idx = idx * factors_[i] + c[i] % factors_[i];
    return from_[idx];
  }

 private:
  Subgroup source_;
  std::vector<std::uint64_t> factors_;
  std::vector<Element> generators_;
  std::vector<Coords> coords_;  // indexed by parent element; empty for non-members
  std::vector<Element> from_;   // mixed-radix coordinate index -> element
};

namespace detail {

inline std::size_t element_order(const FiniteGroup& g, Element x) {
  std::size_t k = 1;
  for (Element y = x; y != 0; y = g.mul(y, x)) ++k;
  return k;
}

// Exhaustive search for U <= current with U meet cyclic = 1 and |U| = target.
inline bool find_complement(const FiniteGroup& g, const std::vector<Element>& current, const Subgroup& cyclic,
                            std::size_t target, const Subgroup& u, std::set<std::vector<bool>>& visited,
                            Subgroup& out) {
  if (u.size() == target) {
    out = u;
    return true;
  }
  for (auto x : current) {
    if (u.contains(x) || cyclic.contains(x)) continue;
    std::vector<Element> gens = u.members();
    gens.push_back(x);
    Subgroup next = generated(g, gens);
    if (next.size() > target || target % next.size() != 0) continue;
    if (intersection(next, cyclic).size() != 1) continue;
    if (!visited.insert(next.mask()).second) continue;
    if (find_complement(g, current, cyclic, target, next, visited, out)) return true;
  }
  return false;
}

}  // namespace detail

/// Invariant-factor decomposition of an abelian subgroup: repeatedly split
/// off the cyclic subgroup of an element of maximal order, finding a
/// complement by exhaustive search.
inline AbelianStructure abelian_structure(const Subgroup& s) {
  const auto& g = s.parent();
  auto members = s.members();
  for (auto x : members)
    for (auto y : members)
      if (!g.commutes(x, y)) throw NotAbelian("subgroup is not abelian");

  std::vector<Element> gens;
  std::vector<std::uint64_t> orders;
  Subgroup current = s;
  while (current.size() > 1) {
    const auto cur = current.members();
    Element best = 0;
    std::size_t best_order = 1;
    for (auto x : cur) {
      std::size_t o = detail::element_order(g, x);
      if (o > best_order) {
        best_order = o;
        best = x;
      }
    }
    Subgroup cyclic = generated(g, {best});
    Subgroup complement = Subgroup::trivial(g);
    std::set<std::vector<bool>> visited;
    if (!detail::find_complement(g, cur, cyclic, current.size() / best_order, Subgroup::trivial(g), visited,
                                 complement))
      throw InternalInvariantViolation("no complement to a maximal cyclic subgroup");
    gens.push_back(best);
    orders.push_back(best_order);
    current = complement;
  }
  std::reverse(gens.begin(), gens.end());
  std::reverse(orders.begin(), orders.end());
  for (std::size_t i = 0; i + 1 < orders.size(); ++i)
    detail::ensure(orders[i + 1] % orders[i] == 0, "invariant factors do not form a divisibility chain");
  return AbelianStructure(s, std::move(orders), std::move(gens));
}

inline std::vector<Character> characters(const AbelianStructure& a) { return characters(a.factors()); }

/// True iff gamma(s) = 1 for every s in `elems` (elements of A's source).
inline bool char_trivial_on(const AbelianStructure& a, const Character& gamma, std::span<const Element> elems) {
  for (auto x : elems)
    if (!gamma.kernel_contains(a.to_coords(x))) return false;
  return true;
}

}  // namespace cprob
