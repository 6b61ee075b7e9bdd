#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cprob/errors.hpp"

namespace cprob {

using Element = std::uint32_t;

inline constexpr std::size_t kDefaultOrderCap = 512;

/// A finite group given by its Cayley table. Elements are dense indices with
/// the identity at 0. Immutable; copies share the table.
class FiniteGroup {
 public:
  FiniteGroup() : FiniteGroup(trivial_data()) {}

  /// Validates the group axioms exhaustively and relabels the identity to 0.
  static FiniteGroup from_cayley_table(const std::vector<std::vector<std::size_t>>& rows,
                                       std::size_t cap = kDefaultOrderCap) {
    const std::size_t n = rows.size();
    if (n == 0) throw NotAGroup("empty Cayley table");
    if (n > cap) throw OrderCapExceeded("order " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    std::vector<Element> t(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      if (rows[a].size() != n) throw NotAGroup("Cayley table row " + std::to_string(a) + " has wrong length");
      for (std::size_t b = 0; b < n; ++b) {
        if (rows[a][b] >= n) throw NotAGroup("Cayley table entry out of range at (" + std::to_string(a) + "," +
                                             std::to_string(b) + ")");
        t[a * n + b] = static_cast<Element>(rows[a][b]);
      }
    }
    std::size_t e = n;
    for (std::size_t c = 0; c < n && e == n; ++c) {
      bool ok = true;
      for (std::size_t x = 0; x < n && ok; ++x) ok = t[c * n + x] == x && t[x * n + c] == x;
      if (ok) e = c;
    }
    if (e == n) throw NotAGroup("no two-sided identity");
    if (e != 0) {
      // swap labels 0 and e
      auto relabel = [e](Element x) -> Element { return x == 0 ? Element(e) : (x == e ? 0 : x); };
      std::vector<Element> u(n * n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) u[relabel(a) * n + relabel(b)] = relabel(t[a * n + b]);
      t.swap(u);
    }
    return from_table(n, std::move(t));
  }

  /// Reads "n" followed by n rows of n indices.
  static FiniteGroup parse_cayley(std::istream& in, std::size_t cap = kDefaultOrderCap) {
    long long n = 0;
    if (!(in >> n) || n <= 0) throw ParseError("Cayley file: expected positive order on first line");
    if (static_cast<std::size_t>(n) > cap) throw OrderCapExceeded("order " + std::to_string(n) + " exceeds cap");
    std::vector<std::vector<std::size_t>> rows(n, std::vector<std::size_t>(n));
    for (auto& row : rows) {
      for (auto& v : row) {
        long long x;
        if (!(in >> x) || x < 0) throw ParseError("Cayley file: expected " + std::to_string(n * n) + " indices");
        v = static_cast<std::size_t>(x);
      }
    }
    std::string extra;
    if (in >> extra) throw ParseError("Cayley file: trailing data '" + extra + "'");
    return from_cayley_table(rows, cap);
  }

  std::size_t order() const { return d_->n; }
  static constexpr Element identity() { return 0; }
  Element mul(Element a, Element b) const { return d_->table[a * d_->n + b]; }
  Element inv(Element a) const { return d_->inverse[a]; }
  /// [x,y] = x^-1 y^-1 x y
  Element commutator(Element x, Element y) const { return mul(mul(inv(x), inv(y)), mul(x, y)); }
  /// x^y = y^-1 x y
  Element conj(Element x, Element y) const { return mul(mul(inv(y), x), y); }
  bool commutes(Element x, Element y) const { return mul(x, y) == mul(y, x); }

  std::vector<std::vector<std::size_t>> table() const {
    std::vector<std::vector<std::size_t>> rows(order(), std::vector<std::size_t>(order()));
    for (std::size_t a = 0; a < order(); ++a)
      for (std::size_t b = 0; b < order(); ++b) rows[a][b] = mul(a, b);
    return rows;
  }

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.d_ == b.d_ || (a.d_->n == b.d_->n && a.d_->table == b.d_->table);
  }

  /// Identity, inverses and associativity checked on every triple.
  static void verify_axioms(std::size_t n, const std::vector<Element>& t) {
    for (std::size_t x = 0; x < n; ++x) {
      if (t[x] != x || t[x * n] != x) throw NotAGroup("index 0 is not a two-sided identity");
    }
    for (std::size_t a = 0; a < n; ++a) {
      bool found = false;
      for (std::size_t b = 0; b < n && !found; ++b) found = t[a * n + b] == 0 && t[b * n + a] == 0;
      if (!found) throw NotAGroup("element " + std::to_string(a) + " has no two-sided inverse");
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t ab = t[a * n + b];
        for (std::size_t c = 0; c < n; ++c) {
          if (t[ab * n + c] != t[a * n + t[b * n + c]])
            throw NotAGroup("associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                            std::to_string(c) + ")");
        }
      }
    }
  }

  /// Builds from a row-major table whose identity is already index 0.
  static FiniteGroup from_table(std::size_t n, std::vector<Element> t) {
    verify_axioms(n, t);
    auto d = std::make_shared<Data>();
    d->n = n;
    d->inverse.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (t[a * n + b] == 0) d->inverse[a] = static_cast<Element>(b);
    d->table = std::move(t);
    return FiniteGroup(std::move(d));
  }

 private:
  struct Data {
    std::size_t n = 1;
    std::vector<Element> table{0};
    std::vector<Element> inverse{0};
  };

  explicit FiniteGroup(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  static std::shared_ptr<const Data> trivial_data() {
    static const auto d = std::make_shared<const Data>();
    return d;
  }

  std::shared_ptr<const Data> d_;
};

// ---------------------------------------------------------------------------
// Permutations

using Permutation = std::vector<Element>;

/// Parses disjoint-cycle notation such as "(0 1)(2 3)"; "()" is the identity.
inline Permutation parse_permutation(std::string_view text, std::size_t degree) {
  Permutation p(degree);
  std::iota(p.begin(), p.end(), Element(0));
  std::vector<bool> seen(degree, false);
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r' || text[i] == ',')) ++i;
  };
  skip_ws();
  if (i == text.size()) throw ParseError("empty permutation");
  while (i < text.size()) {
    if (text[i] != '(') throw ParseError("permutation: expected '(' in '" + std::string(text) + "'");
    ++i;
    std::vector<Element> cycle;
    for (;;) {
      skip_ws();
      if (i == text.size()) throw ParseError("permutation: unterminated cycle");
      if (text[i] == ')') { ++i; break; }
      std::size_t j = i;
      while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
      if (j == i) throw ParseError("permutation: bad point in '" + std::string(text) + "'");
      unsigned long v = std::stoul(std::string(text.substr(i, j - i)));
      if (v >= degree) throw ParseError("permutation: point " + std::to_string(v) + " exceeds degree");
      if (seen[v]) throw ParseError("permutation: cycles are not disjoint");
      seen[v] = true;
      cycle.push_back(static_cast<Element>(v));
      i = j;
    }
    for (std::size_t k = 0; k + 1 < cycle.size(); ++k) p[cycle[k]] = cycle[k + 1];
    if (!cycle.empty()) p[cycle.back()] = cycle.front();
    skip_ws();
  }
  return p;
}

/// One generator per line in cycle notation; the degree is one more than the
/// largest point mentioned (at least 1).
inline std::vector<Permutation> parse_generators(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  std::size_t degree = 1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    lines.push_back(line);
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] >= '0' && line[i] <= '9') {
        std::size_t j = i;
        while (j < line.size() && line[j] >= '0' && line[j] <= '9') ++j;
        degree = std::max<std::size_t>(degree, std::stoul(line.substr(i, j - i)) + 1);
        i = j;
      } else {
        ++i;
      }
    }
  }
  std::vector<Permutation> gens;
  for (const auto& l : lines) gens.push_back(parse_permutation(l, degree));
  return gens;
}

/// Breadth-first closure of the permutation group generated by `generators`.
/// Element 0 is the identity; the law is "apply left factor first".
inline FiniteGroup from_permutations(const std::vector<Permutation>& generators, std::size_t cap = kDefaultOrderCap) {
  std::size_t degree = generators.empty() ? 0 : generators.front().size();
  for (const auto& g : generators) {
    if (g.size() != degree) throw DomainError("generators have different degrees");
    std::vector<bool> hit(degree, false);
    for (auto v : g) {
      if (v >= degree || hit[v]) throw DomainError("generator is not a bijection");
      hit[v] = true;
    }
  }
  Permutation id(degree);
  std::iota(id.begin(), id.end(), Element(0));
  std::vector<Permutation> elems{id};
  std::map<Permutation, Element> index{{id, 0}};
  auto compose = [](const Permutation& p, const Permutation& q) {
    Permutation r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
    return r;
  };
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : generators) {
      Permutation next = compose(elems[head], g);
      if (index.emplace(next, static_cast<Element>(elems.size())).second) {
        elems.push_back(std::move(next));
        if (elems.size() > cap) throw OrderCapExceeded("permutation group order exceeds cap " + std::to_string(cap));
      }
    }
  }
  const std::size_t n = elems.size();
  std::vector<Element> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = index.at(compose(elems[a], elems[b]));
  return FiniteGroup::from_table(n, std::move(t));
}

/// Componentwise law; the pair (g,h) has index g*|H| + h.
inline FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h, std::size_t cap = kDefaultOrderCap) {
  const std::size_t m = g.order(), k = h.order(), n = m * k;
  if (n > cap) throw OrderCapExceeded("direct product order " + std::to_string(n) + " exceeds cap");
  std::vector<Element> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      t[a * n + b] = static_cast<Element>(g.mul(a / k, b / k) * k + h.mul(a % k, b % k));
  return FiniteGroup::from_table(n, std::move(t));
}

// ---------------------------------------------------------------------------
// Subgroups

/// A subgroup of a FiniteGroup stored as a membership mask.
class Subgroup {
 public:
  /// Validates closure, identity and Lagrange.
  static Subgroup from_mask(const FiniteGroup& parent, std::vector<bool> mask) {
    if (mask.size() != parent.order()) throw DomainError("subgroup mask has wrong length");
    Subgroup s(parent, std::move(mask));
    if (!s.contains(0)) throw DomainError("subset does not contain the identity");
    const auto m = s.members();
    for (auto a : m) {
      if (!s.contains(parent.inv(a))) throw DomainError("subset not closed under inverse");
      for (auto b : m)
        if (!s.contains(parent.mul(a, b))) throw DomainError("subset not closed under product");
    }
    if (parent.order() % s.size() != 0) throw InternalInvariantViolation("subgroup order does not divide group order");
    return s;
  }

  static Subgroup whole(const FiniteGroup& g) { return Subgroup(g, std::vector<bool>(g.order(), true)); }
  static Subgroup trivial(const FiniteGroup& g) {
    std::vector<bool> m(g.order(), false);
    m[0] = true;
    return Subgroup(g, std::move(m));
  }

  const FiniteGroup& parent() const { return parent_; }
  bool contains(Element x) const { return mask_[x]; }
  std::size_t size() const { return size_; }
  std::size_t index() const { return parent_.order() / size_; }
  bool is_trivial() const { return size_ == 1; }
  bool is_whole() const { return size_ == parent_.order(); }
  const std::vector<bool>& mask() const { return mask_; }

  std::vector<Element> members() const {
    std::vector<Element> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i]) out.push_back(static_cast<Element>(i));
    return out;
  }

  bool is_subset_of(const Subgroup& o) const {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && !o.mask_[i]) return false;
    return true;
  }

  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.mask_ == b.mask_; }

 private:
  template <class Gens>
  friend Subgroup generated(const FiniteGroup& g, const Gens& gens);

  Subgroup(FiniteGroup parent, std::vector<bool> mask) : parent_(std::move(parent)), mask_(std::move(mask)) {
    size_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
  }

  FiniteGroup parent_;
  std::vector<bool> mask_;
  std::size_t size_ = 0;
};

/// Subgroup generated by a collection of elements (closure under right
/// multiplication by the generators).
template <class Gens>
Subgroup generated(const FiniteGroup& g, const Gens& gens) {
  std::vector<bool> mask(g.order(), false);
  std::vector<Element> gen_list;
  for (auto x : gens)
    if (x != 0) gen_list.push_back(static_cast<Element>(x));
  std::vector<Element> queue{0};
  mask[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (auto s : gen_list) {
      Element y = g.mul(queue[head], s);
      if (!mask[y]) {
        mask[y] = true;
        queue.push_back(y);
      }
    }
  }
  return Subgroup(g, std::move(mask));
}

inline Subgroup generated(const FiniteGroup& g, std::initializer_list<Element> gens) {
  return generated(g, std::vector<Element>(gens));
}

inline Subgroup intersection(const Subgroup& a, const Subgroup& b) {
  std::vector<bool> m(a.mask().size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = a.contains(i) && b.contains(i);
  return Subgroup::from_mask(a.parent(), std::move(m));
}

/// Elements of `within` commuting with every element of `of`.
inline Subgroup centralizer(const Subgroup& within, const Subgroup& of) {
  const auto& g = within.parent();
  const auto targets = of.members();
  std::vector<bool> m(g.order(), false);
  for (auto x : within.members())
    m[x] = std::all_of(targets.begin(), targets.end(), [&](Element y) { return g.commutes(x, y); });
  return Subgroup::from_mask(g, std::move(m));
}

inline Subgroup centralizer(const FiniteGroup& g, Element x) {
  std::vector<bool> m(g.order(), false);
  for (std::size_t y = 0; y < g.order(); ++y) m[y] = g.commutes(x, y);
  return Subgroup::from_mask(g, std::move(m));
}

inline Subgroup center(const FiniteGroup& g) { return centralizer(Subgroup::whole(g), Subgroup::whole(g)); }

/// [H,K]: generated by all [h,k].
inline Subgroup commutator_subgroup(const Subgroup& h, const Subgroup& k) {
  const auto& g = h.parent();
  std::vector<bool> comm(g.order(), false);
  const auto km = k.members();
  for (auto x : h.members())
    for (auto y : km) comm[g.commutator(x, y)] = true;
  std::vector<Element> gens;
  for (std::size_t i = 0; i < comm.size(); ++i)
    if (comm[i]) gens.push_back(static_cast<Element>(i));
  return generated(g, gens);
}

inline Subgroup derived_subgroup(const FiniteGroup& g) {
  return commutator_subgroup(Subgroup::whole(g), Subgroup::whole(g));
}

/// Z2(G) = { g : [g,x] in Z(G) for all x }.
inline Subgroup second_center(const FiniteGroup& g) {
  const Subgroup z = center(g);
  std::vector<bool> m(g.order(), false);
  for (std::size_t a = 0; a < g.order(); ++a) {
    bool ok = true;
    for (std::size_t x = 0; x < g.order() && ok; ++x) ok = z.contains(g.commutator(a, x));
    m[a] = ok;
  }
  return Subgroup::from_mask(g, std::move(m));
}

inline bool is_normal(const Subgroup& s) {
  const auto& g = s.parent();
  for (auto x : s.members())
    for (std::size_t y = 0; y < g.order(); ++y)
      if (!s.contains(g.conj(x, y))) return false;
  return true;
}

/// Smallest normal subgroup containing the given elements.
template <class Elems>
Subgroup normal_closure(const FiniteGroup& g, const Elems& elems) {
  std::vector<bool> seen(g.order(), false);
  std::vector<Element> gens;
  for (auto x : elems) {
    for (std::size_t y = 0; y < g.order(); ++y) {
      Element c = g.conj(static_cast<Element>(x), static_cast<Element>(y));
      if (!seen[c]) {
        seen[c] = true;
        gens.push_back(c);
      }
    }
  }
  return generated(g, gens);
}

inline Subgroup normal_closure(const Subgroup& s) { return normal_closure(s.parent(), s.members()); }

/// Largest normal subgroup contained in s: the intersection of its conjugates.
inline Subgroup normal_core(const Subgroup& s) {
  const auto& g = s.parent();
  std::vector<bool> m(g.order(), false);
  for (auto x : s.members()) {
    bool ok = true;
    for (std::size_t y = 0; y < g.order() && ok; ++y) ok = s.contains(g.conj(x, y));
    m[x] = ok;
  }
  return Subgroup::from_mask(g, std::move(m));
}

inline std::vector<std::vector<Element>> conjugacy_classes(const FiniteGroup& g) {
  std::vector<bool> done(g.order(), false);
  std::vector<std::vector<Element>> classes;
  for (std::size_t x = 0; x < g.order(); ++x) {
    if (done[x]) continue;
    std::vector<Element> cls;
    for (std::size_t y = 0; y < g.order(); ++y) {
      Element c = g.conj(x, y);
      if (!done[c]) {
        done[c] = true;
        cls.push_back(c);
      }
    }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  return classes;
}

/// Left coset representatives of s (the least index of each coset xS).
inline std::vector<Element> coset_representatives(const Subgroup& s) {
  const auto& g = s.parent();
  std::vector<bool> covered(g.order(), false);
  std::vector<Element> reps;
  const auto m = s.members();
  for (std::size_t x = 0; x < g.order(); ++x) {
    if (covered[x]) continue;
    reps.push_back(static_cast<Element>(x));
    for (auto h : m) covered[g.mul(x, h)] = true;
  }
  return reps;
}

/// The subgroup as a group in its own right; element i of the result is
/// the i-th smallest member of s.
inline FiniteGroup subgroup_as_group(const Subgroup& s) {
  const auto m = s.members();
  std::vector<Element> pos(s.parent().order(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) pos[m[i]] = static_cast<Element>(i);
  const std::size_t n = m.size();
  std::vector<Element> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = pos[s.parent().mul(m[a], m[b])];
  return FiniteGroup::from_table(n, std::move(t));
}

struct BallCertificate {
  Subgroup subgroup;
  /// least r with X^{3r} = <X>
  std::size_t r = 0;
  /// least r0 with (r0+1)|X| > |G|; r <= r0 always
  std::size_t bound = 0;
};

/// <X> together with the least r such that X^{3r} already equals <X>.
/// X must be symmetric and contain the identity.
inline BallCertificate generated_with_ball_certificate(const FiniteGroup& g, std::span<const Element> x) {
  std::vector<bool> in_x(g.order(), false);
  for (auto v : x) {
    if (v >= g.order()) throw PreconditionViolated("element out of range");
    in_x[v] = true;
  }
  if (!in_x[0]) throw PreconditionViolated("X must contain the identity");
  std::vector<Element> xs;
  for (std::size_t i = 0; i < g.order(); ++i) {
    if (!in_x[i]) continue;
    if (!in_x[g.inv(i)]) throw PreconditionViolated("X must be closed under inverses");
    xs.push_back(static_cast<Element>(i));
  }
  Subgroup sub = generated(g, xs);

  // power[k] = X^k; grow until it fills <X>
  std::vector<bool> ball(g.order(), false);
  ball[0] = true;
  std::size_t ball_size = 1, k = 0;
  while (ball_size < sub.size()) {
    std::vector<bool> next(g.order(), false);
    for (std::size_t a = 0; a < g.order(); ++a) {
      if (!ball[a]) continue;
      for (auto s : xs) next[g.mul(a, s)] = true;
    }
    ball.swap(next);
    ball_size = static_cast<std::size_t>(std::count(ball.begin(), ball.end(), true));
    ++k;
  }
  BallCertificate cert{std::move(sub), (k + 2) / 3, 0};
  while ((cert.bound + 1) * xs.size() <= g.order()) ++cert.bound;
  detail::ensure(cert.r <= cert.bound, "ball lemma bound violated");
  return cert;
}

}  // namespace cprob
