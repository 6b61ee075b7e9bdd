#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cprob/commuting.hpp"
#include "cprob/errors.hpp"
#include "cprob/group.hpp"
#include "cprob/rational.hpp"

namespace cprob {

// ---------------------------------------------------------------------------
// Group descriptors: C(n) | D(n) | Dic(n) | S(n) | A(n) | Heis(p) | SD(n,m,k),
// joined by 'x' for direct products.

struct DescriptorFactor {
  std::string family;
  std::vector<std::uint64_t> args;

  std::string str() const {
    std::string s = family + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + std::to_string(args[i]);
    return s + ")";
  }
};

class GroupDescriptor {
 public:
  static GroupDescriptor parse(std::string_view text) {
    GroupDescriptor d;
    std::size_t i = 0;
    auto skip = [&] {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& why) -> ParseError {
      return ParseError("descriptor '" + std::string(text) + "': " + why);
    };
    for (;;) {
      skip();
      std::size_t j = i;
      while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
      DescriptorFactor f{std::string(text.substr(i, j - i)), {}};
      static const std::map<std::string, std::size_t> arity{{"C", 1}, {"D", 1},    {"Dic", 1}, {"S", 1},
                                                            {"A", 1}, {"Heis", 1}, {"SD", 3}};
      auto it = arity.find(f.family);
      if (it == arity.end()) throw fail("unknown family '" + f.family + "'");
      i = j;
      skip();
      if (i >= text.size() || text[i] != '(') throw fail("expected '('");
      ++i;
      for (;;) {
        skip();
        std::size_t k = i;
        while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
        if (k == i || k - i > 9) throw fail("expected a number");
        f.args.push_back(std::stoull(std::string(text.substr(i, k - i))));
        i = k;
        skip();
        if (i < text.size() && text[i] == ',') {
          ++i;
          continue;
        }
        if (i < text.size() && text[i] == ')') {
          ++i;
          break;
        }
        throw fail("expected ',' or ')'");
      }
      if (f.args.size() != it->second) throw fail(f.family + " takes " + std::to_string(it->second) + " argument(s)");
      if (std::any_of(f.args.begin(), f.args.end(), [](auto a) { return a == 0; })) throw fail("arguments must be positive");
      d.factors_.push_back(std::move(f));
      skip();
      if (i == text.size()) break;
      if (text[i] != 'x') throw fail("expected 'x' between factors");
      ++i;
    }
    return d;
  }

  const std::vector<DescriptorFactor>& factors() const { return factors_; }

  /// Canonical text, e.g. "D(4)xC(2)".
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? "x" : "") + factors_[i].str();
    return s;
  }

  /// Group order, computed without building the group.
  std::uint64_t order() const {
    std::uint64_t n = 1;
    for (const auto& f : factors_) n = saturating_mul(n, factor_order(f));
    return n;
  }

  static std::uint64_t factor_order(const DescriptorFactor& f) {
    const auto n = f.args[0];
    if (f.family == "C") return n;
    if (f.family == "D") return saturating_mul(2, n);
    if (f.family == "Dic") return saturating_mul(4, n);
    if (f.family == "Heis") return saturating_mul(n, saturating_mul(n, n));
    if (f.family == "SD") return saturating_mul(n, f.args[1]);
    std::uint64_t fact = 1;
    for (std::uint64_t k = 2; k <= n; ++k) fact = saturating_mul(fact, k);
    if (f.family == "A" && n >= 2) fact /= 2;
    return fact;
  }

 private:
  static std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
  }

  std::vector<DescriptorFactor> factors_;
};

namespace detail {

inline FiniteGroup law_group(std::size_t n, const std::function<Element(Element, Element)>& law) {
  std::vector<Element> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = law(a, b);
  return FiniteGroup::from_table(n, std::move(t));
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

inline FiniteGroup build_factor(const DescriptorFactor& f, std::size_t cap) {
  const std::uint64_t n = f.args[0];
  if (f.family == "C") return law_group(n, [n](Element a, Element b) { return Element((a + b) % n); });
  if (f.family == "D") {
    // r^i s^e at index i + n e; s r = r^-1 s
    return law_group(2 * n, [n](Element a, Element b) {
      const std::uint64_t i = a % n, e = a / n, j = b % n, f = b / n;
      const std::uint64_t rot = e ? (i + n - j) % n : (i + j) % n;
      return Element(rot + n * ((e + f) % 2));
    });
  }
  if (f.family == "Dic") {
    // a^i x^e at index i + 2n e; x^2 = a^n, x a = a^-1 x
    const std::uint64_t m = 2 * n;
    return law_group(2 * m, [n, m](Element u, Element v) {
      const std::uint64_t i = u % m, e = u / m, j = v % m, f = v / m;
      if (!e) return Element((i + j) % m + m * f);
      const std::uint64_t rot = (i + m - j) % m;
      if (!f) return Element(rot + m);
      return Element((rot + n) % m);
    });
  }
  if (f.family == "Heis") {
    // (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab'); index a + n b + n^2 c
    return law_group(n * n * n, [n](Element u, Element v) {
      const std::uint64_t a = u % n, b = u / n % n, c = u / (n * n);
      const std::uint64_t a2 = v % n, b2 = v / n % n, c2 = v / (n * n);
      return Element((a + a2) % n + n * ((b + b2) % n) + n * n * ((c + c2 + a * b2) % n));
    });
  }
  if (f.family == "SD") {
    const std::uint64_t m = f.args[1], k = f.args[2];
    if (std::gcd(k, n) != 1 || pow_mod(k, m, n) != 1 % n)
      throw InvalidAction(f.str() + ": need gcd(k,n) = 1 and k^m = 1 mod n");
    // (a,b)(a',b') = (a + k^b a', b + b'); index a + n b
    return law_group(n * m, [n, m, k](Element u, Element v) {
      const std::uint64_t a = u % n, b = u / n, a2 = v % n, b2 = v / n;
      return Element((a + pow_mod(k, b, n) * a2) % n + n * ((b + b2) % m));
    });
  }
  std::vector<Permutation> gens;
  if (f.family == "S") {
    if (n >= 2) {
      Permutation t(n), c(n);
      std::iota(t.begin(), t.end(), Element(0));
      std::swap(t[0], t[1]);
      for (std::size_t i = 0; i < n; ++i) c[i] = Element((i + 1) % n);
      gens = {t, c};
    }
  } else {  // A
    for (std::uint64_t i = 2; i < n; ++i) {
      Permutation p(n);
      std::iota(p.begin(), p.end(), Element(0));
      p[0] = 1;
      p[1] = Element(i);
      p[i] = 0;
      gens.push_back(p);
    }
  }
  return from_permutations(gens, cap);
}

}  // namespace detail

/// The named group as a validated Cayley table.
inline FiniteGroup build_group(const GroupDescriptor& desc, std::size_t cap = kDefaultOrderCap) {
  if (desc.order() > cap)
    throw OrderCapExceeded(desc.str() + " has order " + std::to_string(desc.order()) + " above cap " +
                           std::to_string(cap));
  FiniteGroup g;
  bool first = true;
  for (const auto& f : desc.factors()) {
    FiniteGroup h = detail::build_factor(f, cap);
    g = first ? h : direct_product(g, h, cap);
    first = false;
  }
  return g;
}

inline FiniteGroup build_group(std::string_view text, std::size_t cap = kDefaultOrderCap) {
  return build_group(GroupDescriptor::parse(text), cap);
}

// ---------------------------------------------------------------------------
// Corpus

inline const std::vector<std::string>& all_families() {
  static const std::vector<std::string> f{"C", "D", "Dic", "S", "A", "Heis", "SD"};
  return f;
}

/// Single-factor descriptors of the selected families with order <= max_order.
/// Degenerate members (D(1), Dic(1), S(n<3), A(n<4), trivial SD actions)
/// are skipped as they duplicate cyclic groups.
inline std::vector<GroupDescriptor> family_members(std::uint64_t max_order, const std::set<std::string>& families) {
  std::vector<GroupDescriptor> out;
  auto add = [&](const std::string& s) {
    auto d = GroupDescriptor::parse(s);
    if (d.order() <= max_order) out.push_back(std::move(d));
  };
  auto has = [&](const char* f) { return families.count(f) > 0; };
  if (has("C"))
    for (std::uint64_t n = 1; n <= max_order; ++n) add("C(" + std::to_string(n) + ")");
  if (has("D"))
    for (std::uint64_t n = 2; 2 * n <= max_order; ++n) add("D(" + std::to_string(n) + ")");
  if (has("Dic"))
    for (std::uint64_t n = 2; 4 * n <= max_order; ++n) add("Dic(" + std::to_string(n) + ")");
  if (has("S"))
    for (std::uint64_t n = 3; n <= 12; ++n) add("S(" + std::to_string(n) + ")");
  if (has("A"))
    for (std::uint64_t n = 4; n <= 12; ++n) add("A(" + std::to_string(n) + ")");
  if (has("Heis")) {
    for (std::uint64_t p = 2; p * p * p <= max_order; ++p) {
      bool prime = true;
      for (std::uint64_t d = 2; d * d <= p; ++d) prime = prime && p % d != 0;
      if (prime) add("Heis(" + std::to_string(p) + ")");
    }
  }
  if (has("SD")) {
    for (std::uint64_t n = 3; n * 2 <= max_order; ++n)
      for (std::uint64_t m = 2; n * m <= max_order; ++m)
        for (std::uint64_t k = 2; k < n; ++k)
          if (std::gcd(k, n) == 1 && detail::pow_mod(k, m, n) == 1)
            add("SD(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(k) + ")");
  }
  return out;
}

/// Family members plus, when `products` is set, every binary product of two
/// nontrivial members with order <= max_order.
inline std::vector<GroupDescriptor> corpus(std::uint64_t max_order, const std::set<std::string>& families,
                                           bool products = true) {
  auto base = family_members(max_order, families);
  std::vector<GroupDescriptor> out = base;
  if (!products) return out;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = i; j < base.size(); ++j) {
      const auto oi = base[i].order(), oj = base[j].order();
      if (oi < 2 || oj < 2 || oi * oj > max_order) continue;
      out.push_back(GroupDescriptor::parse(base[i].str() + "x" + base[j].str()));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Store

struct Witness {
  std::string descriptor;
  std::uint64_t order = 0;
  friend auto operator<=>(const Witness&, const Witness&) = default;
};

/// Computed commuting probabilities keyed by exact value, descending.
class SpectrumStore {
 public:
  using Entries = std::map<Rational, std::set<Witness>, std::greater<>>;

  void insert(const Rational& value, Witness w) {
    if (value <= Rational(0) || value > Rational(1)) throw DomainError("spectrum value " + value.str() + " not in (0,1]");
    entries_[value].insert(std::move(w));
  }

  const Entries& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t value_count() const { return entries_.size(); }
  std::size_t witness_count() const {
    std::size_t n = 0;
    for (const auto& [v, ws] : entries_) n += ws.size();
    return n;
  }

  std::vector<Rational> values() const {
    std::vector<Rational> out;
    for (const auto& [v, ws] : entries_) out.push_back(v);
    return out;
  }

  /// One "a/b<TAB>descriptor<TAB>order" line per witness, value descending
  /// then descriptor.
  std::string serialize() const {
    std::string s;
    for (const auto& [v, ws] : entries_)
      for (const auto& w : ws) s += v.str() + "\t" + w.descriptor + "\t" + std::to_string(w.order) + "\n";
    return s;
  }

  static SpectrumStore parse(std::istream& in) {
    SpectrumStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto t1 = line.find('\t');
      auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
        throw ParseError("store line " + std::to_string(lineno) + ": expected three tab-separated fields");
      const std::string order = line.substr(t2 + 1);
      if (order.empty() || order.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("store line " + std::to_string(lineno) + ": bad order");
      store.insert(Rational::parse(line.substr(0, t1)), {line.substr(t1 + 1, t2 - t1 - 1), std::stoull(order)});
    }
    return store;
  }

  friend bool operator==(const SpectrumStore& a, const SpectrumStore& b) { return a.entries_ == b.entries_; }

 private:
  Entries entries_;
};

/// Computes Pr for every corpus group and inserts it.
inline SpectrumStore& populate(SpectrumStore& store, std::uint64_t max_order, const std::set<std::string>& families,
                               bool products = true, std::size_t cap = kDefaultOrderCap) {
  for (const auto& d : corpus(max_order, families, products)) {
    const FiniteGroup g = build_group(d, cap);
    store.insert(commuting_probability(g), {d.str(), g.order()});
  }
  return store;
}

struct FiveEighthsReport {
  std::size_t values_checked = 0;
  std::vector<Witness> witnesses;  // groups attaining 5/8
};

/// Empirical check that no stored value lies strictly between 5/8 and 1.
inline FiveEighthsReport verify_five_eighths(const SpectrumStore& store) {
  const Rational five_eighths(5, 8);
  FiveEighthsReport report;
  for (const auto& [v, ws] : store.entries()) {
    ++report.values_checked;
    if (v > five_eighths && v < Rational(1))
      throw GapViolation("value " + v.str() + " lies in (5/8, 1); witness " + ws.begin()->descriptor);
    if (v == five_eighths) report.witnesses.assign(ws.begin(), ws.end());
  }
  return report;
}

/// Largest stored value strictly below p.
inline std::optional<Rational> gap_below(const SpectrumStore& store, const Rational& p) {
  auto it = store.entries().upper_bound(p);  // first key < p in descending order
  if (it == store.entries().end()) return std::nullopt;
  return it->first;
}

struct ApproachEntry {
  Rational value;
  std::vector<Witness> witnesses;
};

struct ApproachReport {
  std::vector<ApproachEntry> below;  // (x - window, x), descending
  std::vector<ApproachEntry> above;  // [x, x + window), descending
};

inline ApproachReport approach_report(const SpectrumStore& store, const Rational& x, const Rational& window) {
  if (window <= Rational(0)) throw DomainError("approach_report: window must be positive");
  ApproachReport r;
  for (const auto& [v, ws] : store.entries()) {
    ApproachEntry e{v, {ws.begin(), ws.end()}};
    if (v < x && v > x - window) r.below.push_back(std::move(e));
    else if (v >= x && v < x + window) r.above.push_back(std::move(e));
  }
  return r;
}

}  // namespace cprob
