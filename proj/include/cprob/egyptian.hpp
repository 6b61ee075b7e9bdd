#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cprob/errors.hpp"
#include "cprob/rational.hpp"

namespace cprob {

/// A multiset of unit-fraction denominators n1 <= ... <= nm. A witness for
/// E(value()) <= size(); `minimal` is set only by egyptian_complexity.
class EgyptianRep {
 public:
  EgyptianRep() = default;
  explicit EgyptianRep(std::vector<BigInt> denominators, bool minimal = false)
      : dens_(std::move(denominators)), minimal_(minimal) {
    for (const auto& n : dens_) {
      if (n <= 0) throw DomainError("unit fraction denominator must be positive");
    }
    std::sort(dens_.begin(), dens_.end());
  }

  const std::vector<BigInt>& denominators() const { return dens_; }
  std::size_t size() const { return dens_.size(); }
  bool empty() const { return dens_.empty(); }
  bool minimal() const { return minimal_; }

  Rational value() const {
    Rational sum;
    for (const auto& n : dens_) sum += Rational::unit(n);
    return sum;
  }

  /// Every denominator multiplied by `factor`; the value divides by `factor`.
  EgyptianRep scaled(const BigInt& factor) const {
    std::vector<BigInt> out;
    out.reserve(dens_.size());
    for (const auto& n : dens_) out.push_back(n * factor);
    return EgyptianRep(std::move(out));
  }

  /// Space separated denominators, e.g. "2 8".
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < dens_.size(); ++i) {
      if (i) s += ' ';
      s += dens_[i].str();
    }
    return s;
  }

  /// "1/2 + 1/8" (or "0" when empty).
  std::string sum_str() const {
    if (dens_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < dens_.size(); ++i) {
      if (i) s += " + ";
      s += "1/" + dens_[i].str();
    }
    return s;
  }

  friend bool operator==(const EgyptianRep& a, const EgyptianRep& b) { return a.dens_ == b.dens_; }

 private:
  std::vector<BigInt> dens_;
  bool minimal_ = false;
};

/// A non-increasing function N -> (0,1) given by a finite table
/// [eta(1), ..., eta(T)] and constant beyond T.
class EtaFunction {
 public:
  EtaFunction() : table_{Rational(1, 16)} {}
  explicit EtaFunction(std::vector<Rational> table) : table_(std::move(table)) {
    if (table_.empty()) throw DomainError("eta table is empty");
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (table_[i] <= Rational(0) || table_[i] >= Rational(1))
        throw DomainError("eta(" + std::to_string(i + 1) + ") = " + table_[i].str() + " not in (0,1)");
      if (i > 0 && table_[i] > table_[i - 1])
        throw DomainError("eta must be non-increasing (entry " + std::to_string(i + 1) + ")");
    }
  }

  static EtaFunction constant(const Rational& v) { return EtaFunction({v}); }

  Rational operator()(std::size_t m) const {
    if (m == 0) throw DomainError("eta is defined on positive integers");
    return table_[std::min(m, table_.size()) - 1];
  }

  const std::vector<Rational>& table() const { return table_; }

  /// One "m value" line per entry, m consecutive from 1. Blank lines and
  /// lines starting with '#' are skipped.
  static EtaFunction parse(std::istream& in) {
    std::vector<Rational> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream ls(line);
      std::string idx, val, extra;
      if (!(ls >> idx >> val) || (ls >> extra))
        throw ParseError("eta line " + std::to_string(lineno) + ": expected 'm value'");
      if (idx != std::to_string(table.size() + 1))
        throw ParseError("eta line " + std::to_string(lineno) + ": indices must run 1, 2, ...");
      table.push_back(Rational::parse(val));
    }
    return EtaFunction(std::move(table));
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < table_.size(); ++i)
      s += std::to_string(i + 1) + " " + table_[i].str() + "\n";
    return s;
  }

 private:
  std::vector<Rational> table_;
};

struct EgyptianComplexity {
  std::size_t terms = 0;
  EgyptianRep witness;
};

namespace detail {

// Lexicographically smallest nondecreasing sequence of exactly `terms` unit
// fractions, all denominators >= start, summing to num/den (num > 0).
inline bool exact_terms(const BigInt& num, const BigInt& den, std::size_t terms, const BigInt& start,
                        std::vector<BigInt>& out) {
  if (terms == 1) {
    if (den % num != 0) return false;
    BigInt n = den / num;
    if (n < start) return false;
    out.push_back(n);
    return true;
  }
  // need 1/n <= num/den and terms/n >= num/den
  BigInt lo = (den + num - 1) / num;
  if (lo < start) lo = start;
  BigInt hi = (den * terms) / num;
  for (BigInt n = lo; n <= hi; ++n) {
    BigInt rnum = num * n - den;
    BigInt rden = den * n;
    if (rnum == 0) continue;  // only reachable with fewer terms
    BigInt g = boost::multiprecision::gcd(rnum, rden);
    out.push_back(n);
    if (exact_terms(rnum / g, rden / g, terms - 1, n, out)) return true;
    out.pop_back();
  }
  return false;
}

inline Rational greedy_below(Rational r, std::size_t terms, BigInt start) {
  Rational sum;
  for (std::size_t i = 0; i < terms; ++i) {
    BigInt n = floor(Rational(1) / r) + 1;
    if (n < start) n = start;
    sum += Rational::unit(n);
    r -= Rational::unit(n);
    start = n;
  }
  return sum;
}

// max { S < r : S a sum of <= terms unit fractions with denominators >= start }
inline Rational best_below(const Rational& r, std::size_t terms, const BigInt& start) {
  if (terms == 0) return Rational(0);
  Rational incumbent = greedy_below(r, terms, start);
  BigInt n = floor(Rational(1) / r) + 1;
  if (n < start) n = start;
  for (;; ++n) {
    if (Rational(BigInt(terms), n) <= incumbent) break;
    Rational head = Rational::unit(n);
    Rational cand = head + best_below(r - head, terms - 1, n);
    if (cand > incumbent) incumbent = cand;
  }
  return incumbent;
}

}  // namespace detail

/// Least m <= cap with q a sum of m unit fractions, together with the
/// lexicographically smallest nondecreasing witness. E(0) = 0.
/// Throws CapExceeded when no representation with <= cap terms exists.
inline EgyptianComplexity egyptian_complexity(const Rational& q, std::size_t cap) {
  if (q < Rational(0) || q > Rational(1)) throw DomainError("egyptian_complexity: q = " + q.str() + " not in [0,1]");
  if (cap < 1) throw DomainError("egyptian_complexity: cap must be positive");
  if (q.is_zero()) return {0, EgyptianRep({}, true)};
  const BigInt num = q.numerator(), den = q.denominator();
  for (std::size_t m = 1; m <= cap; ++m) {
    std::vector<BigInt> dens;
    if (detail::exact_terms(num, den, m, BigInt(1), dens)) return {m, EgyptianRep(std::move(dens), true)};
  }
  throw CapExceeded("E(" + q.str() + ") > " + std::to_string(cap));
}

/// Q(m,x): the largest q < x with E(q) <= m. Always strictly below x.
inline Rational q_below(std::size_t m, const Rational& x) {
  if (x <= Rational(0)) throw DomainError("q_below: x must be positive");
  return detail::best_below(x, m, BigInt(1));
}

/// eta_x(m) = (x - Q(m,x)) / 2.
inline Rational eta_gap(std::size_t m, const Rational& x) {
  return (x - q_below(m, x)) / Rational(2);
}

/// All sums of at most m unit fractions with denominators <= max_den lying in
/// [lo, hi], in descending order. A truncation of E_m, not the full set.
inline std::vector<Rational> enumerate_em(std::size_t m, const Rational& lo, const Rational& hi,
                                          std::uint64_t max_den) {
  if (lo < Rational(0) || lo > hi) throw DomainError("enumerate_em: need 0 <= lo <= hi");
  if (hi > Rational(static_cast<std::int64_t>(m))) throw DomainError("enumerate_em: hi exceeds m");
  if (max_den < 1) throw DomainError("enumerate_em: max_den must be positive");
  std::set<Rational> found;
  const BigInt top(max_den);
  auto rec = [&](auto&& self, const Rational& sum, std::size_t left, const BigInt& start) -> void {
    if (sum >= lo) found.insert(sum);
    if (left == 0 || sum >= hi) return;
    BigInt n = ceil(Rational(1) / (hi - sum));
    if (n < start) n = start;
    for (; n <= top; ++n) {
      if (sum + Rational(BigInt(left), n) < lo) break;
      self(self, sum + Rational::unit(n), left - 1, n);
    }
  };
  rec(rec, Rational(0), m, BigInt(1));
  return {found.rbegin(), found.rend()};
}

/// q + 1/k for k = K .. K+count-1 where K exceeds every denominator of rep;
/// a strictly decreasing sequence in E_{m+1} converging to q.
inline std::vector<Rational> limit_witnesses(const EgyptianRep& rep, std::size_t count) {
  BigInt k = rep.empty() ? BigInt(1) : rep.denominators().back() + 1;
  const Rational q = rep.value();
  std::vector<Rational> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i, ++k) out.push_back(q + Rational::unit(k));
  return out;
}

}  // namespace cprob
