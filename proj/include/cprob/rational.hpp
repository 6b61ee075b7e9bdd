#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "cprob/errors.hpp"

namespace cprob {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number, always reduced with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    value_ = den < 0 ? Impl(-num, -den) : Impl(num, den);
  }
  Rational(std::int64_t num, std::int64_t den) : Rational(BigInt(num), BigInt(den)) {}

  static Rational unit(const BigInt& n) { return Rational(BigInt(1), n); }

  /// Accepts "a/b" or "a" (optional leading '-'), surrounding blanks ignored.
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    auto slash = text.find('/');
    auto num = parse_integer(slash == std::string_view::npos ? text : text.substr(0, slash), text);
    BigInt den = 1;
    if (slash != std::string_view::npos) {
      den = parse_integer(text.substr(slash + 1), text);
      if (den <= 0) throw ParseError("rational denominator must be positive: '" + std::string(text) + "'");
    }
    return Rational(num, den);
  }

  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }

  bool is_zero() const { return value_ == 0; }
  bool is_integer() const { return denominator() == 1; }
  bool is_unit_fraction() const { return numerator() == 1; }

  /// Canonical "a/b" form; integers are written with denominator 1.
  std::string str() const { return numerator().str() + "/" + denominator().str(); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw DomainError("division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { Rational r; r.value_ = -a.value_; return r; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  using Impl = boost::multiprecision::cpp_rational;

  static BigInt parse_integer(std::string_view s, std::string_view whole) {
    std::string_view digits = s;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (digits.empty()) throw ParseError("malformed rational: '" + std::string(whole) + "'");
    for (char c : digits) {
      if (c < '0' || c > '9') throw ParseError("malformed rational: '" + std::string(whole) + "'");
    }
    BigInt v{std::string(digits)};
    return (!s.empty() && s.front() == '-') ? BigInt(-v) : v;
  }

  Impl value_{0};
};

/// Smallest integer >= r.
inline BigInt ceil(const Rational& r) {
  BigInt q = r.numerator() / r.denominator();  // truncates toward zero
  if (q * r.denominator() < r.numerator()) ++q;
  return q;
}

/// Largest integer <= r.
inline BigInt floor(const Rational& r) {
  BigInt q = r.numerator() / r.denominator();
  if (q * r.denominator() > r.numerator()) --q;
  return q;
}

}  // namespace cprob

template <>
struct std::hash<cprob::Rational> {
  std::size_t operator()(const cprob::Rational& r) const {
    return std::hash<std::string>{}(r.str());
  }
};
