#pragma once

// Independent reference computations. None of these go through FiniteGroup
// tables or the library's search routines.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Perm = std::vector<int>;

inline Perm compose(const Perm& p, const Perm& q) {  // apply p, then q
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
  return r;
}

inline std::vector<Perm> closure(const std::vector<Perm>& gens, std::size_t degree) {
  Perm id(degree);
  std::iota(id.begin(), id.end(), 0);
  std::set<Perm> seen{id};
  std::vector<Perm> queue{id};
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (const auto& g : gens) {
      Perm n = compose(queue[h], g);
      if (seen.insert(n).second) queue.push_back(n);
    }
  return queue;
}

template <class T, class Mul>
std::pair<std::uint64_t, std::uint64_t> commuting_pairs(const std::vector<T>& elems, Mul mul) {
  std::uint64_t c = 0;
  for (const auto& a : elems)
    for (const auto& b : elems) c += mul(a, b) == mul(b, a);
  return {c, static_cast<std::uint64_t>(elems.size() * elems.size())};
}

inline std::pair<std::uint64_t, std::uint64_t> perm_pairs(const std::vector<Perm>& gens, std::size_t degree) {
  return commuting_pairs(closure(gens, degree), compose);
}

inline Perm cycle(std::size_t degree, std::vector<int> pts) {
  Perm p(degree);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) p[pts[i]] = pts[(i + 1) % pts.size()];
  return p;
}

/// Symmetries of the regular n-gon (order 2n).
inline std::vector<Perm> polygon_generators(int n) {
  std::vector<int> rot(n);
  std::iota(rot.begin(), rot.end(), 0);
  Perm refl(n);
  for (int i = 0; i < n; ++i) refl[i] = (n - i) % n;
  return {cycle(n, rot), refl};
}

/// Unit quaternions +-1, +-i, +-j, +-k as integer 4-vectors.
inline std::vector<std::array<int, 4>> quaternion_units() {
  std::vector<std::array<int, 4>> out;
  for (int k = 0; k < 4; ++k)
    for (int s : {1, -1}) {
      std::array<int, 4> q{0, 0, 0, 0};
      q[k] = s;
      out.push_back(q);
    }
  return out;
}

inline std::array<int, 4> qmul(const std::array<int, 4>& a, const std::array<int, 4>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3], a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1], a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

/// Upper unitriangular 3x3 matrices over Z/p, stored as (a, b, c) = (m01, m12, m02).
inline std::pair<std::uint64_t, std::uint64_t> unitriangular_pairs(int p) {
  std::vector<std::array<int, 3>> elems;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < p; ++c) elems.push_back({a, b, c});
  auto mul = [p](const std::array<int, 3>& x, const std::array<int, 3>& y) {
    return std::array<int, 3>{(x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p};
  };
  return commuting_pairs(elems, mul);
}

// ---------------------------------------------------------------------------
// Egyptian complexity. Enumerates remainders after all but two terms, then
// decides the last two terms with 1/x + 1/y = p/q <=> (px - q)(py - q) = q^2.

using i128 = __int128;

inline i128 gcd128(i128 a, i128 b) {
  while (b) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

struct Frac {
  i128 p, q;
};

inline Frac reduce(i128 p, i128 q) {
  i128 g = gcd128(p, q);
  return {p / g, q / g};
}

inline std::vector<std::pair<std::uint64_t, int>> factor(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> f;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    int e = 0;
    while (n % d == 0) n /= d, ++e;
    f.push_back({d, e});
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

inline bool is_two_terms(const Frac& r) {
  const std::uint64_t q = static_cast<std::uint64_t>(r.q);
  auto f = factor(q);
  std::vector<i128> divs{1};
  for (auto [prime, e] : f) {
    const std::size_t n = divs.size();
    i128 pk = 1;
    for (int k = 1; k <= 2 * e; ++k) {
      pk *= prime;
      for (std::size_t i = 0; i < n; ++i) divs.push_back(divs[i] * pk);
    }
  }
  const i128 q2 = r.q * r.q;
  for (i128 d : divs) {
    if ((d + r.q) % r.p == 0 && (q2 / d + r.q) % r.p == 0) return true;
  }
  return false;
}

inline bool representable(const Frac& r, int terms, i128 min_den) {
  if (r.p == 0) return terms == 0;
  if (terms == 0) return false;
  if (terms == 1) return r.q % r.p == 0;
  if (terms == 2) return is_two_terms(r);
  i128 lo = std::max<i128>(min_den, (r.q + r.p - 1) / r.p);
  i128 hi = (terms * r.q) / r.p;
  for (i128 n = lo; n <= hi; ++n) {
    i128 np = r.p * n - r.q;
    if (np <= 0) continue;
    if (representable(reduce(np, r.q * n), terms - 1, n)) return true;
  }
  return false;
}

/// Least m <= cap with a/b a sum of m unit fractions, or -1.
inline int min_terms(std::int64_t a, std::int64_t b, int cap) {
  if (a == 0) return 0;
  Frac r = reduce(a, b);
  for (int m = 1; m <= cap; ++m)
    if (representable(r, m, 1)) return m;
  return -1;
}

}  // namespace oracle
