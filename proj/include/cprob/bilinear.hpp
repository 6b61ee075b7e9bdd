#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cprob/abelian.hpp"
#include "cprob/egyptian.hpp"
#include "cprob/errors.hpp"
#include "cprob/json_util.hpp"
#include "cprob/rational.hpp"

namespace cprob {

inline constexpr std::size_t kDefaultPairCap = std::size_t{1} << 20;

/// Z/d1 x ... x Z/dk with d1 | ... | dk, each di >= 2. Elements are mixed
/// radix indices of coordinate tuples (first coordinate most significant).
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;
  explicit FiniteAbelianGroup(std::vector<std::uint64_t> factors) : factors_(std::move(factors)) {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (factors_[i] < 2) throw DomainError("invariant factors must be >= 2");
      if (i > 0 && factors_[i] % factors_[i - 1] != 0) throw DomainError("invariant factors must divide each other");
    }
    size_ = 1;
    for (auto d : factors_) size_ *= d;
  }

  const std::vector<std::uint64_t>& factors() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  std::size_t size() const { return size_; }

  Coords coords(std::size_t idx) const {
    Coords c(factors_.size());
    for (std::size_t i = factors_.size(); i > 0; --i) {
      c[i - 1] = idx % factors_[i - 1];
      idx /= factors_[i - 1];
    }
    return c;
  }

  std::size_t index(std::span<const std::uint64_t> c) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) idx = idx * factors_[i] + c[i] % factors_[i];
    return idx;
  }

  std::size_t add(std::size_t x, std::size_t y) const {
    Coords a = coords(x), b = coords(y);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + b[i]) % factors_[i];
    return index(a);
  }

  std::size_t neg(std::size_t x) const {
    Coords a = coords(x);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (factors_[i] - a[i]) % factors_[i];
    return index(a);
  }

  /// Index of the i-th standard generator.
  std::size_t generator(std::size_t i) const {
    Coords c(factors_.size(), 0);
    c[i] = 1;
    return index(c);
  }

  std::uint64_t element_order(std::size_t x) const {
    const Coords c = coords(x);
    std::uint64_t o = 1;
    for (std::size_t i = 0; i < c.size(); ++i) o = std::lcm(o, factors_[i] / std::gcd(factors_[i], c[i]));
    return o;
  }

  friend bool operator==(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) { return a.factors_ == b.factors_; }

 private:
  std::vector<std::uint64_t> factors_;
  std::size_t size_ = 1;
};

/// A subgroup of a FiniteAbelianGroup.
class SubgroupAb {
 public:
  static SubgroupAb whole(const FiniteAbelianGroup& g) { return SubgroupAb(g, std::vector<bool>(g.size(), true)); }
  static SubgroupAb trivial(const FiniteAbelianGroup& g) { return generated(g, {}); }

  static SubgroupAb generated(const FiniteAbelianGroup& g, const std::vector<std::size_t>& gens) {
    std::vector<bool> mask(g.size(), false);
    mask[0] = true;
    std::vector<std::size_t> queue{0};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (auto s : gens) {
        std::size_t y = g.add(queue[head], s);
        if (!mask[y]) {
          mask[y] = true;
          queue.push_back(y);
        }
      }
    }
    return SubgroupAb(g, std::move(mask));
  }

  const FiniteAbelianGroup& parent() const { return parent_; }
  bool contains(std::size_t x) const { return mask_[x]; }
  std::size_t size() const { return members_.size(); }
  std::size_t index() const { return parent_.size() / members_.size(); }
  const std::vector<std::size_t>& members() const { return members_; }
  bool is_whole() const { return size() == parent_.size(); }

  /// A small generating set, chosen greedily in index order.
  std::vector<std::size_t> generators() const {
    std::vector<std::size_t> gens;
    SubgroupAb span = trivial(parent_);
    for (auto x : members_) {
      if (span.contains(x)) continue;
      gens.push_back(x);
      span = generated(parent_, gens);
    }
    return gens;
  }

  SubgroupAb plus(std::size_t x) const {
    auto gens = generators();
    gens.push_back(x);
    return generated(parent_, gens);
  }

  friend bool operator==(const SubgroupAb& a, const SubgroupAb& b) { return a.mask_ == b.mask_; }

 private:
  SubgroupAb(FiniteAbelianGroup parent, std::vector<bool> mask) : parent_(std::move(parent)), mask_(std::move(mask)) {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i]) members_.push_back(i);
  }

  FiniteAbelianGroup parent_;
  std::vector<bool> mask_;
  std::vector<std::size_t> members_;
};

/// phi : A x B -> C given on generator pairs, extended bilinearly.
class BilinearMap {
 public:
  /// tensor[i][j] = phi(e_i, f_j) in C-coordinates.
  BilinearMap(FiniteAbelianGroup a, FiniteAbelianGroup b, FiniteAbelianGroup c, std::vector<std::vector<Coords>> tensor,
              std::size_t pair_cap = kDefaultPairCap)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), tensor_(std::move(tensor)) {
    if (a_.size() * b_.size() > pair_cap) throw DomainError("|A||B| exceeds the pair cap");
    if (tensor_.size() != a_.rank()) throw DomainError("tensor has wrong number of rows");
    for (std::size_t i = 0; i < a_.rank(); ++i) {
      if (tensor_[i].size() != b_.rank()) throw DomainError("tensor has wrong number of columns");
      for (std::size_t j = 0; j < b_.rank(); ++j) {
        auto& v = tensor_[i][j];
        if (v.size() != c_.rank()) throw DomainError("tensor entry has wrong number of coordinates");
        for (std::size_t k = 0; k < v.size(); ++k) v[k] %= c_.factors()[k];
        const std::uint64_t o = c_.element_order(c_.index(v));
        if (std::gcd(a_.factors()[i], b_.factors()[j]) % o != 0)
          throw DomainError("phi(e" + std::to_string(i) + ",f" + std::to_string(j) +
                            ") has order not dividing gcd of generator orders");
      }
    }
    values_.resize(a_.size() * b_.size());
    for (std::size_t x = 0; x < a_.size(); ++x) {
      const Coords ca = a_.coords(x);
      for (std::size_t y = 0; y < b_.size(); ++y) {
        const Coords cb = b_.coords(y);
        Coords out(c_.rank(), 0);
        for (std::size_t i = 0; i < ca.size(); ++i) {
          if (ca[i] == 0) continue;
          for (std::size_t j = 0; j < cb.size(); ++j) {
            const std::uint64_t s = ca[i] * cb[j];
            for (std::size_t k = 0; k < out.size(); ++k)
              out[k] = (out[k] + s % c_.factors()[k] * tensor_[i][j][k]) % c_.factors()[k];
          }
        }
        values_[x * b_.size() + y] = c_.index(out);
      }
    }
  }

  /// Multiplication Z/n x Z/n -> Z/n.
  static BilinearMap multiplication(std::uint64_t n) {
    FiniteAbelianGroup z({n});
    return BilinearMap(z, z, z, {{{1}}});
  }

  /// The zero map A x B -> C.
  static BilinearMap zero(FiniteAbelianGroup a, FiniteAbelianGroup b, FiniteAbelianGroup c) {
    std::vector<std::vector<Coords>> t(a.rank(), std::vector<Coords>(b.rank(), Coords(c.rank(), 0)));
    return BilinearMap(std::move(a), std::move(b), std::move(c), std::move(t));
  }

  /// Map file: "A: d1 d2 ...", "B: ...", "C: ...", then "i j c1 c2 ..." per
  /// generator pair; omitted pairs are zero.
  static BilinearMap parse(std::istream& in) {
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      lines.push_back(line);
    }
    if (lines.size() < 3) throw ParseError("map file: expected A:, B: and C: header lines");
    auto header = [&](std::size_t k, const char* tag) {
      std::istringstream ls(lines[k]);
      std::string t;
      ls >> t;
      if (t != std::string(tag) + ":") throw ParseError("map file: line " + std::to_string(k + 1) + " must start with '" + tag + ":'");
      std::vector<std::uint64_t> f;
      std::string tok;
      while (ls >> tok) f.push_back(parse_uint(tok));
      try {
        return FiniteAbelianGroup(std::move(f));
      } catch (const DomainError& e) {
        throw ParseError(std::string("map file: ") + e.what());
      }
    };
    FiniteAbelianGroup a = header(0, "A"), b = header(1, "B"), c = header(2, "C");
    std::vector<std::vector<Coords>> t(a.rank(), std::vector<Coords>(b.rank(), Coords(c.rank(), 0)));
    for (std::size_t k = 3; k < lines.size(); ++k) {
      std::istringstream ls(lines[k]);
      std::vector<std::uint64_t> nums;
      std::string tok;
      while (ls >> tok) nums.push_back(parse_uint(tok));
      if (nums.size() != 2 + c.rank()) throw ParseError("map file: line " + std::to_string(k + 1) + " has wrong arity");
      if (nums[0] >= a.rank() || nums[1] >= b.rank()) throw ParseError("map file: generator index out of range");
      t[nums[0]][nums[1]] = Coords(nums.begin() + 2, nums.end());
    }
    return BilinearMap(std::move(a), std::move(b), std::move(c), std::move(t));
  }

  const FiniteAbelianGroup& domain_a() const { return a_; }
  const FiniteAbelianGroup& domain_b() const { return b_; }
  const FiniteAbelianGroup& codomain() const { return c_; }
  const std::vector<std::vector<Coords>>& tensor() const { return tensor_; }

  /// phi(a,b) as a codomain index.
  std::size_t operator()(std::size_t a, std::size_t b) const { return values_[a * b_.size() + b]; }

 private:
  static std::uint64_t parse_uint(const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("map file: bad integer '" + tok + "'");
    return std::stoull(tok);
  }

  FiniteAbelianGroup a_, b_, c_;
  std::vector<std::vector<Coords>> tensor_;
  std::vector<std::size_t> values_;
};

inline std::uint64_t zero_pair_count(const BilinearMap& phi) {
  std::uint64_t n = 0;
  for (std::size_t a = 0; a < phi.domain_a().size(); ++a)
    for (std::size_t b = 0; b < phi.domain_b().size(); ++b) n += phi(a, b) == 0;
  return n;
}

/// Pr(phi) = P(phi(a,b) = 0).
inline Rational pr_zero(const BilinearMap& phi) {
  return Rational(static_cast<std::int64_t>(zero_pair_count(phi)),
                  static_cast<std::int64_t>(phi.domain_a().size() * phi.domain_b().size()));
}

/// phi(A',B'): the subgroup of C generated by the values on A' x B'.
inline SubgroupAb image_subgroup(const BilinearMap& phi, const SubgroupAb& a, const SubgroupAb& b) {
  std::set<std::size_t> vals;
  for (auto x : a.members())
    for (auto y : b.members()) vals.insert(phi(x, y));
  return SubgroupAb::generated(phi.codomain(), {vals.begin(), vals.end()});
}

namespace detail {

// One term |C'|.[A':A'_gamma] per character gamma of C' = image, where
// A'_gamma = { a in A' : gamma(phi(a, B')) = 1 }. Characters of C' are the
// restrictions of characters of C, deduplicated by their phases on
// generators of C'.
inline EgyptianRep character_sum_terms(const BilinearMap& phi, const SubgroupAb& a, const SubgroupAb& b,
                                       const SubgroupAb& c) {
  const auto& cod = phi.codomain();
  const auto c_gens = c.generators();
  const auto b_gens = b.generators();
  std::set<std::vector<std::uint64_t>> seen;
  std::vector<BigInt> dens;
  for (const auto& gamma : characters(cod.factors())) {
    std::vector<std::uint64_t> signature;
    for (auto g : c_gens) signature.push_back(gamma.phase(cod.coords(g)));
    if (!seen.insert(signature).second) continue;
    std::size_t kernel = 0;
    for (auto x : a.members()) {
      bool ok = true;
      for (auto y : b_gens) {
        if (!gamma.kernel_contains(cod.coords(phi(x, y)))) {
          ok = false;
          break;
        }
      }
      kernel += ok;
    }
    ensure(a.size() % kernel == 0, "A_gamma is not a subgroup");
    dens.emplace_back(c.size() * (a.size() / kernel));
  }
  ensure(seen.size() == c.size(), "restricted character count differs from |C'|");
  return EgyptianRep(std::move(dens));
}

inline Rational restricted_pr(const BilinearMap& phi, const SubgroupAb& a, const SubgroupAb& b) {
  std::int64_t z = 0;
  for (auto x : a.members())
    for (auto y : b.members()) z += phi(x, y) == 0;
  return Rational(z, static_cast<std::int64_t>(a.size() * b.size()));
}

}  // namespace detail

/// Pr(phi) as a sum of at most |C| unit fractions, one per character of C.
inline EgyptianRep egyptian_decomposition_bilinear(const BilinearMap& phi) {
  EgyptianRep rep = detail::character_sum_terms(phi, SubgroupAb::whole(phi.domain_a()),
                                                SubgroupAb::whole(phi.domain_b()), SubgroupAb::whole(phi.codomain()));
  detail::ensure(rep.value() == pr_zero(phi), "bilinear decomposition does not sum to Pr(phi)");
  detail::ensure(rep.size() <= phi.codomain().size(), "bilinear decomposition longer than |C|");
  return rep;
}

/// |{(a,b) outside A' x B' : phi(a,b) in phi(A',B')}|.
inline std::uint64_t exceptional_pair_count(const BilinearMap& phi, const SubgroupAb& a, const SubgroupAb& b) {
  const SubgroupAb img = image_subgroup(phi, a, b);
  std::uint64_t n = 0;
  for (std::size_t x = 0; x < phi.domain_a().size(); ++x)
    for (std::size_t y = 0; y < phi.domain_b().size(); ++y)
      if (!(a.contains(x) && b.contains(y)) && img.contains(phi(x, y))) ++n;
  return n;
}

struct NeumannBilinearResult {
  SubgroupAb a_prime;
  SubgroupAb b_prime;
  SubgroupAb image;
  bool hypothesis_held = false;
};

/// A' = <x : |ker phi(x,.)| >= (eps/2)|B|>, B' symmetrically, and phi(A',B').
inline NeumannBilinearResult neumann_subgroups_bilinear(const BilinearMap& phi, const Rational& eps) {
  if (eps <= Rational(0) || eps >= Rational(1)) throw DomainError("neumann_subgroups_bilinear: eps must lie in (0,1)");
  const std::size_t na = phi.domain_a().size(), nb = phi.domain_b().size();
  const Rational half = eps / Rational(2);
  std::vector<std::size_t> xs, ys;
  for (std::size_t x = 0; x < na; ++x) {
    std::int64_t ker = 0;
    for (std::size_t y = 0; y < nb; ++y) ker += phi(x, y) == 0;
    if (Rational(ker) >= half * Rational(static_cast<std::int64_t>(nb))) xs.push_back(x);
  }
  for (std::size_t y = 0; y < nb; ++y) {
    std::int64_t ker = 0;
    for (std::size_t x = 0; x < na; ++x) ker += phi(x, y) == 0;
    if (Rational(ker) >= half * Rational(static_cast<std::int64_t>(na))) ys.push_back(y);
  }
  SubgroupAb a = SubgroupAb::generated(phi.domain_a(), xs);
  SubgroupAb b = SubgroupAb::generated(phi.domain_b(), ys);
  SubgroupAb img = image_subgroup(phi, a, b);
  const bool held = pr_zero(phi) >= eps;
  if (held) {
    detail::ensure(Rational(static_cast<std::int64_t>(a.index())) * eps <= Rational(2), "[A:A'] exceeds 2/eps");
    detail::ensure(Rational(static_cast<std::int64_t>(b.index())) * eps <= Rational(2), "[B:B'] exceeds 2/eps");
  }
  return {std::move(a), std::move(b), std::move(img), held};
}

struct BilinearStep {
  std::size_t step = 0;
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  std::size_t image_size = 0;
  std::uint64_t exceptional_pairs = 0;
};

struct AmplifiedBilinearResult {
  SubgroupAb a_prime;
  SubgroupAb b_prime;
  std::vector<BilinearStep> trace;
};

/// Enlarges A', B' (starting from the Neumann subgroups for eta(1)) until at
/// most eta(|phi(A',B')|).|A||B| pairs outside A' x B' map into phi(A',B').
inline AmplifiedBilinearResult amplified_neumann_bilinear(const BilinearMap& phi, const EtaFunction& eta) {
  const auto& ga = phi.domain_a();
  const auto& gb = phi.domain_b();
  const Rational total(static_cast<std::int64_t>(ga.size() * gb.size()));
  if (pr_zero(phi) <= eta(1)) return {SubgroupAb::trivial(ga), SubgroupAb::trivial(gb), {}};

  auto start = neumann_subgroups_bilinear(phi, eta(1));
  SubgroupAb a = std::move(start.a_prime), b = std::move(start.b_prime);
  std::vector<BilinearStep> trace;
  for (std::size_t step = 1;; ++step) {
    const SubgroupAb img = image_subgroup(phi, a, b);
    const Rational e = eta(img.size());
    std::uint64_t exceptional = 0;
    for (std::size_t x = 0; x < ga.size(); ++x)
      for (std::size_t y = 0; y < gb.size(); ++y)
        if (!(a.contains(x) && b.contains(y)) && img.contains(phi(x, y))) ++exceptional;
    trace.push_back({step, a.size(), b.size(), img.size(), exceptional});
    if (Rational(static_cast<std::int64_t>(exceptional)) <= e * total) break;

    const Rational needed = e * Rational(static_cast<std::int64_t>(a.size() * b.size()));
    auto block_count = [&](std::size_t x, std::size_t y) {
      std::int64_t c = 0;
      for (auto u : a.members())
        for (auto v : b.members()) c += img.contains(phi(ga.add(x, u), gb.add(y, v)));
      return Rational(c);
    };
    bool enlarged = false;
    for (int pass = 0; pass < 2 && !enlarged; ++pass) {
      for (std::size_t x = 0; x < ga.size() && !enlarged; ++x) {
        if (pass == 0 ? a.contains(x) : !a.contains(x)) continue;
        for (std::size_t y = 0; y < gb.size() && !enlarged; ++y) {
          if (pass == 1 && b.contains(y)) continue;
          if (block_count(x, y) < needed) continue;
          if (pass == 0)
            a = a.plus(x);
          else
            b = b.plus(y);
          enlarged = true;
        }
      }
    }
    if (!enlarged) throw WitnessNotFound("bilinear amplification: no pair meets the averaged threshold");
    const auto& prev = trace.back();
    detail::ensure(a.index() * b.index() < (ga.size() / prev.a_size) * (gb.size() / prev.b_size),
                   "index product did not decrease");
  }
  const SubgroupAb img = image_subgroup(phi, a, b);
  detail::ensure(Rational(static_cast<std::int64_t>(exceptional_pair_count(phi, a, b))) <= eta(img.size()) * total,
                 "too many exceptional pairs");
  return {std::move(a), std::move(b), std::move(trace)};
}

struct BilinearCertificate {
  SubgroupAb a_prime;
  SubgroupAb b_prime;
  std::size_t image_size = 0;
  Rational q;
  EgyptianRep decomposition;
  Rational epsilon;
  EtaFunction eta;
  Rational pr_total;
  std::vector<BilinearStep> trace;
};

/// Pr(phi) = Pr(phi on A' x B')/([A:A'][B:B']) + epsilon, the first term
/// decomposed over the characters of phi(A',B').
inline BilinearCertificate bilinear_certificate(const BilinearMap& phi, const EtaFunction& eta) {
  auto amp = amplified_neumann_bilinear(phi, eta);
  const SubgroupAb img = image_subgroup(phi, amp.a_prime, amp.b_prime);
  const std::size_t scale = amp.a_prime.index() * amp.b_prime.index();
  const Rational restricted = detail::restricted_pr(phi, amp.a_prime, amp.b_prime);
  const EgyptianRep terms = detail::character_sum_terms(phi, amp.a_prime, amp.b_prime, img);
  detail::ensure(terms.value() == restricted, "restricted decomposition does not sum to Pr(phi on A' x B')");
  detail::ensure(terms.size() <= img.size(), "restricted decomposition longer than |phi(A',B')|");

  const Rational pr = pr_zero(phi);
  const Rational q = restricted / Rational(static_cast<std::int64_t>(scale));
  BilinearCertificate cert{amp.a_prime, amp.b_prime, img.size(), q, terms.scaled(BigInt(scale)),
                           pr - q,      eta,          pr,         std::move(amp.trace)};
  detail::ensure(cert.epsilon >= Rational(0), "bilinear certificate: negative epsilon");
  std::int64_t outside = 0;
  for (std::size_t x = 0; x < phi.domain_a().size(); ++x)
    for (std::size_t y = 0; y < phi.domain_b().size(); ++y)
      outside += !(cert.a_prime.contains(x) && cert.b_prime.contains(y)) && phi(x, y) == 0;
  const auto total = static_cast<std::int64_t>(phi.domain_a().size() * phi.domain_b().size());
  detail::ensure(cert.epsilon * Rational(total) == Rational(outside),
                 "bilinear certificate: epsilon.|A||B| != zero pairs outside A' x B'");
  return cert;
}

inline nlohmann::json to_json(const BilinearCertificate& c) {
  nlohmann::json j;
  j["pr"] = c.pr_total.str();
  j["q"] = c.q.str();
  j["epsilon"] = c.epsilon.str();
  j["A_prime_members"] = c.a_prime.members();
  j["B_prime_members"] = c.b_prime.members();
  j["image_size"] = c.image_size;
  j["decomposition"] = detail::denominators_json(c.decomposition);
  auto eta = nlohmann::json::array();
  for (const auto& e : c.eta.table()) eta.push_back(e.str());
  j["eta"] = eta;
  auto trace = nlohmann::json::array();
  for (const auto& s : c.trace)
    trace.push_back({{"step", s.step},
                     {"A_size", s.a_size},
                     {"B_size", s.b_size},
                     {"image_size", s.image_size},
                     {"exceptional_pairs", s.exceptional_pairs}});
  j["trace"] = trace;
  return j;
}

}  // namespace cprob
