#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cprob/abelian.hpp"
#include "cprob/egyptian.hpp"
#include "cprob/errors.hpp"
#include "cprob/group.hpp"
#include "cprob/json_util.hpp"
#include "cprob/rational.hpp"

namespace cprob {

inline std::uint64_t commuting_pair_count(const FiniteGroup& g) {
  std::uint64_t count = 0;
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < g.order(); ++y) count += g.commutes(x, y);
  return count;
}

/// Pr(G) = |{(x,y) : xy = yx}| / |G|^2.
inline Rational commuting_probability(const FiniteGroup& g) {
  const auto n = static_cast<std::int64_t>(g.order());
  return Rational(static_cast<std::int64_t>(commuting_pair_count(g)), n * n);
}

inline std::size_t conjugacy_count(const FiniteGroup& g) { return conjugacy_classes(g).size(); }

/// Unit-fraction decomposition of Pr(G) from the character sum over
/// A = [G,G] meet Z(G): one term 1/(|G/Z2|.|A|.[G:G_{y,gamma}]) for every coset
/// yZ2 and character gamma of A with gamma([G_{y,gamma}, y]) = 1, where
///   G_{y,gamma} = { x : [x,y] in A and gamma([x,z]) = 1 for all z in Z2 }.
/// The result has at most |G/Z2|.|[G,G]| terms and sums to Pr(G) exactly.
inline EgyptianRep egyptian_decomposition_group(const FiniteGroup& g) {
  const Subgroup z2 = second_center(g);
  const Subgroup derived = derived_subgroup(g);
  const Subgroup a = intersection(derived, center(g));
  const AbelianStructure structure = abelian_structure(a);
  const auto chars = characters(structure);
  const auto z2_members = z2.members();
  const std::size_t quotient = z2.index();

  std::vector<BigInt> dens;
  for (Element y : coset_representatives(z2)) {
    for (const auto& gamma : chars) {
      std::vector<bool> mask(g.order(), false);
      for (std::size_t x = 0; x < g.order(); ++x) {
        if (!a.contains(g.commutator(x, y))) continue;
        bool ok = true;
        for (auto z : z2_members) {
          if (!gamma.kernel_contains(structure.to_coords(g.commutator(x, z)))) {
            ok = false;
            break;
          }
        }
        mask[x] = ok;
      }
      Subgroup gyg = [&] {
        try {
          return Subgroup::from_mask(g, mask);
        } catch (const DomainError& e) {
          throw InternalInvariantViolation(std::string("G_{y,gamma} is not a subgroup: ") + e.what());
        }
      }();
      bool trivial_on_commutators = true;
      for (auto x : gyg.members()) {
        if (!gamma.kernel_contains(structure.to_coords(g.commutator(x, y)))) {
          trivial_on_commutators = false;
          break;
        }
      }
      if (trivial_on_commutators) dens.emplace_back(quotient * a.size() * gyg.index());
    }
  }
  EgyptianRep rep(std::move(dens));
  detail::ensure(rep.value() == commuting_probability(g), "character-sum decomposition does not sum to Pr(G)");
  detail::ensure(rep.size() <= quotient * derived.size(), "decomposition longer than |G/Z2|.|[G,G]|");
  return rep;
}

/// |{(x,y) in G^2 \ H^2 : [x,y] in [H,H]}|.
inline std::uint64_t bad_pair_count(const FiniteGroup& g, const Subgroup& h) {
  const Subgroup hh = commutator_subgroup(h, h);
  std::uint64_t count = 0;
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < g.order(); ++y)
      if (!(h.contains(x) && h.contains(y)) && hh.contains(g.commutator(x, y))) ++count;
  return count;
}

struct NeumannGroupResult {
  Subgroup h;
  Subgroup k;
  /// Pr(G) >= eps, i.e. the index and commutator bounds are promised.
  bool hypothesis_held = false;
};

/// X = { x : |C_G(x)| >= (eps/2)|G| }, K = <X>, H = C_K([K,K]).
inline NeumannGroupResult neumann_subgroup(const FiniteGroup& g, const Rational& eps) {
  if (eps <= Rational(0) || eps >= Rational(1)) throw DomainError("neumann_subgroup: eps must lie in (0,1)");
  const Rational threshold = eps / Rational(2) * Rational(static_cast<std::int64_t>(g.order()));
  std::vector<Element> x;
  for (std::size_t v = 0; v < g.order(); ++v)
    if (Rational(static_cast<std::int64_t>(centralizer(g, v).size())) >= threshold) x.push_back(v);
  Subgroup k = generated(g, x);
  Subgroup kk = commutator_subgroup(k, k);
  Subgroup h = centralizer(k, kk);
  Subgroup hh = commutator_subgroup(h, h);
  detail::ensure(is_normal(k), "Neumann K is not normal");
  detail::ensure(is_normal(h), "Neumann H is not normal");
  detail::ensure(hh.is_subset_of(centralizer(h, h)), "Neumann H is not 2-step nilpotent");
  detail::ensure(hh.is_subset_of(kk), "[H,H] not contained in [K,K]");
  return {std::move(h), std::move(k), commuting_probability(g) >= eps};
}

struct AmplificationStep {
  std::size_t step = 0;
  std::size_t k_size = 0;
  std::size_t l_size = 0;
  std::size_t commutator_kl_size = 0;
  std::uint64_t exceptional_pairs = 0;
};

struct AmplifiedGroupResult {
  Subgroup h;
  std::vector<AmplificationStep> trace;
};

/// Normal H with few pairs outside H^2 whose commutator lands in [H,H]:
/// alternately enlarges normal K, L (starting from the Neumann subgroup for
/// eta(1)) until at most eta(|[K,L]|)/2 |G|^2 pairs outside K x L have their
/// commutator in [K,L], then returns K meet L.
inline AmplifiedGroupResult amplified_neumann_group(const FiniteGroup& g, const EtaFunction& eta) {
  const auto n = static_cast<std::int64_t>(g.order());
  const Rational g2(n * n);
  if (commuting_probability(g) <= eta(1)) return {Subgroup::trivial(g), {}};

  Subgroup k = neumann_subgroup(g, eta(1)).h;
  Subgroup l = k;
  std::vector<AmplificationStep> trace;
  for (std::size_t step = 1;; ++step) {
    const Subgroup kl = commutator_subgroup(k, l);
    const Rational half_eta = eta(kl.size()) / Rational(2);
    std::uint64_t exceptional = 0;
    for (std::size_t x = 0; x < g.order(); ++x)
      for (std::size_t y = 0; y < g.order(); ++y)
        if (!(k.contains(x) && l.contains(y)) && kl.contains(g.commutator(x, y))) ++exceptional;
    trace.push_back({step, k.size(), l.size(), kl.size(), exceptional});
    if (Rational(static_cast<std::int64_t>(exceptional)) <= half_eta * g2) break;

    // witness: some coset block (xK, yL) outside K x L carries at least the
    // average share of exceptional pairs
    const Rational needed = half_eta * Rational(static_cast<std::int64_t>(k.size() * l.size()));
    const auto km = k.members(), lm = l.members();
    auto block_count = [&](Element x, Element y) {
      std::int64_t c = 0;
      for (auto a : km)
        for (auto b : lm) c += kl.contains(g.commutator(g.mul(x, a), g.mul(y, b)));
      return Rational(c);
    };
    bool enlarged = false;
    for (int pass = 0; pass < 2 && !enlarged; ++pass) {
      for (std::size_t x = 0; x < g.order() && !enlarged; ++x) {
        if (pass == 0 ? k.contains(x) : !k.contains(x)) continue;
        for (std::size_t y = 0; y < g.order() && !enlarged; ++y) {
          if (pass == 1 && l.contains(y)) continue;
          if (block_count(x, y) < needed) continue;
          if (pass == 0) {
            auto gens = k.members();
            gens.push_back(x);
            k = normal_closure(g, gens);
          } else {
            auto gens = l.members();
            gens.push_back(y);
            l = normal_closure(g, gens);
          }
          enlarged = true;
        }
      }
    }
    if (!enlarged) throw WitnessNotFound("amplification loop: no pair meets the averaged threshold");
    const auto& prev = trace.back();
    detail::ensure(k.index() * l.index() < (g.order() / prev.k_size) * (g.order() / prev.l_size),
                   "index product did not decrease");
  }

  Subgroup h = intersection(k, l);
  detail::ensure(is_normal(h), "amplified H is not normal");
  detail::ensure(commutator_subgroup(h, h).is_subset_of(commutator_subgroup(k, l)), "[K meet L, K meet L] not in [K,L]");
  const Rational bound = eta(commutator_subgroup(h, h).size()) * g2;
  detail::ensure(Rational(static_cast<std::int64_t>(bad_pair_count(g, h))) <= bound, "too many bad pairs for H");
  return {std::move(h), std::move(trace)};
}

/// Pr(G) = Pr(H)/[G:H]^2 + epsilon with an explicit unit-fraction
/// decomposition of the first term.
struct GroupCertificate {
  std::string descriptor;
  std::size_t order = 0;
  Subgroup h;
  std::size_t commutator_size = 0;
  Rational q;
  EgyptianRep decomposition;
  Rational epsilon;
  EtaFunction eta;
  Rational pr_total;
  std::vector<AmplificationStep> trace;
};

inline GroupCertificate main_certificate(const FiniteGroup& g, const EtaFunction& eta, std::string descriptor = {}) {
  AmplifiedGroupResult amp = amplified_neumann_group(g, eta);
  const Subgroup& h = amp.h;
  const FiniteGroup hg = subgroup_as_group(h);
  const auto idx = static_cast<std::int64_t>(h.index());
  const Rational pr = commuting_probability(g);
  const Rational q = commuting_probability(hg) / Rational(idx * idx);
  const EgyptianRep rep = egyptian_decomposition_group(hg).scaled(BigInt(idx * idx));
  const std::size_t comm = derived_subgroup(hg).size();

  GroupCertificate cert{std::move(descriptor), g.order(), h, comm, q, rep, pr - q, eta, pr, std::move(amp.trace)};

  detail::ensure(cert.pr_total == cert.q + cert.epsilon, "certificate: Pr != q + epsilon");
  detail::ensure(cert.epsilon >= Rational(0), "certificate: negative epsilon");
  detail::ensure(cert.decomposition.value() == cert.q, "certificate: decomposition does not sum to q");
  detail::ensure(cert.decomposition.size() <= second_center(hg).index() * comm,
                 "certificate: decomposition longer than |H/Z2(H)|.|[H,H]|");
  std::uint64_t outside = 0;
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < g.order(); ++y)
      if (!(h.contains(x) && h.contains(y)) && g.commutes(x, y)) ++outside;
  const auto n = static_cast<std::int64_t>(g.order());
  detail::ensure(cert.epsilon * Rational(n * n) == Rational(static_cast<std::int64_t>(outside)),
                 "certificate: epsilon.|G|^2 != commuting pairs outside H^2");
  return cert;
}

inline nlohmann::json to_json(const GroupCertificate& c) {
  nlohmann::json j;
  j["descriptor"] = c.descriptor;
  j["order"] = c.order;
  j["pr"] = c.pr_total.str();
  j["q"] = c.q.str();
  j["epsilon"] = c.epsilon.str();
  j["H_members"] = c.h.members();
  j["commutator_size"] = c.commutator_size;
  j["decomposition"] = detail::denominators_json(c.decomposition);
  auto eta = nlohmann::json::array();
  for (const auto& e : c.eta.table()) eta.push_back(e.str());
  j["eta"] = eta;
  auto trace = nlohmann::json::array();
  for (const auto& s : c.trace)
    trace.push_back({{"step", s.step},
                     {"K_size", s.k_size},
                     {"L_size", s.l_size},
                     {"commutator_KL_size", s.commutator_kl_size},
                     {"exceptional_pairs", s.exceptional_pairs}});
  j["trace"] = trace;
  return j;
}

}  // namespace cprob
