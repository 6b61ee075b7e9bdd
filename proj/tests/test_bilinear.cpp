#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cprob/bilinear.hpp"

using namespace cprob;

namespace {

Rational R(std::int64_t a, std::int64_t b) { return Rational(a, b); }

std::vector<BigInt> dens(std::initializer_list<int> xs) { return {xs.begin(), xs.end()}; }

using Factors = std::vector<std::uint64_t>;

BilinearMap parse_map(const std::string& text) {
  std::istringstream in(text);
  return BilinearMap::parse(in);
}

// Test maps beyond plain multiplication.
std::vector<BilinearMap> test_maps() {
  std::vector<BilinearMap> maps;
  for (std::uint64_t n : {2, 3, 4, 5, 6}) maps.push_back(BilinearMap::multiplication(n));
  maps.push_back(BilinearMap::zero(FiniteAbelianGroup(Factors{2, 2}), FiniteAbelianGroup(Factors{2}),
                                   FiniteAbelianGroup(Factors{4})));
  // symplectic form on (Z/2)^2 x (Z/2)^2 -> Z/2
  maps.push_back(parse_map("A: 2 2\nB: 2 2\nC: 2\n0 1 1\n1 0 1\n"));
  // dot product (Z/3)^2 x (Z/3)^2 -> Z/3
  maps.push_back(parse_map("A: 3 3\nB: 3 3\nC: 3\n0 0 1\n1 1 1\n"));
  // (Z/2)^2 x (Z/2)^2 -> (Z/2)^2, a coordinatewise product
  maps.push_back(parse_map("A: 2 2\nB: 2 2\nC: 2 2\n0 0 1 0\n1 1 0 1\n"));
  // Z/4 x Z/2 -> Z/4, (a, b) -> 2ab
  maps.push_back(parse_map("A: 4\nB: 2\nC: 4\n0 0 2\n"));
  // Z/2 x Z/4 x Z/4 -> Z/4, mixed orders
  maps.push_back(parse_map("A: 2 4\nB: 4\nC: 2 4\n0 0 1 2\n1 0 0 1\n"));
  return maps;
}

}  // namespace

TEST(FiniteAbelianGroup, CoordinatesAndArithmetic) {
  FiniteAbelianGroup g(Factors{2, 4});
  EXPECT_EQ(g.size(), 8u);
  EXPECT_EQ(g.rank(), 2u);
  EXPECT_EQ(g.coords(g.index(Coords{1, 3})), (Coords{1, 3}));
  EXPECT_EQ(g.add(g.index(Coords{1, 3}), g.index(Coords{1, 2})), g.index(Coords{0, 1}));
  EXPECT_EQ(g.neg(g.index(Coords{1, 1})), g.index(Coords{1, 3}));
  EXPECT_EQ(g.element_order(g.index(Coords{1, 2})), 2u);
  EXPECT_EQ(g.element_order(g.generator(1)), 4u);
  EXPECT_EQ(FiniteAbelianGroup().size(), 1u);
}

TEST(FiniteAbelianGroup, RejectsBadFactors) {
  EXPECT_THROW(FiniteAbelianGroup(Factors{1}), DomainError);
  EXPECT_THROW(FiniteAbelianGroup(Factors{4, 2}), DomainError);
  EXPECT_THROW(FiniteAbelianGroup(Factors{2, 3}), DomainError);
}

TEST(SubgroupAb, GenerationAndExtension) {
  FiniteAbelianGroup g(Factors{4});
  auto two = SubgroupAb::generated(g, {2});
  EXPECT_EQ(two.members(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(two.index(), 2u);
  EXPECT_TRUE(two.plus(1).is_whole());
  EXPECT_EQ(SubgroupAb::trivial(g).size(), 1u);
}

TEST(BilinearMap, WellDefinednessChecked) {
  FiniteAbelianGroup z2(Factors{2}), z4(Factors{4});
  // phi(e, f) = 1 in Z/4 has order 4, which does not divide gcd(2, 2)
  EXPECT_THROW(BilinearMap(z2, z2, z4, {{{1}}}), DomainError);
  EXPECT_NO_THROW(BilinearMap(z2, z2, z4, {{{2}}}));
  EXPECT_THROW(BilinearMap(z2, z2, z4, {}), DomainError);
  EXPECT_THROW(BilinearMap(z4, z4, z4, {{{1}}}, 15), DomainError);
}

TEST(BilinearMap, IsBilinearOnRandomTriples) {
  std::mt19937 rng(5);
  for (const auto& phi : test_maps()) {
    const auto &a = phi.domain_a(), &b = phi.domain_b(), &c = phi.codomain();
    for (int i = 0; i < 200; ++i) {
      std::size_t x = rng() % a.size(), x2 = rng() % a.size(), y = rng() % b.size(), y2 = rng() % b.size();
      EXPECT_EQ(phi(a.add(x, x2), y), c.add(phi(x, y), phi(x2, y)));
      EXPECT_EQ(phi(x, b.add(y, y2)), c.add(phi(x, y), phi(x, y2)));
    }
  }
}

TEST(BilinearMap, FileFormat) {
  auto phi = parse_map("# product\nA: 3\nB: 3\nC: 3\n0 0 1\n");
  EXPECT_EQ(pr_zero(phi), R(5, 9));
  auto zero = parse_map("A: 2\nB: 2\nC: 2\n");
  EXPECT_EQ(pr_zero(zero), R(1, 1));
  EXPECT_THROW(parse_map("A: 2\nB: 2\n"), ParseError);
  EXPECT_THROW(parse_map("X: 2\nB: 2\nC: 2\n"), ParseError);
  EXPECT_THROW(parse_map("A: 2\nB: 2\nC: 2\n0 0\n"), ParseError);
  EXPECT_THROW(parse_map("A: 2\nB: 2\nC: 2\n1 0 1\n"), ParseError);
  EXPECT_THROW(parse_map("A: 2\nB: 2\nC: 2\n0 0 x\n"), ParseError);
  EXPECT_THROW(parse_map("A: 4 2\nB: 2\nC: 2\n"), ParseError);
}

TEST(PrZero, Examples) {
  EXPECT_EQ(pr_zero(BilinearMap::zero(FiniteAbelianGroup(Factors{3}), FiniteAbelianGroup(Factors{2}),
                                      FiniteAbelianGroup(Factors{5}))),
            R(1, 1));
  EXPECT_EQ(pr_zero(BilinearMap::multiplication(2)), R(3, 4));
  EXPECT_EQ(pr_zero(BilinearMap::multiplication(3)), R(5, 9));
}

TEST(PrZero, MatchesDirectCount) {
  for (std::uint64_t p : {2, 3, 5, 7}) {
    std::uint64_t zeros = 0;
    for (std::uint64_t a = 0; a < p; ++a)
      for (std::uint64_t b = 0; b < p; ++b) zeros += (a * b) % p == 0;
    EXPECT_EQ(pr_zero(BilinearMap::multiplication(p)), R(zeros, p * p));
    EXPECT_EQ(pr_zero(BilinearMap::multiplication(p)), R(2 * p - 1, p * p));
  }
}

TEST(BilinearDecomposition, Examples) {
  auto zero = BilinearMap::zero(FiniteAbelianGroup(Factors{2}), FiniteAbelianGroup(Factors{2}), FiniteAbelianGroup());
  EXPECT_EQ(egyptian_decomposition_bilinear(zero).denominators(), dens({1}));
  EXPECT_EQ(egyptian_decomposition_bilinear(BilinearMap::multiplication(2)).denominators(), dens({2, 4}));
  EXPECT_EQ(egyptian_decomposition_bilinear(BilinearMap::multiplication(3)).denominators(), dens({3, 9, 9}));
}

TEST(BilinearDecomposition, SumAndLengthOnTestMaps) {
  for (const auto& phi : test_maps()) {
    auto rep = egyptian_decomposition_bilinear(phi);
    EXPECT_EQ(rep.value(), pr_zero(phi));
    EXPECT_LE(rep.size(), phi.codomain().size());
  }
}

TEST(ImageSubgroup, Examples) {
  auto zero = BilinearMap::zero(FiniteAbelianGroup(Factors{3}), FiniteAbelianGroup(Factors{3}),
                                FiniteAbelianGroup(Factors{3}));
  EXPECT_EQ(image_subgroup(zero, SubgroupAb::whole(zero.domain_a()), SubgroupAb::whole(zero.domain_b())).size(), 1u);
  auto m3 = BilinearMap::multiplication(3);
  EXPECT_TRUE(image_subgroup(m3, SubgroupAb::whole(m3.domain_a()), SubgroupAb::whole(m3.domain_b())).is_whole());
  auto m4 = BilinearMap::multiplication(4);
  auto img = image_subgroup(m4, SubgroupAb::generated(m4.domain_a(), {2}), SubgroupAb::whole(m4.domain_b()));
  EXPECT_EQ(img.members(), (std::vector<std::size_t>{0, 2}));
}

TEST(ImageSubgroup, AtMostTwoToTheDistinctValues) {
  for (const auto& phi : test_maps()) {
    auto a = SubgroupAb::whole(phi.domain_a()), b = SubgroupAb::whole(phi.domain_b());
    std::set<std::size_t> values;
    for (auto x : a.members())
      for (auto y : b.members()) values.insert(phi(x, y));
    EXPECT_LE(image_subgroup(phi, a, b).size(), std::size_t{1} << std::min<std::size_t>(values.size(), 62));
  }
}

TEST(ExceptionalPairs, Examples) {
  auto m2 = BilinearMap::multiplication(2);
  EXPECT_EQ(exceptional_pair_count(m2, SubgroupAb::whole(m2.domain_a()), SubgroupAb::whole(m2.domain_b())), 0u);
  EXPECT_EQ(exceptional_pair_count(m2, SubgroupAb::trivial(m2.domain_a()), SubgroupAb::trivial(m2.domain_b())), 2u);
  auto m3 = BilinearMap::multiplication(3);
  // zero pairs outside Z/3 x {0}: (0, 1) and (0, 2)
  EXPECT_EQ(exceptional_pair_count(m3, SubgroupAb::whole(m3.domain_a()), SubgroupAb::trivial(m3.domain_b())), 2u);
}

TEST(NeumannBilinear, Examples) {
  auto zero = BilinearMap::zero(FiniteAbelianGroup(Factors{2}), FiniteAbelianGroup(Factors{4}),
                                FiniteAbelianGroup(Factors{2}));
  auto r = neumann_subgroups_bilinear(zero, R(1, 2));
  EXPECT_TRUE(r.a_prime.is_whole());
  EXPECT_TRUE(r.b_prime.is_whole());
  EXPECT_EQ(r.image.size(), 1u);

  auto m3 = BilinearMap::multiplication(3);
  auto r3 = neumann_subgroups_bilinear(m3, R(1, 3));
  EXPECT_TRUE(r3.a_prime.is_whole());
  EXPECT_TRUE(r3.b_prime.is_whole());
  EXPECT_EQ(r3.image.size(), 3u);

  auto m2 = BilinearMap::multiplication(2);
  auto r2 = neumann_subgroups_bilinear(m2, R(3, 4));
  EXPECT_TRUE(r2.a_prime.is_whole());
  EXPECT_TRUE(r2.b_prime.is_whole());
  EXPECT_TRUE(r2.hypothesis_held);

  EXPECT_THROW(neumann_subgroups_bilinear(m2, R(0, 1)), DomainError);
  EXPECT_THROW(neumann_subgroups_bilinear(m2, R(3, 2)), DomainError);
}

TEST(NeumannBilinear, IndexBoundWheneverHypothesisHolds) {
  for (const auto& phi : test_maps()) {
    for (auto eps : {R(1, 10), R(1, 3), R(1, 2), R(3, 4), R(9, 10)}) {
      auto r = neumann_subgroups_bilinear(phi, eps);
      EXPECT_EQ(r.hypothesis_held, pr_zero(phi) >= eps);
      if (r.hypothesis_held) {
        EXPECT_LE(Rational(static_cast<std::int64_t>(r.a_prime.index())) * eps, R(2, 1));
        EXPECT_LE(Rational(static_cast<std::int64_t>(r.b_prime.index())) * eps, R(2, 1));
      }
    }
  }
}

TEST(AmplifiedBilinear, Examples) {
  auto zero = BilinearMap::zero(FiniteAbelianGroup(Factors{2}), FiniteAbelianGroup(Factors{2}),
                                FiniteAbelianGroup(Factors{2}));
  auto tenth = EtaFunction::constant(R(1, 10));
  auto r = amplified_neumann_bilinear(zero, tenth);
  EXPECT_TRUE(r.a_prime.is_whole());
  EXPECT_TRUE(r.b_prime.is_whole());
  EXPECT_EQ(exceptional_pair_count(zero, r.a_prime, r.b_prime), 0u);
  EXPECT_EQ(r.trace.size(), 1u);

  auto zero4 = BilinearMap::zero(FiniteAbelianGroup(Factors{2}), FiniteAbelianGroup(Factors{2}),
                                 FiniteAbelianGroup(Factors{4}));
  auto r4 = amplified_neumann_bilinear(zero4, tenth);
  EXPECT_TRUE(r4.a_prime.is_whole());
  EXPECT_EQ(image_subgroup(zero4, r4.a_prime, r4.b_prime).size(), 1u);

  auto m3 = BilinearMap::multiplication(3);
  auto r3 = amplified_neumann_bilinear(m3, tenth);
  EXPECT_TRUE(r3.a_prime.is_whole());
  EXPECT_TRUE(r3.b_prime.is_whole());
  EXPECT_EQ(exceptional_pair_count(m3, r3.a_prime, r3.b_prime), 0u);
}

TEST(AmplifiedBilinear, PostconditionsOnTestMaps) {
  for (const auto& phi : test_maps()) {
    for (const auto& eta : {EtaFunction(), EtaFunction::constant(R(1, 10)), EtaFunction({R(1, 2), R(1, 3), R(1, 5)})}) {
      auto r = amplified_neumann_bilinear(phi, eta);
      const auto img = image_subgroup(phi, r.a_prime, r.b_prime).size();
      const auto total = static_cast<std::int64_t>(phi.domain_a().size() * phi.domain_b().size());
      EXPECT_LE(Rational(static_cast<std::int64_t>(exceptional_pair_count(phi, r.a_prime, r.b_prime))),
                eta(img) * Rational(total));
      for (std::size_t i = 1; i < r.trace.size(); ++i) {
        const auto prev = (phi.domain_a().size() / r.trace[i - 1].a_size) * (phi.domain_b().size() / r.trace[i - 1].b_size);
        const auto cur = (phi.domain_a().size() / r.trace[i].a_size) * (phi.domain_b().size() / r.trace[i].b_size);
        EXPECT_LT(cur, prev);
      }
    }
  }
}

TEST(BilinearCertificate, Examples) {
  auto zero = BilinearMap::zero(FiniteAbelianGroup(Factors{2}), FiniteAbelianGroup(Factors{3}),
                                FiniteAbelianGroup(Factors{2}));
  auto cz = bilinear_certificate(zero, EtaFunction());
  EXPECT_EQ(cz.q, R(1, 1));
  EXPECT_EQ(cz.epsilon, R(0, 1));
  EXPECT_EQ(cz.decomposition.denominators(), dens({1}));

  auto m3 = BilinearMap::multiplication(3);
  auto c = bilinear_certificate(m3, EtaFunction::constant(R(1, 10)));
  EXPECT_EQ(c.q, R(5, 9));
  EXPECT_EQ(c.epsilon, R(0, 1));
  EXPECT_EQ(c.decomposition.denominators(), dens({3, 9, 9}));

  auto big = bilinear_certificate(m3, EtaFunction::constant(R(3, 5)));
  EXPECT_EQ(big.a_prime.size(), 1u);
  EXPECT_EQ(big.b_prime.size(), 1u);
  EXPECT_EQ(big.q, R(1, 9));
  EXPECT_EQ(big.epsilon, R(4, 9));
  EXPECT_EQ(big.decomposition.denominators(), dens({9}));
}

TEST(BilinearCertificate, IdentityOnTestMaps) {
  for (const auto& phi : test_maps()) {
    for (const auto& eta : {EtaFunction(), EtaFunction::constant(R(3, 5))}) {
      auto c = bilinear_certificate(phi, eta);
      EXPECT_EQ(c.pr_total, c.q + c.epsilon);
      EXPECT_GE(c.epsilon, R(0, 1));
      EXPECT_EQ(c.decomposition.value(), c.q);
      EXPECT_LE(c.decomposition.size(), c.image_size);
    }
  }
}

TEST(BilinearCertificate, Json) {
  auto j = to_json(bilinear_certificate(BilinearMap::multiplication(3), EtaFunction::constant(R(1, 10))));
  EXPECT_EQ(j["pr"], "5/9");
  EXPECT_EQ(j["q"], "5/9");
  EXPECT_EQ(j["decomposition"], nlohmann::json::array({3, 9, 9}));
  EXPECT_EQ(j["image_size"], 3);
}
