#include <gtest/gtest.h>

#include <cmath>

#include "symgap/error.hpp"
#include "symgap/instances.hpp"
#include "symgap/setfn.hpp"

using namespace symgap;

TEST(Phi, AlphaFamily) {
  const Phi p = Phi::alpha(0.5);
  EXPECT_DOUBLE_EQ(p(0.25), 0.5);
  EXPECT_DOUBLE_EQ(p(0.5), 1.0);
  EXPECT_DOUBLE_EQ(p(0.9), 1.0);
  EXPECT_DOUBLE_EQ(p.clamped(-0.3), 0.0);
  EXPECT_THROW(Phi::alpha(0.0), ConstructionError);
  EXPECT_THROW(Phi::alpha(1.5), ConstructionError);
}

TEST(Psi, ClosedForm) {
  const Phi p = Phi::alpha(1.0);
  EXPECT_DOUBLE_EQ(psi(p, 0.5, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(psi(p, 1.0, 0.0), 1.0);
  // inside the band only x+y matters
  EXPECT_DOUBLE_EQ(psi_tilde(p, 0.1, 0.45, 0.55), psi(p, 0.5, 0.5));
  // with φ linear, moving toward the diagonal at fixed x+y never raises ψ
  for (double x = 0.0; x <= 1.0; x += 0.05) {
    for (double y = 0.0; y <= 1.0; y += 0.05) {
      EXPECT_LE(psi_tilde(p, 0.1, x, y), psi(p, x, y) + 1e-12);
      EXPECT_DOUBLE_EQ(psi_tilde(p, 0.1, x, y), psi_tilde(p, 0.1, y, x));
    }
  }
}

TEST(SymgapValuation, MonotoneSubmodularSmall) {
  for (std::size_t s : {2u, 3u, 4u}) {
    const std::size_t m = 2 * s + 1;  // one item outside A ∪ B
    ItemSet a(m), b(m);
    for (std::size_t j = 0; j < s; ++j) {
      a.insert(j);
      b.insert(s + j);
    }
    for (double alpha : {0.3, 1.0}) {
      const ValuationOracle f = make_symgap_valuation(a, b, Phi::alpha(alpha), 0.1);
      EXPECT_TRUE(check_monotone_submodular(f).pass()) << s << " " << alpha;
    }
  }
}

TEST(SymgapValuation, PlantedSetAttainsPhiOneMinusBeta) {
  const ItemSet a = ItemSet::from_items(8, {0, 1, 2, 3});
  const ItemSet b = ItemSet::from_items(8, {4, 5, 6, 7});
  const Phi phi = Phi::alpha(1.0);
  const ValuationOracle f = make_symgap_valuation(a, b, phi, 0.1);
  EXPECT_GE(f.eval(a), phi(0.9));
}

TEST(SymgapValuation, BalancedQueriesDoNotRevealPartition) {
  // S is balanced for both partitions with |S∩A| = 3 vs 2.
  const std::size_t m = 20;
  const ItemSet s = ItemSet::from_items(m, {0, 1, 2, 10, 11});
  const ItemSet a1 = ItemSet::from_items(m, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const ItemSet b1 = ItemSet::full(m) - a1;
  const ItemSet a2 = ItemSet::from_items(m, {0, 1, 3, 4, 5, 6, 7, 8, 9, 12});
  const ItemSet b2 = ItemSet::full(m) - a2;
  const Phi phi = Phi::alpha(1.0);
  ASSERT_TRUE(balancedness(s, a1, b1, 0.25).balanced);
  ASSERT_TRUE(balancedness(s, a2, b2, 0.25).balanced);
  EXPECT_EQ(make_symgap_valuation(a1, b1, phi, 0.25).eval(s),
            make_symgap_valuation(a2, b2, phi, 0.25).eval(s));
}

TEST(Bisection, NestingAndSizes) {
  const BisectionSequence seq = sample_bisection_sequence(3, 64, 9);
  ASSERT_EQ(seq.levels.size(), 4u);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto& lv = seq.levels[j];
    EXPECT_EQ(lv.a.count(), 64u >> (3 - j));
    EXPECT_TRUE(lv.a.disjoint_from(lv.b));
    EXPECT_EQ(lv.a | lv.b, seq.parent(j));
  }
  EXPECT_EQ(sample_bisection_sequence(3, 64, 9).to_json(), seq.to_json());
  EXPECT_THROW(sample_bisection_sequence(3, 60, 1), UsageError);
}

TEST(Bisection, StandardParams) {
  const CppLevelParams p1 = CppLevelParams::standard(1);
  EXPECT_EQ(p1.m, 400u);
  EXPECT_EQ(p1.k, 200u);
  EXPECT_EQ(p1.n, 2u);
  EXPECT_DOUBLE_EQ(p1.beta, 0.1);
  const CppLevelParams p2 = CppLevelParams::standard(2);
  EXPECT_EQ(p2.m, 160000u);
  EXPECT_THROW(CppLevelParams::standard(3), UsageError);
}

TEST(BasicAuction, DesiredSetsHaveSizeMOverN) {
  const BasicAuctionInstance inst = make_basic_auction(4, 16, 0.1, 3);
  ASSERT_EQ(inst.desired_sets.size(), 4u);
  for (const auto& s : inst.desired_sets) EXPECT_EQ(s.count(), 4u);
  const auto vs = inst.valuations();
  EXPECT_DOUBLE_EQ(vs[0].eval(inst.desired_sets[0]), 4.0);
}

TEST(Balancedness, Definition) {
  const ItemSet a = ItemSet::from_items(8, {0, 1, 2, 3});
  const ItemSet b = ItemSet::from_items(8, {4, 5, 6, 7});
  const auto r = balancedness(ItemSet::from_items(8, {0, 1, 4}), a, b, 0.2);
  EXPECT_DOUBLE_EQ(r.x, 0.5);
  EXPECT_DOUBLE_EQ(r.y, 0.25);
  EXPECT_FALSE(r.balanced);
  EXPECT_TRUE(balancedness(ItemSet::from_items(8, {0, 1, 4}), a, b, 0.25).balanced);
}
