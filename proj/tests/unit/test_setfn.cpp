#include <gtest/gtest.h>

#include <cmath>

#include "symgap/error.hpp"
#include "symgap/rng.hpp"
#include "symgap/setfn.hpp"

using namespace symgap;

namespace {

// Independent exhaustive check straight from the definitions.
bool brute_monotone_submodular(const ValuationOracle& f) {
  const std::size_t m = f.ground_size();
  auto v = [&](std::uint64_t mask) { return f.function().value(ItemSet::from_mask(m, mask)); };
  if (std::abs(v(0)) > 1e-12) return false;
  for (std::uint64_t s = 0; s < (1ull << m); ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      if (s >> i & 1) continue;
      if (v(s | 1ull << i) < v(s) - 1e-9) return false;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i || (s >> j & 1)) continue;
        if (v(s | 1ull << i | 1ull << j) - v(s | 1ull << j) > v(s | 1ull << i) - v(s) + 1e-9) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST(SetFunctions, KnownValues) {
  const ItemSet s = ItemSet::from_items(4, {0, 3});
  EXPECT_DOUBLE_EQ(make_additive({1, 2, 3, 4}).eval(s), 5.0);
  EXPECT_DOUBLE_EQ(make_budget_additive({1, 1, 1, 2}, 2).eval(s), 2.0);
  EXPECT_DOUBLE_EQ(make_budget_additive({1, 1, 1, 2}, 2).eval(ItemSet::from_items(4, {0})), 1.0);
  EXPECT_DOUBLE_EQ(make_coverage({1, 2, 4}, {{0}, {1}, {0, 1}, {2}}).eval(s), 5.0);
  EXPECT_DOUBLE_EQ(make_polar(ItemSet::from_items(4, {0, 1}), 0.1).eval(s), 1.1);
  EXPECT_DOUBLE_EQ(make_single_minded(ItemSet::from_items(4, {0}), 3.0).eval(s), 3.0);
  EXPECT_DOUBLE_EQ(make_single_minded(ItemSet::from_items(4, {1}), 3.0).eval(s), 0.0);
}

TEST(SetFunctions, ConstructionErrors) {
  EXPECT_THROW(make_additive({1, -1}), ConstructionError);
  EXPECT_THROW(make_polar(ItemSet(3), 1.5), ConstructionError);
  EXPECT_THROW(make_coverage({1}, {{2}}), ConstructionError);
}

TEST(SetFunctions, ProductQueriesEachComponentOnce) {
  const ValuationOracle f1 = make_additive({0.5, 0.5});
  const ValuationOracle f2 = make_budget_additive({0.6, 0.6}, 1.0);
  const ValuationOracle g = compose_product(f1, f2);
  const ItemSet s = ItemSet::full(2);
  EXPECT_DOUBLE_EQ(g.eval(s), 1.0 - (1.0 - 1.0) * (1.0 - 1.0));
  EXPECT_EQ(f1.query_count(), 1u);
  EXPECT_EQ(f2.query_count(), 1u);
  const ItemSet one = ItemSet::from_items(2, {0});
  EXPECT_DOUBLE_EQ(g.eval(one), 1.0 - 0.5 * 0.4);
}

TEST(SetFunctions, ProductRejectsValuesAboveOne) {
  const ValuationOracle g = compose_product(make_additive({1, 1}), make_additive({0.1, 0.1}));
  EXPECT_THROW(g.eval(ItemSet::full(2)), RangeError);
}

TEST(Verifier, FindsFirstSquareViolationLexicographically) {
  const ValuationOracle sq = make_custom(4, "square", [](const ItemSet& s) {
    const double k = static_cast<double>(s.count());
    return k * k;
  });
  const StructureReport r = check_monotone_submodular(sq);
  ASSERT_FALSE(r.pass());
  const StructureViolation& v = r.violations.front();
  EXPECT_EQ(v.kind, ViolationKind::submodularity);
  EXPECT_TRUE(v.set.empty());
  EXPECT_EQ(v.i, 0u);
  EXPECT_EQ(v.j, 1u);
}

TEST(Verifier, NonMonotoneFlagged) {
  const ValuationOracle f = make_custom(2, "dip", [](const ItemSet& s) { return s.count() == 1 ? 1.0 : 0.0; });
  const StructureReport r = check_monotone_submodular(f);
  EXPECT_FALSE(r.pass());
  bool mono = false;
  for (const auto& v : r.violations) mono = mono || v.kind == ViolationKind::monotonicity;
  EXPECT_TRUE(mono);
}

TEST(Verifier, RefusesLargeExhaustive) {
  Weights w(25, 1.0);
  EXPECT_THROW(check_monotone_submodular(make_additive(w)), UsageError);
  VerifyOptions opt;
  opt.sampled = true;
  opt.samples = 2000;
  EXPECT_TRUE(check_monotone_submodular(make_additive(w), opt).pass());
}

TEST(Verifier, AgreesWithBruteForceOnRandomFunctions) {
  Rng rng(11);
  for (int t = 0; t < 40; ++t) {
    const std::size_t m = 2 + rng.below(5);
    ValuationOracle f;
    switch (t % 4) {
      case 0: {
        Weights w(m);
        for (double& x : w) x = rng.uniform();
        f = make_budget_additive(w, rng.uniform(0.2, 2.0));
        break;
      }
      case 1: {
        std::vector<std::vector<std::size_t>> cov(m);
        for (auto& c : cov) {
          for (std::size_t u = 0; u < 4; ++u) {
            if (rng.bernoulli(0.5)) c.push_back(u);
          }
        }
        f = make_coverage({0.1, 0.2, 0.3, 0.4}, cov);
        break;
      }
      case 2: {
        // random set function, usually not submodular
        std::vector<double> table(1u << m);
        table[0] = 0.0;
        for (std::size_t i = 1; i < table.size(); ++i) table[i] = rng.uniform();
        f = make_custom(m, "random-table", [table](const ItemSet& s) { return table[s.to_mask()]; });
        break;
      }
      default:
        f = make_single_minded(ItemSet::from_items(m, {0, 1}), 1.0);
    }
    EXPECT_EQ(check_monotone_submodular(f).pass(), brute_monotone_submodular(f)) << t;
  }
}

TEST(Verifier, WorkerCountDoesNotChangeReport) {
  const ValuationOracle sq = make_custom(8, "cube", [](const ItemSet& s) {
    const double k = static_cast<double>(s.count());
    return k * k * k;
  });
  VerifyOptions a, b;
  b.workers = 3;
  EXPECT_EQ(check_monotone_submodular(sq, a).to_json(), check_monotone_submodular(sq, b).to_json());
}
