#include <gtest/gtest.h>

#include <set>
#include <type_traits>

#include "symgap/error.hpp"
#include "symgap/item_set.hpp"
#include "symgap/parallel.hpp"
#include "symgap/rng.hpp"
#include "symgap/setfn.hpp"
#include "symgap/valuation.hpp"

using namespace symgap;

TEST(ItemSet, BasicOps) {
  ItemSet s = ItemSet::from_items(70, {0, 3, 64, 69});
  EXPECT_EQ(s.count(), 4u);
  EXPECT_TRUE(s.contains(64));
  EXPECT_FALSE(s.contains(63));
  const ItemSet t = ItemSet::from_items(70, {3, 5});
  EXPECT_EQ((s & t).items(), std::vector<std::size_t>{3});
  EXPECT_EQ((s | t).count(), 5u);
  EXPECT_EQ((s - t).count(), 3u);
  EXPECT_EQ(s.intersection_count(t), 1u);
  EXPECT_EQ(s.complement().count(), 66u);
  EXPECT_TRUE((s & t).is_subset_of(s));
}

TEST(ItemSet, HexAndMaskRoundTrip) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + rng.below(130);
    ItemSet s(m);
    for (std::size_t j = 0; j < m; ++j) {
      if (rng.bernoulli(0.4)) s.insert(j);
    }
    EXPECT_EQ(ItemSet::from_hex(m, s.to_hex()), s);
    if (m <= 64) {
      EXPECT_EQ(ItemSet::from_mask(m, s.to_mask()), s);
    }
  }
}

TEST(ItemSet, RejectsMixedGroundSets) {
  EXPECT_ANY_THROW(ItemSet(4) | ItemSet(5));
}

TEST(Rng, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(derive_seed(42, t));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(1);
  std::vector<int> c(7, 0);
  for (int i = 0; i < 70000; ++i) ++c[rng.below(7)];
  for (int x : c) EXPECT_NEAR(x, 10000, 500);
}

TEST(Parallel, ChunksCoverRangeOnce) {
  for (std::size_t workers : {1u, 2u, 3u, 8u}) {
    std::vector<int> hit(101, 0);
    parallel_chunks(hit.size(), workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) ++hit[i];
    });
    for (int h : hit) EXPECT_EQ(h, 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_chunks(10, 3,
                               [](std::size_t c, std::size_t, std::size_t) {
                                 if (c == 1) throw std::runtime_error("x");
                               }),
               std::runtime_error);
}

// A mechanism must not be able to reach the descriptor or the function
// through its handle.
template <typename T>
concept HasDescriptor = requires(const T& t) { t.descriptor(); };
template <typename T>
concept HasFunction = requires(const T& t) { t.function(); };
template <typename T>
concept HasProfile = requires(const T& t) { t.block_profile(); };

TEST(QueryHandle, HidesEverythingButQueries) {
  static_assert(!HasDescriptor<QueryHandle>);
  static_assert(!HasFunction<QueryHandle>);
  static_assert(!HasProfile<QueryHandle>);
  static_assert(HasDescriptor<ValuationOracle>);
}

TEST(ValuationOracle, CountsQueriesAndSharesCounterAcrossCopies) {
  const ValuationOracle f = make_additive({1, 2, 3});
  const ValuationOracle g = f;
  const QueryHandle h(f);
  EXPECT_DOUBLE_EQ(h(ItemSet::from_items(3, {0, 2})), 4.0);
  g.eval(ItemSet(3));
  EXPECT_EQ(f.query_count(), 2u);
  EXPECT_EQ(h.query_count(), 2u);
  const ValuationOracle fresh = f.with_fresh_counter();
  EXPECT_EQ(fresh.query_count(), 0u);
  fresh.eval(ItemSet(3));
  EXPECT_EQ(f.query_count(), 2u);
}

TEST(ValuationOracle, DescriptorRoundTrip) {
  const std::vector<ValuationOracle> fs{
      make_additive({1, 0.5}),
      make_budget_additive({1, 1, 1, 2}, 2),
      make_coverage({1, 2}, {{0}, {0, 1}, {}}),
      make_polar(ItemSet::from_items(4, {1, 2}), 0.25),
      make_single_minded(ItemSet::from_items(3, {0, 1}), 2.0),
      compose_product(make_additive({0.5, 0.5}), make_budget_additive({0.3, 0.9}, 1)),
      make_scaled(make_additive({1, 2}), 3.0),
  };
  for (const auto& f : fs) {
    const ValuationOracle g = oracle_from_descriptor(f.descriptor());
    ASSERT_EQ(g.ground_size(), f.ground_size());
    for (std::uint64_t mask = 0; mask < (1u << f.ground_size()); ++mask) {
      const ItemSet s = ItemSet::from_mask(f.ground_size(), mask);
      EXPECT_EQ(f.function().value(s), g.function().value(s)) << f.descriptor().dump();
    }
  }
}

TEST(ValuationOracle, ObserverSeesEveryQuery) {
  std::vector<std::string> seen;
  const ValuationOracle f = observe_queries(make_additive({1, 1}), [&](const ItemSet& s) {
    seen.push_back(s.to_hex());
  });
  f.eval(ItemSet::from_items(2, {1}));
  f.eval(ItemSet(2));
  EXPECT_EQ(seen.size(), 2u);
}
