#include <gtest/gtest.h>

#include <cmath>

#include "symgap/error.hpp"
#include "symgap/instances.hpp"
#include "symgap/mechanisms.hpp"
#include "symgap/rng.hpp"
#include "symgap/setfn.hpp"

using namespace symgap;

namespace {

// Best allocation by trying all (n+1)^m item assignments (n+1: unassigned).
double brute_auction(const std::vector<ValuationOracle>& vs) {
  const std::size_t n = vs.size(), m = vs[0].ground_size();
  std::vector<std::size_t> owner(m, 0);
  double best = 0.0;
  for (;;) {
    std::vector<ItemSet> bundles(n, ItemSet(m));
    for (std::size_t j = 0; j < m; ++j) {
      if (owner[j] < n) bundles[owner[j]].insert(j);
    }
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) w += vs[i].function().value(bundles[i]);
    best = std::max(best, w);
    std::size_t j = 0;
    while (j < m && ++owner[j] == n + 1) owner[j++] = 0;
    if (j == m) break;
  }
  return best;
}

std::vector<ValuationOracle> random_players(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<ValuationOracle> vs;
  for (std::size_t i = 0; i < n; ++i) {
    Weights w(m);
    for (double& x : w) x = rng.uniform();
    if (i % 2) vs.push_back(make_budget_additive(w, rng.uniform(0.5, 2.0)));
    else vs.push_back(make_single_minded(random_subset(ItemSet::full(m), 1 + rng.below(m), rng), rng.uniform(0, 3)));
  }
  return vs;
}

}  // namespace

TEST(Greedy, HandExample) {
  // coverage: items 0 and 1 overlap, item 2 is disjoint and smaller
  const ValuationOracle f = make_coverage({3, 3, 2}, {{0, 1}, {1}, {2}});
  const auto hs = make_handles({f});
  EXPECT_EQ(greedy_cpp(hs, 1), ItemSet::from_items(3, {0}));
  EXPECT_EQ(greedy_cpp(hs, 2), ItemSet::from_items(3, {0, 2}));
  // stops when nothing adds value
  EXPECT_EQ(greedy_cpp(hs, 3), ItemSet::from_items(3, {0, 2}));
}

TEST(Greedy, LowestIndexWinsTies) {
  const auto hs = make_handles({make_additive({1, 1, 1})});
  EXPECT_EQ(greedy_cpp(hs, 1), ItemSet::from_items(3, {0}));
}

TEST(ExhaustiveCpp, MatchesDirectEnumeration) {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const std::size_t m = 3 + rng.below(6), k = 1 + rng.below(m);
    const auto vs = random_players(2, m, rng);
    const auto hs = make_handles(vs);
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) > k) continue;
      const ItemSet s = ItemSet::from_mask(m, mask);
      best = std::max(best, vs[0].function().value(s) + vs[1].function().value(s));
    }
    EXPECT_NEAR(exhaustive_opt_cpp(hs, k).value, best, 1e-12);
  }
}

TEST(Auction, DpMatchesBruteForce) {
  Rng rng(21);
  for (int t = 0; t < 8; ++t) {
    const std::size_t n = 2 + rng.below(2), m = 3 + rng.below(4);
    const auto vs = random_players(n, m, rng);
    const AuctionSolution sol = exhaustive_opt_auction(make_handles(vs));
    EXPECT_NEAR(sol.welfare, brute_auction(vs), 1e-12);
    ItemSet used(m);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_TRUE(used.disjoint_from(sol.allocation[i]));
      used = used | sol.allocation[i];
      w += vs[i].function().value(sol.allocation[i]);
    }
    EXPECT_NEAR(w, sol.welfare, 1e-12);
  }
}

TEST(Vcg, ClarkePaymentsMatchDefinition) {
  Rng rng(4);
  for (int t = 0; t < 6; ++t) {
    const std::size_t n = 3, m = 5;
    const auto vs = random_players(n, m, rng);
    const Outcome out = vcg_auction_exhaustive(make_handles(vs));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<ValuationOracle> others;
      double others_welfare = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        others.push_back(vs[k]);
        others_welfare += vs[k].function().value(out.allocation[k]);
      }
      EXPECT_NEAR(out.payments[i], brute_auction(others) - others_welfare, 1e-9);
      EXPECT_GE(out.payments[i], -1e-12);
    }
  }
}

TEST(Auction, GuardRefusesLargeInstances) {
  std::vector<ValuationOracle> vs(2, make_additive(Weights(21, 1.0)));
  EXPECT_THROW(exhaustive_opt_auction(make_handles(vs)), UsageError);
}

TEST(Projection, FeasibleAndClosest) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 2 + rng.below(6);
    std::vector<double> y(m);
    for (double& v : y) v = rng.uniform(-1.0, 2.0);
    const double k = rng.uniform(0.5, static_cast<double>(m));
    const auto x = project_capped_box(y, k);
    double sum = 0.0, dist = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      EXPECT_GE(x[j], 0.0);
      EXPECT_LE(x[j], 1.0);
      sum += x[j];
      dist += (x[j] - y[j]) * (x[j] - y[j]);
    }
    EXPECT_LE(sum, k + 1e-9);
    // no random feasible point is closer
    for (int s = 0; s < 200; ++s) {
      std::vector<double> z(m);
      double zs = 0.0, zd = 0.0;
      for (double& v : z) zs += (v = rng.uniform());
      if (zs > k) {
        for (double& v : z) v *= k / zs;
      }
      for (std::size_t j = 0; j < m; ++j) zd += (z[j] - y[j]) * (z[j] - y[j]);
      EXPECT_GE(zd, dist - 1e-9);
    }
  }
}

TEST(PoissonMidr, ClosedForms) {
  EXPECT_NEAR(poisson_midr_cpp(make_additive({1, 0}), 1).value, 1 - std::exp(-1.0), 1e-6);
  EXPECT_NEAR(poisson_midr_cpp(make_additive({1, 1, 1, 1}), 2).value, 4 * (1 - std::exp(-0.5)), 1e-6);
  const ValuationOracle cov = make_coverage({1.0}, {{0}, {0}, {0}, {0}, {0}});
  const PoissonDistribution d = poisson_midr_cpp(cov, 2);
  EXPECT_NEAR(d.value, 1 - std::exp(-2.0), 1e-6);
  double sum = 0.0;
  for (double v : d.x.values()) sum += v;
  EXPECT_LE(sum, 2.0 + 1e-9);
}

TEST(PoissonMidr, RefusesOutsideConcaveClass) {
  const ValuationOracle f = make_budget_additive({1, 1, 1, 2}, 2);
  EXPECT_FALSE(has_concave_f_exp(f));
  EXPECT_THROW(poisson_midr_cpp(f, 2), UsageError);
  PoissonMidrConfig cfg;
  cfg.force = true;
  EXPECT_TRUE(poisson_midr_cpp(f, 2, cfg).heuristic);
  EXPECT_TRUE(has_concave_f_exp(make_scaled(make_coverage({1}, {{0}}), 2.0)));
}

TEST(RunMechanism, WorkerIndependentAndFeasible) {
  const auto mech = make_random_query_mechanism(20);
  const std::vector<ValuationOracle> ps{make_additive({1, 2, 3, 4, 5, 6})};
  const Constraint c{Setting::cpp, 6, 2, 1};
  const EmpiricalReport a = run_mechanism(*mech, ps, c, 30, 5, 1);
  const EmpiricalReport b = run_mechanism(*mech, ps, c, 30, 5, 3);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_TRUE(a.all_feasible);
  for (const auto& r : a.records) EXPECT_EQ(r.queries[0], 20u);
  EXPECT_EQ(ps[0].query_count(), 0u);
}

TEST(RunMechanism, FlagsInfeasibleOutcome) {
  const auto mech = make_constant_mechanism(Setting::cpp, {ItemSet::full(4)}, {});
  const Constraint c{Setting::cpp, 4, 2, 1};
  const EmpiricalReport r = run_mechanism(*mech, {make_additive({1, 1, 1, 1})}, c, 2, 1);
  EXPECT_FALSE(r.all_feasible);
  EXPECT_FALSE(check_feasibility(*mech, {{ItemSet::full(4)}, {}}, c).empty());
}

TEST(BalancedThreshold, RespectsCardinality) {
  const auto mech = make_balanced_threshold_mechanism(0.5);
  const Constraint c{Setting::cpp, 10, 3, 1};
  const EmpiricalReport r = run_mechanism(*mech, {make_additive(Weights(10, 1.0))}, c, 20, 1);
  EXPECT_TRUE(r.all_feasible);
  EXPECT_DOUBLE_EQ(r.mean_cardinality, 3.0);
}
