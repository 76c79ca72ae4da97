#include <gtest/gtest.h>

#include <cmath>

#include "symgap/error.hpp"
#include "symgap/extensions.hpp"
#include "symgap/instances.hpp"
#include "symgap/rng.hpp"
#include "symgap/setfn.hpp"

using namespace symgap;

namespace {

// F(x) by summing over all 2^m sets with explicit probabilities.
double brute_F(const ValuationOracle& f, const std::vector<double>& x) {
  const std::size_t m = x.size();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    double p = 1.0;
    for (std::size_t j = 0; j < m; ++j) p *= (mask >> j & 1) ? x[j] : 1.0 - x[j];
    total += p * f.function().value(ItemSet::from_mask(m, mask));
  }
  return total;
}

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(FractionalPoint, RejectsOutOfRange) {
  EXPECT_THROW(FractionalPoint({0.5, 1.2}), DomainError);
  EXPECT_THROW(FractionalPoint({-0.1}), DomainError);
  EXPECT_NO_THROW(FractionalPoint({0.0, 1.0}));
}

TEST(Pmf, BinomialMatchesCombinatorics) {
  for (int n : {1, 5, 17}) {
    for (double p : {0.0, 0.3, 0.5, 1.0}) {
      const auto pmf = binomial_pmf(n, p);
      ASSERT_EQ(pmf.size(), static_cast<std::size_t>(n + 1));
      for (int k = 0; k <= n; ++k) {
        EXPECT_NEAR(pmf[k], choose(n, k) * std::pow(p, k) * std::pow(1 - p, n - k), 1e-14);
      }
    }
  }
}

TEST(Pmf, PoissonBinomialMatchesEnumeration) {
  const std::vector<double> ps{0.1, 0.7, 0.4, 0.95, 0.0};
  std::vector<double> want(ps.size() + 1, 0.0);
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    double pr = 1.0;
    for (std::size_t j = 0; j < 5; ++j) pr *= (mask >> j & 1) ? ps[j] : 1 - ps[j];
    want[__builtin_popcountll(mask)] += pr;
  }
  const auto got = poisson_binomial_pmf(ps);
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-15);
}

TEST(MultilinearF, ExactEnumMatchesBruteForce) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const std::size_t m = 2 + rng.below(6);
    Weights w(m);
    for (double& v : w) v = rng.uniform();
    const ValuationOracle f = make_budget_additive(w, 1.0);
    std::vector<double> x(m);
    for (double& v : x) v = rng.uniform();
    const Estimate e = multilinear_F(f, FractionalPoint(x), {EstimatorMode::exact_enum});
    EXPECT_NEAR(e.value, brute_F(f, x), 1e-12);
    EXPECT_EQ(e.std_error, 0.0);
  }
}

TEST(MultilinearF, BlockwiseMatchesBruteForce) {
  const ItemSet a = ItemSet::from_items(9, {0, 2, 4, 6});
  const ItemSet b = ItemSet::from_items(9, {1, 3, 5, 7});
  for (const ValuationOracle& f : {make_symgap_valuation(a, b, Phi::alpha(0.5), 0.25),
                                   make_block_product(a, b, Phi::alpha(1.0))}) {
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const double want = brute_F(f, x);
    EXPECT_NEAR(multilinear_F(f, FractionalPoint(x), {EstimatorMode::exact_blockwise}).value, want, 1e-12);
    EXPECT_NEAR(exact_F_block_point(*f.block_profile(), FractionalPoint(x)), want, 1e-12);
  }
}

TEST(MultilinearF, BlockwiseNeedsProfile) {
  EXPECT_THROW(multilinear_F(make_additive({1, 1}), FractionalPoint({0.5, 0.5}),
                             {EstimatorMode::exact_blockwise}),
               UsageError);
}

TEST(MultilinearF, MonteCarloWithinStderrAndReproducible) {
  const ValuationOracle f = make_coverage({1, 2, 3}, {{0}, {1}, {2}, {0, 1, 2}, {1}});
  const std::vector<double> x{0.2, 0.5, 0.1, 0.3, 0.9};
  const double exact = brute_F(f, x);
  EstimatorConfig cfg{EstimatorMode::monte_carlo, 40000, 17, 1};
  const Estimate e1 = multilinear_F(f, FractionalPoint(x), cfg);
  cfg.workers = 4;
  const Estimate e4 = multilinear_F(f, FractionalPoint(x), cfg);
  EXPECT_NEAR(e1.value, exact, 4 * e1.std_error);
  EXPECT_NEAR(e4.value, exact, 4 * e4.std_error);
  // one stream per worker: reproducible for a fixed (seed, workers)
  EXPECT_EQ(e4.workers, 4u);
  EXPECT_EQ(multilinear_F(f, FractionalPoint(x), cfg).value, e4.value);
  EXPECT_THROW(multilinear_F(f, FractionalPoint(x), {EstimatorMode::monte_carlo, 1}), UsageError);
}

TEST(FExp, IsFAtOneMinusExp) {
  const ValuationOracle f = make_additive({1, 2});
  const Estimate e = f_exp(f, FractionalPoint({1.0, 0.5}), {EstimatorMode::exact_enum});
  EXPECT_NEAR(e.value, (1 - std::exp(-1.0)) + 2 * (1 - std::exp(-0.5)), 1e-14);
}

TEST(GapInstance, IndicatorNearOneMidpointNearClosedForm) {
  const ValuationOracle f = make_gap_instance(200, 0.5);
  const double one = 1 - std::exp(-1.0), half = 1 - std::exp(-0.5);
  EXPECT_NEAR(exact_F_blockwise(*f.block_profile(), one, 0.0), 1.0, 1e-5);
  EXPECT_NEAR(exact_F_blockwise(*f.block_profile(), half, half),
              4 * std::exp(-0.5) - 4 * std::exp(-1.0), 0.01);
}

TEST(Concavity, ProbeFindsKnownViolation) {
  // g(t) = t^2 along one coordinate is convex.
  auto g = [](const FractionalPoint& x) { return x[0] * x[0]; };
  const auto v = concavity_probe(
      g, explicit_pair_source({{FractionalPoint({0.0}), FractionalPoint({1.0})}}), 1, 1e-9);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0].slack, 0.25 - 0.5, 1e-15);
}

TEST(Concavity, ConcaveFunctionHasNoViolations) {
  auto g = [](const FractionalPoint& x) {
    double s = 0;
    for (double v : x.values()) s += std::sqrt(v);
    return s;
  };
  EXPECT_TRUE(concavity_probe(g, random_pair_source(6, 1), 2000, 1e-12).empty());
}

TEST(Concavity, GridPairsStayInsideAndExhaust) {
  const PairSource src = grid_pair_source(2, 0.5);
  std::size_t n = 0;
  while (auto p = src()) {
    ++n;
    for (double v : p->second.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_GT(n, 0u);
  EXPECT_THROW(grid_pair_source(2, 0.3), UsageError);
}
