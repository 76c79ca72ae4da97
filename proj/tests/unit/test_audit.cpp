#include <gtest/gtest.h>

#include <cmath>

#include "symgap/audit.hpp"
#include "symgap/error.hpp"
#include "symgap/mechanisms.hpp"
#include "symgap/rng.hpp"
#include "symgap/setfn.hpp"

using namespace symgap;

TEST(Truthfulness, VcgHasNoViolations) {
  const BasicAuctionInstance inst = make_basic_auction(2, 6, 0.1, 3);
  const auto truth = inst.valuations();
  std::vector<ValuationOracle> devs{make_scaled(truth[0], 0.5), make_scaled(truth[0], 2.0),
                                    make_additive(Weights(6, 0.7)),
                                    make_single_minded(ItemSet::full(6), 10.0)};
  const TruthReport r = audit_truthfulness(*make_vcg_mechanism(), truth, {Setting::auction, 6, 6, 2},
                                           0, devs, 100, 0.0, 1);
  EXPECT_TRUE(r.pass());
  for (const auto& e : r.entries) EXPECT_GE(e.gap, -1e-9);
}

TEST(Truthfulness, PayYourBidUnderbiddingFlagged) {
  // single bidder: paying the declared value rewards shading
  const std::vector<ValuationOracle> truth{make_single_minded(ItemSet::from_items(2, {0, 1}), 2.0),
                                           make_single_minded(ItemSet::from_items(2, {0}), 0.5)};
  const std::vector<ValuationOracle> devs{make_single_minded(ItemSet::from_items(2, {0, 1}), 1.0)};
  const TruthReport r = audit_truthfulness(*make_pay_your_bid_mechanism(), truth,
                                           {Setting::auction, 2, 2, 2}, 0, devs, 100, 0.0, 1);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_NEAR(r.entries[0].truthful_utility, 0.0, 1e-12);
  EXPECT_NEAR(r.entries[0].deviation_utility, 1.0, 1e-12);
  EXPECT_FALSE(r.pass());
}

TEST(Truthfulness, RequiresEnoughTrials) {
  const std::vector<ValuationOracle> truth{make_additive({1, 1})};
  EXPECT_THROW(audit_truthfulness(*make_greedy_mechanism(), truth, {Setting::cpp, 2, 1, 1}, 0, {}, 10,
                                  0.0, 1),
               UsageError);
}

TEST(Separation, HullOfSquareWithInterior) {
  const std::vector<MenuPoint> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}};
  const auto h = convex_hull(pts);
  EXPECT_EQ(h.size(), 4u);
}

TEST(Separation, WitnessWhenTargetDominated) {
  const std::vector<MenuPoint> pts{{0.2, 0.1}, {0.9, 0.3}};
  const auto r = separate_quadrant(pts, {0.5, 0.5});
  const auto* w = std::get_if<SeparationWitness>(&r);
  ASSERT_NE(w, nullptr);
  EXPECT_GE(w->point.q, 0.5 - 1e-9);
  EXPECT_LE(w->point.p, 0.5 + 1e-9);
}

TEST(Separation, LineWhenQuadrantEmpty) {
  const std::vector<MenuPoint> pts{{0.1, 0.6}, {0.3, 0.9}};
  const auto r = separate_quadrant(pts, {0.5, 0.5});
  const auto* l = std::get_if<SeparationLine>(&r);
  ASSERT_NE(l, nullptr);
  for (const auto& z : pts) {
    EXPECT_LT(l->lambda_q * z.q - l->lambda_p * z.p, l->lambda_q * 0.5 - l->lambda_p * 0.5);
  }
}

TEST(Separation, OnlyMixtureReachesQuadrant) {
  // neither endpoint lies in the quadrant but their midpoint does
  const std::vector<MenuPoint> pts{{1.0, 0.8}, {0.4, 0.0}};
  const auto r = separate_quadrant(pts, {0.6, 0.6});
  const auto* w = std::get_if<SeparationWitness>(&r);
  ASSERT_NE(w, nullptr);
  EXPECT_NEAR(w->weights[0] + w->weights[1], 1.0, 1e-12);
  EXPECT_GT(w->weights[0], 0.0);
  EXPECT_GT(w->weights[1], 0.0);
}

TEST(Separation, RandomPropertyValidity) {
  Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    std::vector<MenuPoint> pts(1 + rng.below(12));
    for (auto& z : pts) z = {rng.uniform(), rng.uniform()};
    const MenuPoint target{rng.uniform(), rng.uniform()};
    const auto r = separate_quadrant(pts, target);
    if (const auto* w = std::get_if<SeparationWitness>(&r)) {
      double s = 0, q = 0, p = 0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        EXPECT_GE(w->weights[j], 0.0);
        s += w->weights[j];
        q += w->weights[j] * pts[j].q;
        p += w->weights[j] * pts[j].p;
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
      EXPECT_GE(q, target.q - 1e-9);
      EXPECT_LE(p, target.p + 1e-9);
    } else {
      const auto& l = std::get<SeparationLine>(r);
      EXPECT_GE(l.lambda_q, 0.0);
      EXPECT_GE(l.lambda_p, 0.0);
      for (const auto& z : pts) {
        EXPECT_LT(l.lambda_q * z.q - l.lambda_p * z.p, l.lambda_q * target.q - l.lambda_p * target.p);
      }
    }
  }
}

TEST(Amplification, InitialStateAndDomain) {
  const AmplificationState s = initial_amplification_state(0.5, default_delta());
  EXPECT_DOUBLE_EQ(s.alpha, 1.0);
  EXPECT_DOUBLE_EQ(s.xi, 0.5);
  EXPECT_DOUBLE_EQ(s.epsilon, std::pow(default_delta(), 4));
  EXPECT_THROW(initial_amplification_state(0.5, 0.3), DomainError);
}

TEST(Amplification, PointMassStepCertificate) {
  // all mass at X = 0.5 with α = 1, ξ = 0.5: hypothesis E[1-(1-X)^2] = 0.75 >= ξ
  const AmplificationState s = initial_amplification_state(0.5, 0.05);
  const std::vector<double> xs(10, 0.5);
  const AmplificationResult r = amplification_step(xs, s);
  EXPECT_TRUE(r.certificate.hypothesis);
  EXPECT_NEAR(r.certificate.hypothesis_lhs, 0.75, 1e-15);
  EXPECT_TRUE(r.certificate.holds);
  EXPECT_GE(r.certificate.lhs, r.certificate.rhs * (1 - 1e-12));
}

TEST(Amplification, SweepAndTelescopeAtDefaultDelta) {
  EXPECT_TRUE(amplification_sweep(default_delta(), 500, 20, 3).pass());
  const TelescopeReport t = telescope_amplification(3, 0.5, default_delta(), 20, 3);
  EXPECT_TRUE(t.chain_ok);
  EXPECT_NEAR(t.final_rhs, std::pow((1 + default_delta() * default_delta()) / 2, 3) * std::pow(0.5, 1 + default_delta()),
              1e-15);
}

TEST(Inequalities, SuitePassesAndRejectsBadGrid) {
  EXPECT_TRUE(scalar_inequality_suite(InequalityGrids::dense(2000)).pass());
  InequalityGrids g = InequalityGrids::dense(100);
  g.case2_delta.push_back(0.5);
  EXPECT_THROW(scalar_inequality_suite(g), DomainError);
}

TEST(Chernoff, BoundFormulaAndWorkerIndependence) {
  const ChernoffReport a = chernoff_bisection_test(100, 0.2, 2000, 5, 1);
  const ChernoffReport b = chernoff_bisection_test(100, 0.2, 2000, 5, 4);
  EXPECT_DOUBLE_EQ(a.bound, 4 * std::exp(-0.04 * 100 / 2));
  EXPECT_EQ(a.exceed, b.exceed);
  EXPECT_TRUE(a.pass);
}

TEST(Counting, AnalyticValue) {
  const CountingReport r = basic_instance_counting(2, 4, 5000, 1);
  EXPECT_DOUBLE_EQ(r.analytic, 4 * (1 - 0.25));
  EXPECT_TRUE(r.pass());
}

TEST(SymmetryGap, SmallRunPasses) {
  GapConfig cfg;
  cfg.trials = 5;
  cfg.seed = 3;
  const GapReport r = symmetry_gap_experiment(*make_greedy_mechanism(), cfg);
  EXPECT_TRUE(r.pass());
  EXPECT_DOUBLE_EQ(r.planted_bound, 0.9);
  EXPECT_DOUBLE_EQ(r.error_term, std::exp(-2.0 / 8));
  EXPECT_EQ(r.trials.size(), 5u);
}

TEST(Menu, MixtureIsLinear) {
  MenuSample a, b;
  a.samples = {{0.2, 0.1, 1.0, 0}};
  a.provenance = {Json("a")};
  b.samples = {{0.8, 0.5, 1.0, 0}};
  b.provenance = {Json("b")};
  const Phi phi = Phi::alpha(1.0);
  for (MenuRole role : {MenuRole::level_j, MenuRole::level_j_plus_1}) {
    const MenuPoint pa = menu_image(a, phi, 0.0, 1, role), pb = menu_image(b, phi, 0.0, 1, role);
    const MenuPoint pm = menu_image(mix_menus(a, b, 0.25), phi, 0.0, 1, role);
    EXPECT_NEAR(pm.q, 0.25 * pa.q + 0.75 * pb.q, 1e-12);
    EXPECT_NEAR(pm.p, 0.25 * pa.p + 0.75 * pb.p, 1e-12);
  }
}
