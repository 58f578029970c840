// Copyright 2026 The costshare Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "costshare/audit.hpp"
#include "costshare/random.hpp"
#include "oracles.hpp"

namespace costshare {
namespace {

constexpr double kTol = 1e-9;
constexpr double kEps = 0.01;

Instance simple_epg(const std::vector<double>& values) {
  return detail::simple_instance(
      values.size(), values, SetFunction::epg(Scope::of_cost(ItemUniverse::simple(values.size()))));
}

DeviationGrid light_grid() {
  DeviationGrid g;
  g.value_step = 0.5;
  g.max_coalition = 2;
  g.max_joint = 2e4;
  g.samples = 64;
  return g;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

TEST(SocialCost, TightEpgExamples) {
  const double eps = 1e-3;
  Instance inst = simple_epg({1 - eps, 1 - eps, 1 - eps});
  EXPECT_NEAR(social_cost(inst, Allocation{0}), 3 * (1 - eps), 1e-12);
  Optimum opt = optimal_social_cost(inst);
  EXPECT_EQ(opt.allocation.items, ItemMask{0b111});
  EXPECT_EQ(opt.social_cost, 1.0);
  EXPECT_EQ(social_cost(inst, Allocation{inst.universe.full_mask()}), 1.0);
}

TEST(WelfareGap, EpgLowValues) {
  Instance inst = simple_epg({0.5 + kEps, 0.5 + kEps});
  EXPECT_NEAR(welfare_gap(inst, run_potential(inst).allocation), 2 * (0.5 + kEps) - 1, 1e-12);
  EXPECT_NEAR(welfare_gap(inst, optimal_social_cost(inst).allocation), 0.0, 1e-12);
}

TEST(BudgetRatio, Conventions) {
  EXPECT_EQ(budget_ratio(0.0, 0.0).ratio, 1.0);
  EXPECT_FALSE(budget_ratio(0.0, 0.0).deficit);
  EXPECT_EQ(budget_ratio(4.0, 2.0).ratio, 2.0);
  EXPECT_TRUE(budget_ratio(0.0, 1.0).deficit);
  EXPECT_TRUE(std::isinf(budget_ratio(1.0, 0.0).ratio));
}

TEST(SocialCostProperty, OrderMatchesWelfareOrder) {
  Rng rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    Instance inst = random_instance_any(rng, {1, 3, 0, 2}, static_cast<std::size_t>(trial));
    auto all = enumerate_allocations(inst.universe);
    for (Allocation a : all) {
      for (Allocation b : all) {
        const double dw = social_welfare(inst, a) - social_welfare(inst, b);
        const double dp = social_cost(inst, b) - social_cost(inst, a);
        EXPECT_NEAR(dw, dp, kTol);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Incentives
// ---------------------------------------------------------------------------

TEST(Strategyproof, PotentialAndSequentialPassOnRandomInstances) {
  Rng rng(81);
  for (int trial = 0; trial < 30; ++trial) {
    Instance inst = random_instance_any(rng, {1, 3, 0, 2}, static_cast<std::size_t>(trial));
    DeviationGrid g = light_grid();
    g.seed = static_cast<std::uint64_t>(trial);
    EXPECT_TRUE(test_strategyproof(inst, make_potential_mechanism(inst), g)) << trial;
    SequentialMechanism seq(inst, SequentialVariant::gsp_max_size);
    EXPECT_TRUE(test_strategyproof(inst, seq, g)) << trial;
    SequentialMechanism lex(inst, SequentialVariant::wgsp_lexicographic);
    EXPECT_TRUE(test_strategyproof(inst, lex, g)) << trial;
  }
}

TEST(Strategyproof, PayYourBidIsManipulable) {
  Instance inst = simple_epg({2, 2});
  DeviationVerdict v = test_strategyproof(inst, PayYourBid(inst, ObjectiveSpec::potential(inst)));
  ASSERT_FALSE(v.passed);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->coalition.size(), 1U);
  EXPECT_GT(v.witness->after[0], v.witness->before[0] + kTol);
}

TEST(Strategyproof, SingletonCoalitionEqualsUnilateral) {
  Instance inst = simple_epg({2, 2});
  PayYourBid m(inst, ObjectiveSpec::potential(inst));
  DeviationGrid g;
  g.max_coalition = 1;
  DeviationVerdict group = test_group_deviation(inst, m, GroupNotion::wgsp, g);
  DeviationVerdict sp = test_strategyproof(inst, m, g);
  EXPECT_EQ(group.passed, sp.passed);
  EXPECT_EQ(group.profiles_tested, sp.profiles_tested);
  EXPECT_EQ(group.witness->reports, sp.witness->reports);
}

TEST(GroupDeviation, PotentialMechanismIsNotWgspOnEpg) {
  Counterexample cx = build_counterexample("gsp-epg", 2, kEps);
  DeviationVerdict v =
      test_group_deviation(cx.instance, make_potential_mechanism(cx.instance), GroupNotion::wgsp);
  ASSERT_FALSE(v.passed);
  const DeviationWitness& w = *v.witness;
  EXPECT_EQ(w.coalition, (std::vector<std::size_t>{0, 1}));
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(w.after[k] - w.before[k], kEps, 1e-9);
    EXPECT_NEAR(w.deviated.payments[k], 0.5, 1e-9);
  }
  EXPECT_EQ(w.deviated.allocation.items, ItemMask{0b11});
}

TEST(GroupDeviation, SequentialGspPassesWithSupermodularValuations) {
  Rng rng(91);
  for (int trial = 0; trial < 12; ++trial) {
    Instance inst = random_instance(rng, {2, 3, 1, 2}, CostFamily::submodular,
                                    ValuationFamily::supermodular);
    SequentialMechanism seq(inst, SequentialVariant::gsp_max_size);
    EXPECT_TRUE(test_group_deviation(inst, seq, GroupNotion::gsp, light_grid())) << trial;
  }
}

TEST(GroupDeviation, SequentialGspPassesInSymmetricSetting) {
  Rng rng(92);
  for (int trial = 0; trial < 12; ++trial) {
    Instance inst = random_instance(rng, {2, 3, 1, 2}, CostFamily::player_symmetric_submodular,
                                    ValuationFamily::symmetric);
    SequentialMechanism seq(inst, SequentialVariant::gsp_max_size);
    EXPECT_TRUE(test_group_deviation(inst, seq, GroupNotion::gsp, light_grid())) << trial;
  }
}

TEST(GroupDeviation, SequentialLexicographicIsWgspForSubadditiveCost) {
  Rng rng(93);
  for (int trial = 0; trial < 12; ++trial) {
    Instance inst = random_instance(rng, {2, 3, 1, 2}, CostFamily::subadditive,
                                    ValuationFamily::mixed);
    SequentialMechanism seq(inst, SequentialVariant::wgsp_lexicographic);
    EXPECT_TRUE(test_group_deviation(inst, seq, GroupNotion::wgsp, light_grid())) << trial;
  }
}

// ---------------------------------------------------------------------------
// Structural audits
// ---------------------------------------------------------------------------

TEST(BbInequality, HoldsForTwoPlayers) {
  Rng rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    Instance inst = random_instance(rng, {2, 2, 0, 2}, CostFamily::submodular,
                                    ValuationFamily::mixed);
    EXPECT_TRUE(bb_inequality_audit(inst, run_potential(inst)).holds) << trial;
  }
}

TEST(BbInequality, HoldsWithSupermodularValuations) {
  Rng rng(102);
  for (int trial = 0; trial < 60; ++trial) {
    Instance inst = random_instance(rng, {1, 4, 0, 2}, CostFamily::submodular,
                                    ValuationFamily::supermodular);
    BbInequality bb = bb_inequality_audit(inst, run_potential(inst));
    EXPECT_TRUE(bb.holds) << bb.lhs << " > " << bb.rhs;
  }
}

TEST(BbInequality, ObservationalOutsideTheSettings) {
  Instance inst = build_counterexample("non-subadditive", 3, kEps).instance;
  EXPECT_NO_THROW(bb_inequality_audit(inst, run_potential(inst)));
  MechanismOutcome bare;
  EXPECT_THROW(bb_inequality_audit(inst, bare), Error);
}

TEST(Minimality, CostAsObjectiveFailsOnEpg) {
  Instance inst = simple_epg({0, 0});
  MinimalityVerdict v = minimality_audit(ObjectiveSpec::cost(inst), inst.cost, inst.universe);
  ASSERT_FALSE(v.passed);
  const MinimalityViolation& x = *v.violation;
  EXPECT_EQ(x.allocation.items, ItemMask{0b11});
  EXPECT_EQ(x.h_value, 1.0);
  EXPECT_EQ(x.potential, 1.5);
  EXPECT_EQ(x.item_value, (std::vector<double>{2, 2}));
  EXPECT_EQ(x.outcome.allocation.items, ItemMask{0b11});
  EXPECT_EQ(x.outcome.payment_total(), 0.0);
  EXPECT_EQ(x.outcome.cost_incurred, 1.0);
  EXPECT_EQ(x.deficit, -1.0);
}

TEST(Minimality, PotentialPasses) {
  Rng rng(111);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_instance_any(rng, {1, 4, 0, 2}, static_cast<std::size_t>(trial));
    EXPECT_TRUE(minimality_audit(ObjectiveSpec::potential(inst), inst.cost, inst.universe));
  }
}

TEST(Minimality, ScaledPotentialFailsAtASingleton) {
  Instance inst = simple_epg({0, 0, 0});
  MinimalityVerdict v = minimality_audit(ObjectiveSpec::potential(inst).scaled(0.95),
                                         inst.cost, inst.universe);
  ASSERT_FALSE(v.passed);
  EXPECT_EQ(popcount(v.violation->allocation.items), 1U);
  EXPECT_LT(v.violation->deficit, -kTol);
}

TEST(MarginalAudit, Examples) {
  std::vector<double> harmonic_levels = {0};
  std::vector<double> linear = {0};
  std::vector<double> root = {0};
  for (std::size_t k = 1; k <= 8; ++k) {
    harmonic_levels.push_back(harmonic(k));
    linear.push_back(static_cast<double>(k));
    root.push_back(std::sqrt(static_cast<double>(k)));
  }
  EXPECT_TRUE(symmetric_marginal_audit(harmonic_levels));
  EXPECT_TRUE(symmetric_marginal_audit(linear));
  MarginalVerdict v = symmetric_marginal_audit(root);
  ASSERT_FALSE(v.passed);
  EXPECT_EQ(*v.witness_size, 2U);
  EXPECT_NEAR(v.increment, std::sqrt(2.0) - 1, 1e-12);
}

TEST(UnionClosure, HoldsForSupermodularValuations) {
  Rng rng(121);
  for (int trial = 0; trial < 60; ++trial) {
    Instance inst = random_instance(rng, {1, 4, 0, 3}, CostFamily::submodular,
                                    ValuationFamily::supermodular);
    EXPECT_TRUE(sequential_union_closure(inst, tabulate_valuations(inst))) << trial;
  }
}

TEST(UnionClosure, CanFailForSubmodularValuations) {
  Instance inst;
  inst.universe = ItemUniverse(std::vector<std::vector<std::string>>{{"a1", "a2"}});
  inst.valuations = {SetFunction::unit_demand(Scope::of_player(inst.universe, 0), 1)};
  inst.cost = SetFunction::additive(Scope::of_cost(inst.universe), {0.5, 0.5});
  UnionClosureVerdict v = sequential_union_closure(inst, tabulate_valuations(inst));
  EXPECT_FALSE(v.passed);
}

// ---------------------------------------------------------------------------
// Counterexamples
// ---------------------------------------------------------------------------

TEST(Counterexamples, NonSubadditiveRatio) {
  DemoResult r = run_demo(build_counterexample("non-subadditive", 8, 1.0 / 8));
  EXPECT_TRUE(r.matches());
  EXPECT_NEAR(r.metrics[1].measured, 4.0, 1e-6);
}

TEST(Counterexamples, UnitDemandOvercharge) {
  Counterexample cx = build_counterexample("unit-demand-overcharge", 4);
  EXPECT_TRUE(check_class(cx.instance.cost, FunctionClass::submodular));
  DemoResult r = run_demo(cx);
  EXPECT_TRUE(r.matches());
  EXPECT_NEAR(budget_ratio(r.outcome).ratio, 2.0, 1e-6);
}

TEST(Counterexamples, EpgOvercharge) {
  DemoResult r = run_demo(build_counterexample("epg-overcharge", 10));
  EXPECT_TRUE(r.matches());
  EXPECT_EQ(r.outcome.cost_incurred, 1.0);
  EXPECT_LE(r.outcome.payment_total(), harmonic(10));
  EXPECT_GE(r.outcome.payment_total(), harmonic(10) - 1e-3);
}

TEST(Counterexamples, SequentialTight) {
  DemoResult r = run_demo(build_counterexample("sequential-tight", 8, 1e-3));
  EXPECT_TRUE(r.matches());
  EXPECT_GE(r.metrics[1].measured, 8 * (1 - 1e-3) - 1e-6);
}

TEST(Counterexamples, GspEpgGain) {
  for (std::size_t n : {2, 3, 4}) {
    DemoResult r = run_demo(build_counterexample("gsp-epg", n, kEps));
    EXPECT_TRUE(r.matches()) << n;
  }
}

TEST(Counterexamples, UnknownNameAndBadEpsilon) {
  try {
    build_counterexample("nope", 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_name);
  }
  EXPECT_THROW(build_counterexample("gsp-epg", 2, 0.0), Error);
  EXPECT_THROW(build_counterexample("gsp-epg", 1, 0.01), Error);
}

// ---------------------------------------------------------------------------
// Efficiency properties
// ---------------------------------------------------------------------------

TEST(EfficiencyProperty, RatioAndWelfareGapBounds) {
  Rng rng(131);
  for (int trial = 0; trial < 80; ++trial) {
    const bool xos = trial % 2 == 0;
    Instance inst = random_instance(rng, {1, 4, 0, 2},
                                    xos ? CostFamily::xos : CostFamily::subadditive,
                                    ValuationFamily::mixed);
    AuditReport r = evaluate_outcome(inst, run_potential(inst), true);
    const double hn = harmonic(inst.players());
    const double c_opt = inst.cost(r.opt_allocation->items);
    EXPECT_LE(*r.social_cost_ratio, (xos ? hn : 2 * hn) + kTol);
    EXPECT_LE(*r.welfare_gap, (xos ? hn - 1 : 2 * hn - 1) * c_opt + kTol);
    EXPECT_GE(*r.social_cost_ratio, 1 - kTol);
  }
}

}  // namespace
}  // namespace costshare
