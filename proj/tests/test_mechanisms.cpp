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

#include "costshare/audit.hpp"
#include "costshare/mechanisms.hpp"
#include "costshare/random.hpp"
#include "oracles.hpp"

namespace costshare {
namespace {

constexpr double kTol = 1e-9;
constexpr double kEps = 0.01;

Instance simple_epg(const std::vector<double>& values) {
  Instance inst;
  inst.universe = ItemUniverse::simple(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    inst.valuations.push_back(
        SetFunction::unit_demand(Scope::of_player(inst.universe, i), values[i]));
  }
  inst.cost = SetFunction::epg(Scope::of_cost(inst.universe));
  return inst;
}

oracle::Objective potential_objective(const Instance& inst) {
  return [&inst](ItemMask s) {
    return potential_value(inst.cost, inst.universe, Allocation{s});
  };
}

// ---------------------------------------------------------------------------
// Affine maximizer
// ---------------------------------------------------------------------------

TEST(AffineArgmax, ZeroValuationsSelectEmpty) {
  Instance inst = simple_epg({0, 0, 0});
  auto r = affine_argmax(inst.universe, tabulate_valuations(inst),
                         ObjectiveSpec::potential(inst), std::nullopt, TieBreak::canonical_min);
  EXPECT_TRUE(r.allocation.empty());
  EXPECT_EQ(r.objective, 0.0);
}

TEST(AffineArgmax, EpgTruthfulAndInflatedReports) {
  Instance low = simple_epg({0.5 + kEps, 0.5 + kEps});
  EXPECT_TRUE(affine_argmax(low.universe, tabulate_valuations(low),
                            ObjectiveSpec::potential(low), std::nullopt,
                            TieBreak::canonical_min)
                  .allocation.empty());
  Instance high = simple_epg({1 + kEps, 1 + kEps});
  EXPECT_EQ(affine_argmax(high.universe, tabulate_valuations(high),
                          ObjectiveSpec::potential(high), std::nullopt,
                          TieBreak::canonical_min)
                .allocation.items,
            ItemMask{0b11});
}

TEST(AffineArgmax, ConstrainedPlayerIsExcluded) {
  Instance inst = simple_epg({10, 10});
  AffineMaximizer engine(inst.universe, ObjectiveSpec::potential(inst),
                         TieBreak::canonical_min);
  auto r = engine.argmax(tabulate_valuations(inst), 0);
  EXPECT_EQ(r.allocation.items, ItemMask{0b10});
  EXPECT_EQ(r.objective, 9.0);
}

TEST(AffineArgmax, SymmetricPrefixRequiresSymmetricInstance) {
  Instance inst;
  inst.universe = ItemUniverse({{"a1", "a2"}, {"b1"}});
  inst.valuations = {
      SetFunction::additive(Scope::of_player(inst.universe, 0), {1, 2}),
      SetFunction::unit_demand(Scope::of_player(inst.universe, 1), 1)};
  inst.cost = SetFunction::epg(Scope::of_cost(inst.universe));
  try {
    make_potential_mechanism(inst, TieBreak::symmetric_prefix);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_tie_break);
  }
}

TEST(AffineArgmax, SymmetricPrefixReturnsPrefixBundles) {
  Instance inst;
  inst.universe = ItemUniverse({{"a1", "a2", "a3"}, {"b1", "b2"}});
  inst.valuations = {
      SetFunction::symmetric(Scope::of_player(inst.universe, 0), {0, 1, 2, 2}),
      SetFunction::symmetric(Scope::of_player(inst.universe, 1), {0, 0.5, 0.5})};
  inst.cost = SetFunction::player_symmetric(
      Scope::of_cost(inst.universe), {0, 0.25, 0.5, 0.25, 0.5, 0.75, 0.5, 0.75, 1,
                                      0.75, 1, 1.25});
  ASSERT_TRUE(is_symmetric_instance(inst));
  MechanismOutcome o = run_potential(inst, TieBreak::symmetric_prefix);
  const ItemUniverse& u = inst.universe;
  for (std::size_t i = 0; i < u.players(); ++i) {
    const ItemMask local = u.local(o.allocation.items, i);
    EXPECT_EQ(local, low_bits(popcount(local))) << "player " << i;
  }
  MechanismOutcome canon = run_potential(inst, TieBreak::canonical_min);
  EXPECT_NEAR(o.objective_value, canon.objective_value, kTol);
}

TEST(AffineArgmaxProperty, MatchesEnumerationOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    Instance inst = random_instance_any(rng, {1, 4, 0, 2}, static_cast<std::size_t>(trial));
    const ItemUniverse& u = inst.universe;
    const bool use_cost = trial % 2 == 1;
    ObjectiveSpec h = use_cost ? ObjectiveSpec::cost(inst) : ObjectiveSpec::potential(inst);
    oracle::Objective ho = use_cost ? oracle::Objective([&](ItemMask s) { return inst.cost(s); })
                                    : potential_objective(inst);
    VcgMechanism m("m", inst, h, TieBreak::canonical_min);
    MechanismOutcome o = m(tabulate_valuations(inst));
    oracle::Choice want = oracle::argmax(u, inst.valuations, ho);
    EXPECT_EQ(o.allocation.items, want.allocation);
    EXPECT_NEAR(o.objective_value, want.objective, kTol);
    auto pay = oracle::vcg_payments(u, inst.valuations, ho, want.allocation);
    ASSERT_EQ(o.payments.size(), pay.size());
    for (std::size_t i = 0; i < pay.size(); ++i) {
      EXPECT_NEAR(o.payments[i], pay[i], kTol);
      EXPECT_EQ(o.diagnostics[i].constrained.items,
                oracle::argmax(u, inst.valuations, ho, i).allocation);
    }
    // Every enumerated allocation is no better than the choice.
    for_each_allocation(u, [&](Allocation a) {
      EXPECT_LE(m.engine().objective(tabulate_valuations(inst), a),
                o.objective_value + kTol);
    });
  }
}

// ---------------------------------------------------------------------------
// Payments and the potential mechanism
// ---------------------------------------------------------------------------

TEST(VcgPayments, EpgInflatedReportsPayHalf) {
  MechanismOutcome o = run_potential(simple_epg({1 + kEps, 1 + kEps}));
  EXPECT_EQ(o.allocation.items, ItemMask{0b11});
  EXPECT_NEAR(o.payments[0], 0.5, 1e-12);
  EXPECT_NEAR(o.payments[1], 0.5, 1e-12);
  EXPECT_EQ(o.cost_incurred, 1.0);
  EXPECT_NEAR(o.payment_total(), 1.0, 1e-12);
}

TEST(VcgPayments, SinglePlayerPaysCost) {
  MechanismOutcome o = run_potential(simple_epg({10}));
  EXPECT_EQ(o.payments, std::vector<double>{1.0});
}

TEST(VcgPayments, UnitDemandOverchargePaysOneEach) {
  Counterexample cx = build_counterexample("unit-demand-overcharge", 4);
  MechanismOutcome o = run_potential(cx.instance);
  for (double p : o.payments) EXPECT_NEAR(p, 1.0, 1e-6);
  EXPECT_EQ(o.cost_incurred, 2.0);
}

TEST(VcgPayments, NegativePaymentIsInternalError) {
  EXPECT_EQ(settle_payment(-5e-10, 0), 0.0);
  try {
    settle_payment(-1e-6, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::internal_consistency);
  }
}

TEST(RunPotential, EpgLowValuesAreNotServed) {
  MechanismOutcome o = run_potential(simple_epg({0.5 + kEps, 0.5 + kEps}));
  EXPECT_TRUE(o.allocation.empty());
  EXPECT_EQ(o.payments, (std::vector<double>{0, 0}));
}

TEST(RunPotential, NonSubadditiveServesEveryone) {
  Counterexample cx = build_counterexample("non-subadditive", 3, kEps);
  EXPECT_EQ(run_potential(cx.instance).allocation.items, cx.instance.universe.full_mask());
}

TEST(RunPotentialProperty, IrNptCostRecoveryAndPaymentLowerBound) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = random_instance_any(rng, {1, 4, 0, 2}, static_cast<std::size_t>(trial));
    const ItemUniverse& u = inst.universe;
    MechanismOutcome o = run_potential(inst);
    AuditReport r = evaluate_outcome(inst, o, false);
    EXPECT_TRUE(r.ir_ok);
    EXPECT_TRUE(r.npt_ok);
    EXPECT_GE(o.payment_total(), o.cost_incurred - kTol);
    PotentialTable pot(inst.cost, u);
    for (std::size_t i = 0; i < u.players(); ++i) {
      EXPECT_GE(o.payments[i],
                pot(o.allocation) - pot(without_player(u, o.allocation, i)) - kTol);
    }
    MechanismOutcome again = run_potential(inst);
    EXPECT_EQ(again.allocation, o.allocation);
    EXPECT_EQ(again.payments, o.payments);
  }
}

// ---------------------------------------------------------------------------
// Sequential mechanism
// ---------------------------------------------------------------------------

TEST(Sequential, TightEpgServesNobody) {
  MechanismOutcome o =
      run_sequential(simple_epg({0.999, 0.999, 0.999}), SequentialVariant::gsp_max_size);
  EXPECT_TRUE(o.allocation.empty());
  EXPECT_EQ(o.payments, (std::vector<double>{0, 0, 0}));
}

TEST(Sequential, FirstServedPlayerPaysTheWholeCost) {
  MechanismOutcome o = run_sequential(simple_epg({2, 0.1}), SequentialVariant::gsp_max_size);
  EXPECT_EQ(o.allocation.items, ItemMask{0b11});
  EXPECT_EQ(o.payments, (std::vector<double>{1, 0}));
}

TEST(Sequential, VariantsBreakTiesDifferently) {
  Instance inst;
  inst.universe = ItemUniverse(std::vector<std::vector<std::string>>{{"a1", "a2"}});
  inst.valuations = {SetFunction::additive(Scope::of_player(inst.universe, 0), {1, 1})};
  inst.cost = SetFunction::additive(Scope::of_cost(inst.universe), {1, 1});
  // Every bundle has profit 0.
  EXPECT_EQ(run_sequential(inst, SequentialVariant::gsp_max_size).allocation.items,
            ItemMask{0b11});
  EXPECT_EQ(run_sequential(inst, SequentialVariant::wgsp_lexicographic).allocation.items,
            ItemMask{0});
}

TEST(SequentialProperty, MatchesOracleAndBalancesBudget) {
  Rng rng(51);
  for (int trial = 0; trial < 300; ++trial) {
    Instance inst = random_instance_any(rng, {1, 4, 0, 3}, static_cast<std::size_t>(trial));
    for (auto variant : {SequentialVariant::gsp_max_size, SequentialVariant::wgsp_lexicographic}) {
      MechanismOutcome o = run_sequential(inst, variant);
      auto [alloc, pay] = oracle::sequential(inst.universe, inst.valuations, inst.cost,
                                             variant == SequentialVariant::gsp_max_size);
      EXPECT_EQ(o.allocation.items, alloc);
      EXPECT_EQ(o.payments, pay);
      EXPECT_EQ(o.payment_total(), o.cost_incurred);
      AuditReport r = evaluate_outcome(inst, o, false);
      EXPECT_TRUE(r.ir_ok);
      EXPECT_TRUE(r.npt_ok);
    }
  }
}

// ---------------------------------------------------------------------------
// Baseline and fast path
// ---------------------------------------------------------------------------

TEST(VcgBaseline, EpgHighValuesRunADeficit) {
  MechanismOutcome o = run_vcg_baseline(simple_epg({2, 2}));
  EXPECT_EQ(o.allocation.items, ItemMask{0b11});
  EXPECT_EQ(o.payments, (std::vector<double>{0, 0}));
  EXPECT_TRUE(budget_ratio(o).deficit);
}

TEST(VcgBaseline, SinglePlayerAndZeroValues) {
  EXPECT_EQ(run_vcg_baseline(simple_epg({10})).payments, std::vector<double>{1.0});
  MechanismOutcome z = run_vcg_baseline(simple_epg({0, 0}));
  EXPECT_TRUE(z.allocation.empty());
  EXPECT_EQ(z.payments, (std::vector<double>{0, 0}));
}

TEST(FastPath, EpgInflatedReports) {
  std::vector<double> levels = {0, 1, 1};
  std::vector<double> values = {1 + kEps, 1 + kEps};
  SymmetricOutcome o = run_potential_symmetric_fast(levels, values);
  EXPECT_EQ(o.served_count, 2U);
  EXPECT_NEAR(o.payments[0], 0.5, 1e-12);
  EXPECT_NEAR(o.payments[1], 0.5, 1e-12);
}

TEST(FastPath, EpgTenAtDensityServesAll) {
  std::vector<double> levels(11, 1.0);
  levels[0] = 0.0;
  std::vector<double> values(10, harmonic(10) / 10 + 1e-6);
  SymmetricOutcome o = run_potential_symmetric_fast(levels, values);
  EXPECT_EQ(o.served_count, 10U);
  EXPECT_NEAR(o.payment_total(), 2.928968, 1e-3);
  // Generic brute force over all 2^10 sets.
  MechanismOutcome g = run_potential(simple_epg(values));
  EXPECT_EQ(g.allocation.items, low_bits(10));
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(g.payments[i], o.payments[i], kTol);
}

TEST(FastPath, RejectsBadInput) {
  std::vector<double> levels = {0, 1};
  std::vector<double> neg = {-1};
  std::vector<double> two = {1, 1};
  EXPECT_THROW(run_potential_symmetric_fast(levels, neg), Error);
  EXPECT_THROW(run_potential_symmetric_fast(levels, two), Error);
  std::vector<double> unnormalized = {1, 1};
  std::vector<double> one = {1};
  try {
    run_potential_symmetric_fast(unnormalized, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_normalized);
  }
}

TEST(FastPath, LargeEpgRecoversCost) {
  Rng rng(62);
  const std::size_t n = 100000;
  std::vector<double> levels(n + 1, 1.0);
  levels[0] = 0.0;
  std::vector<double> values(n);
  for (double& x : values) x = rng.uniform();
  SymmetricOutcome o = run_potential_symmetric_fast(levels, values);
  EXPECT_GT(o.served_count, 0U);
  EXPECT_GE(o.payment_total(), o.cost_incurred - kTol);
  EXPECT_LE(o.payment_total(), harmonic(n) * o.cost_incurred + kTol);
}

TEST(FastPathProperty, MatchesGenericUpToTwelvePlayers) {
  Rng rng(61);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = rng.between(1, 12);
    std::vector<double> levels = random_levels(rng, static_cast<unsigned>(n));
    if (trial % 3 == 0) {
      levels.assign(n + 1, 1.0);
      levels[0] = 0.0;
    }
    std::vector<double> values(n);
    for (double& x : values) x = trial % 4 == 0 ? 0.25 * rng.between(0, 8) : rng.dyadic(2.0);
    Instance inst = simple_epg(values);
    inst.cost = SetFunction::symmetric(Scope::of_cost(inst.universe), levels);
    SymmetricOutcome fast = run_potential_symmetric_fast(levels, values);
    MechanismOutcome g = run_potential(inst, TieBreak::canonical_min);
    ItemMask served = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fast.served[i]) served |= ItemMask{1} << i;
    }
    EXPECT_EQ(served, g.allocation.items) << "trial " << trial;
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fast.payments[i], g.payments[i], kTol);
    EXPECT_NEAR(fast.cost_incurred, g.cost_incurred, kTol);
  }
}

}  // namespace
}  // namespace costshare
