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

#ifndef COSTSHARE_AUDIT_HPP
#define COSTSHARE_AUDIT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "costshare/common.hpp"
#include "costshare/mechanisms.hpp"
#include "costshare/model.hpp"
#include "costshare/potential.hpp"
#include "costshare/random.hpp"

namespace costshare {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// π(S) = C(S) + Σ_i [v_i(M_i) - v_i(S_i)].
inline double social_cost(const Instance& inst, Allocation a) {
  const ItemUniverse& u = inst.universe;
  double excluded = 0.0;
  for (std::size_t i = 0; i < u.players(); ++i) {
    const auto& v = inst.valuations[i];
    excluded += v(u.player_mask(i)) - v(a.items & u.player_mask(i));
  }
  return inst.cost(a.items) + excluded;
}

/// SW(S) = Σ_i v_i(S_i) - C(S).
inline double social_welfare(const Instance& inst, Allocation a) {
  const ItemUniverse& u = inst.universe;
  double value = 0.0;
  for (std::size_t i = 0; i < u.players(); ++i) {
    value += inst.valuations[i](a.items & u.player_mask(i));
  }
  return value - inst.cost(a.items);
}

struct Optimum {
  double social_cost = 0.0;
  double welfare = 0.0;
  Allocation allocation;
};

/// Brute-force OPT. Minimizing π and maximizing SW select the same
/// allocations; ties resolve by canonical_min.
inline Optimum optimal_social_cost(const Instance& inst) {
  AffineMaximizer engine(inst.universe, ObjectiveSpec::cost(inst),
                         TieBreak::canonical_min);
  ArgmaxResult best = engine.argmax(tabulate_valuations(inst));
  return {social_cost(inst, best.allocation), best.objective, best.allocation};
}

/// SW(OPT) - SW(S).
inline double welfare_gap(const Instance& inst, Allocation a) {
  return optimal_social_cost(inst).welfare - social_welfare(inst, a);
}

/// π(ALG) / π(OPT), with 0/0 = 1.
inline double ratio_or_one(double numerator, double denominator) {
  if (std::abs(denominator) <= kTolerance) {
    return std::abs(numerator) <= kTolerance
               ? 1.0
               : std::numeric_limits<double>::infinity();
  }
  return numerator / denominator;
}

struct BudgetRatio {
  double ratio = 1.0;
  bool deficit = false;
};

/// Σp / C(ALG); 0/0 = 1. A deficit is flagged, never thrown.
inline BudgetRatio budget_ratio(double payment_total, double cost) {
  BudgetRatio out;
  out.deficit = payment_total < cost - kTolerance;
  if (cost == 0.0) {
    out.ratio = payment_total == 0.0 ? 1.0
                                     : std::numeric_limits<double>::infinity();
  } else {
    out.ratio = payment_total / cost;
  }
  return out;
}

inline BudgetRatio budget_ratio(const MechanismOutcome& outcome) {
  return budget_ratio(outcome.payment_total(), outcome.cost_incurred);
}

struct AuditReport {
  double social_cost_alg = 0.0;
  std::optional<double> social_cost_opt;
  std::optional<double> social_cost_ratio;
  std::optional<double> welfare_gap;
  std::optional<Allocation> opt_allocation;
  BudgetRatio budget;
  bool ir_ok = true;
  bool npt_ok = true;
  bool cost_recovered = true;
};

/// Metrics of an outcome against the instance's true valuations.
inline AuditReport evaluate_outcome(const Instance& inst,
                                    const MechanismOutcome& outcome,
                                    bool with_opt) {
  const ItemUniverse& u = inst.universe;
  AuditReport r;
  r.social_cost_alg = social_cost(inst, outcome.allocation);
  r.budget = budget_ratio(outcome);
  r.cost_recovered = !r.budget.deficit;
  for (std::size_t i = 0; i < u.players(); ++i) {
    const double value =
        inst.valuations[i](outcome.allocation.items & u.player_mask(i));
    if (outcome.payments[i] > value + kTolerance) r.ir_ok = false;
    if (outcome.payments[i] < -kTolerance) r.npt_ok = false;
  }
  if (with_opt) {
    Optimum opt = optimal_social_cost(inst);
    r.social_cost_opt = opt.social_cost;
    r.social_cost_ratio = ratio_or_one(r.social_cost_alg, opt.social_cost);
    r.welfare_gap = opt.welfare - social_welfare(inst, outcome.allocation);
    r.opt_allocation = opt.allocation;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Incentive audits
// ---------------------------------------------------------------------------

template <class M>
concept MechanismFor = requires(const M& m, const Profile& v) {
  { m(v) } -> std::convertible_to<MechanismOutcome>;
};

/// Control mechanism: the affine maximizer's allocation with each served
/// player charged their reported value. Not strategyproof.
class PayYourBid {
 public:
  PayYourBid(const Instance& inst, ObjectiveSpec h)
      : cost_(inst.cost), engine_(inst.universe, std::move(h), TieBreak::canonical_min) {}

  MechanismOutcome operator()(const Profile& v) const {
    const ItemUniverse& u = engine_.universe();
    ArgmaxResult alg = engine_.argmax(v);
    MechanismOutcome out;
    out.mechanism = "pay-your-bid";
    out.allocation = alg.allocation;
    for (std::size_t i = 0; i < u.players(); ++i) {
      out.payments.push_back(v[i][u.local(alg.allocation.items, i)]);
    }
    out.cost_incurred = cost_(alg.allocation.items);
    out.objective_value = alg.objective;
    out.h_of_alg = engine_.h()(alg.allocation);
    return out;
  }

 private:
  SetFunction cost_;
  AffineMaximizer engine_;
};

/// Finite misreport space. Per player: the true table scaled by each
/// factor, then every monotone table with entries on the value grid when
/// the joint grid is small enough, otherwise `samples` random monotone
/// tables on the grid drawn from `seed`.
struct DeviationGrid {
  std::vector<double> scales = {0.0, 0.5, 0.9, 1.1, 2.0};
  double value_lo = 0.0;
  double value_hi = 2.0;
  double value_step = 0.25;
  bool tables = true;
  double max_joint = 1e6;
  std::size_t samples = 256;
  std::size_t max_coalition = 3;
  std::uint64_t seed = 0;

  std::vector<double> values() const {
    std::vector<double> out;
    const auto count =
        static_cast<std::size_t>(std::floor((value_hi - value_lo) / value_step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
      out.push_back(value_lo + value_step * static_cast<double>(k));
    }
    return out;
  }
};

namespace detail {

/// Number of (not necessarily monotone) grid tables over width w, as a
/// double to avoid overflow.
inline double raw_table_count(std::size_t grid_size, unsigned w) {
  return std::pow(static_cast<double>(grid_size),
                  static_cast<double>((std::size_t{1} << w) - 1));
}

/// Every normalized monotone table with entries from `grid`, in
/// lexicographic order of (f(1), f(2), ..., f(2^w - 1)).
inline std::vector<ValueTable> monotone_grid_tables(const std::vector<double>& grid,
                                                    unsigned w) {
  std::vector<ValueTable> out;
  ValueTable f(std::size_t{1} << w, 0.0);
  auto recurse = [&](auto&& self, ItemMask s) -> void {
    if (s == f.size()) {
      out.push_back(f);
      return;
    }
    double floor = 0.0;
    for (ItemMask rest = s; rest != 0; rest &= rest - 1) {
      floor = std::max(floor, f[s & ~(rest & (~rest + 1))]);
    }
    for (double x : grid) {
      if (x < floor) continue;
      f[s] = x;
      self(self, s + 1);
    }
  };
  recurse(recurse, 1);
  return out;
}

inline ValueTable random_grid_table(Rng& rng, const std::vector<double>& grid,
                                    unsigned w) {
  ValueTable f(std::size_t{1} << w, 0.0);
  for (ItemMask s = 1; s < f.size(); ++s) {
    double floor = 0.0;
    for (ItemMask rest = s; rest != 0; rest &= rest - 1) {
      floor = std::max(floor, f[s & ~(rest & (~rest + 1))]);
    }
    std::size_t first = 0;
    while (first < grid.size() && grid[first] < floor) ++first;
    f[s] = first < grid.size() ? grid[first + rng.below(grid.size() - first)]
                               : floor;
  }
  return f;
}

inline std::vector<ValueTable> scaled_reports(const ValueTable& truth,
                                              const std::vector<double>& scales) {
  std::vector<ValueTable> out;
  for (double c : scales) {
    ValueTable t = truth;
    for (double& x : t) x *= c;
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<double> utilities(const ItemUniverse& u, const Profile& truth,
                                     const MechanismOutcome& o) {
  std::vector<double> out;
  for (std::size_t i = 0; i < u.players(); ++i) {
    out.push_back(truth[i][u.local(o.allocation.items, i)] - o.payments[i]);
  }
  return out;
}

}  // namespace detail

enum class GroupNotion { wgsp, gsp };

inline std::string_view to_string(GroupNotion notion) {
  return notion == GroupNotion::wgsp ? "wgsp" : "gsp";
}

struct DeviationWitness {
  std::vector<std::size_t> coalition;
  std::vector<ValueTable> reports;  // one per coalition member
  std::vector<double> before;
  std::vector<double> after;
  MechanismOutcome truthful;
  MechanismOutcome deviated;
};

struct DeviationVerdict {
  bool passed = true;
  std::size_t profiles_tested = 0;
  bool exhaustive = true;  // every member used the full table grid
  std::optional<DeviationWitness> witness;

  explicit operator bool() const noexcept { return passed; }
};

/// Misreport candidates for each coalition member plus whether the joint
/// space is enumerated in full.
struct JointReports {
  std::vector<std::vector<ValueTable>> per_member;
  bool full_product = true;
  bool exhaustive = true;
};

inline JointReports build_joint_reports(const ItemUniverse& u, const Profile& truth,
                                        const std::vector<std::size_t>& coalition,
                                        const DeviationGrid& grid, Rng& rng) {
  const std::vector<double> values = grid.values();
  double joint_tables = 1.0;
  for (std::size_t i : coalition) {
    joint_tables *= detail::raw_table_count(values.size(), u.width(i));
  }
  const bool full_tables = grid.tables && joint_tables <= grid.max_joint;
  JointReports out;
  out.exhaustive = full_tables;
  for (std::size_t i : coalition) {
    auto reports = detail::scaled_reports(truth[i], grid.scales);
    if (full_tables) {
      for (auto& t : detail::monotone_grid_tables(values, u.width(i))) {
        reports.push_back(std::move(t));
      }
    } else if (grid.tables && coalition.size() == 1) {
      for (std::size_t k = 0; k < grid.samples; ++k) {
        reports.push_back(detail::random_grid_table(rng, values, u.width(i)));
      }
    }
    out.per_member.push_back(std::move(reports));
  }
  double joint = 1.0;
  for (const auto& r : out.per_member) joint *= static_cast<double>(r.size());
  // Coalitions beyond the table budget draw joint samples instead.
  out.full_product = joint <= grid.max_joint &&
                     (full_tables || !grid.tables || coalition.size() == 1);
  return out;
}

namespace detail {

/// Calls fn(profile) for each joint misreport of the coalition in a
/// deterministic order; stops when fn returns true.
template <class Fn>
std::size_t for_each_joint_report(const Profile& truth,
                                  const std::vector<std::size_t>& coalition,
                                  const JointReports& reports,
                                  const DeviationGrid& grid, Rng& rng,
                                  const std::vector<double>& values,
                                  const ItemUniverse& u, Fn&& fn) {
  Profile v = truth;
  std::size_t tested = 0;
  const std::size_t k = coalition.size();
  if (reports.full_product) {
    std::vector<std::size_t> digit(k, 0);
    while (true) {
      for (std::size_t m = 0; m < k; ++m) {
        v[coalition[m]] = reports.per_member[m][digit[m]];
      }
      ++tested;
      if (fn(v)) return tested;
      std::size_t pos = k;
      while (pos > 0) {
        --pos;
        if (++digit[pos] < reports.per_member[pos].size()) break;
        digit[pos] = 0;
        if (pos == 0) return tested;
      }
    }
  }
  // Sampled joint space: independent draws per member mixing the listed
  // reports with fresh random grid tables.
  for (std::size_t s = 0; s < grid.samples; ++s) {
    for (std::size_t m = 0; m < k; ++m) {
      const auto& list = reports.per_member[m];
      const std::size_t pick = rng.below(list.size() + 1);
      v[coalition[m]] = pick < list.size()
                            ? list[pick]
                            : random_grid_table(rng, values, u.width(coalition[m]));
    }
    ++tested;
    if (fn(v)) return tested;
  }
  return tested;
}

inline bool improves(GroupNotion notion, const std::vector<double>& before,
                     const std::vector<double>& after,
                     const std::vector<std::size_t>& coalition) {
  bool any = false;
  for (std::size_t i : coalition) {
    const double gain = after[i] - before[i];
    if (notion == GroupNotion::wgsp) {
      if (!(gain > kTolerance)) return false;
    } else {
      if (gain < -kTolerance) return false;
      if (gain > kTolerance) any = true;
    }
  }
  return notion == GroupNotion::wgsp ? !coalition.empty() : any;
}

}  // namespace detail

/// Replays `mechanism` under joint misreports of every coalition up to
/// grid.max_coalition players, smallest coalitions first.
template <MechanismFor M>
DeviationVerdict test_group_deviation(const Instance& inst, const M& mechanism,
                                      GroupNotion notion,
                                      const DeviationGrid& grid = {}) {
  const ItemUniverse& u = inst.universe;
  const std::size_t n = u.players();
  const Profile truth = tabulate_valuations(inst);
  const MechanismOutcome honest = mechanism(truth);
  const std::vector<double> before = detail::utilities(u, truth, honest);
  const std::vector<double> values = grid.values();
  Rng rng(grid.seed);
  DeviationVerdict verdict;
  const std::size_t largest = std::min(n, grid.max_coalition);
  for (std::size_t size = 1; size <= largest; ++size) {
    // Coalitions of this size in lexicographic order.
    std::vector<std::size_t> members(size);
    for (std::size_t k = 0; k < size; ++k) members[k] = k;
    while (true) {
      JointReports reports = build_joint_reports(u, truth, members, grid, rng);
      verdict.exhaustive = verdict.exhaustive && reports.exhaustive &&
                           reports.full_product;
      std::optional<DeviationWitness> found;
      verdict.profiles_tested += detail::for_each_joint_report(
          truth, members, reports, grid, rng, values, u, [&](const Profile& v) {
            MechanismOutcome o = mechanism(v);
            auto after = detail::utilities(u, truth, o);
            if (!detail::improves(notion, before, after, members)) return false;
            DeviationWitness w;
            w.coalition = members;
            for (std::size_t i : members) {
              w.reports.push_back(v[i]);
              w.before.push_back(before[i]);
              w.after.push_back(after[i]);
            }
            w.truthful = honest;
            w.deviated = std::move(o);
            found = std::move(w);
            return true;
          });
      if (found) {
        verdict.passed = false;
        verdict.witness = std::move(found);
        return verdict;
      }
      // Next combination.
      std::size_t pos = size;
      while (pos > 0 && members[pos - 1] == n - size + pos - 1) --pos;
      if (pos == 0) break;
      ++members[pos - 1];
      for (std::size_t k = pos; k < size; ++k) members[k] = members[k - 1] + 1;
    }
  }
  return verdict;
}

/// Unilateral deviations only.
template <MechanismFor M>
DeviationVerdict test_strategyproof(const Instance& inst, const M& mechanism,
                                    DeviationGrid grid = {}) {
  grid.max_coalition = 1;
  return test_group_deviation(inst, mechanism, GroupNotion::wgsp, grid);
}

// ---------------------------------------------------------------------------
// Structural audits
// ---------------------------------------------------------------------------

struct BbInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// Σ_i [Σ_j v_j(ALG^{-i}_j) - P(ALG^{-i})] <= (n-1) [Σ_j v_j(ALG_j) - P(ALG)],
/// evaluated on the outcome's own ALG and ALG^{-i} under `v`.
inline BbInequality bb_inequality_audit(const Instance& inst, const Profile& v,
                                        const MechanismOutcome& outcome) {
  const ItemUniverse& u = inst.universe;
  if (outcome.diagnostics.size() != u.players()) {
    throw Error(ErrorKind::invalid_argument,
                "outcome carries no per-player constrained allocations");
  }
  const PotentialTable pot(inst.cost, u);
  BbInequality out;
  for (const auto& d : outcome.diagnostics) {
    out.lhs += reported_welfare(u, v, d.constrained) - pot(d.constrained);
  }
  const double alg = reported_welfare(u, v, outcome.allocation) - pot(outcome.allocation);
  out.rhs = static_cast<double>(u.players() - 1) * alg;
  out.holds = out.lhs <= out.rhs + kTolerance;
  return out;
}

inline BbInequality bb_inequality_audit(const Instance& inst,
                                        const MechanismOutcome& outcome) {
  return bb_inequality_audit(inst, tabulate_valuations(inst), outcome);
}

struct MinimalityViolation {
  Allocation allocation;
  double h_value = 0.0;
  double potential = 0.0;
  std::vector<double> item_value;  // v_i(j) for j in S_i, per player
  Instance profile;                // instance carrying the constructed profile
  MechanismOutcome outcome;
  double deficit = 0.0;            // Σp - C(ALG)
};

struct MinimalityVerdict {
  bool passed = true;
  std::optional<MinimalityViolation> violation;

  explicit operator bool() const noexcept { return passed; }
};

/// Looks for an inclusion-minimal allocation with h < P_C. If one exists,
/// gives each of its items value 2h(M) to its owner, runs the h-affine
/// maximizer with VCG payments, and reports the resulting deficit.
inline MinimalityVerdict minimality_audit(const ObjectiveSpec& h,
                                          const SetFunction& cost,
                                          const ItemUniverse& u) {
  require_enumerable(u);
  const PotentialTable pot(cost, u);
  const std::size_t size = std::size_t{1} << u.item_count();
  const CanonicalOrder order(u);
  // Fewest items first, so the first hit is minimal by inclusion.
  std::optional<Allocation> hit;
  for (unsigned items = 0; items <= u.item_count() && !hit; ++items) {
    for (ItemMask s = 0; s < size; ++s) {
      Allocation a{s};
      if (popcount(s) != items || h(a) >= pot(a) - kTolerance) continue;
      if (!hit || order.lex_less(a, *hit)) hit = a;
    }
  }
  MinimalityVerdict verdict;
  if (!hit) return verdict;

  MinimalityViolation v;
  v.allocation = *hit;
  v.h_value = h(*hit);
  v.potential = pot(*hit);
  const double item_value = 2.0 * h(Allocation{u.full_mask()});
  v.profile.universe = u;
  v.profile.cost = cost;
  for (std::size_t i = 0; i < u.players(); ++i) {
    std::vector<double> weights(u.width(i), 0.0);
    const ItemMask mine = u.local(hit->items, i);
    for (unsigned j = 0; j < u.width(i); ++j) {
      if ((mine >> j) & 1U) weights[j] = item_value;
    }
    v.item_value.push_back(mine != 0 ? item_value : 0.0);
    v.profile.valuations.push_back(
        SetFunction::additive(Scope::of_player(u, i), std::move(weights)));
  }
  VcgMechanism mechanism("h-affine", v.profile, h, TieBreak::canonical_min);
  v.outcome = mechanism(tabulate_valuations(v.profile));
  v.deficit = v.outcome.payment_total() - v.outcome.cost_incurred;
  verdict.passed = false;
  verdict.violation = std::move(v);
  return verdict;
}

struct MarginalVerdict {
  bool passed = true;
  std::optional<std::size_t> witness_size;
  double increment = 0.0;

  explicit operator bool() const noexcept { return passed; }
};

/// h(k) - h(k-1) >= 1/k for k = 1..n.
inline MarginalVerdict symmetric_marginal_audit(const std::vector<double>& h_levels) {
  if (h_levels.empty() || std::abs(h_levels[0]) > kTolerance) {
    throw Error(ErrorKind::not_normalized, "h(0) must be 0");
  }
  MarginalVerdict out;
  for (std::size_t k = 1; k < h_levels.size(); ++k) {
    const double step = h_levels[k] - h_levels[k - 1];
    if (step < 1.0 / static_cast<double>(k) - kTolerance) {
      out.passed = false;
      out.witness_size = k;
      out.increment = step;
      return out;
    }
  }
  return out;
}

struct UnionClosureVerdict {
  bool passed = true;
  std::size_t step = 0;
  ItemMask s = 0;
  ItemMask t = 0;

  explicit operator bool() const noexcept { return passed; }
};

/// At every step of the sequential mechanism, the set of profit-maximizing
/// bundles is closed under union.
inline UnionClosureVerdict sequential_union_closure(const Instance& inst,
                                                    const Profile& v) {
  SequentialMechanism mechanism(inst, SequentialVariant::gsp_max_size);
  UnionClosureVerdict out;
  for (const auto& step : mechanism.trace(v)) {
    std::vector<ItemMask> maximizers;
    for (ItemMask s = 0; s < step.profit.size(); ++s) {
      if (step.profit[s] >= step.best - kTolerance) maximizers.push_back(s);
    }
    for (ItemMask a : maximizers) {
      for (ItemMask b : maximizers) {
        if (step.profit[a | b] < step.best - kTolerance) {
          out.passed = false;
          out.step = step.player;
          out.s = a;
          out.t = b;
          return out;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counterexamples
// ---------------------------------------------------------------------------

enum class MetricCheck { equal, at_least, within };

struct ExpectedMetric {
  std::string name;
  MetricCheck check = MetricCheck::equal;
  double value = 0.0;
  double upper = 0.0;    // for within
  bool relative = false;
};

struct Counterexample {
  std::string name;
  std::size_t players = 0;
  double epsilon = 0.0;
  Instance instance;
  std::string mechanism;  // "potential" or "sequential-gsp"
  std::vector<ExpectedMetric> expected;
};

inline constexpr std::array<std::string_view, 5> kCounterexampleNames = {
    "gsp-epg", "non-subadditive", "unit-demand-overcharge", "epg-overcharge",
    "sequential-tight"};

namespace detail {

inline Instance simple_instance(std::size_t n, const std::vector<double>& values,
                                SetFunction cost) {
  Instance inst;
  inst.universe = ItemUniverse::simple(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.valuations.push_back(
        SetFunction::unit_demand(Scope::of_player(inst.universe, i), values[i]));
  }
  inst.cost = std::move(cost);
  return inst;
}

/// min_{k<n} (H_k/k - H_n/n): the slack separating the full set from
/// every smaller served set under v_i = H_n/n.
inline double epg_density_gap(std::size_t n) {
  const double target = harmonic(n) / static_cast<double>(n);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    gap = std::min(gap, harmonic(k) / static_cast<double>(k) - target);
  }
  return gap;
}

/// Player i owns m^i_j for j != i. C = 1 on nonempty allocations where
/// every served player takes only the item indexed by one common j and
/// player j takes nothing; C = 2 on every other nonempty allocation.
inline Instance unit_demand_overcharge(std::size_t n) {
  std::vector<std::vector<std::string>> items(n);
  const std::size_t digits = std::to_string(n).size();
  auto pad = [&](std::size_t x) {
    std::string s = std::to_string(x);
    return std::string(digits - s.size(), '0') + s;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) items[i].push_back("p" + pad(i + 1) + "m" + pad(j + 1));
    }
  }
  Instance inst;
  inst.universe = ItemUniverse(std::move(items));
  const ItemUniverse& u = inst.universe;
  if (u.item_count() > kGenericLimitLog2) {
    throw Error(ErrorKind::size_limit,
                "unit-demand-overcharge has n(n-1) items; n is limited to 5");
  }
  // The agreeing allocations for index j: subsets of {m^i_j : i != j}.
  std::vector<ItemMask> agree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto k = u.index_of("p" + pad(i + 1) + "m" + pad(j + 1));
      agree[j] |= ItemMask{1} << *k;
    }
  }
  std::vector<double> table(std::size_t{1} << u.item_count(), 2.0);
  table[0] = 0.0;
  for (ItemMask s = 1; s < table.size(); ++s) {
    for (ItemMask mask : agree) {
      if ((s & ~mask) == 0) {
        table[s] = 1.0;
        break;
      }
    }
  }
  inst.cost = SetFunction::table(Scope::of_cost(u), std::move(table));
  const double big = 2.0 * harmonic(n) + 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    inst.valuations.push_back(SetFunction::unit_demand(Scope::of_player(u, i), big));
  }
  return inst;
}

}  // namespace detail

/// Default ε per construction when none is given.
inline double default_epsilon(std::string_view name, std::size_t n) {
  if (name == "non-subadditive") return 1.0 / static_cast<double>(n);
  if (name == "epg-overcharge") return 1e-6;
  if (name == "sequential-tight") return 1e-3;
  return 0.01;
}

inline Counterexample build_counterexample(std::string_view name, std::size_t n,
                                           std::optional<double> epsilon = std::nullopt) {
  if (std::find(kCounterexampleNames.begin(), kCounterexampleNames.end(), name) ==
      kCounterexampleNames.end()) {
    throw Error(ErrorKind::unknown_name,
                "unknown counterexample '" + std::string(name) + "'");
  }
  if (n < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 players");
  const double eps = epsilon.value_or(default_epsilon(name, n));
  if (!(eps > 0.0) || eps > 0.5) {
    throw Error(ErrorKind::invalid_argument, "epsilon must lie in (0, 0.5]");
  }
  const double nd = static_cast<double>(n);
  Counterexample cx;
  cx.name = std::string(name);
  cx.players = n;
  cx.epsilon = eps;
  cx.mechanism = "potential";

  if (name == "gsp-epg") {
    if (n > kGenericLimitLog2) {
      throw Error(ErrorKind::size_limit, "gsp-epg runs the generic path; n <= 20");
    }
    if (!(eps < (harmonic(n) - 1.0) / nd)) {
      throw Error(ErrorKind::invalid_argument,
                  "gsp-epg needs epsilon < (H_n - 1)/n so nobody is served");
    }
    cx.epsilon = eps;
    cx.instance = detail::simple_instance(
        n, std::vector<double>(n, 1.0 / nd + eps),
        SetFunction::epg(Scope::of_cost(ItemUniverse::simple(n))));
    cx.expected = {{"served_truthful", MetricCheck::equal, 0.0},
                   {"served_deviating", MetricCheck::equal, nd},
                   {"payment_each_deviating", MetricCheck::equal, 1.0 / nd},
                   {"coalition_gain_min", MetricCheck::equal, eps},
                   {"coalition_gain_max", MetricCheck::equal, eps}};
  } else if (name == "non-subadditive") {
    if (n > kGenericLimitLog2) {
      throw Error(ErrorKind::size_limit, "non-subadditive runs the generic path; n <= 20");
    }
    std::vector<double> levels(n + 1, 0.0);
    levels[n] = 1.0;
    cx.instance = detail::simple_instance(
        n, std::vector<double>(n, 1.0 / nd + eps),
        SetFunction::symmetric(Scope::of_cost(ItemUniverse::simple(n)), levels));
    cx.expected = {{"served", MetricCheck::equal, nd},
                   {"social_cost_ratio", MetricCheck::equal, nd / (1.0 + nd * eps),
                    0.0, true}};
  } else if (name == "unit-demand-overcharge") {
    cx.instance = detail::unit_demand_overcharge(n);
    cx.expected = {{"payment_min", MetricCheck::equal, 1.0},
                   {"payment_max", MetricCheck::equal, 1.0},
                   {"cost", MetricCheck::equal, 2.0},
                   {"budget_ratio", MetricCheck::equal, nd / 2.0, 0.0, true}};
  } else if (name == "epg-overcharge") {
    const double gap = detail::epg_density_gap(n);
    cx.epsilon = std::min(eps, gap / (2.0 * nd));
    const double value = harmonic(n) / nd + cx.epsilon;
    cx.instance = detail::simple_instance(
        n, std::vector<double>(n, value),
        SetFunction::epg(Scope::of_cost(ItemUniverse::simple(n))));
    cx.expected = {{"served", MetricCheck::equal, nd},
                   {"cost", MetricCheck::equal, 1.0},
                   // Σp = H_n - n(n-1)ε; the window is 1e-3 unless that
                   // shortfall is larger.
                   {"payment_total", MetricCheck::within,
                    harmonic(n) - std::max(1e-3, 2.0 * nd * (nd - 1.0) * cx.epsilon),
                    harmonic(n)}};
  } else {  // sequential-tight
    if (n > kGenericLimitLog2) {
      throw Error(ErrorKind::size_limit, "sequential-tight needs brute-force OPT; n <= 20");
    }
    cx.mechanism = "sequential-gsp";
    cx.instance = detail::simple_instance(
        n, std::vector<double>(n, 1.0 - eps),
        SetFunction::epg(Scope::of_cost(ItemUniverse::simple(n))));
    cx.expected = {{"served", MetricCheck::equal, 0.0},
                   {"social_cost_ratio", MetricCheck::at_least,
                    nd * (1.0 - eps) - 1e-6}};
  }
  return cx;
}

struct MeasuredMetric {
  ExpectedMetric expected;
  double measured = 0.0;
  bool matches = false;
};

struct DemoResult {
  Counterexample counterexample;
  MechanismOutcome outcome;
  std::optional<MechanismOutcome> deviation;
  std::vector<MeasuredMetric> metrics;

  bool matches() const {
    return std::all_of(metrics.begin(), metrics.end(),
                       [](const MeasuredMetric& m) { return m.matches; });
  }
};

inline bool metric_matches(const ExpectedMetric& e, double measured) {
  constexpr double kDemoTolerance = 1e-6;
  switch (e.check) {
    case MetricCheck::equal: {
      const double scale = e.relative ? std::max(1.0, std::abs(e.value)) : 1.0;
      return std::abs(measured - e.value) <= kDemoTolerance * scale;
    }
    case MetricCheck::at_least:
      return measured >= e.value;
    case MetricCheck::within:
      return measured >= e.value && measured <= e.upper;
  }
  return false;
}

namespace detail {

/// Converts a fast-path result to a MechanismOutcome on the simple
/// universe (n <= 64).
inline MechanismOutcome outcome_from_fast(const ItemUniverse& u,
                                          const SymmetricOutcome& fast) {
  MechanismOutcome out;
  out.mechanism = "potential";
  for (std::size_t i = 0; i < fast.served.size(); ++i) {
    if (fast.served[i]) out.allocation.items |= u.player_mask(i);
  }
  out.payments = fast.payments;
  out.cost_incurred = fast.cost_incurred;
  out.objective_value = fast.objective_value;
  out.h_of_alg = fast.potential_of_alg;
  return out;
}

}  // namespace detail

/// Builds and runs a named construction, measuring what the construction
/// predicts.
inline DemoResult run_demo(const Counterexample& cx) {
  DemoResult r;
  r.counterexample = cx;
  const Instance& inst = cx.instance;
  const ItemUniverse& u = inst.universe;
  auto served = [&](const MechanismOutcome& o) {
    return static_cast<double>(served_count(u, o.allocation));
  };
  std::vector<double> measured;

  if (cx.name == "epg-overcharge" && cx.players > 12) {
    std::vector<double> levels(cx.players + 1, 1.0);
    levels[0] = 0.0;
    std::vector<double> values(cx.players, inst.valuations[0].scalar());
    r.outcome = detail::outcome_from_fast(
        u, run_potential_symmetric_fast(levels, values));
  } else if (cx.mechanism == "sequential-gsp") {
    r.outcome = run_sequential(inst, SequentialVariant::gsp_max_size);
  } else {
    r.outcome = run_potential(inst);
  }

  if (cx.name == "gsp-epg") {
    // Every player reports 1 + ε; each then pays 1/n.
    Profile report = tabulate_valuations(inst);
    for (auto& t : report) t[1] = 1.0 + cx.epsilon;
    r.deviation = make_potential_mechanism(inst)(report);
    const Profile truth = tabulate_valuations(inst);
    const auto before = detail::utilities(u, truth, r.outcome);
    const auto after = detail::utilities(u, truth, *r.deviation);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < cx.players; ++i) {
      lo = std::min(lo, after[i] - before[i]);
      hi = std::max(hi, after[i] - before[i]);
    }
    measured = {served(r.outcome), served(*r.deviation),
                r.deviation->payments.empty() ? 0.0 : r.deviation->payments[0], lo,
                hi};
  } else if (cx.name == "non-subadditive") {
    const double opt = optimal_social_cost(inst).social_cost;
    measured = {served(r.outcome),
                ratio_or_one(social_cost(inst, r.outcome.allocation), opt)};
  } else if (cx.name == "unit-demand-overcharge") {
    const auto [lo, hi] =
        std::minmax_element(r.outcome.payments.begin(), r.outcome.payments.end());
    measured = {*lo, *hi, r.outcome.cost_incurred, budget_ratio(r.outcome).ratio};
  } else if (cx.name == "epg-overcharge") {
    measured = {served(r.outcome), r.outcome.cost_incurred,
                r.outcome.payment_total()};
  } else {
    const double opt = optimal_social_cost(inst).social_cost;
    measured = {served(r.outcome),
                ratio_or_one(social_cost(inst, r.outcome.allocation), opt)};
  }
  for (std::size_t k = 0; k < cx.expected.size(); ++k) {
    r.metrics.push_back({cx.expected[k], measured[k],
                         metric_matches(cx.expected[k], measured[k])});
  }
  return r;
}

}  // namespace costshare

#endif  // COSTSHARE_AUDIT_HPP
