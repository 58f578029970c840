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

#ifndef COSTSHARE_MECHANISMS_HPP
#define COSTSHARE_MECHANISMS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "costshare/common.hpp"
#include "costshare/model.hpp"
#include "costshare/potential.hpp"

namespace costshare {

/// A valuation tabulated over the local bundles of one player.
using ValueTable = std::vector<double>;

/// One value table per player: the reported (or true) valuation profile.
using Profile = std::vector<ValueTable>;

inline Profile tabulate_valuations(const Instance& inst) {
  Profile out;
  out.reserve(inst.players());
  for (const auto& v : inst.valuations) out.push_back(v.tabulate());
  return out;
}

/// sum_i v_i(S_i)
inline double reported_welfare(const ItemUniverse& u, const Profile& v,
                               Allocation a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.players(); ++i) sum += v[i][u.local(a.items, i)];
  return sum;
}

// ---------------------------------------------------------------------------
// Objective and tie-breaking
// ---------------------------------------------------------------------------

/// The function h subtracted from reported welfare, dense over global item
/// masks.
struct ObjectiveSpec {
  enum class Label { potential, cost, custom };

  Label label = Label::custom;
  std::vector<double> values;

  double operator()(Allocation a) const { return values[a.items]; }

  static ObjectiveSpec potential(const Instance& inst) {
    return {Label::potential,
            PotentialTable(inst.cost, inst.universe).values()};
  }

  static ObjectiveSpec cost(const Instance& inst) {
    require_enumerable(inst.universe);
    return {Label::cost, inst.cost.tabulate()};
  }

  /// Validates normalization and monotonicity of an arbitrary h.
  static ObjectiveSpec custom(const ItemUniverse& u, std::vector<double> values) {
    require_enumerable(u);
    auto as_function = SetFunction::table(Scope::of_cost(u), values);
    validate_function(as_function, "objective");
    return {Label::custom, std::move(values)};
  }

  ObjectiveSpec scaled(double factor) const {
    ObjectiveSpec out{Label::custom, values};
    for (double& x : out.values) x *= factor;
    return out;
  }
};

inline std::string_view to_string(ObjectiveSpec::Label label) {
  switch (label) {
    case ObjectiveSpec::Label::potential: return "potential";
    case ObjectiveSpec::Label::cost: return "cost";
    case ObjectiveSpec::Label::custom: return "custom";
  }
  return "custom";
}

enum class TieBreak { canonical_min, symmetric_prefix };

inline std::string_view to_string(TieBreak tie) {
  return tie == TieBreak::canonical_min ? "canonical" : "symmetric-prefix";
}

/// Replaces every bundle by the same-size prefix of its player's ordered
/// universe.
inline Allocation prefix_form(const ItemUniverse& u, Allocation a) {
  ItemMask out = 0;
  for (std::size_t i = 0; i < u.players(); ++i) {
    out |= u.globalize(low_bits(popcount(u.local(a.items, i))), i);
  }
  return Allocation{out};
}

struct ArgmaxResult {
  Allocation allocation;
  double objective = 0.0;
};

/// Brute-force maximizer of sum_i v_i(S_i) - h(S) over the allocation
/// lattice, optionally with one player forced to the empty bundle.
class AffineMaximizer {
 public:
  AffineMaximizer(ItemUniverse u, ObjectiveSpec h, TieBreak tie)
      : universe_(std::move(u)), h_(std::move(h)), tie_(tie) {
    require_enumerable(universe_);
    if (h_.values.size() != (std::size_t{1} << universe_.item_count())) {
      throw Error(ErrorKind::invalid_argument,
                  "objective table does not match the allocation lattice");
    }
    order_ = CanonicalOrder(universe_);
  }

  const ItemUniverse& universe() const noexcept { return universe_; }
  const ObjectiveSpec& h() const noexcept { return h_; }
  TieBreak tie_break() const noexcept { return tie_; }
  const CanonicalOrder& order() const noexcept { return order_; }

  double objective(const Profile& v, Allocation a) const {
    return reported_welfare(universe_, v, a) - h_(a);
  }

  ArgmaxResult argmax(const Profile& v,
                      std::optional<std::size_t> excluded = std::nullopt) const {
    if (v.size() != universe_.players()) {
      throw Error(ErrorKind::invalid_argument, "profile size does not match");
    }
    const ItemMask allowed =
        excluded ? universe_.full_mask() & ~universe_.player_mask(*excluded)
                 : universe_.full_mask();

    // Tolerance-aware ties: collect the maximum first, then pick the
    // tie-break minimum among everything within kTolerance of it.
    double best = -std::numeric_limits<double>::infinity();
    for (ItemMask s = allowed;; s = (s - 1) & allowed) {
      best = std::max(best, objective(v, Allocation{s}));
      if (s == 0) break;
    }
    Allocation choice{allowed};
    bool found = false;
    for (ItemMask s = allowed;; s = (s - 1) & allowed) {
      Allocation a{s};
      if (objective(v, a) >= best - kTolerance &&
          (!found || order_.min_less(a, choice))) {
        choice = a;
        found = true;
      }
      if (s == 0) break;
    }
    double value = objective(v, choice);
    if (tie_ == TieBreak::symmetric_prefix) {
      // Only exact under symmetric reports; otherwise keep the canonical
      // choice.
      Allocation prefix = prefix_form(universe_, choice);
      double prefix_value = objective(v, prefix);
      if (prefix_value >= value - kTolerance) {
        choice = prefix;
        value = prefix_value;
      }
    }
    return {choice, value};
  }

 private:
  ItemUniverse universe_;
  ObjectiveSpec h_;
  TieBreak tie_;
  CanonicalOrder order_;
};

inline ArgmaxResult affine_argmax(const ItemUniverse& u, const Profile& v,
                                  const ObjectiveSpec& h,
                                  std::optional<std::size_t> constraint,
                                  TieBreak tie) {
  return AffineMaximizer(u, h, tie).argmax(v, constraint);
}

// ---------------------------------------------------------------------------
// Outcomes and VCG payments
// ---------------------------------------------------------------------------

/// ALG^{-i} and its objective.
struct PlayerDiagnostic {
  Allocation constrained;
  double objective = 0.0;
};

struct MechanismOutcome {
  std::string mechanism;
  Allocation allocation;
  std::vector<double> payments;
  double cost_incurred = 0.0;
  double objective_value = 0.0;
  double h_of_alg = 0.0;
  std::vector<PlayerDiagnostic> diagnostics;

  /// Left-to-right sum in player order.
  double payment_total() const {
    double sum = 0.0;
    for (double p : payments) sum += p;
    return sum;
  }
};

/// Clamps numerical dust below zero; a genuinely negative payment means
/// the argmax is inconsistent.
inline double settle_payment(double p, std::size_t player) {
  if (p >= 0.0) return p;
  if (p >= -kTolerance) return 0.0;
  throw Error(ErrorKind::internal_consistency,
              "negative payment " + std::to_string(p) + " for player " +
                  std::to_string(player + 1));
}

struct VcgPayments {
  std::vector<double> payments;
  std::vector<PlayerDiagnostic> diagnostics;
};

/// p_i = [objective of ALG^{-i}] - [sum_{j != i} v_j(ALG_j) - h(ALG)], where
/// ALG^{-i} is a fresh constrained argmax under the same tie-break.
inline VcgPayments vcg_payments(const AffineMaximizer& engine, const Profile& v,
                                const ArgmaxResult& alg) {
  const ItemUniverse& u = engine.universe();
  VcgPayments out;
  for (std::size_t i = 0; i < u.players(); ++i) {
    ArgmaxResult constrained = engine.argmax(v, i);
    double others = alg.objective - v[i][u.local(alg.allocation.items, i)];
    out.payments.push_back(settle_payment(constrained.objective - others, i));
    out.diagnostics.push_back({constrained.allocation, constrained.objective});
  }
  return out;
}

/// Affine maximizer with VCG payments over a fixed objective: the
/// potential mechanism when h = P_C, the welfare maximizer when h = C.
class VcgMechanism {
 public:
  VcgMechanism(std::string name, const Instance& inst, ObjectiveSpec h,
               TieBreak tie)
      : name_(std::move(name)),
        cost_(inst.cost),
        engine_(inst.universe, std::move(h), tie) {}

  MechanismOutcome operator()(const Profile& v) const {
    ArgmaxResult alg = engine_.argmax(v);
    VcgPayments pay = vcg_payments(engine_, v, alg);
    MechanismOutcome out;
    out.mechanism = name_;
    out.allocation = alg.allocation;
    out.payments = std::move(pay.payments);
    out.diagnostics = std::move(pay.diagnostics);
    out.cost_incurred = cost_(alg.allocation.items);
    out.objective_value = alg.objective;
    out.h_of_alg = engine_.h()(alg.allocation);
    return out;
  }

  const std::string& name() const noexcept { return name_; }
  const AffineMaximizer& engine() const noexcept { return engine_; }
  TieBreak tie_break() const noexcept { return engine_.tie_break(); }

 private:
  std::string name_;
  SetFunction cost_;
  AffineMaximizer engine_;
};

/// symmetric_prefix when the instance is symmetric, canonical_min otherwise.
inline TieBreak default_tie_break(const Instance& inst) {
  return is_symmetric_instance(inst) ? TieBreak::symmetric_prefix
                                     : TieBreak::canonical_min;
}

inline VcgMechanism make_potential_mechanism(
    const Instance& inst, std::optional<TieBreak> tie = std::nullopt) {
  if (tie == TieBreak::symmetric_prefix && !is_symmetric_instance(inst)) {
    throw Error(ErrorKind::invalid_tie_break,
                "symmetric-prefix requires symmetric valuations and a "
                "player-wise symmetric cost");
  }
  return VcgMechanism("potential", inst, ObjectiveSpec::potential(inst),
                      tie.value_or(default_tie_break(inst)));
}

inline VcgMechanism make_vcg_baseline(const Instance& inst,
                                      TieBreak tie = TieBreak::canonical_min) {
  if (tie == TieBreak::symmetric_prefix && !is_symmetric_instance(inst)) {
    throw Error(ErrorKind::invalid_tie_break,
                "symmetric-prefix requires symmetric valuations and a "
                "player-wise symmetric cost");
  }
  return VcgMechanism("vcg", inst, ObjectiveSpec::cost(inst), tie);
}

inline MechanismOutcome run_potential(const Instance& inst,
                                      std::optional<TieBreak> tie = std::nullopt) {
  return make_potential_mechanism(inst, tie)(tabulate_valuations(inst));
}

inline MechanismOutcome run_vcg_baseline(const Instance& inst) {
  return make_vcg_baseline(inst)(tabulate_valuations(inst));
}

// ---------------------------------------------------------------------------
// Sequential mechanism
// ---------------------------------------------------------------------------

enum class SequentialVariant { gsp_max_size, wgsp_lexicographic };

inline std::string_view to_string(SequentialVariant variant) {
  return variant == SequentialVariant::gsp_max_size ? "sequential-gsp"
                                                    : "sequential-wgsp";
}

/// One step of the sequential mechanism: the player's profit for every
/// local bundle given the bundles already fixed.
struct SequentialStep {
  std::size_t player = 0;
  ItemMask fixed = 0;
  std::vector<double> profit;
  double best = 0.0;
  ItemMask chosen = 0;
};

/// Players are visited in index order; each takes a profit-maximizing
/// bundle under marginal-cost prices and pays the marginal cost.
class SequentialMechanism {
 public:
  SequentialMechanism(const Instance& inst, SequentialVariant variant)
      : universe_(inst.universe),
        cost_(inst.cost),
        variant_(variant),
        order_(inst.universe) {}

  MechanismOutcome operator()(const Profile& v) const { return run(v, nullptr); }

  std::vector<SequentialStep> trace(const Profile& v) const {
    std::vector<SequentialStep> steps;
    run(v, &steps);
    return steps;
  }

  SequentialVariant variant() const noexcept { return variant_; }

 private:
  MechanismOutcome run(const Profile& v,
                       std::vector<SequentialStep>* steps) const {
    if (v.size() != universe_.players()) {
      throw Error(ErrorKind::invalid_argument, "profile size does not match");
    }
    MechanismOutcome out;
    out.mechanism = std::string(to_string(variant_));
    ItemMask fixed = 0;
    double fixed_cost = cost_(0);
    double value = 0.0;
    for (std::size_t i = 0; i < universe_.players(); ++i) {
      const std::size_t bundles = std::size_t{1} << universe_.width(i);
      std::vector<double> profit(bundles);
      std::vector<double> with_cost(bundles);
      double best = -std::numeric_limits<double>::infinity();
      for (ItemMask s = 0; s < bundles; ++s) {
        with_cost[s] = cost_(fixed | universe_.globalize(s, i));
        profit[s] = v[i][s] - (with_cost[s] - fixed_cost);
        best = std::max(best, profit[s]);
      }
      std::optional<ItemMask> chosen;
      for (ItemMask s = 0; s < bundles; ++s) {
        if (profit[s] < best - kTolerance) continue;
        if (!chosen || prefer(i, s, *chosen)) chosen = s;
      }
      const double next_cost = with_cost[*chosen];
      // p_i = C(prefix with i) - C(prefix without i); the sum telescopes.
      out.payments.push_back(next_cost - fixed_cost);
      value += v[i][*chosen];
      if (steps) {
        steps->push_back({i, fixed, std::move(profit), best, *chosen});
      }
      fixed |= universe_.globalize(*chosen, i);
      fixed_cost = next_cost;
    }
    out.allocation = Allocation{fixed};
    out.cost_incurred = fixed_cost;
    out.objective_value = value - fixed_cost;
    out.h_of_alg = fixed_cost;
    return out;
  }

  bool prefer(std::size_t player, ItemMask a, ItemMask b) const {
    if (variant_ == SequentialVariant::gsp_max_size) {
      unsigned ca = popcount(a);
      unsigned cb = popcount(b);
      if (ca != cb) return ca > cb;
    }
    return order_.rank(player, a) < order_.rank(player, b);
  }

  ItemUniverse universe_;
  SetFunction cost_;
  SequentialVariant variant_;
  CanonicalOrder order_;
};

inline MechanismOutcome run_sequential(const Instance& inst,
                                       SequentialVariant variant) {
  return SequentialMechanism(inst, variant)(tabulate_valuations(inst));
}

// ---------------------------------------------------------------------------
// Symmetric fast path
// ---------------------------------------------------------------------------

struct SymmetricOutcome {
  std::vector<char> served;
  std::vector<double> payments;
  std::size_t served_count = 0;
  double cost_incurred = 0.0;
  double objective_value = 0.0;
  double potential_of_alg = 0.0;

  double payment_total() const {
    double sum = 0.0;
    for (double p : payments) sum += p;
    return sum;
  }
};

/// Potential mechanism for simple cost sharing with C(S) = c(|S|) and
/// scalar values. The best size-k set is the k highest values, so the
/// argmax and every constrained argmax reduce to prefix sums over one sort.
/// Ties follow canonical_min on ItemUniverse::simple: fewest players, then
/// later player indices first among equal values.
inline SymmetricOutcome run_potential_symmetric_fast(
    std::span<const double> cost_levels, std::span<const double> values) {
  const std::size_t n = values.size();
  if (cost_levels.size() != n + 1) {
    throw Error(ErrorKind::invalid_argument,
                "cost levels must cover sizes 0..n");
  }
  for (double x : values) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::invalid_argument,
                  "values must be finite and non-negative");
    }
  }
  const SymmetricPotential pot = symmetric_potential(cost_levels);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a > b;
  });
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + values[order[k]];

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= n; ++k) best = std::max(best, prefix[k] - pot(k));
  std::size_t chosen = 0;
  while (prefix[chosen] - pot(chosen) < best - kTolerance) ++chosen;
  const double alg_objective = prefix[chosen] - pot(chosen);

  // Objectives are taken relative to the chosen size so that payments are
  // sums of small increments rather than differences of O(n) totals:
  // g(k) = [prefix[k] - p(k)] - [prefix[k*] - p(k*)], and
  // step(k) = p(k) - p(k-1) = c(k)/k.
  auto step = [&](std::size_t k) {
    return cost_levels[k] / static_cast<double>(k);
  };
  std::vector<double> g(n + 1, 0.0);
  for (std::size_t k = chosen; k < n; ++k) g[k + 1] = g[k] + values[order[k]] - step(k + 1);
  for (std::size_t k = chosen; k > 0; --k) g[k - 1] = g[k] - values[order[k - 1]] + step(k);

  // With the player at sorted position `pos` excluded, the best set of
  // size k is the top k when k <= pos, else the top k+1 without that
  // player. Relative to ALG^{-i}'s competitor terms:
  //   head[pos] = max_{k <= pos} g(k)
  //   tail[pos] = max_{pos <= k < n} g(k+1) + step(k+1)
  std::vector<double> head(n + 1), tail(n + 1, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k <= n; ++k) head[k] = k == 0 ? g[0] : std::max(head[k - 1], g[k]);
  for (std::size_t k = n; k-- > 0;) tail[k] = std::max(tail[k + 1], g[k + 1] + step(k + 1));

  SymmetricOutcome out;
  out.served.assign(n, 0);
  out.payments.assign(n, 0.0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t player = order[pos];
    const double v = values[player];
    const bool served = pos < chosen;
    // p_i = best excluded objective - (ALG objective - v_i(ALG_i)).
    const double p = served ? std::max(head[pos] + v, tail[pos])
                            : std::max(head[pos], tail[pos] - v);
    out.served[player] = served ? 1 : 0;
    out.payments[player] = settle_payment(p, player);
  }
  out.served_count = chosen;
  out.cost_incurred = cost_levels[chosen];
  out.objective_value = alg_objective;
  out.potential_of_alg = pot(chosen);
  return out;
}

}  // namespace costshare

#endif  // COSTSHARE_MECHANISMS_HPP
