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

#ifndef COSTSHARE_POTENTIAL_HPP
#define COSTSHARE_POTENTIAL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "costshare/common.hpp"
#include "costshare/model.hpp"

namespace costshare {

namespace detail {

inline void require_players(const ItemUniverse& u) {
  if (u.players() > kMaxPlayersGeneric) {
    throw Error(ErrorKind::size_limit,
                "potential sweeps 2^n player subsets; n is limited to 20");
  }
}

/// 1 / (|I| * binom(n, |I|)) for |I| = 0..n (entry 0 unused).
inline std::vector<double> subset_weights(std::size_t n) {
  std::vector<double> w(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    w[k] = 1.0 / (static_cast<double>(k) *
                  binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)));
  }
  return w;
}

/// Union of the bundles of the players in `players`.
inline ItemMask union_of(const ItemUniverse& u, Allocation a,
                         std::uint64_t players) {
  ItemMask mask = 0;
  for (std::uint64_t rest = players; rest != 0; rest &= rest - 1) {
    mask |= a.items & u.player_mask(static_cast<std::size_t>(std::countr_zero(rest)));
  }
  return mask;
}

}  // namespace detail

/// Closed form: sum over player subsets I of C(union of S_i, i in I)
/// divided by |I| * binom(n, |I|).
inline double potential_value(const SetFunction& cost, const ItemUniverse& u,
                              Allocation s) {
  detail::require_players(u);
  const std::size_t n = u.players();
  const auto weight = detail::subset_weights(n);
  double total = 0.0;
  for (std::uint64_t players = 1; players < (std::uint64_t{1} << n); ++players) {
    total += cost(detail::union_of(u, s, players)) * weight[popcount(players)];
  }
  return total;
}

/// Recursion over the served players: P(S) = (C(S) + sum P(S - S_i)) / n_S
/// with P(empty) = 0, memoized over the 2^{n_S} sub-allocations.
inline double potential_recursive(const SetFunction& cost, const ItemUniverse& u,
                                  Allocation s) {
  detail::require_players(u);
  std::vector<std::size_t> served;
  for (std::size_t i = 0; i < u.players(); ++i) {
    if (!bundle_empty(u, s, i)) served.push_back(i);
  }
  const std::size_t k = served.size();
  std::vector<double> memo(std::size_t{1} << k, 0.0);
  for (std::uint64_t sub = 1; sub < memo.size(); ++sub) {
    ItemMask items = 0;
    double inner = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if ((sub >> b) & 1U) {
        items |= s.items & u.player_mask(served[b]);
        inner += memo[sub & ~(std::uint64_t{1} << b)];
      }
    }
    memo[sub] = (cost(items) + inner) / static_cast<double>(popcount(sub));
  }
  return memo.back();
}

/// P(S) - P(S - S_i): player i's Shapley value in the game T -> C(union S_j).
inline double marginal(const SetFunction& cost, const ItemUniverse& u,
                       Allocation s, std::size_t player) {
  if (bundle_empty(u, s, player)) return 0.0;
  return potential_value(cost, u, s) -
         potential_value(cost, u, without_player(u, s, player));
}

/// D(S, l): sum over |I| = l of C(union S_i) / (l * binom(n, l)).
inline double expected_density(const SetFunction& cost, const ItemUniverse& u,
                               Allocation s, std::size_t size) {
  detail::require_players(u);
  const std::size_t n = u.players();
  if (size < 1 || size > n) {
    throw Error(ErrorKind::invalid_argument,
                "density size must lie in 1..n");
  }
  const double weight = detail::subset_weights(n)[size];
  double total = 0.0;
  for (std::uint64_t players = 1; players < (std::uint64_t{1} << n); ++players) {
    if (popcount(players) == size) {
      total += cost(detail::union_of(u, s, players));
    }
  }
  return total * weight;
}

/// Potential of C(S) = c(|S|) in simple cost sharing:
/// p(k) = (c(k) + k p(k-1)) / k, p(0) = 0.
struct SymmetricPotential {
  std::vector<double> levels;
  std::vector<double> cost_levels;

  double operator()(std::size_t served) const { return levels.at(served); }
};

inline SymmetricPotential symmetric_potential(std::span<const double> cost_levels) {
  if (cost_levels.empty() || std::abs(cost_levels[0]) > kTolerance) {
    throw Error(ErrorKind::not_normalized, "cost level c(0) must be 0");
  }
  SymmetricPotential out;
  out.cost_levels.assign(cost_levels.begin(), cost_levels.end());
  out.levels.assign(cost_levels.size(), 0.0);
  for (std::size_t k = 1; k < cost_levels.size(); ++k) {
    if (cost_levels[k] < cost_levels[k - 1] - kTolerance) {
      throw Error(ErrorKind::not_monotone,
                  "cost level c(" + std::to_string(k) + ") decreases");
    }
    // (c(k) + k p(k-1)) / k, written as c(k)/k + p(k-1) so that epg levels
    // reproduce H_k by direct summation.
    out.levels[k] = cost_levels[k] / static_cast<double>(k) + out.levels[k - 1];
  }
  return out;
}

/// P_C for every allocation, dense by global item mask. Built bottom-up by
/// the recursion, which visits each allocation once; the closed form is
/// the reference evaluator for single values and checks this table.
class PotentialTable {
 public:
  PotentialTable(const SetFunction& cost, const ItemUniverse& u) {
    require_enumerable(u);
    const std::size_t n = u.players();
    const std::size_t size = std::size_t{1} << u.item_count();
    std::vector<ItemMask> player_masks;
    for (std::size_t i = 0; i < n; ++i) player_masks.push_back(u.player_mask(i));
    values_.assign(size, 0.0);
    for (ItemMask s = 1; s < size; ++s) {
      double inner = 0.0;
      unsigned served = 0;
      for (ItemMask pm : player_masks) {
        if (s & pm) {
          inner += values_[s & ~pm];
          ++served;
        }
      }
      values_[s] = (cost.eval_local(s) + inner) / static_cast<double>(served);
    }
  }

  double operator()(Allocation s) const { return values_[s.items]; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

}  // namespace costshare

#endif  // COSTSHARE_POTENTIAL_HPP
