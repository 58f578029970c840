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

// Seeded instance generators. All values drawn here are multiples of 1/64
// (products of two such draws are multiples of 1/4096), so sums over
// desk-scale instances are exact in binary floating point.

#ifndef COSTSHARE_RANDOM_HPP
#define COSTSHARE_RANDOM_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "costshare/common.hpp"
#include "costshare/model.hpp"

namespace costshare {

/// xoshiro256** seeded through splitmix64. Portable: the stream depends
/// only on the 64-bit seed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  /// Uniform multiple of 1/64 in [0, hi].
  double dyadic(double hi) {
    const auto steps = static_cast<std::uint64_t>(hi * 64.0);
    return static_cast<double>(below(steps + 1)) / 64.0;
  }

  bool coin(double p = 0.5) { return uniform() < p; }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

// ---------------------------------------------------------------------------
// Universes
// ---------------------------------------------------------------------------

struct InstanceShape {
  std::size_t min_players = 1;
  std::size_t max_players = 4;
  unsigned min_width = 0;
  unsigned max_width = 2;
};

/// Items are named "a1", "a2", ... for player 1, "b1", ... for player 2.
inline ItemUniverse random_universe(Rng& rng, const InstanceShape& shape) {
  const auto n = static_cast<std::size_t>(
      rng.between(shape.min_players, shape.max_players));
  std::vector<std::vector<std::string>> items(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = rng.between(shape.min_width, shape.max_width);
    for (std::uint64_t k = 0; k < w; ++k) {
      items[i].push_back(std::string(1, static_cast<char>('a' + i)) +
                         std::to_string(k + 1));
    }
  }
  return ItemUniverse(std::move(items));
}

// ---------------------------------------------------------------------------
// Dense tables over a scope of width w (local bit positions)
// ---------------------------------------------------------------------------

/// f(S) = max_{x in S} f(S - x) + u_S: normalized and monotone.
inline std::vector<double> random_monotone_values(Rng& rng, unsigned w,
                                                  double step = 1.0) {
  std::vector<double> f(std::size_t{1} << w, 0.0);
  for (ItemMask s = 1; s < f.size(); ++s) {
    double floor = 0.0;
    for (ItemMask rest = s; rest != 0; rest &= rest - 1) {
      floor = std::max(floor, f[s & ~(rest & (~rest + 1))]);
    }
    f[s] = floor + rng.dyadic(step);
  }
  return f;
}

/// Weighted coverage: each item covers a random subset of `elements`
/// weighted ground elements; f(S) = weight of the union.
inline std::vector<double> random_coverage_values(Rng& rng, unsigned w,
                                                  unsigned elements = 6) {
  std::vector<double> weight(elements);
  for (double& x : weight) x = rng.dyadic(1.0);
  std::vector<std::uint64_t> covers(w);
  for (auto& c : covers) c = rng.below(std::uint64_t{1} << elements);
  std::vector<double> f(std::size_t{1} << w, 0.0);
  for (ItemMask s = 1; s < f.size(); ++s) {
    std::uint64_t covered = 0;
    for (unsigned x = 0; x < w; ++x) {
      if ((s >> x) & 1U) covered |= covers[x];
    }
    for (unsigned e = 0; e < elements; ++e) {
      if ((covered >> e) & 1U) f[s] += weight[e];
    }
  }
  return f;
}

/// min(B, sum of weights).
inline std::vector<double> random_budget_additive_values(Rng& rng, unsigned w) {
  std::vector<double> weight(w);
  for (double& x : weight) x = rng.dyadic(1.0);
  const double budget = rng.dyadic(static_cast<double>(std::max(1U, w)));
  std::vector<double> f(std::size_t{1} << w, 0.0);
  for (ItemMask s = 1; s < f.size(); ++s) {
    double sum = 0.0;
    for (unsigned x = 0; x < w; ++x) {
      if ((s >> x) & 1U) sum += weight[x];
    }
    f[s] = std::min(budget, sum);
  }
  return f;
}

/// Sum of one or two coverage / budget-additive terms.
inline std::vector<double> random_submodular_values(Rng& rng, unsigned w) {
  const std::size_t terms = rng.between(1, 2);
  std::vector<double> f(std::size_t{1} << w, 0.0);
  for (std::size_t t = 0; t < terms; ++t) {
    auto g = rng.coin() ? random_coverage_values(rng, w)
                        : random_budget_additive_values(rng, w);
    for (std::size_t s = 0; s < f.size(); ++s) f[s] += g[s];
  }
  return f;
}

inline std::vector<std::vector<double>> random_clauses(Rng& rng, unsigned w,
                                                       std::size_t max_clauses = 3) {
  std::vector<std::vector<double>> clauses(rng.between(1, max_clauses));
  for (auto& clause : clauses) {
    clause.resize(w);
    for (double& x : clause) x = rng.dyadic(1.0);
  }
  return clauses;
}

inline std::vector<double> xos_values(const std::vector<std::vector<double>>& clauses,
                                      unsigned w) {
  std::vector<double> f(std::size_t{1} << w, 0.0);
  for (ItemMask s = 1; s < f.size(); ++s) {
    for (const auto& clause : clauses) {
      double sum = 0.0;
      for (unsigned x = 0; x < w; ++x) {
        if ((s >> x) & 1U) sum += clause[x];
      }
      f[s] = std::max(f[s], sum);
    }
  }
  return f;
}

/// Weighted set cover: random covering sets plus every singleton, each with
/// a cost; f(S) = cheapest cover of S. Subadditive, generally neither
/// submodular nor XOS.
inline std::vector<double> random_set_cover_values(Rng& rng, unsigned w) {
  struct Cover {
    ItemMask items;
    double cost;
  };
  std::vector<Cover> sets;
  for (unsigned x = 0; x < w; ++x) {
    sets.push_back({ItemMask{1} << x, 0.25 + rng.dyadic(1.0)});
  }
  const std::size_t extra = rng.between(1, std::max(1U, w));
  for (std::size_t k = 0; k < extra && w > 0; ++k) {
    ItemMask items = rng.below(std::uint64_t{1} << w) | (ItemMask{1} << rng.below(w));
    sets.push_back({items, 0.25 + rng.dyadic(1.5)});
  }
  // Cheapest cover of exactly-covering-or-more, by DP over masks.
  const std::size_t size = std::size_t{1} << w;
  std::vector<double> cover(size, std::numeric_limits<double>::infinity());
  cover[0] = 0.0;
  for (ItemMask s = 0; s < size; ++s) {
    for (const auto& c : sets) {
      ItemMask t = s | c.items;
      cover[t] = std::min(cover[t], cover[s] + c.cost);
    }
  }
  // f(S) = min over supersets T of cover[T].
  std::vector<double> f = cover;
  for (unsigned x = 0; x < w; ++x) {
    for (ItemMask s = 0; s < size; ++s) {
      if (!((s >> x) & 1U)) f[s] = std::min(f[s], f[s | (ItemMask{1} << x)]);
    }
  }
  return f;
}

/// Additive plus non-negative AND-terms: supermodular.
inline std::vector<double> random_supermodular_values(Rng& rng, unsigned w) {
  std::vector<double> f(std::size_t{1} << w, 0.0);
  std::vector<double> weight(w);
  for (double& x : weight) x = rng.dyadic(1.0);
  struct Term {
    ItemMask items;
    double bonus;
  };
  std::vector<Term> terms;
  if (w >= 2) {
    const std::size_t count = rng.between(1, 3);
    for (std::size_t k = 0; k < count; ++k) {
      ItemMask items = 0;
      while (popcount(items) < 2) items = rng.below(std::uint64_t{1} << w);
      terms.push_back({items, rng.dyadic(1.0)});
    }
  }
  for (ItemMask s = 1; s < f.size(); ++s) {
    for (unsigned x = 0; x < w; ++x) {
      if ((s >> x) & 1U) f[s] += weight[x];
    }
    for (const auto& t : terms) {
      if ((s & t.items) == t.items) f[s] += t.bonus;
    }
  }
  return f;
}

/// Nondecreasing levels with levels[0] = 0.
inline std::vector<double> random_levels(Rng& rng, unsigned w) {
  std::vector<double> levels(w + 1, 0.0);
  for (unsigned k = 1; k <= w; ++k) levels[k] = levels[k - 1] + rng.dyadic(1.0);
  return levels;
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

enum class CostFamily {
  monotone,
  submodular,
  xos,
  subadditive,
  player_symmetric_submodular,
  epg,
};

enum class ValuationFamily {
  monotone,
  additive,
  unit_demand,
  xos,
  supermodular,
  symmetric,
  mixed,
};

inline constexpr std::array<CostFamily, 6> kCostFamilies = {
    CostFamily::monotone,    CostFamily::submodular,
    CostFamily::xos,         CostFamily::subadditive,
    CostFamily::player_symmetric_submodular, CostFamily::epg};

inline constexpr std::array<ValuationFamily, 6> kValuationFamilies = {
    ValuationFamily::monotone,     ValuationFamily::additive,
    ValuationFamily::unit_demand,  ValuationFamily::xos,
    ValuationFamily::supermodular, ValuationFamily::symmetric};

/// Σ_t w_t · min(cap_t, Σ_i α_{t,i} k_i): concave of a count-linear form,
/// hence submodular and player-wise symmetric.
inline SetFunction random_player_symmetric_cost(Rng& rng, const ItemUniverse& u) {
  const Scope scope = Scope::of_cost(u);
  const std::size_t n = u.players();
  const std::size_t terms = rng.between(1, 2);
  std::vector<double> weight(terms), cap(terms);
  std::vector<std::vector<double>> alpha(terms, std::vector<double>(n));
  for (std::size_t t = 0; t < terms; ++t) {
    weight[t] = rng.dyadic(1.0);
    cap[t] = rng.dyadic(4.0);
    for (double& a : alpha[t]) a = rng.dyadic(1.0);
  }
  std::size_t size = 1;
  for (unsigned g : scope.groups) size *= g + 1;
  std::vector<double> values(size, 0.0);
  std::vector<unsigned> k(n, 0);
  for (std::size_t index = 0; index < size; ++index) {
    std::size_t rest = index;
    for (std::size_t i = n; i-- > 0;) {
      k[i] = static_cast<unsigned>(rest % (scope.groups[i] + 1));
      rest /= scope.groups[i] + 1;
    }
    for (std::size_t t = 0; t < terms; ++t) {
      double linear = 0.0;
      for (std::size_t i = 0; i < n; ++i) linear += alpha[t][i] * k[i];
      values[index] += weight[t] * std::min(cap[t], linear);
    }
  }
  return SetFunction::player_symmetric(scope, std::move(values));
}

inline SetFunction random_cost(Rng& rng, const ItemUniverse& u, CostFamily family) {
  const Scope scope = Scope::of_cost(u);
  const unsigned m = u.item_count();
  switch (family) {
    case CostFamily::monotone:
      return SetFunction::table(scope, random_monotone_values(rng, m));
    case CostFamily::submodular:
      return SetFunction::table(scope, random_submodular_values(rng, m));
    case CostFamily::xos:
      return SetFunction::table(scope, xos_values(random_clauses(rng, m), m));
    case CostFamily::subadditive:
      return SetFunction::table(scope, rng.coin(0.75)
                                           ? random_set_cover_values(rng, m)
                                           : xos_values(random_clauses(rng, m), m));
    case CostFamily::player_symmetric_submodular:
      return random_player_symmetric_cost(rng, u);
    case CostFamily::epg:
      return SetFunction::epg(scope);
  }
  return SetFunction::epg(scope);
}

inline SetFunction random_valuation(Rng& rng, const ItemUniverse& u,
                                    std::size_t player, ValuationFamily family) {
  const Scope scope = Scope::of_player(u, player);
  const unsigned w = u.width(player);
  if (family == ValuationFamily::mixed) {
    family = kValuationFamilies[rng.below(kValuationFamilies.size())];
  }
  switch (family) {
    case ValuationFamily::monotone:
      return SetFunction::table(scope, random_monotone_values(rng, w, 1.5));
    case ValuationFamily::additive: {
      std::vector<double> weights(w);
      for (double& x : weights) x = rng.dyadic(1.5);
      return SetFunction::additive(scope, std::move(weights));
    }
    case ValuationFamily::unit_demand:
      return SetFunction::unit_demand(scope, rng.dyadic(2.0));
    case ValuationFamily::xos:
      return SetFunction::xos(scope, random_clauses(rng, w));
    case ValuationFamily::supermodular:
      return SetFunction::table(scope, random_supermodular_values(rng, w));
    case ValuationFamily::symmetric:
      return SetFunction::symmetric(scope, random_levels(rng, w));
    case ValuationFamily::mixed:
      break;
  }
  return SetFunction::unit_demand(scope, 0.0);
}

inline Instance random_instance(Rng& rng, const InstanceShape& shape,
                                CostFamily cost, ValuationFamily valuations) {
  Instance inst;
  inst.universe = random_universe(rng, shape);
  for (std::size_t i = 0; i < inst.universe.players(); ++i) {
    inst.valuations.push_back(random_valuation(rng, inst.universe, i, valuations));
  }
  inst.cost = random_cost(rng, inst.universe, cost);
  return inst;
}

/// Round-robin over every cost and valuation family.
inline Instance random_instance_any(Rng& rng, const InstanceShape& shape,
                                    std::size_t index) {
  const auto cost = kCostFamilies[index % kCostFamilies.size()];
  const auto vals = kValuationFamilies[(index / kCostFamilies.size()) %
                                       kValuationFamilies.size()];
  return random_instance(rng, shape, cost, vals);
}

}  // namespace costshare

#endif  // COSTSHARE_RANDOM_HPP
