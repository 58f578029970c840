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

#ifndef COSTSHARE_MODEL_HPP
#define COSTSHARE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "costshare/common.hpp"

namespace costshare {

// ---------------------------------------------------------------------------
// Item universe
// ---------------------------------------------------------------------------

/// Per-player item universes M_1..M_n. Each player's identifiers are kept
/// sorted, and player i owns the contiguous global index range
/// [offset(i), offset(i) + width(i)).
class ItemUniverse {
 public:
  ItemUniverse() = default;

  explicit ItemUniverse(std::vector<std::vector<std::string>> per_player)
      : items_(std::move(per_player)) {
    std::size_t total = 0;
    for (const auto& list : items_) total += list.size();
    if (total > kMaxItems) {
      throw Error(ErrorKind::size_limit,
                  "instance has " + std::to_string(total) +
                      " items; at most 64 are supported");
    }
    offsets_.reserve(items_.size());
    unsigned offset = 0;
    for (std::size_t i = 0; i < items_.size(); ++i) {
      auto& list = items_[i];
      for (const auto& id : list) {
        if (id.empty() || id.find(',') != std::string::npos) {
          throw Error(ErrorKind::invalid_document,
                      "item identifier '" + id +
                          "' must be non-empty and must not contain ','");
        }
      }
      std::sort(list.begin(), list.end());
      offsets_.push_back(offset);
      for (const auto& id : list) {
        auto [it, inserted] = index_.emplace(id, offset);
        if (!inserted) {
          throw Error(ErrorKind::disjointness_violation,
                      "item '" + id + "' appears more than once");
        }
        ++offset;
        names_.push_back(id);
        owners_.push_back(i);
      }
    }
  }

  /// Simple cost sharing: player i owns exactly one item.
  static ItemUniverse simple(std::size_t players) {
    std::vector<std::vector<std::string>> items(players);
    const std::size_t digits = std::to_string(players).size();
    for (std::size_t i = 0; i < players; ++i) {
      std::string id = std::to_string(i + 1);
      items[i].push_back("s" + std::string(digits - id.size(), '0') + id);
    }
    return ItemUniverse(std::move(items));
  }

  std::size_t players() const noexcept { return items_.size(); }
  unsigned item_count() const noexcept {
    return static_cast<unsigned>(names_.size());
  }
  unsigned offset(std::size_t player) const { return offsets_.at(player); }
  unsigned width(std::size_t player) const {
    return static_cast<unsigned>(items_.at(player).size());
  }
  ItemMask player_mask(std::size_t player) const {
    return low_bits(width(player)) << offset(player);
  }
  ItemMask full_mask() const noexcept { return low_bits(item_count()); }

  std::vector<unsigned> widths() const {
    std::vector<unsigned> result;
    for (std::size_t i = 0; i < players(); ++i) result.push_back(width(i));
    return result;
  }

  const std::vector<std::string>& items(std::size_t player) const {
    return items_.at(player);
  }
  const std::string& name(unsigned index) const { return names_.at(index); }
  std::size_t owner(unsigned index) const { return owners_.at(index); }

  std::optional<unsigned> index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Bundle of `player` inside a global mask, in local bit positions.
  ItemMask local(ItemMask global, std::size_t player) const {
    return (global >> offset(player)) & low_bits(width(player));
  }
  ItemMask globalize(ItemMask local_bundle, std::size_t player) const {
    return local_bundle << offset(player);
  }

  bool is_simple() const {
    return std::all_of(items_.begin(), items_.end(),
                       [](const auto& list) { return list.size() == 1; });
  }

  friend bool operator==(const ItemUniverse& a, const ItemUniverse& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<std::vector<std::string>> items_;
  std::vector<unsigned> offsets_;
  std::vector<std::string> names_;
  std::vector<std::size_t> owners_;
  std::map<std::string, unsigned, std::less<>> index_;
};

/// One bundle per player, stored as a global item mask. Bundles are
/// disjoint by construction because universes are.
struct Allocation {
  ItemMask items = 0;

  bool empty() const noexcept { return items == 0; }
  friend bool operator==(Allocation, Allocation) = default;
};

inline Allocation without_player(const ItemUniverse& u, Allocation a,
                                 std::size_t player) {
  return Allocation{a.items & ~u.player_mask(player)};
}

inline bool bundle_empty(const ItemUniverse& u, Allocation a,
                         std::size_t player) {
  return (a.items & u.player_mask(player)) == 0;
}

/// Number of players with a non-empty bundle.
inline std::size_t served_count(const ItemUniverse& u, Allocation a) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < u.players(); ++i) {
    if (!bundle_empty(u, a, i)) ++count;
  }
  return count;
}

/// Canonical bundle key: sorted identifiers joined by ",".
inline std::string bundle_key(const ItemUniverse& u, ItemMask global) {
  std::string key;
  for (unsigned k = 0; k < u.item_count(); ++k) {
    if ((global >> k) & 1U) {
      if (!key.empty()) key += ',';
      key += u.name(k);
    }
  }
  return key;
}

/// Canonical encoding: per-player sorted item lists.
inline std::vector<std::vector<std::string>> canonical_encoding(
    const ItemUniverse& u, Allocation a) {
  std::vector<std::vector<std::string>> result(u.players());
  for (unsigned k = 0; k < u.item_count(); ++k) {
    if ((a.items >> k) & 1U) result[u.owner(k)].push_back(u.name(k));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Canonical order
// ---------------------------------------------------------------------------

/// Ranks of the 2^width subsets of {0..width-1} in lexicographic order of
/// their sorted element lists. That order is the preorder of the subset
/// tree, so the empty set is first.
inline std::vector<std::uint32_t> lexicographic_ranks(unsigned width) {
  std::vector<std::uint32_t> rank(std::size_t{1} << width);
  std::uint32_t next = 0;
  std::function<void(ItemMask, unsigned)> visit = [&](ItemMask prefix,
                                                      unsigned from) {
    rank[prefix] = next++;
    for (unsigned j = from; j < width; ++j) {
      visit(prefix | (ItemMask{1} << j), j + 1);
    }
  };
  visit(0, 0);
  return rank;
}

/// Total order on allocations used for enumeration and tie-breaking.
class CanonicalOrder {
 public:
  CanonicalOrder() = default;

  explicit CanonicalOrder(const ItemUniverse& u) {
    for (std::size_t i = 0; i < u.players(); ++i) {
      if (u.width(i) > kGenericLimitLog2) {
        throw Error(ErrorKind::size_limit,
                    "player bundle lattice exceeds 2^20 elements");
      }
      offsets_.push_back(u.offset(i));
      masks_.push_back(low_bits(u.width(i)));
      ranks_.push_back(lexicographic_ranks(u.width(i)));
    }
  }

  std::uint32_t rank(std::size_t player, ItemMask local_bundle) const {
    return ranks_[player][local_bundle];
  }

  /// Lexicographic on the canonical encoding, player 1 first.
  bool lex_less(Allocation a, Allocation b) const {
    for (std::size_t i = 0; i < ranks_.size(); ++i) {
      auto ra = rank(i, (a.items >> offsets_[i]) & masks_[i]);
      auto rb = rank(i, (b.items >> offsets_[i]) & masks_[i]);
      if (ra != rb) return ra < rb;
    }
    return false;
  }

  /// canonical_min: fewest total items, then lexicographic.
  bool min_less(Allocation a, Allocation b) const {
    auto ca = popcount(a.items);
    auto cb = popcount(b.items);
    if (ca != cb) return ca < cb;
    return lex_less(a, b);
  }

  /// Local bundles of one player in lexicographic order.
  std::vector<ItemMask> ordered_bundles(std::size_t player) const {
    const auto& r = ranks_[player];
    std::vector<ItemMask> out(r.size());
    for (ItemMask s = 0; s < r.size(); ++s) out[r[s]] = s;
    return out;
  }

 private:
  std::vector<unsigned> offsets_;
  std::vector<ItemMask> masks_;
  std::vector<std::vector<std::uint32_t>> ranks_;
};

inline void require_enumerable(const ItemUniverse& u) {
  if (u.item_count() > kGenericLimitLog2) {
    throw Error(ErrorKind::size_limit,
                "allocation lattice has 2^" + std::to_string(u.item_count()) +
                    " elements; the generic path accepts at most 2^20");
  }
}

/// Calls fn(Allocation) for every element of 2^{M_1} x ... x 2^{M_n} in
/// canonical (lexicographic) order. The first call receives the empty
/// allocation.
template <class Fn>
void for_each_allocation(const ItemUniverse& u, Fn&& fn) {
  require_enumerable(u);
  CanonicalOrder order(u);
  const std::size_t n = u.players();
  std::vector<std::vector<ItemMask>> lists;
  for (std::size_t i = 0; i < n; ++i) lists.push_back(order.ordered_bundles(i));
  std::vector<std::size_t> digit(n, 0);
  while (true) {
    ItemMask mask = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mask |= u.globalize(lists[i][digit[i]], i);
    }
    fn(Allocation{mask});
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digit[pos] < lists[pos].size()) break;
      digit[pos] = 0;
      if (pos == 0) return;
    }
    if (n == 0) return;
  }
}

inline std::vector<Allocation> enumerate_allocations(const ItemUniverse& u) {
  std::vector<Allocation> out;
  out.reserve(std::size_t{1} << u.item_count());
  for_each_allocation(u, [&](Allocation a) { out.push_back(a); });
  return out;
}

// ---------------------------------------------------------------------------
// Set functions
// ---------------------------------------------------------------------------

enum class FunctionKind {
  table,
  additive,
  unit_demand,
  symmetric,
  xos,
  epg,
  player_symmetric,
};

inline std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::table: return "table";
    case FunctionKind::additive: return "additive";
    case FunctionKind::unit_demand: return "unit_demand";
    case FunctionKind::symmetric: return "symmetric";
    case FunctionKind::xos: return "xos";
    case FunctionKind::epg: return "epg";
    case FunctionKind::player_symmetric: return "player_symmetric";
  }
  return "unknown";
}

/// Contiguous block of global item indices a function is defined on,
/// split into per-player groups (a single group for valuations).
struct Scope {
  unsigned offset = 0;
  unsigned width = 0;
  std::vector<unsigned> groups;

  ItemMask mask() const { return low_bits(width) << offset; }

  static Scope of_player(const ItemUniverse& u, std::size_t player) {
    return Scope{u.offset(player), u.width(player), {u.width(player)}};
  }
  static Scope of_cost(const ItemUniverse& u) {
    return Scope{0, u.item_count(), u.widths()};
  }
  /// A single group of `width` items starting at index 0.
  static Scope flat(unsigned width) { return Scope{0, width, {width}}; }

  friend bool operator==(const Scope&, const Scope&) = default;
};

/// A normalized monotone set function over a scope. Every kind stores its
/// payload in local bit positions (bit 0 is the scope's first item).
class SetFunction {
 public:
  SetFunction() = default;

  static SetFunction table(Scope scope, std::vector<double> values) {
    if (scope.width > 26 || values.size() != (std::size_t{1} << scope.width)) {
      throw Error(ErrorKind::invalid_document,
                  "table must list one value per subset of its scope");
    }
    return SetFunction(FunctionKind::table, std::move(scope), std::move(values));
  }

  static SetFunction additive(Scope scope, std::vector<double> weights) {
    if (weights.size() != scope.width) {
      throw Error(ErrorKind::invalid_document,
                  "additive function needs one weight per item");
    }
    return SetFunction(FunctionKind::additive, std::move(scope),
                       std::move(weights));
  }

  static SetFunction unit_demand(Scope scope, double value) {
    SetFunction f(FunctionKind::unit_demand, std::move(scope), {});
    f.scalar_ = value;
    return f;
  }

  static SetFunction symmetric(Scope scope, std::vector<double> levels) {
    if (levels.size() != scope.width + 1) {
      throw Error(ErrorKind::invalid_document,
                  "symmetric function needs levels for sizes 0.." +
                      std::to_string(scope.width));
    }
    return SetFunction(FunctionKind::symmetric, std::move(scope),
                       std::move(levels));
  }

  static SetFunction xos(Scope scope, std::vector<std::vector<double>> clauses) {
    for (const auto& clause : clauses) {
      if (clause.size() != scope.width) {
        throw Error(ErrorKind::invalid_document,
                    "xos clause needs one weight per item");
      }
    }
    SetFunction f(FunctionKind::xos, std::move(scope), {});
    f.clauses_ = std::move(clauses);
    return f;
  }

  static SetFunction epg(Scope scope) {
    return SetFunction(FunctionKind::epg, std::move(scope), {});
  }

  /// `values` is dense over count vectors (k_1, ..., k_g) in mixed radix
  /// with k_1 most significant.
  static SetFunction player_symmetric(Scope scope, std::vector<double> values) {
    std::size_t expected = 1;
    for (unsigned g : scope.groups) expected *= g + 1;
    if (values.size() != expected) {
      throw Error(ErrorKind::invalid_document,
                  "player_symmetric function needs one value per count vector");
    }
    return SetFunction(FunctionKind::player_symmetric, std::move(scope),
                       std::move(values));
  }

  FunctionKind kind() const noexcept { return kind_; }
  const Scope& scope() const noexcept { return scope_; }
  const std::vector<double>& payload() const noexcept { return values_; }
  const std::vector<std::vector<double>>& clauses() const noexcept {
    return clauses_;
  }
  double scalar() const noexcept { return scalar_; }

  /// f(s) for a set given in global item indices.
  double operator()(ItemMask global) const {
    if ((global & ~scope_.mask()) != 0) {
      throw Error(ErrorKind::scope_violation,
                  "set contains items outside the function's scope");
    }
    return eval_local((global >> scope_.offset) & low_bits(scope_.width));
  }

  /// f(s) for a set given in local bit positions; no scope check.
  double eval_local(ItemMask s) const {
    switch (kind_) {
      case FunctionKind::table:
        return values_[s];
      case FunctionKind::additive: {
        double sum = 0.0;
        for (ItemMask rest = s; rest != 0; rest &= rest - 1) {
          sum += values_[static_cast<unsigned>(std::countr_zero(rest))];
        }
        return sum;
      }
      case FunctionKind::unit_demand:
        return s != 0 ? scalar_ : 0.0;
      case FunctionKind::symmetric:
        return values_[popcount(s)];
      case FunctionKind::xos: {
        double best = 0.0;
        for (const auto& clause : clauses_) {
          double sum = 0.0;
          for (ItemMask rest = s; rest != 0; rest &= rest - 1) {
            sum += clause[static_cast<unsigned>(std::countr_zero(rest))];
          }
          best = std::max(best, sum);
        }
        return best;
      }
      case FunctionKind::epg:
        return s != 0 ? 1.0 : 0.0;
      case FunctionKind::player_symmetric:
        return values_[count_index(s)];
    }
    return 0.0;
  }

  /// Dense table over all 2^width local subsets.
  std::vector<double> tabulate() const {
    if (scope_.width > 26) {
      throw Error(ErrorKind::size_limit, "cannot tabulate more than 2^26 sets");
    }
    std::vector<double> out(std::size_t{1} << scope_.width);
    for (ItemMask s = 0; s < out.size(); ++s) out[s] = eval_local(s);
    return out;
  }

  /// Mixed-radix index of the per-group count vector of s.
  std::size_t count_index(ItemMask s) const {
    std::size_t index = 0;
    unsigned shift = 0;
    for (unsigned g : scope_.groups) {
      index = index * (g + 1) + popcount((s >> shift) & low_bits(g));
      shift += g;
    }
    return index;
  }

 private:
  SetFunction(FunctionKind kind, Scope scope, std::vector<double> values)
      : kind_(kind), scope_(std::move(scope)), values_(std::move(values)) {}

  FunctionKind kind_ = FunctionKind::epg;
  Scope scope_;
  std::vector<double> values_;
  std::vector<std::vector<double>> clauses_;
  double scalar_ = 0.0;
};

// ---------------------------------------------------------------------------
// Class checks
// ---------------------------------------------------------------------------

enum class FunctionClass {
  monotone,
  submodular,
  supermodular,
  subadditive,
  symmetric,
  player_symmetric,
  xos,
};

inline std::string_view to_string(FunctionClass c) {
  switch (c) {
    case FunctionClass::monotone: return "monotone";
    case FunctionClass::submodular: return "submodular";
    case FunctionClass::supermodular: return "supermodular";
    case FunctionClass::subadditive: return "subadditive";
    case FunctionClass::symmetric: return "symmetric";
    case FunctionClass::player_symmetric: return "player_symmetric";
    case FunctionClass::xos: return "xos";
  }
  return "unknown";
}

/// A violating pair (s, t) in global indices with both sides of the
/// defining inequality. For monotone, s is a subset of t and
/// lhs = f(s), rhs = f(t). For the lattice classes lhs = f(s) + f(t) and
/// rhs = f(s|t) + f(s&t) (f(s|t) alone for subadditive). For the symmetry
/// classes lhs = f(s), rhs = f(t).
struct ClassWitness {
  ItemMask s = 0;
  ItemMask t = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ClassVerdict {
  bool holds = true;
  std::optional<ClassWitness> witness;

  explicit operator bool() const noexcept { return holds; }
};

namespace detail {

inline ClassVerdict fail(const Scope& scope, ItemMask s, ItemMask t, double lhs,
                         double rhs) {
  return ClassVerdict{false, ClassWitness{s << scope.offset, t << scope.offset,
                                          lhs, rhs}};
}

}  // namespace detail

/// Exhaustive check of the defining inequality of `cls` over the whole
/// scope of f.
inline ClassVerdict check_class(const SetFunction& f, FunctionClass cls) {
  const Scope& scope = f.scope();
  const unsigned w = scope.width;
  if (cls == FunctionClass::xos) {
    throw Error(ErrorKind::unsupported_class,
                "xos membership is not decided for arbitrary functions");
  }
  if (w > kGenericLimitLog2) {
    throw Error(ErrorKind::size_limit, "scope too large for exhaustive check");
  }
  if (cls == FunctionClass::subadditive && w > kSubadditiveLimit) {
    throw Error(ErrorKind::size_limit,
                "subadditivity is checked only for scopes of at most 12 items");
  }
  const std::vector<double> v = f.tabulate();
  const ItemMask full = low_bits(w);

  switch (cls) {
    case FunctionClass::monotone:
      for (ItemMask s = 0; s <= full; ++s) {
        for (unsigned x = 0; x < w; ++x) {
          ItemMask t = s | (ItemMask{1} << x);
          if (t != s && v[t] < v[s] - kTolerance) {
            return detail::fail(scope, s, t, v[s], v[t]);
          }
        }
      }
      return {};
    case FunctionClass::submodular:
    case FunctionClass::supermodular: {
      // Marginal form: f(S+x) + f(S+y) vs f(S+x+y) + f(S).
      const bool sub = cls == FunctionClass::submodular;
      for (ItemMask s = 0; s <= full; ++s) {
        for (unsigned x = 0; x < w; ++x) {
          const ItemMask bx = ItemMask{1} << x;
          if (s & bx) continue;
          for (unsigned y = x + 1; y < w; ++y) {
            const ItemMask by = ItemMask{1} << y;
            if (s & by) continue;
            double lhs = v[s | bx] + v[s | by];
            double rhs = v[s | bx | by] + v[s];
            bool ok = sub ? lhs >= rhs - kTolerance : lhs <= rhs + kTolerance;
            if (!ok) return detail::fail(scope, s | bx, s | by, lhs, rhs);
          }
        }
      }
      return {};
    }
    case FunctionClass::subadditive:
      for (ItemMask s = 0; s <= full; ++s) {
        for (ItemMask t = 0; t <= full; ++t) {
          double lhs = v[s] + v[t];
          double rhs = v[s | t];
          if (lhs < rhs - kTolerance) {
            return detail::fail(scope, s, t, lhs, rhs);
          }
        }
      }
      return {};
    case FunctionClass::symmetric: {
      std::vector<std::optional<ItemMask>> first(w + 1);
      for (ItemMask s = 0; s <= full; ++s) {
        auto& ref = first[popcount(s)];
        if (!ref) {
          ref = s;
        } else if (std::abs(v[s] - v[*ref]) > kTolerance) {
          return detail::fail(scope, *ref, s, v[*ref], v[s]);
        }
      }
      return {};
    }
    case FunctionClass::player_symmetric: {
      std::map<std::size_t, ItemMask> first;
      for (ItemMask s = 0; s <= full; ++s) {
        auto [it, inserted] = first.emplace(f.count_index(s), s);
        if (!inserted && std::abs(v[s] - v[it->second]) > kTolerance) {
          return detail::fail(scope, it->second, s, v[it->second], v[s]);
        }
      }
      return {};
    }
    case FunctionClass::xos:
      break;
  }
  return {};
}

/// Normalization and monotonicity. Table kinds are checked exhaustively;
/// structured kinds by their parameters.
inline void validate_function(const SetFunction& f, std::string_view label) {
  const std::string where(label);
  auto non_negative = [&](double w, const char* what) {
    if (!std::isfinite(w)) {
      throw Error(ErrorKind::invalid_document, where + ": non-finite " + what);
    }
    if (w < 0.0) {
      throw Error(ErrorKind::not_monotone,
                  where + ": negative " + what + " makes the function decrease");
    }
  };
  switch (f.kind()) {
    case FunctionKind::epg:
      return;
    case FunctionKind::unit_demand:
      non_negative(f.scalar(), "value");
      return;
    case FunctionKind::additive:
      for (double w : f.payload()) non_negative(w, "weight");
      return;
    case FunctionKind::xos:
      for (const auto& clause : f.clauses()) {
        for (double w : clause) non_negative(w, "clause weight");
      }
      return;
    case FunctionKind::symmetric: {
      const auto& levels = f.payload();
      for (double x : levels) {
        if (!std::isfinite(x)) {
          throw Error(ErrorKind::invalid_document, where + ": non-finite level");
        }
      }
      if (std::abs(levels[0]) > kTolerance) {
        throw Error(ErrorKind::not_normalized,
                    where + ": level for the empty set is " +
                        std::to_string(levels[0]));
      }
      for (std::size_t k = 1; k < levels.size(); ++k) {
        if (levels[k] < levels[k - 1] - kTolerance) {
          throw Error(ErrorKind::not_monotone,
                      where + ": level " + std::to_string(k) +
                          " is below level " + std::to_string(k - 1));
        }
      }
      return;
    }
    case FunctionKind::table:
    case FunctionKind::player_symmetric: {
      for (double x : f.payload()) {
        if (!std::isfinite(x)) {
          throw Error(ErrorKind::invalid_document, where + ": non-finite value");
        }
      }
      if (std::abs(f.eval_local(0)) > kTolerance) {
        throw Error(ErrorKind::not_normalized,
                    where + ": value of the empty set is " +
                        std::to_string(f.eval_local(0)));
      }
      auto verdict = check_class(f, FunctionClass::monotone);
      if (!verdict) {
        const auto& w = *verdict.witness;
        throw Error(ErrorKind::not_monotone,
                    where + ": f(S)=" + std::to_string(w.lhs) +
                        " > f(T)=" + std::to_string(w.rhs) + " for S=" +
                        std::to_string(w.s) + " subset of T=" +
                        std::to_string(w.t) + " (bit masks)");
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

struct Instance {
  ItemUniverse universe;
  std::vector<SetFunction> valuations;
  SetFunction cost;

  std::size_t players() const { return universe.players(); }
};

enum class SizeGuard {
  generic,     // prod_i 2^{|M_i|} <= 2^20
  per_player,  // each 2^{|M_i|} <= 2^20
  none,
};

/// Verifies every instance invariant; throws Error on the first violation.
inline void check_instance(const Instance& inst,
                           SizeGuard guard = SizeGuard::generic) {
  const ItemUniverse& u = inst.universe;
  if (inst.valuations.size() != u.players()) {
    throw Error(ErrorKind::invalid_document,
                "expected one valuation per player");
  }
  for (std::size_t i = 0; i < u.players(); ++i) {
    if (!(inst.valuations[i].scope() == Scope::of_player(u, i))) {
      throw Error(ErrorKind::scope_violation,
                  "valuation " + std::to_string(i + 1) +
                      " is not scoped to its player's items");
    }
  }
  if (!(inst.cost.scope() == Scope::of_cost(u))) {
    throw Error(ErrorKind::scope_violation,
                "cost function is not scoped to the full item set");
  }
  if (guard == SizeGuard::generic && u.item_count() > kGenericLimitLog2) {
    throw Error(ErrorKind::size_limit,
                "allocation lattice has 2^" + std::to_string(u.item_count()) +
                    " elements; the generic path accepts at most 2^20");
  }
  if (guard == SizeGuard::per_player) {
    for (std::size_t i = 0; i < u.players(); ++i) {
      if (u.width(i) > kGenericLimitLog2) {
        throw Error(ErrorKind::size_limit,
                    "player " + std::to_string(i + 1) +
                        " has more than 2^20 bundles");
      }
    }
  }
  for (std::size_t i = 0; i < u.players(); ++i) {
    validate_function(inst.valuations[i],
                      "valuation " + std::to_string(i + 1));
  }
  validate_function(inst.cost, "cost");
}

/// Valuations symmetric and cost player-wise symmetric.
inline bool is_symmetric_instance(const Instance& inst) {
  for (const auto& v : inst.valuations) {
    if (v.scope().width > kGenericLimitLog2) return false;
    if (!check_class(v, FunctionClass::symmetric)) return false;
  }
  if (inst.cost.kind() == FunctionKind::player_symmetric ||
      inst.cost.kind() == FunctionKind::epg) {
    return true;
  }
  if (inst.universe.item_count() > kGenericLimitLog2) return false;
  return check_class(inst.cost, FunctionClass::player_symmetric).holds;
}

}  // namespace costshare

#endif  // COSTSHARE_MODEL_HPP
