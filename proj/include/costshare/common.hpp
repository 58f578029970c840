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

#ifndef COSTSHARE_COMMON_HPP
#define COSTSHARE_COMMON_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace costshare {

/// Bit set over global item indices. Bit k is item k of the universe.
using ItemMask = std::uint64_t;

/// Absolute tolerance used by every comparison in checkers and audits.
inline constexpr double kTolerance = 1e-9;

/// Hard cap on the number of items an instance may carry.
inline constexpr unsigned kMaxItems = 64;

/// Generic-path guard: at most 2^20 allocations are enumerated.
inline constexpr unsigned kGenericLimitLog2 = 20;

/// Subadditivity is an all-pairs check; it is only offered up to this width.
inline constexpr unsigned kSubadditiveLimit = 12;

/// Generic evaluators sweep 2^n player subsets.
inline constexpr unsigned kMaxPlayersGeneric = 20;

enum class ErrorKind {
  invalid_document,
  disjointness_violation,
  not_normalized,
  not_monotone,
  scope_violation,
  size_limit,
  unsupported_class,
  invalid_tie_break,
  unknown_name,
  internal_consistency,
  invalid_argument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_document: return "InvalidDocument";
    case ErrorKind::disjointness_violation: return "DisjointnessViolation";
    case ErrorKind::not_normalized: return "NotNormalized";
    case ErrorKind::not_monotone: return "NotMonotone";
    case ErrorKind::scope_violation: return "ScopeViolation";
    case ErrorKind::size_limit: return "SizeLimit";
    case ErrorKind::unsupported_class: return "UnsupportedClass";
    case ErrorKind::invalid_tie_break: return "InvalidTieBreak";
    case ErrorKind::unknown_name: return "UnknownName";
    case ErrorKind::internal_consistency: return "InternalConsistency";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Mask with the low `width` bits set.
constexpr ItemMask low_bits(unsigned width) noexcept {
  return width >= 64 ? ~ItemMask{0} : ((ItemMask{1} << width) - 1);
}

constexpr unsigned popcount(ItemMask mask) noexcept {
  return static_cast<unsigned>(std::popcount(mask));
}

/// H_n by direct summation.
inline double harmonic(std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) sum += 1.0 / static_cast<double>(k);
  return sum;
}

inline double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0;
  double result = 1.0;
  for (unsigned j = 1; j <= k; ++j) {
    result = result * static_cast<double>(n - k + j) / static_cast<double>(j);
  }
  return result;
}

}  // namespace costshare

#endif  // COSTSHARE_COMMON_HPP
