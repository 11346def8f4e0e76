// Copyright 2026 The d2dcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// @file
/// Cache state and replacement policies.
///
/// Every policy answers the same question: a unit u' arrives at a cache that
/// cannot hold it together with its residents C; which subset of C stays?
///
///   lru   evict least recently accessed first
///   pdc   evict lowest request probability first
///   sxo   evict lowest access-count-per-bit first (large, rarely used)
///   epdc  evict lowest prospective energy e_all first
///   opt   keep the subset of maximum total e_all that fits (0/1 knapsack on
///         weights discretized to delta bits)
///
/// Equal keys evict the larger unit first, then the smaller unit id, so every
/// decision is a deterministic function of (cache, unit). The incoming unit
/// is always admitted unless it is larger than the whole cache.

#ifndef D2DCACHE_POLICIES_HPP
#define D2DCACHE_POLICIES_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "d2dcache/catalog.hpp"

namespace d2dcache {

using Bits = std::int64_t;

struct CacheEntry {
  UnitId unit = 0;
  Bits size_bits = 0;
  double last_access = 0.0;
  std::int64_t access_count = 0;
  double e_all = 0.0;
  double request_prob = 0.0;
};

// What a policy needs to know about an incoming unit.
struct UnitInfo {
  UnitId unit = 0;
  Bits size_bits = 0;
  double e_all = 0.0;
  double request_prob = 0.0;
};

class CacheState {
 public:
  explicit CacheState(Bits capacity_bits);

  Bits capacity_bits() const { return capacity_; }
  Bits used_bits() const { return used_; }
  Bits free_bits() const { return capacity_ - used_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool contains(UnitId u) const { return index_.contains(u); }
  const CacheEntry* find(UnitId u) const;
  // Residents in an unspecified but deterministic order.
  std::span<const CacheEntry> entries() const { return entries_; }

  // Refreshes recency and bumps the access count of a resident unit.
  void touch(UnitId u, double now);
  // Throws InvariantViolation on duplicates or capacity overflow.
  void add(const CacheEntry& entry);
  void remove(UnitId u);

 private:
  Bits capacity_;
  Bits used_ = 0;
  std::vector<CacheEntry> entries_;
  std::unordered_map<UnitId, std::size_t> index_;
};

struct EvictionDecision {
  std::vector<UnitId> retained;
  std::vector<UnitId> evicted;
  bool inserted = false;
  // u' was already cached: metadata touch only.
  bool already_resident = false;
  // u' is larger than the cache: served without caching.
  bool oversize = false;
};

enum class PolicyKind : std::uint8_t { kLru, kPdc, kSxo, kEpdc, kOpt };

enum class OptSolver : std::uint8_t {
  // Weight-class enumeration when residents take at most two discretized
  // weights, table DP otherwise. Both are exact for the discretized problem.
  kAuto,
  kTable,
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kEpdc;
  Bits delta_bits = 10'000;
  bool pdc_randomized = false;
  OptSolver opt_solver = OptSolver::kAuto;
};

std::string_view policy_name(PolicyKind kind);
// Throws DomainError for unknown names.
PolicyKind parse_policy(std::string_view name);
std::span<const PolicyKind> all_policies();

// Full insert decision including the resident and fast paths. Randomized PDC
// draws from rng; all other policies ignore it. With list_retained false the
// retained list is left empty, which saves O(n log n) per call.
EvictionDecision decide(const PolicyConfig& policy, const CacheState& cache,
                        const UnitInfo& incoming, Rng* rng = nullptr,
                        bool list_retained = true);

// decide() followed by applying the decision at time now.
EvictionDecision insert(const PolicyConfig& policy, CacheState& cache,
                        const UnitInfo& incoming, double now,
                        Rng* rng = nullptr, bool list_retained = true);

// Eviction paths. Each assumes u' does not fit as-is and is not resident.
EvictionDecision lru_replace(const CacheState& cache, const UnitInfo& incoming);
EvictionDecision pdc_replace(const CacheState& cache, const UnitInfo& incoming);
EvictionDecision pdc_random_replace(const CacheState& cache,
                                    const UnitInfo& incoming, Rng& rng);
EvictionDecision sxo_replace(const CacheState& cache, const UnitInfo& incoming);
EvictionDecision epdc_replace(const CacheState& cache,
                              const UnitInfo& incoming);
EvictionDecision opt_replace(const CacheState& cache, const UnitInfo& incoming,
                             Bits delta_bits,
                             OptSolver solver = OptSolver::kAuto);
// Exhaustive search with exact sizes. Throws DomainError above
// kBruteForceLimit residents.
inline constexpr std::size_t kBruteForceLimit = 20;
EvictionDecision brute_force_replace(const CacheState& cache,
                                     const UnitInfo& incoming);

// Plain 0/1 knapsack solvers over integer weights; return the keep mask.
struct KnapsackItem {
  double value = 0.0;
  Bits weight = 0;
};
std::vector<bool> knapsack_table(std::span<const KnapsackItem> items,
                                 Bits budget);
// Exact when items take at most two distinct weights; std::nullopt otherwise.
// Items must be ordered by retention preference within equal weights.
std::optional<std::vector<bool>> knapsack_two_weights(
    std::span<const KnapsackItem> items, Bits budget);

// Sum of e_all over a decision's retained set.
double retained_value(const CacheState& cache, const EvictionDecision& d);

}  // namespace d2dcache

#endif  // D2DCACHE_POLICIES_HPP
