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

#include "d2dcache/policies.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include "d2dcache/errors.hpp"

namespace d2dcache {

CacheState::CacheState(Bits capacity_bits) : capacity_(capacity_bits) {
  if (capacity_bits < 0) throw DomainError("cache capacity must be >= 0");
}

const CacheEntry* CacheState::find(UnitId u) const {
  const auto it = index_.find(u);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void CacheState::touch(UnitId u, double now) {
  const auto it = index_.find(u);
  if (it == index_.end()) {
    throw InvariantViolation("touch on a unit that is not cached");
  }
  CacheEntry& e = entries_[it->second];
  e.last_access = now;
  ++e.access_count;
}

void CacheState::add(const CacheEntry& entry) {
  if (index_.contains(entry.unit)) {
    throw InvariantViolation("unit " + std::to_string(entry.unit) +
                             " cached twice");
  }
  if (entry.size_bits <= 0 || used_ + entry.size_bits > capacity_) {
    throw InvariantViolation("cache insert exceeds capacity");
  }
  index_.emplace(entry.unit, entries_.size());
  entries_.push_back(entry);
  used_ += entry.size_bits;
}

void CacheState::remove(UnitId u) {
  const auto it = index_.find(u);
  if (it == index_.end()) {
    throw InvariantViolation("evicting a unit that is not cached");
  }
  const std::size_t pos = it->second;
  used_ -= entries_[pos].size_bits;
  index_.erase(it);
  if (pos + 1 != entries_.size()) {
    entries_[pos] = entries_.back();
    index_[entries_[pos].unit] = pos;
  }
  entries_.pop_back();
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kLru:
      return "lru";
    case PolicyKind::kPdc:
      return "pdc";
    case PolicyKind::kSxo:
      return "sxo";
    case PolicyKind::kEpdc:
      return "epdc";
    case PolicyKind::kOpt:
      return "opt";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind k : all_policies()) {
    if (policy_name(k) == name) return k;
  }
  throw DomainError("unknown policy '" + std::string(name) +
                    "' (expected lru, pdc, sxo, epdc or opt)");
}

std::span<const PolicyKind> all_policies() {
  static constexpr std::array<PolicyKind, 5> kAll = {
      PolicyKind::kLru, PolicyKind::kPdc, PolicyKind::kSxo, PolicyKind::kEpdc,
      PolicyKind::kOpt};
  return kAll;
}

namespace {

Bits overflow(const CacheState& cache, const UnitInfo& incoming) {
  return cache.used_bits() + incoming.size_bits - cache.capacity_bits();
}

// Retained = residents minus evicted, ascending by unit id.
void fill_retained(const CacheState& cache, EvictionDecision& d) {
  std::vector<UnitId> evicted = d.evicted;
  std::sort(evicted.begin(), evicted.end());
  d.retained.clear();
  d.retained.reserve(cache.size() - evicted.size());
  for (const CacheEntry& e : cache.entries()) {
    if (!std::binary_search(evicted.begin(), evicted.end(), e.unit)) {
      d.retained.push_back(e.unit);
    }
  }
  std::sort(d.retained.begin(), d.retained.end());
}

struct Ranked {
  double key;
  const CacheEntry* entry;
};

// Total order: smaller key first, then larger size, then smaller id.
bool evicts_before(const Ranked& a, const Ranked& b) {
  if (a.key != b.key) return a.key < b.key;
  if (a.entry->size_bits != b.entry->size_bits) {
    return a.entry->size_bits > b.entry->size_bits;
  }
  return a.entry->unit < b.entry->unit;
}

// Evicts in ascending key order until u' fits. Heap selection, so only the
// victims are ordered: O(n + k log n).
template <class KeyFn>
EvictionDecision greedy_evict(const CacheState& cache,
                              const UnitInfo& incoming, KeyFn key) {
  EvictionDecision d;
  std::vector<Ranked> heap;
  heap.reserve(cache.size());
  for (const CacheEntry& e : cache.entries()) heap.push_back({key(e), &e});
  auto later = [](const Ranked& a, const Ranked& b) {
    return evicts_before(b, a);
  };
  std::make_heap(heap.begin(), heap.end(), later);
  Bits need = overflow(cache, incoming);
  while (need > 0 && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), later);
    const CacheEntry* victim = heap.back().entry;
    heap.pop_back();
    d.evicted.push_back(victim->unit);
    need -= victim->size_bits;
  }
  if (need > 0) {
    throw InvariantViolation("eviction could not free enough space");
  }
  d.inserted = true;
  return d;
}

Bits ceil_div(Bits a, Bits b) { return (a + b - 1) / b; }

}  // namespace

namespace {

EvictionDecision lru_core(const CacheState& cache,
                             const UnitInfo& incoming) {
  return greedy_evict(cache, incoming,
                      [](const CacheEntry& e) { return e.last_access; });
}

EvictionDecision pdc_core(const CacheState& cache,
                             const UnitInfo& incoming) {
  return greedy_evict(cache, incoming,
                      [](const CacheEntry& e) { return e.request_prob; });
}

EvictionDecision pdc_random_core(const CacheState& cache,
                                    const UnitInfo& incoming, Rng& rng) {
  // Victims drawn one at a time with weight 1 - p / p_max, so the most
  // popular resident is only ever taken when nothing else is left.
  EvictionDecision d;
  std::vector<const CacheEntry*> pool;
  pool.reserve(cache.size());
  for (const CacheEntry& e : cache.entries()) pool.push_back(&e);
  std::sort(pool.begin(), pool.end(),
            [](const CacheEntry* a, const CacheEntry* b) {
              return evicts_before({a->request_prob, a},
                                   {b->request_prob, b});
            });
  double p_max = 0.0;
  for (const CacheEntry* e : pool) p_max = std::max(p_max, e->request_prob);
  Bits need = overflow(cache, incoming);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (need > 0 && !pool.empty()) {
    double total = 0.0;
    for (const CacheEntry* e : pool) {
      total += p_max > 0 ? 1.0 - e->request_prob / p_max : 0.0;
    }
    std::size_t pick = 0;
    if (total > 0) {
      double target = unit(rng) * total;
      for (pick = 0; pick + 1 < pool.size(); ++pick) {
        target -= p_max > 0 ? 1.0 - pool[pick]->request_prob / p_max : 0.0;
        if (target < 0) break;
      }
    }
    d.evicted.push_back(pool[pick]->unit);
    need -= pool[pick]->size_bits;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  if (need > 0) {
    throw InvariantViolation("eviction could not free enough space");
  }
  d.inserted = true;
  return d;
}

EvictionDecision sxo_core(const CacheState& cache,
                             const UnitInfo& incoming) {
  return greedy_evict(cache, incoming, [](const CacheEntry& e) {
    return static_cast<double>(e.access_count) /
           static_cast<double>(e.size_bits);
  });
}

EvictionDecision epdc_core(const CacheState& cache,
                              const UnitInfo& incoming) {
  return greedy_evict(cache, incoming,
                      [](const CacheEntry& e) { return e.e_all; });
}

}  // namespace

std::vector<bool> knapsack_table(std::span<const KnapsackItem> items,
                                 Bits budget) {
  const std::size_t n = items.size();
  std::vector<bool> keep(n, false);
  if (budget <= 0 || n == 0) return keep;
  const std::size_t width = static_cast<std::size_t>(budget) + 1;
  std::vector<double> best(width, 0.0);
  // take[i] marks capacities where item i improved the row.
  std::vector<std::vector<std::uint64_t>> take(
      n, std::vector<std::uint64_t>((width + 63) / 64, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const Bits w = items[i].weight;
    if (w <= 0) throw DomainError("knapsack weights must be positive");
    if (w > budget) continue;
    const double v = items[i].value;
    for (Bits j = budget; j >= w; --j) {
      const double with = best[j - w] + v;
      if (with > best[j]) {
        best[j] = with;
        take[i][j >> 6] |= std::uint64_t{1} << (j & 63);
      }
    }
  }
  Bits j = budget;
  for (std::size_t i = n; i-- > 0;) {
    if (take[i][j >> 6] >> (j & 63) & 1) {
      keep[i] = true;
      j -= items[i].weight;
    }
  }
  return keep;
}

std::optional<std::vector<bool>> knapsack_two_weights(
    std::span<const KnapsackItem> items, Bits budget) {
  std::vector<Bits> weights;
  for (const KnapsackItem& it : items) {
    if (it.value < 0) throw DomainError("knapsack values must be >= 0");
    if (std::find(weights.begin(), weights.end(), it.weight) ==
        weights.end()) {
      weights.push_back(it.weight);
      if (weights.size() > 2) return std::nullopt;
    }
  }
  std::vector<bool> keep(items.size(), false);
  if (weights.empty() || budget <= 0) return keep;
  std::sort(weights.begin(), weights.end());
  std::array<std::vector<std::size_t>, 2> cls;
  for (std::size_t i = 0; i < items.size(); ++i) {
    cls[items[i].weight == weights[0] ? 0 : 1].push_back(i);
  }
  // Within a weight class the best k items are its first k (input order is
  // retention preference, values non-increasing).
  auto prefix = [&](const std::vector<std::size_t>& c) {
    std::vector<double> p(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      p[k + 1] = p[k] + items[c[k]].value;
    }
    return p;
  };
  for (const auto& c : cls) {
    for (std::size_t k = 1; k < c.size(); ++k) {
      if (items[c[k]].value > items[c[k - 1]].value) {
        throw DomainError("items must be ordered by value within a weight");
      }
    }
  }
  const std::vector<double> p0 = prefix(cls[0]);
  const std::vector<double> p1 = prefix(cls[1]);
  const Bits w0 = weights[0];
  const Bits w1 = weights.size() > 1 ? weights[1] : 1;
  double best = -1.0;
  std::size_t best0 = 0;
  std::size_t best1 = 0;
  for (std::size_t k0 = 0; k0 <= cls[0].size(); ++k0) {
    const Bits used = static_cast<Bits>(k0) * w0;
    if (used > budget) break;
    const std::size_t k1 = std::min<std::size_t>(
        cls[1].size(), static_cast<std::size_t>((budget - used) / w1));
    const double v = p0[k0] + p1[k1];
    if (v > best) {
      best = v;
      best0 = k0;
      best1 = k1;
    }
  }
  for (std::size_t k = 0; k < best0; ++k) keep[cls[0][k]] = true;
  for (std::size_t k = 0; k < best1; ++k) keep[cls[1][k]] = true;
  return keep;
}

namespace {

EvictionDecision opt_core(const CacheState& cache, const UnitInfo& incoming,
                             Bits delta_bits, OptSolver solver) {
  if (delta_bits <= 0) throw DomainError("delta must be > 0");
  // Retention preference: larger e_all, then smaller size, then larger id
  // (the reverse of the eviction tie-break).
  std::vector<Ranked> order;
  order.reserve(cache.size());
  for (const CacheEntry& e : cache.entries()) order.push_back({e.e_all, &e});
  std::sort(order.begin(), order.end(),
            [](const Ranked& a, const Ranked& b) {
              return evicts_before(b, a);
            });
  std::vector<KnapsackItem> items;
  items.reserve(order.size());
  for (const Ranked& r : order) {
    items.push_back({r.entry->e_all, ceil_div(r.entry->size_bits, delta_bits)});
  }
  const Bits budget =
      (cache.capacity_bits() - incoming.size_bits) / delta_bits;
  std::vector<bool> keep;
  if (solver == OptSolver::kAuto) {
    if (auto grouped = knapsack_two_weights(items, budget)) {
      keep = std::move(*grouped);
    }
  }
  if (keep.empty() && !items.empty()) keep = knapsack_table(items, budget);

  EvictionDecision d;
  // Evicted listed from the least to the most preferred.
  for (std::size_t i = order.size(); i-- > 0;) {
    if (!keep[i]) d.evicted.push_back(order[i].entry->unit);
  }
  d.inserted = true;
  return d;
}

}  // namespace

EvictionDecision brute_force_replace(const CacheState& cache,
                                     const UnitInfo& incoming) {
  const std::size_t n = cache.size();
  if (n > kBruteForceLimit) {
    throw DomainError("brute force limited to " +
                      std::to_string(kBruteForceLimit) + " residents");
  }
  const auto entries = cache.entries();
  const Bits room = cache.capacity_bits() - incoming.size_bits;
  double best = -1.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    Bits size = 0;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        size += entries[i].size_bits;
        value += entries[i].e_all;
      }
    }
    if (size <= room && value > best) {
      best = value;
      best_mask = mask;
    }
  }
  EvictionDecision d;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(best_mask >> i & 1)) d.evicted.push_back(entries[i].unit);
  }
  d.inserted = true;
  fill_retained(cache, d);
  return d;
}

EvictionDecision lru_replace(const CacheState& cache,
                             const UnitInfo& incoming) {
  EvictionDecision d = lru_core(cache, incoming);
  fill_retained(cache, d);
  return d;
}

EvictionDecision pdc_replace(const CacheState& cache,
                             const UnitInfo& incoming) {
  EvictionDecision d = pdc_core(cache, incoming);
  fill_retained(cache, d);
  return d;
}

EvictionDecision pdc_random_replace(const CacheState& cache,
                                    const UnitInfo& incoming, Rng& rng) {
  EvictionDecision d = pdc_random_core(cache, incoming, rng);
  fill_retained(cache, d);
  return d;
}

EvictionDecision sxo_replace(const CacheState& cache,
                             const UnitInfo& incoming) {
  EvictionDecision d = sxo_core(cache, incoming);
  fill_retained(cache, d);
  return d;
}

EvictionDecision epdc_replace(const CacheState& cache,
                              const UnitInfo& incoming) {
  EvictionDecision d = epdc_core(cache, incoming);
  fill_retained(cache, d);
  return d;
}

EvictionDecision opt_replace(const CacheState& cache, const UnitInfo& incoming,
                             Bits delta_bits, OptSolver solver) {
  EvictionDecision d = opt_core(cache, incoming, delta_bits, solver);
  fill_retained(cache, d);
  return d;
}

EvictionDecision decide(const PolicyConfig& policy, const CacheState& cache,
                        const UnitInfo& incoming, Rng* rng,
                        bool list_retained) {
  if (incoming.size_bits <= 0) throw DomainError("unit size must be > 0");
  EvictionDecision d;
  if (cache.contains(incoming.unit)) {
    d.already_resident = true;
  } else if (incoming.size_bits > cache.capacity_bits()) {
    d.oversize = true;
  } else if (overflow(cache, incoming) <= 0) {
    d.inserted = true;
  } else {
    switch (policy.kind) {
      case PolicyKind::kLru:
        d = lru_core(cache, incoming);
        break;
      case PolicyKind::kPdc:
        if (!policy.pdc_randomized) {
          d = pdc_core(cache, incoming);
        } else if (rng == nullptr) {
          throw DomainError("randomized PDC needs a random source");
        } else {
          d = pdc_random_core(cache, incoming, *rng);
        }
        break;
      case PolicyKind::kSxo:
        d = sxo_core(cache, incoming);
        break;
      case PolicyKind::kEpdc:
        d = epdc_core(cache, incoming);
        break;
      case PolicyKind::kOpt:
        d = opt_core(cache, incoming, policy.delta_bits, policy.opt_solver);
        break;
    }
  }
  if (list_retained) fill_retained(cache, d);
  return d;
}

EvictionDecision insert(const PolicyConfig& policy, CacheState& cache,
                        const UnitInfo& incoming, double now, Rng* rng,
                        bool list_retained) {
  EvictionDecision d = decide(policy, cache, incoming, rng, list_retained);
  if (d.already_resident) {
    cache.touch(incoming.unit, now);
    return d;
  }
  for (UnitId u : d.evicted) cache.remove(u);
  if (d.inserted) {
    CacheEntry e;
    e.unit = incoming.unit;
    e.size_bits = incoming.size_bits;
    e.last_access = now;
    e.access_count = 1;
    e.e_all = incoming.e_all;
    e.request_prob = incoming.request_prob;
    cache.add(e);
  }
  return d;
}

double retained_value(const CacheState& cache, const EvictionDecision& d) {
  double sum = 0.0;
  for (UnitId u : d.retained) {
    if (const CacheEntry* e = cache.find(u)) sum += e->e_all;
  }
  return sum;
}

}  // namespace d2dcache
