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

#include <algorithm>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "d2dcache/errors.hpp"
#include "d2dcache/policies.hpp"

namespace d2dcache {
namespace {

CacheEntry entry(UnitId u, Bits size, double e_all = 1.0, double last = 0.0,
                 std::int64_t count = 1, double prob = 0.1) {
  CacheEntry e;
  e.unit = u;
  e.size_bits = size;
  e.e_all = e_all;
  e.last_access = last;
  e.access_count = count;
  e.request_prob = prob;
  return e;
}

UnitInfo incoming(UnitId u, Bits size, double e_all = 1.0) {
  return UnitInfo{u, size, e_all, 0.1};
}

std::set<UnitId> as_set(const std::vector<UnitId>& v) {
  return {v.begin(), v.end()};
}

// Random instance: n residents filling the cache, one non-resident incoming
// unit that does not fit.
struct Instance {
  CacheState cache{0};
  UnitInfo in;
};

Instance random_instance(Rng& rng, int n, Bits grid) {
  std::uniform_int_distribution<Bits> cells(1, 40);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::vector<CacheEntry> es;
  Bits total = 0;
  for (int i = 0; i < n; ++i) {
    CacheEntry e = entry(i + 1, cells(rng) * grid, value(rng),
                         value(rng), 1 + static_cast<std::int64_t>(rng() % 9),
                         value(rng) / 100);
    total += e.size_bits;
    es.push_back(e);
  }
  Instance inst;
  inst.cache = CacheState(total);
  for (const CacheEntry& e : es) inst.cache.add(e);
  inst.in = UnitInfo{n + 1, cells(rng) * grid, value(rng), 0.01};
  return inst;
}

// Subset enumeration oracle independent of brute_force_replace.
double best_objective(const CacheState& cache, Bits incoming_size) {
  const auto es = cache.entries();
  const Bits room = cache.capacity_bits() - incoming_size;
  double best = 0.0;
  for (std::uint32_t m = 0; m < (1u << es.size()); ++m) {
    Bits s = 0;
    double v = 0;
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (m >> i & 1) {
        s += es[i].size_bits;
        v += es[i].e_all;
      }
    }
    if (s <= room) best = std::max(best, v);
  }
  return best;
}

TEST(CacheState, AddTouchRemove) {
  CacheState c(100);
  c.add(entry(1, 40));
  c.add(entry(2, 60));
  EXPECT_EQ(c.used_bits(), 100);
  EXPECT_EQ(c.free_bits(), 0);
  EXPECT_THROW(c.add(entry(3, 1)), InvariantViolation);
  EXPECT_THROW(c.add(entry(1, 1)), InvariantViolation);
  c.touch(1, 5.0);
  EXPECT_EQ(c.find(1)->access_count, 2);
  EXPECT_DOUBLE_EQ(c.find(1)->last_access, 5.0);
  c.remove(1);
  EXPECT_FALSE(c.contains(1));
  EXPECT_TRUE(c.contains(2));
  EXPECT_EQ(c.find(2)->size_bits, 60);
  EXPECT_THROW(c.remove(1), InvariantViolation);
  EXPECT_THROW(c.touch(1, 0.0), InvariantViolation);
}

TEST(Policies, NamesRoundTrip) {
  for (PolicyKind k : all_policies()) {
    EXPECT_EQ(parse_policy(policy_name(k)), k);
  }
  EXPECT_THROW(parse_policy("fifo"), DomainError);
}

TEST(Policies, FitsWithoutEviction) {
  CacheState c(100);
  c.add(entry(1, 30));
  for (PolicyKind k : all_policies()) {
    const EvictionDecision d =
        decide(PolicyConfig{k, 1}, c, incoming(2, 70));
    EXPECT_TRUE(d.inserted);
    EXPECT_TRUE(d.evicted.empty());
    EXPECT_EQ(d.retained, std::vector<UnitId>{1});
  }
}

TEST(Policies, ResidentIsTouchedOnly) {
  CacheState c(100);
  c.add(entry(1, 30));
  const EvictionDecision d =
      insert(PolicyConfig{PolicyKind::kLru, 1}, c, incoming(1, 30), 9.0);
  EXPECT_TRUE(d.already_resident);
  EXPECT_FALSE(d.inserted);
  EXPECT_EQ(c.find(1)->access_count, 2);
  EXPECT_EQ(c.used_bits(), 30);
}

TEST(Policies, OversizeServedWithoutCaching) {
  CacheState c(100);
  c.add(entry(1, 30));
  const EvictionDecision d =
      insert(PolicyConfig{PolicyKind::kEpdc, 1}, c, incoming(2, 101), 0.0);
  EXPECT_TRUE(d.oversize);
  EXPECT_FALSE(d.inserted);
  EXPECT_TRUE(c.contains(1));
  EXPECT_FALSE(c.contains(2));
}

TEST(Policies, ZeroCapacityCache) {
  CacheState c(0);
  const EvictionDecision d =
      insert(PolicyConfig{PolicyKind::kOpt, 1}, c, incoming(2, 1), 0.0);
  EXPECT_TRUE(d.oversize);
  EXPECT_EQ(c.size(), 0u);
}

TEST(Policies, LruEvictsOldest) {
  CacheState c(30);
  c.add(entry(1, 10, 1, 5.0));
  c.add(entry(2, 10, 1, 1.0));
  c.add(entry(3, 10, 1, 3.0));
  const EvictionDecision d = lru_replace(c, incoming(4, 15));
  EXPECT_EQ(d.evicted, (std::vector<UnitId>{2, 3}));
  EXPECT_EQ(d.retained, std::vector<UnitId>{1});
}

TEST(Policies, PdcEvictsLeastPopular) {
  CacheState c(30);
  c.add(entry(1, 10, 1, 0, 1, 0.3));
  c.add(entry(2, 10, 1, 0, 1, 0.1));
  c.add(entry(3, 10, 1, 0, 1, 0.2));
  EXPECT_EQ(pdc_replace(c, incoming(4, 10)).evicted, std::vector<UnitId>{2});
}

TEST(Policies, SxoEvictsLowAccessPerBit) {
  CacheState c(60);
  c.add(entry(1, 10, 1, 0, 2));  // 0.2 per bit
  c.add(entry(2, 40, 1, 0, 4));  // 0.1 per bit
  c.add(entry(3, 10, 1, 0, 1));  // 0.1 per bit, smaller
  // Equal keys: the larger unit goes first.
  EXPECT_EQ(sxo_replace(c, incoming(4, 10)).evicted, std::vector<UnitId>{2});
}

TEST(Policies, EpdcEvictsLowestEnergy) {
  CacheState c(30);
  c.add(entry(1, 10, 3.0));
  c.add(entry(2, 10, 1.0));
  c.add(entry(3, 10, 2.0));
  EXPECT_EQ(epdc_replace(c, incoming(4, 20)).evicted,
            (std::vector<UnitId>{2, 3}));
}

TEST(Policies, TieBreakLargerThenSmallerId) {
  CacheState c(40);
  c.add(entry(5, 10, 1.0));
  c.add(entry(3, 10, 1.0));
  c.add(entry(9, 20, 1.0));
  EXPECT_EQ(epdc_replace(c, incoming(1, 5)).evicted, std::vector<UnitId>{9});
  CacheState d(20);
  d.add(entry(5, 10, 1.0));
  d.add(entry(3, 10, 1.0));
  EXPECT_EQ(epdc_replace(d, incoming(1, 5)).evicted, std::vector<UnitId>{3});
}

TEST(Policies, InsertKeepsOccupancyWithinCapacity) {
  Rng rng(123);
  for (int t = 0; t < 300; ++t) {
    Instance inst = random_instance(rng, 1 + t % 30, 7);
    for (PolicyKind k : all_policies()) {
      CacheState c = inst.cache;
      PolicyConfig pc{k, 7};
      const EvictionDecision d = insert(pc, c, inst.in, 1.0, &rng);
      ASSERT_LE(c.used_bits(), c.capacity_bits());
      if (inst.in.size_bits <= c.capacity_bits()) {
        ASSERT_TRUE(d.inserted);
        ASSERT_TRUE(c.contains(inst.in.unit));
      }
      ASSERT_EQ(d.retained.size() + d.evicted.size(), inst.cache.size());
    }
  }
}

TEST(Policies, EpdcEvictedSetIsLowEnergySuffix) {
  Rng rng(7);
  for (int t = 0; t < 2000; ++t) {
    Instance inst = random_instance(rng, 1 + t % 50, 3);
    if (inst.in.size_bits > inst.cache.capacity_bits()) continue;
    const EvictionDecision d = epdc_replace(inst.cache, inst.in);
    const auto ev = as_set(d.evicted);
    double min_kept = INFINITY, max_evicted = -INFINITY;
    for (const CacheEntry& e : inst.cache.entries()) {
      if (ev.contains(e.unit)) {
        max_evicted = std::max(max_evicted, e.e_all);
      } else {
        min_kept = std::min(min_kept, e.e_all);
      }
    }
    ASSERT_LE(max_evicted, min_kept);
  }
}

TEST(Policies, GreedyEvictsNoMoreThanNeeded) {
  // Dropping the last victim would leave too little room.
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    Instance inst = random_instance(rng, 2 + t % 20, 5);
    if (inst.in.size_bits > inst.cache.capacity_bits()) continue;
    const EvictionDecision d = lru_replace(inst.cache, inst.in);
    ASSERT_FALSE(d.evicted.empty());
    Bits freed = 0;
    for (std::size_t i = 0; i + 1 < d.evicted.size(); ++i) {
      freed += inst.cache.find(d.evicted[i])->size_bits;
    }
    ASSERT_LT(inst.cache.free_bits() + freed, inst.in.size_bits);
  }
}

TEST(Knapsack, TableMatchesEnumeration) {
  Rng rng(99);
  std::uniform_int_distribution<Bits> w(1, 12);
  std::uniform_real_distribution<double> v(0.0, 5.0);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + t % 14;
    std::vector<KnapsackItem> items(n);
    for (auto& it : items) it = {v(rng), w(rng)};
    const Bits budget = static_cast<Bits>(rng() % 60);
    const std::vector<bool> keep = knapsack_table(items, budget);
    double got = 0;
    Bits used = 0;
    for (int i = 0; i < n; ++i) {
      if (keep[i]) {
        got += items[i].value;
        used += items[i].weight;
      }
    }
    ASSERT_LE(used, budget);
    double best = 0;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      double val = 0;
      Bits s = 0;
      for (int i = 0; i < n; ++i) {
        if (m >> i & 1) {
          val += items[i].value;
          s += items[i].weight;
        }
      }
      if (s <= budget) best = std::max(best, val);
    }
    ASSERT_NEAR(got, best, 1e-9);
  }
}

TEST(Knapsack, TwoWeightsMatchesTable) {
  Rng rng(5);
  std::uniform_real_distribution<double> v(0.0, 5.0);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + t % 60;
    std::vector<KnapsackItem> items(n);
    for (auto& it : items) it = {v(rng), rng() % 2 ? Bits{322} : Bits{152}};
    std::stable_sort(items.begin(), items.end(),
                     [](const KnapsackItem& a, const KnapsackItem& b) {
                       return a.value > b.value;
                     });
    const Bits budget = static_cast<Bits>(rng() % 8000);
    const auto grouped = knapsack_two_weights(items, budget);
    ASSERT_TRUE(grouped.has_value());
    const auto table = knapsack_table(items, budget);
    double a = 0, b = 0;
    Bits used = 0;
    for (int i = 0; i < n; ++i) {
      if ((*grouped)[i]) {
        a += items[i].value;
        used += items[i].weight;
      }
      if (table[i]) b += items[i].value;
    }
    ASSERT_LE(used, budget);
    ASSERT_NEAR(a, b, 1e-9);
  }
}

TEST(Knapsack, TwoWeightsDeclinesThreeWeights) {
  const std::vector<KnapsackItem> items = {{1, 1}, {1, 2}, {1, 3}};
  EXPECT_FALSE(knapsack_two_weights(items, 5).has_value());
}

TEST(Knapsack, EmptyAndZeroBudget) {
  EXPECT_TRUE(knapsack_table({}, 10).empty());
  const std::vector<KnapsackItem> items = {{1, 1}};
  EXPECT_EQ(knapsack_table(items, 0), std::vector<bool>{false});
}

TEST(Opt, MatchesBruteForceOnGrid) {
  // Sizes on the delta grid: discretization is exact.
  Rng rng(2024);
  const Bits delta = 1000;
  for (int t = 0; t < 300; ++t) {
    Instance inst = random_instance(rng, 1 + t % 15, delta);
    if (inst.in.size_bits > inst.cache.capacity_bits()) continue;
    for (OptSolver s : {OptSolver::kAuto, OptSolver::kTable}) {
      const EvictionDecision d = opt_replace(inst.cache, inst.in, delta, s);
      const double got = retained_value(inst.cache, d);
      ASSERT_NEAR(got, best_objective(inst.cache, inst.in.size_bits), 1e-9);
      const EvictionDecision b = brute_force_replace(inst.cache, inst.in);
      ASSERT_NEAR(got, retained_value(inst.cache, b), 1e-9);
    }
  }
}

TEST(Opt, UnitDeltaIsExactForArbitrarySizes) {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    Instance inst = random_instance(rng, 1 + t % 12, 1);
    if (inst.in.size_bits > inst.cache.capacity_bits()) continue;
    const EvictionDecision d = opt_replace(inst.cache, inst.in, 1);
    ASSERT_NEAR(retained_value(inst.cache, d),
                best_objective(inst.cache, inst.in.size_bits), 1e-9);
  }
}

TEST(Opt, CoarseDeltaNeverOverfills) {
  Rng rng(32);
  for (int t = 0; t < 200; ++t) {
    Instance inst = random_instance(rng, 1 + t % 15, 13);
    if (inst.in.size_bits > inst.cache.capacity_bits()) continue;
    CacheState c = inst.cache;
    insert(PolicyConfig{PolicyKind::kOpt, 100}, c, inst.in, 0.0);
    ASSERT_LE(c.used_bits(), c.capacity_bits());
  }
}

TEST(Opt, DominatesEveryGreedyPolicy) {
  Rng rng(77);
  const Bits delta = 10;
  for (int t = 0; t < 300; ++t) {
    Instance inst = random_instance(rng, 1 + t % 25, delta);
    if (inst.in.size_bits > inst.cache.capacity_bits()) continue;
    const double opt =
        retained_value(inst.cache, opt_replace(inst.cache, inst.in, delta));
    for (const EvictionDecision& d :
         {lru_replace(inst.cache, inst.in), pdc_replace(inst.cache, inst.in),
          sxo_replace(inst.cache, inst.in),
          epdc_replace(inst.cache, inst.in)}) {
      ASSERT_GE(opt + 1e-9, retained_value(inst.cache, d));
    }
  }
}

TEST(Epdc, DominatesOtherGreedyWithEqualSizes) {
  // With one size every policy evicts the same count; EPDC keeps the top
  // e_all values.
  Rng rng(78);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + t % 40;
    CacheState c(n * 10);
    for (int i = 0; i < n; ++i) {
      c.add(entry(i + 1, 10, value(rng), value(rng),
                  1 + static_cast<std::int64_t>(rng() % 5), value(rng)));
    }
    const UnitInfo in = incoming(n + 1, 10 * (1 + t % std::min(3, n)));
    const double epdc = retained_value(c, epdc_replace(c, in));
    ASSERT_GE(epdc + 1e-12, retained_value(c, lru_replace(c, in)));
    ASSERT_GE(epdc + 1e-12, retained_value(c, pdc_replace(c, in)));
    ASSERT_GE(epdc + 1e-12, retained_value(c, sxo_replace(c, in)));
  }
}

TEST(Opt, RejectsNonPositiveDelta) {
  CacheState c(10);
  c.add(entry(1, 10));
  EXPECT_THROW(opt_replace(c, incoming(2, 5), 0), DomainError);
}

TEST(BruteForce, LimitEnforced) {
  CacheState c(100);
  for (int i = 0; i < 21; ++i) c.add(entry(i + 1, 1));
  EXPECT_THROW(brute_force_replace(c, incoming(50, 90)), DomainError);
}

TEST(PdcRandom, SeededAndSparesMostPopular) {
  CacheState c(50);
  for (int i = 0; i < 5; ++i) c.add(entry(i + 1, 10, 1, 0, 1, 0.1 * (i + 1)));
  PolicyConfig pc{PolicyKind::kPdc, 1, /*pdc_randomized=*/true};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    const EvictionDecision da = decide(pc, c, incoming(9, 30), &a);
    const EvictionDecision db = decide(pc, c, incoming(9, 30), &b);
    EXPECT_EQ(da.evicted, db.evicted);
    EXPECT_EQ(da.evicted.size(), 3u);
    EXPECT_FALSE(as_set(da.evicted).contains(5));
  }
  EXPECT_THROW(decide(pc, c, incoming(9, 30), nullptr), DomainError);
}

}  // namespace
}  // namespace d2dcache
