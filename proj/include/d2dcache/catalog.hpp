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
/// Content universe: contents split into chunks, each chunk carried in a base
/// and an enhancement layer. One (content, chunk, layer) triple is a content
/// unit, the atomic object that gets cached and transmitted.
///
/// Request model:
///   - content i      ~ Zipf(s, N_c)
///   - HQ flag        ~ Bernoulli(p_hq); the base layer is always requested
///   - prefix length  L ~ Weibull(lambda, k), discretized as
///                      pmf(m) = F(m) - F(m-1) and truncated to {1..J}
/// A session asks for chunks 1..L in order, base before enhancement.

#ifndef D2DCACHE_CATALOG_HPP
#define D2DCACHE_CATALOG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace d2dcache {

using UnitId = std::int32_t;
using DeviceId = std::int32_t;
using Rng = std::mt19937_64;

enum class Layer : std::uint8_t { kBase = 0, kEnhancement = 1 };

inline constexpr int kNumLayers = 2;

struct ContentUnit {
  int content = 0;  // 1..N_c
  int chunk = 0;    // 1..J
  Layer layer = Layer::kBase;
  UnitId id = 0;  // 1..2*N_c*J
  double size_bits = 0.0;
};

struct CatalogConfig {
  int contents = 100;
  int chunks = 100;
  double base_size_bits = 322e6;
  double enh_size_bits = 152e6;
  double zipf_s = 1.0;
  double weibull_lambda = 5.0;
  double weibull_k = 0.8;
  double p_hq = 1.0;
  // Optional per-content size multiplier drawn uniformly from
  // [1 - size_jitter, 1 + size_jitter]. Zero keeps sizes deterministic.
  double size_jitter = 0.0;
  std::uint64_t size_seed = 1;

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

struct Session {
  DeviceId requester = -1;
  int content = 0;
  bool high_quality = false;
  int prefix_length = 0;
  std::vector<UnitId> units;
};

class Catalog {
 public:
  explicit Catalog(const CatalogConfig& cfg);

  const CatalogConfig& config() const { return cfg_; }
  int num_units() const { return static_cast<int>(units_.size()); }
  std::span<const ContentUnit> units() const { return units_; }

  // Throws DomainError for ids outside 1..num_units().
  const ContentUnit& unit(UnitId id) const;
  UnitId unit_id(int content, int chunk, Layer layer) const;

  double total_bits() const { return total_bits_; }
  double content_layer_bits(int content, Layer layer) const;

  double content_prob(int content) const;
  double chunk_prob(int chunk) const;
  double layer_prob(Layer layer) const;
  // p_i * p_j * p_k for the unit's triple.
  double request_prob(UnitId id) const;

  // pmf of the session prefix length on {1..J}; index 0 holds m = 1.
  std::span<const double> prefix_length_pmf() const { return length_pmf_; }

  Session sample_session(Rng& rng, DeviceId requester) const;

 private:
  CatalogConfig cfg_;
  std::vector<ContentUnit> units_;
  std::vector<double> content_scale_;
  std::vector<double> content_pmf_;
  std::vector<double> length_pmf_;
  std::vector<double> length_survival_;
  std::vector<double> content_cdf_;
  std::vector<double> length_cdf_;
  double total_bits_ = 0.0;
};

inline Catalog build_catalog(const CatalogConfig& cfg) { return Catalog(cfg); }

}  // namespace d2dcache

#endif  // D2DCACHE_CATALOG_HPP
