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
/// The full simulation parameter record and its INI-style file format.
///
/// One section per module: [catalog] [topology] [channel] [energy] [cache]
/// [sim]. Every key is optional and defaults to the values below. Unknown
/// sections or keys are rejected. The canonical text form lists every key in
/// a fixed order and is what the config hash covers.

#ifndef D2DCACHE_CONFIG_HPP
#define D2DCACHE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "d2dcache/catalog.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/energy.hpp"
#include "d2dcache/policies.hpp"
#include "d2dcache/topology.hpp"

namespace d2dcache {

enum class HolderSelection : std::uint8_t { kNearest, kRandom };

struct CacheConfig {
  Bits c_dev_bits = 150'000'000;
  Bits c_bs_bits = 2'800'000'000;
  PolicyKind policy = PolicyKind::kEpdc;
  Bits delta_dev_bits = 10'000;   // 0.01 Mbit
  Bits delta_bs_bits = 100'000;   // 0.1 Mbit
  bool pdc_randomized = false;
  OptSolver opt_solver = OptSolver::kAuto;
  // Use the rounded mean neighbor count in w_d2d.
  bool round_n_ngh = false;

  PolicyConfig device_policy() const;
  PolicyConfig bs_policy() const;
};

struct SimParams {
  double duration_s = 400.0;
  double arrival_rate_hz = 0.05;  // sessions per second per device
  std::uint64_t seed = 1;
  // Services completing before this time are not booked.
  double warmup_s = 0.0;
  HolderSelection holder = HolderSelection::kNearest;
  // A device transmits at most one D2D unit at a time.
  bool single_tx_per_device = false;
  // Check ledger and channel invariants after every event.
  bool audit = false;
};

struct SimConfig {
  CatalogConfig catalog;
  CellConfig topology;
  ChannelParams channel;
  PowerProfile power;
  CacheConfig cache;
  SimParams sim;

  // Throws ConfigError naming the offending key.
  void validate() const;
};

// Sets "section.key" from its text form. Throws ConfigError for unknown keys
// or unparsable values.
void set_config_value(SimConfig& cfg, std::string_view dotted_key,
                      const std::string& value);
std::string get_config_value(const SimConfig& cfg,
                             std::string_view dotted_key);
std::vector<std::string> config_keys();

SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

// Canonical INI text: every key, fixed order, round-trippable numbers.
std::string to_ini(const SimConfig& cfg);
// First 16 hex digits of SHA-256 over to_ini(cfg).
std::string config_hash(const SimConfig& cfg);

// Shortest round-trippable text for a double.
std::string format_double(double v);

}  // namespace d2dcache

#endif  // D2DCACHE_CONFIG_HPP
