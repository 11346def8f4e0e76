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

#include <gtest/gtest.h>

#include "d2dcache/config.hpp"
#include "d2dcache/errors.hpp"

namespace d2dcache {
namespace {

TEST(Config, DefaultsValidate) {
  const SimConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.cache.c_dev_bits, 150'000'000);
  EXPECT_EQ(cfg.cache.c_bs_bits, 2'800'000'000);
  EXPECT_DOUBLE_EQ(cfg.sim.duration_s, 400.0);
}

TEST(Config, ParseOverridesAndKeepsDefaults) {
  const SimConfig cfg = parse_config(
      "[cache]\npolicy = lru\nc_dev_bits = 200e6\n"
      "[topology]\nr_d2d_m = 120\n"
      "; comment\n[sim]\nseed = 42\n");
  EXPECT_EQ(cfg.cache.policy, PolicyKind::kLru);
  EXPECT_EQ(cfg.cache.c_dev_bits, 200'000'000);
  EXPECT_DOUBLE_EQ(cfg.topology.r_d2d_m, 120.0);
  EXPECT_EQ(cfg.sim.seed, 42u);
  EXPECT_DOUBLE_EQ(cfg.catalog.zipf_s, 1.0);
}

TEST(Config, SizesInMegabits) {
  const SimConfig cfg = parse_config("[catalog]\nbase_mbits = 100\n");
  EXPECT_DOUBLE_EQ(cfg.catalog.base_size_bits, 100e6);
  EXPECT_EQ(get_config_value(cfg, "catalog.base_mbits"), "100");
}

TEST(Config, UnknownKeyNamesField) {
  try {
    parse_config("[cache]\nsize = 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "cache.size");
  }
  EXPECT_THROW(parse_config("[nosuch]\nx = 1\n"), ConfigError);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_config("[sim]\nduration_s = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("[channel]\npool_size = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config("[cache]\npolicy = fifo\n"), ConfigError);
  EXPECT_THROW(parse_config("[sim]\naudit = maybe\n"), ConfigError);
}

TEST(Config, ValidationNamesField) {
  SimConfig cfg;
  cfg.sim.arrival_rate_hz = 0.0;
  try {
    cfg.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "sim.arrival_rate");
  }
  cfg = SimConfig{};
  cfg.cache.c_dev_bits = -5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, CanonicalTextRoundTrips) {
  SimConfig cfg;
  cfg.cache.policy = PolicyKind::kSxo;
  cfg.topology.r_d2d_m = 160.5;
  cfg.sim.seed = 123456789;
  cfg.catalog.zipf_s = 0.8;
  cfg.channel.split_pool = true;
  const std::string text = to_ini(cfg);
  const SimConfig back = parse_config(text);
  EXPECT_EQ(to_ini(back), text);
  EXPECT_EQ(config_hash(back), config_hash(cfg));
}

TEST(Config, EveryKeyRoundTrips) {
  const SimConfig cfg;
  for (const std::string& key : config_keys()) {
    SimConfig copy;
    set_config_value(copy, key, get_config_value(cfg, key));
    EXPECT_EQ(get_config_value(copy, key), get_config_value(cfg, key)) << key;
  }
}

TEST(Config, HashChangesWithConfig) {
  SimConfig a;
  SimConfig b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.sim.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = SimConfig{};
  b.cache.c_dev_bits += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, PolicyConfigsUseScaleDeltas) {
  const CacheConfig c;
  EXPECT_EQ(c.device_policy().delta_bits, 10'000);
  EXPECT_EQ(c.bs_policy().delta_bits, 100'000);
  EXPECT_EQ(c.device_policy().kind, c.policy);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST(Config, FormatDoubleShortest) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(150e6)), 150e6);
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(-158), "-158");
}

}  // namespace
}  // namespace d2dcache
