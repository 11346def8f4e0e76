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

#include "d2dcache/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "d2dcache/errors.hpp"

namespace d2dcache {

PolicyConfig CacheConfig::device_policy() const {
  return {policy, delta_dev_bits, pdc_randomized, opt_solver};
}

PolicyConfig CacheConfig::bs_policy() const {
  return {policy, delta_bs_bits, pdc_randomized, opt_solver};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view key, const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(std::string(key), "expected a number, got '" + text +
                                            "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view key, const std::string& text) {
  // Accepts 150e6 style integers as long as they are whole.
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::fabs(v) > 9.0e18) {
    throw ConfigError(std::string(key), "expected an integer, got '" + text +
                                            "'");
  }
  return static_cast<std::int64_t>(v);
}

bool parse_bool(std::string_view key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key), "expected true/false, got '" + text +
                                          "'");
}

std::uint64_t parse_seed(std::string_view key, const std::string& text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key),
                      "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

struct Field {
  const char* key;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <class T>
Field real(const char* key, T SimConfig::*section, double T::*member,
           double scale = 1.0) {
  return {key,
          [=](SimConfig& c, const std::string& v) {
            (c.*section).*member = parse_double(key, v) * scale;
          },
          [=](const SimConfig& c) {
            return format_double((c.*section).*member / scale);
          }};
}

template <class T, class I>
Field integer(const char* key, T SimConfig::*section, I T::*member) {
  return {key,
          [=](SimConfig& c, const std::string& v) {
            (c.*section).*member = static_cast<I>(parse_int(key, v));
          },
          [=](const SimConfig& c) {
            return std::to_string((c.*section).*member);
          }};
}

template <class T>
Field boolean(const char* key, T SimConfig::*section, bool T::*member) {
  return {key,
          [=](SimConfig& c, const std::string& v) {
            (c.*section).*member = parse_bool(key, v);
          },
          [=](const SimConfig& c) {
            return std::string((c.*section).*member ? "true" : "false");
          }};
}

template <class T>
Field seed(const char* key, T SimConfig::*section,
           std::uint64_t T::*member) {
  return {key,
          [=](SimConfig& c, const std::string& v) {
            (c.*section).*member = parse_seed(key, v);
          },
          [=](const SimConfig& c) {
            return std::to_string((c.*section).*member);
          }};
}

const std::vector<Field>& fields() {
  using S = SimConfig;
  static const std::vector<Field> kFields = {
      integer("catalog.contents", &S::catalog, &CatalogConfig::contents),
      integer("catalog.chunks", &S::catalog, &CatalogConfig::chunks),
      real("catalog.base_mbits", &S::catalog, &CatalogConfig::base_size_bits,
           1e6),
      real("catalog.enh_mbits", &S::catalog, &CatalogConfig::enh_size_bits,
           1e6),
      real("catalog.zipf_s", &S::catalog, &CatalogConfig::zipf_s),
      real("catalog.weibull_lambda", &S::catalog,
           &CatalogConfig::weibull_lambda),
      real("catalog.weibull_k", &S::catalog, &CatalogConfig::weibull_k),
      real("catalog.p_hq", &S::catalog, &CatalogConfig::p_hq),
      real("catalog.size_jitter", &S::catalog, &CatalogConfig::size_jitter),
      seed("catalog.size_seed", &S::catalog, &CatalogConfig::size_seed),

      real("topology.cell_radius_m", &S::topology, &CellConfig::cell_radius_m),
      real("topology.density_per_m2", &S::topology,
           &CellConfig::density_per_m2),
      real("topology.r_d2d_m", &S::topology, &CellConfig::r_d2d_m),

      real("channel.bandwidth_hz", &S::channel, &ChannelParams::bandwidth_hz),
      real("channel.noise_dbm_hz", &S::channel,
           &ChannelParams::noise_dbm_per_hz),
      real("channel.d0_m", &S::channel, &ChannelParams::ref_distance_m),
      real("channel.n_d2d", &S::channel, &ChannelParams::pathloss_d2d),
      real("channel.n_bs", &S::channel, &ChannelParams::pathloss_bs),
      integer("channel.pool_size", &S::channel, &ChannelParams::pool_size),
      boolean("channel.split_pool", &S::channel, &ChannelParams::split_pool),
      real("channel.c_loc_bps", &S::channel, &ChannelParams::local_bps),
      real("channel.c_bsu_bps", &S::channel, &ChannelParams::backhaul_bps),

      real("energy.p_d2d_w", &S::power, &PowerProfile::p_d2d_w),
      real("energy.p_bs_w", &S::power, &PowerProfile::p_bs_w),
      real("energy.theta_loc", &S::power, &PowerProfile::theta_loc),
      real("energy.theta_bs", &S::power, &PowerProfile::theta_bs),

      {"cache.policy",
       [](S& c, const std::string& v) {
         try {
           c.cache.policy = parse_policy(v);
         } catch (const DomainError& e) {
           throw ConfigError("cache.policy", e.what());
         }
       },
       [](const S& c) { return std::string(policy_name(c.cache.policy)); }},
      integer("cache.c_dev_bits", &S::cache, &CacheConfig::c_dev_bits),
      integer("cache.c_bs_bits", &S::cache, &CacheConfig::c_bs_bits),
      integer("cache.delta_dev_bits", &S::cache,
              &CacheConfig::delta_dev_bits),
      integer("cache.delta_bs_bits", &S::cache, &CacheConfig::delta_bs_bits),
      boolean("cache.pdc_randomized", &S::cache,
              &CacheConfig::pdc_randomized),
      {"cache.opt_solver",
       [](S& c, const std::string& v) {
         if (v == "auto") {
           c.cache.opt_solver = OptSolver::kAuto;
         } else if (v == "table") {
           c.cache.opt_solver = OptSolver::kTable;
         } else {
           throw ConfigError("cache.opt_solver", "expected auto or table");
         }
       },
       [](const S& c) {
         return std::string(c.cache.opt_solver == OptSolver::kAuto ? "auto"
                                                                    : "table");
       }},
      boolean("cache.round_n_ngh", &S::cache, &CacheConfig::round_n_ngh),

      real("sim.duration_s", &S::sim, &SimParams::duration_s),
      real("sim.arrival_rate", &S::sim, &SimParams::arrival_rate_hz),
      seed("sim.seed", &S::sim, &SimParams::seed),
      real("sim.warmup_s", &S::sim, &SimParams::warmup_s),
      {"sim.holder",
       [](S& c, const std::string& v) {
         if (v == "nearest") {
           c.sim.holder = HolderSelection::kNearest;
         } else if (v == "random") {
           c.sim.holder = HolderSelection::kRandom;
         } else {
           throw ConfigError("sim.holder", "expected nearest or random");
         }
       },
       [](const S& c) {
         return std::string(c.sim.holder == HolderSelection::kNearest
                                ? "nearest"
                                : "random");
       }},
      boolean("sim.single_tx_per_device", &S::sim,
              &SimParams::single_tx_per_device),
      boolean("sim.audit", &S::sim, &SimParams::audit),
  };
  return kFields;
}

const Field& field(std::string_view key) {
  for (const Field& f : fields()) {
    if (key == f.key) return f;
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

}  // namespace

void SimConfig::validate() const {
  catalog.validate();
  topology.validate();
  channel.validate();
  power.validate();
  if (cache.c_dev_bits <= 0) {
    throw ConfigError("cache.c_dev_bits", "must be > 0");
  }
  if (cache.c_bs_bits <= 0) throw ConfigError("cache.c_bs_bits", "must be > 0");
  if (cache.delta_dev_bits <= 0) {
    throw ConfigError("cache.delta_dev_bits", "must be > 0");
  }
  if (cache.delta_bs_bits <= 0) {
    throw ConfigError("cache.delta_bs_bits", "must be > 0");
  }
  if (!(sim.duration_s > 0)) throw ConfigError("sim.duration_s", "must be > 0");
  if (!(sim.arrival_rate_hz > 0)) {
    throw ConfigError("sim.arrival_rate", "must be > 0");
  }
  if (!(sim.warmup_s >= 0 && sim.warmup_s < sim.duration_s)) {
    throw ConfigError("sim.warmup_s", "must lie in [0, duration_s)");
  }
}

void set_config_value(SimConfig& cfg, std::string_view dotted_key,
                      const std::string& value) {
  field(dotted_key).set(cfg, value);
}

std::string get_config_value(const SimConfig& cfg,
                             std::string_view dotted_key) {
  return field(dotted_key).get(cfg);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.key);
  return keys;
}

SimConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " at line " +
                                    std::to_string(e.line()));
  }
  SimConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(section, "key outside of any [section]");
    }
    for (const auto& [key, value] : body) {
      set_config_value(cfg, section + "." + key, value.data());
    }
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_ini(const SimConfig& cfg) {
  std::string out;
  std::string current;
  for (const Field& f : fields()) {
    const std::string_view key(f.key);
    const std::size_t dot = key.find('.');
    const std::string section(key.substr(0, dot));
    if (section != current) {
      if (!current.empty()) out += '\n';
      out += '[' + section + "]\n";
      current = section;
    }
    out += std::string(key.substr(dot + 1)) + " = " + f.get(cfg) + '\n';
  }
  return out;
}

std::string config_hash(const SimConfig& cfg) {
  const std::string text = to_ini(cfg);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw InvariantViolation("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < 8 && i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

}  // namespace d2dcache
