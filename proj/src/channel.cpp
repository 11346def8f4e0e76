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

#include "d2dcache/channel.hpp"

#include <algorithm>
#include <cmath>

#include "d2dcache/errors.hpp"

namespace d2dcache {

void ChannelParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0; };
  if (!positive(bandwidth_hz)) {
    throw ConfigError("channel.bandwidth_hz", "must be > 0");
  }
  if (!std::isfinite(noise_dbm_per_hz)) {
    throw ConfigError("channel.noise_dbm_hz", "must be finite");
  }
  if (!positive(ref_distance_m)) {
    throw ConfigError("channel.d0_m", "must be > 0");
  }
  if (!(pathloss_d2d >= 2)) throw ConfigError("channel.n_d2d", "must be >= 2");
  if (!(pathloss_bs >= 2)) throw ConfigError("channel.n_bs", "must be >= 2");
  if (!positive(backhaul_bps)) {
    throw ConfigError("channel.c_bsu_bps", "must be > 0");
  }
  if (!positive(local_bps)) {
    throw ConfigError("channel.c_loc_bps", "must be > 0");
  }
  if (pool_size < 1) throw ConfigError("channel.pool_size", "must be >= 1");
}

double ChannelParams::noise_watts_per_hz() const {
  return std::pow(10.0, (noise_dbm_per_hz - 30.0) / 10.0);
}

double link_rate(const ChannelParams& params, double p_tx_watts,
                 double distance_m, double pathloss_exponent) {
  if (!(p_tx_watts > 0)) throw DomainError("transmit power must be > 0");
  const double d = std::max(distance_m, params.ref_distance_m);
  const double gain = std::pow(d / params.ref_distance_m, -pathloss_exponent);
  const double snr = p_tx_watts * gain /
                     (params.noise_watts_per_hz() * params.bandwidth_hz);
  return params.bandwidth_hz * std::log2(1.0 + snr);
}

ProspectiveRates prospective_rates(const ChannelParams& params, double p_d2d,
                                   double p_bs, double r_d2d_m,
                                   double cell_radius_m) {
  ProspectiveRates r;
  r.d2d_distance_m = r_d2d_m / 2.0;
  r.bs_distance_m = 2.0 * cell_radius_m / 3.0;
  r.local_bps = params.local_bps;
  r.backhaul_bps = params.backhaul_bps;
  r.d2d_bps = link_rate(params, p_d2d, r.d2d_distance_m, params.pathloss_d2d);
  r.bs_bps = link_rate(params, p_bs, r.bs_distance_m, params.pathloss_bs);
  if (r.local_bps < std::max({r.d2d_bps, r.bs_bps, r.backhaul_bps})) {
    throw ConfigError("channel.c_loc_bps",
                      "local rate must be the largest service rate");
  }
  return r;
}

ChannelPool::ChannelPool(int total) : total_(total) {
  if (total < 0) throw DomainError("channel pool size must be >= 0");
}

bool ChannelPool::acquire() {
  if (in_use_ >= total_) return false;
  ++in_use_;
  return true;
}

void ChannelPool::release() {
  if (in_use_ <= 0) {
    throw InvariantViolation("channel released on an empty pool");
  }
  --in_use_;
}

}  // namespace d2dcache
