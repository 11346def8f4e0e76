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
/// Link rates and the shared radio channel pool.
///
/// Rates follow Shannon capacity over log-distance path loss:
///   rate = B * log2(1 + P_tx * (d / d0)^-n / (N0 * B))
/// with N0 a noise spectral density. No fading or shadowing.

#ifndef D2DCACHE_CHANNEL_HPP
#define D2DCACHE_CHANNEL_HPP

namespace d2dcache {

struct ChannelParams {
  double bandwidth_hz = 2e6;
  double noise_dbm_per_hz = -158.0;
  double ref_distance_m = 1.0;
  double pathloss_d2d = 3.0;
  double pathloss_bs = 4.2;
  double backhaul_bps = 20e6;
  double local_bps = 50e6;
  int pool_size = 100;
  // Separate D2D and cellular pools, each of pool_size channels.
  bool split_pool = false;

  void validate() const;
  double noise_watts_per_hz() const;
};

// Throws DomainError for nonpositive power. Distances below d0 are clamped.
double link_rate(const ChannelParams& params, double p_tx_watts,
                 double distance_m, double pathloss_exponent);

struct ProspectiveRates {
  double local_bps = 0.0;
  double d2d_bps = 0.0;
  double bs_bps = 0.0;
  double backhaul_bps = 0.0;
  // Distances the radio rates were evaluated at.
  double d2d_distance_m = 0.0;
  double bs_distance_m = 0.0;
};

// Average-distance rates used for prospective energy: D2D at R_D2D / 2, BS
// at the mean distance 2R/3 of a uniform point in the cell. Throws ConfigError
// when the local rate is not the largest.
ProspectiveRates prospective_rates(const ChannelParams& params, double p_d2d,
                                   double p_bs, double r_d2d_m,
                                   double cell_radius_m);

class ChannelPool {
 public:
  explicit ChannelPool(int total);

  // Takes a channel if one is free.
  bool acquire();
  // Throws InvariantViolation when nothing is held.
  void release();

  int total() const { return total_; }
  int in_use() const { return in_use_; }

 private:
  int total_;
  int in_use_ = 0;
};

}  // namespace d2dcache

#endif  // D2DCACHE_CHANNEL_HPP
