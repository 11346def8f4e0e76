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
/// Prospective (expected) per-unit energy and the realized energy ledger.
///
/// A unit can be obtained in four ways, each with its own cost:
///   local   P_loc  * s / C_loc
///   d2d     P_D2D  * s / C_D2D
///   bs      P_BS   * s / C_BS
///   bs_u    P_BSU  * s / C_BSU + cost(bs)
/// and is found locally, at some neighbor, or at the BS with probabilities
///   w_loc = p_i p_j p_k * min(1, C_Dev / total)
///   w_bs  = p_i p_j p_k * min(1, C_BS  / total)
///   w_d2d = 1 - (1 - w_loc)^N_ngh
/// The prospective energy e_all weights the four costs by the cascade
/// probabilities and is the value caches try to keep.

#ifndef D2DCACHE_ENERGY_HPP
#define D2DCACHE_ENERGY_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "d2dcache/catalog.hpp"
#include "d2dcache/channel.hpp"

namespace d2dcache {

enum class Mode : std::uint8_t { kLocal = 0, kD2D = 1, kBS = 2, kBSU = 3 };
enum class Outcome : std::uint8_t { kSuccess = 0, kFail = 1 };

inline constexpr int kNumModes = 4;
inline constexpr int kNumOutcomes = 2;

std::string_view mode_name(Mode m);
std::string_view layer_name(Layer l);
std::string_view outcome_name(Outcome o);

struct PowerProfile {
  double p_d2d_w = 0.08;
  double p_bs_w = 6.0;
  double theta_loc = 2.0;
  double theta_bs = 5.0;

  double p_loc_w() const { return p_d2d_w / theta_loc; }
  double p_bsu_w() const { return p_bs_w / theta_bs; }

  void validate() const;
};

// 1 - (1 - w_loc)^n with a real exponent.
double d2d_availability(double w_loc, double n_ngh);

struct ScenarioWeights {
  double local = 0.0;
  double d2d = 0.0;
  double bs = 0.0;
  double bs_u = 0.0;
};

ScenarioWeights scenario_weights(double w_loc, double w_d2d, double w_bs);

struct UnitEnergy {
  double w_loc = 0.0;
  double w_d2d = 0.0;
  double w_bs = 0.0;
  double e_loc = 0.0;
  double e_d2d = 0.0;
  double e_bs = 0.0;
  double e_bs_u = 0.0;
  double e_all = 0.0;
};

struct AvailabilityParams {
  double c_dev_bits = 150e6;
  double c_bs_bits = 2.8e9;
  double n_ngh = 0.0;
  // Round n_ngh to the nearest integer before use.
  bool round_n_ngh = false;
};

// Static per-unit model. e_all depends only on catalog distributions,
// capacities and prospective rates, so it is computed once per unit.
class ProspectiveEnergy {
 public:
  ProspectiveEnergy(const Catalog& catalog, const PowerProfile& power,
                    const ProspectiveRates& rates,
                    const AvailabilityParams& availability);

  double f_loc_fit() const { return f_loc_fit_; }
  double f_bs_fit() const { return f_bs_fit_; }
  double n_ngh() const { return n_ngh_; }
  const ProspectiveRates& rates() const { return rates_; }
  const PowerProfile& power() const { return power_; }

  double w_loc(UnitId u) const { return at(u).w_loc; }
  double w_bs(UnitId u) const { return at(u).w_bs; }
  double w_d2d(UnitId u) const { return at(u).w_d2d; }
  double w_d2d(UnitId u, double n_ngh) const;

  double e_loc(UnitId u) const { return at(u).e_loc; }
  double e_d2d(UnitId u) const { return at(u).e_d2d; }
  double e_bs(UnitId u) const { return at(u).e_bs; }
  double e_bs_u(UnitId u) const { return at(u).e_bs_u; }
  double e_all(UnitId u) const { return at(u).e_all; }
  double e_all(UnitId u, double n_ngh) const;
  ScenarioWeights weights(UnitId u) const;

  const UnitEnergy& at(UnitId u) const;

 private:
  UnitEnergy evaluate(const ContentUnit& unit, double request_prob,
                      double n_ngh) const;

  const Catalog* catalog_;
  PowerProfile power_;
  ProspectiveRates rates_;
  double f_loc_fit_ = 0.0;
  double f_bs_fit_ = 0.0;
  double n_ngh_ = 0.0;
  std::vector<UnitEnergy> units_;
};

// One realized unit service as booked in the ledger.
struct ServiceRecord {
  Mode mode = Mode::kLocal;
  Layer layer = Layer::kBase;
  double joules = 0.0;
  double bits = 0.0;
};

class EnergyLedger {
 public:
  EnergyLedger() = default;
  EnergyLedger(const PowerProfile& power, double backhaul_bps);

  // Books P_mode * s / rate. For kBSU, rate_bps is the BS-to-device rate and
  // the backhaul reception term P_BSU * s / C_BSU is added.
  // Throws DomainError when rate_bps <= 0 or the mode is out of range.
  ServiceRecord record_service(Mode mode, const ContentUnit& unit,
                               double rate_bps, Outcome outcome);

  // Moves the energy and bits of a dropped session's delivered units from
  // the success cells to the fail cells. E_total is preserved.
  void reclassify_failed_session(std::span<const ServiceRecord> delivered);

  void count_blocked(std::int64_t blocked_units, std::int64_t dropped_units);

  double joules(Mode m, Layer l, Outcome o) const;
  double bits(Mode m, Layer l, Outcome o) const;

  double e_loc() const { return mode_success(Mode::kLocal); }
  double e_d2d() const { return mode_success(Mode::kD2D); }
  double e_bs() const { return mode_success(Mode::kBS); }
  double e_bs_u() const { return mode_success(Mode::kBSU); }
  double e_block() const;
  double e_total() const {
    return e_loc() + e_d2d() + e_bs() + e_bs_u() + e_block();
  }
  // Sum of every record_service result, accumulated independently of the
  // cells. Used by audits.
  double joules_booked() const { return booked_; }

  double served_bits() const;
  std::int64_t blocked_units() const { return blocked_units_; }
  std::int64_t dropped_units() const { return dropped_units_; }

  void merge(const EnergyLedger& other);

 private:
  static int index(Mode m, Layer l, Outcome o) {
    return (static_cast<int>(m) * kNumLayers + static_cast<int>(l)) *
               kNumOutcomes +
           static_cast<int>(o);
  }
  double mode_success(Mode m) const;

  PowerProfile power_;
  double backhaul_bps_ = 1.0;
  std::array<double, kNumModes * kNumLayers * kNumOutcomes> joules_{};
  std::array<double, kNumModes * kNumLayers * kNumOutcomes> bits_{};
  double booked_ = 0.0;
  std::int64_t blocked_units_ = 0;
  std::int64_t dropped_units_ = 0;
};

}  // namespace d2dcache

#endif  // D2DCACHE_ENERGY_HPP
