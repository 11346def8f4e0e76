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

#include "d2dcache/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "d2dcache/errors.hpp"

namespace d2dcache {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::kLocal:
      return "loc";
    case Mode::kD2D:
      return "d2d";
    case Mode::kBS:
      return "bs";
    case Mode::kBSU:
      return "bsu";
  }
  return "?";
}

std::string_view layer_name(Layer l) {
  return l == Layer::kBase ? "base" : "enh";
}

std::string_view outcome_name(Outcome o) {
  return o == Outcome::kSuccess ? "succ" : "fail";
}

void PowerProfile::validate() const {
  if (!(std::isfinite(p_d2d_w) && p_d2d_w > 0)) {
    throw ConfigError("energy.p_d2d_w", "must be > 0");
  }
  if (!(std::isfinite(p_bs_w) && p_bs_w > 0)) {
    throw ConfigError("energy.p_bs_w", "must be > 0");
  }
  // Strict: P_loc < P_D2D and P_BSU < P_BS.
  if (!(std::isfinite(theta_loc) && theta_loc > 1)) {
    throw ConfigError("energy.theta_loc", "must be > 1");
  }
  if (!(std::isfinite(theta_bs) && theta_bs > 1)) {
    throw ConfigError("energy.theta_bs", "must be > 1");
  }
}

double d2d_availability(double w_loc, double n_ngh) {
  if (n_ngh <= 0) return 0.0;
  return 1.0 - std::pow(1.0 - w_loc, n_ngh);
}

ScenarioWeights scenario_weights(double w_loc, double w_d2d, double w_bs) {
  ScenarioWeights w;
  w.local = w_loc;
  w.d2d = (1.0 - w_loc) * w_d2d;
  w.bs = (1.0 - w_loc) * (1.0 - w_d2d) * w_bs;
  w.bs_u = (1.0 - w_loc) * (1.0 - w_d2d) * (1.0 - w_bs);
  return w;
}

ProspectiveEnergy::ProspectiveEnergy(const Catalog& catalog,
                                     const PowerProfile& power,
                                     const ProspectiveRates& rates,
                                     const AvailabilityParams& availability)
    : catalog_(&catalog), power_(power), rates_(rates) {
  power_.validate();
  if (!(availability.c_dev_bits > 0)) {
    throw ConfigError("cache.c_dev_bits", "must be > 0");
  }
  if (!(availability.c_bs_bits > 0)) {
    throw ConfigError("cache.c_bs_bits", "must be > 0");
  }
  if (!(availability.n_ngh >= 0)) {
    throw DomainError("neighbor count must be >= 0");
  }
  f_loc_fit_ = std::min(1.0, availability.c_dev_bits / catalog.total_bits());
  f_bs_fit_ = std::min(1.0, availability.c_bs_bits / catalog.total_bits());
  n_ngh_ = availability.round_n_ngh ? std::round(availability.n_ngh)
                                    : availability.n_ngh;
  units_.reserve(catalog.num_units());
  for (const ContentUnit& u : catalog.units()) {
    units_.push_back(evaluate(u, catalog.request_prob(u.id), n_ngh_));
  }
}

UnitEnergy ProspectiveEnergy::evaluate(const ContentUnit& unit,
                                       double request_prob,
                                       double n_ngh) const {
  UnitEnergy e;
  e.w_loc = request_prob * f_loc_fit_;
  e.w_bs = request_prob * f_bs_fit_;
  e.w_d2d = d2d_availability(e.w_loc, n_ngh);
  const double s = unit.size_bits;
  e.e_loc = power_.p_loc_w() * s / rates_.local_bps;
  e.e_d2d = power_.p_d2d_w * s / rates_.d2d_bps;
  e.e_bs = power_.p_bs_w * s / rates_.bs_bps;
  e.e_bs_u = power_.p_bsu_w() * s / rates_.backhaul_bps + e.e_bs;
  const ScenarioWeights w = scenario_weights(e.w_loc, e.w_d2d, e.w_bs);
  e.e_all = w.local * e.e_loc + w.d2d * e.e_d2d + w.bs * e.e_bs +
            w.bs_u * e.e_bs_u;
  return e;
}

const UnitEnergy& ProspectiveEnergy::at(UnitId u) const {
  if (u < 1 || u > static_cast<UnitId>(units_.size())) {
    throw DomainError("unit id " + std::to_string(u) + " outside catalog");
  }
  return units_[u - 1];
}

double ProspectiveEnergy::w_d2d(UnitId u, double n_ngh) const {
  if (!(n_ngh >= 0)) throw DomainError("neighbor count must be >= 0");
  return d2d_availability(at(u).w_loc, n_ngh);
}

double ProspectiveEnergy::e_all(UnitId u, double n_ngh) const {
  if (!(n_ngh >= 0)) throw DomainError("neighbor count must be >= 0");
  return evaluate(catalog_->unit(u), catalog_->request_prob(u), n_ngh).e_all;
}

ScenarioWeights ProspectiveEnergy::weights(UnitId u) const {
  const UnitEnergy& e = at(u);
  return scenario_weights(e.w_loc, e.w_d2d, e.w_bs);
}

EnergyLedger::EnergyLedger(const PowerProfile& power, double backhaul_bps)
    : power_(power), backhaul_bps_(backhaul_bps) {}

ServiceRecord EnergyLedger::record_service(Mode mode, const ContentUnit& unit,
                                           double rate_bps, Outcome outcome) {
  if (!(rate_bps > 0)) throw DomainError("service rate must be > 0");
  const double s = unit.size_bits;
  double joules = 0.0;
  switch (mode) {
    case Mode::kLocal:
      joules = power_.p_loc_w() * s / rate_bps;
      break;
    case Mode::kD2D:
      joules = power_.p_d2d_w * s / rate_bps;
      break;
    case Mode::kBS:
      joules = power_.p_bs_w * s / rate_bps;
      break;
    case Mode::kBSU:
      joules = power_.p_bs_w * s / rate_bps +
               power_.p_bsu_w() * s / backhaul_bps_;
      break;
    default:
      throw DomainError("unknown service mode");
  }
  const int i = index(mode, unit.layer, outcome);
  joules_[i] += joules;
  bits_[i] += s;
  booked_ += joules;
  return {mode, unit.layer, joules, s};
}

void EnergyLedger::reclassify_failed_session(
    std::span<const ServiceRecord> delivered) {
  for (const ServiceRecord& r : delivered) {
    const int from = index(r.mode, r.layer, Outcome::kSuccess);
    const int to = index(r.mode, r.layer, Outcome::kFail);
    // Cancellation can leave -1e-13 style residue; success cells stay >= 0.
    joules_[from] = std::max(0.0, joules_[from] - r.joules);
    joules_[to] += r.joules;
    bits_[from] = std::max(0.0, bits_[from] - r.bits);
    bits_[to] += r.bits;
  }
}

void EnergyLedger::count_blocked(std::int64_t blocked_units,
                                 std::int64_t dropped_units) {
  blocked_units_ += blocked_units;
  dropped_units_ += dropped_units;
}

double EnergyLedger::joules(Mode m, Layer l, Outcome o) const {
  return joules_[index(m, l, o)];
}

double EnergyLedger::bits(Mode m, Layer l, Outcome o) const {
  return bits_[index(m, l, o)];
}

double EnergyLedger::mode_success(Mode m) const {
  return joules(m, Layer::kBase, Outcome::kSuccess) +
         joules(m, Layer::kEnhancement, Outcome::kSuccess);
}

double EnergyLedger::e_block() const {
  double sum = 0.0;
  for (int m = 0; m < kNumModes; ++m) {
    for (int l = 0; l < kNumLayers; ++l) {
      sum += joules(static_cast<Mode>(m), static_cast<Layer>(l),
                    Outcome::kFail);
    }
  }
  return sum;
}

double EnergyLedger::served_bits() const {
  double sum = 0.0;
  for (int m = 0; m < kNumModes; ++m) {
    for (int l = 0; l < kNumLayers; ++l) {
      sum += bits(static_cast<Mode>(m), static_cast<Layer>(l),
                  Outcome::kSuccess);
    }
  }
  return sum;
}

void EnergyLedger::merge(const EnergyLedger& other) {
  for (std::size_t i = 0; i < joules_.size(); ++i) {
    joules_[i] += other.joules_[i];
    bits_[i] += other.bits_[i];
  }
  booked_ += other.booked_;
  blocked_units_ += other.blocked_units_;
  dropped_units_ += other.dropped_units_;
}

}  // namespace d2dcache
