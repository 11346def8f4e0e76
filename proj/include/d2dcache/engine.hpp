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
/// Discrete-event simulator of one cell.
///
/// Devices open sessions (Poisson per device). A session requests its units
/// one after another; each unit goes through the service cascade
///
///   1. requester's own cache     local hit, no channel
///   2. a neighbor within R_D2D   D2D from the nearest holder, one channel
///   3. the BS cache              BS downlink, one channel
///   4. the universal source      backhaul to the BS then downlink, one
///                                channel for the whole service
///
/// If a radio mode finds no free channel the unit is blocked: the session is
/// dropped and the energy already spent on it is booked as failed.
/// On completion the requester caches the unit (and the BS caches units it
/// fetched from the universal source) under the configured policy.

#ifndef D2DCACHE_ENGINE_HPP
#define D2DCACHE_ENGINE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "d2dcache/catalog.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/config.hpp"
#include "d2dcache/energy.hpp"
#include "d2dcache/policies.hpp"
#include "d2dcache/topology.hpp"

namespace d2dcache {

enum class EventKind : std::uint8_t {
  // Completions sort first at equal times so freed channels are visible to
  // simultaneous arrivals.
  kUnitCompletion = 0,
  kSessionArrival = 1,
};

struct Event {
  double time_s = 0.0;
  EventKind kind = EventKind::kSessionArrival;
  std::uint64_t seq = 0;
  // Device id for arrivals, in-flight slot for completions.
  std::int64_t payload = 0;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time_s != b.time_s) return a.time_s > b.time_s;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

enum class SessionStatus : std::uint8_t { kActive, kDone, kDropped };

struct SessionState {
  DeviceId requester = -1;
  std::vector<UnitId> pending;  // in request order
  std::size_t next = 0;         // index of the next unit to dispatch
  std::vector<ServiceRecord> delivered;
  SessionStatus status = SessionStatus::kActive;
};

struct ServiceDecision {
  bool blocked = false;
  Mode mode = Mode::kLocal;
  DeviceId holder = -1;  // D2D transmitter
  double distance_m = 0.0;
  double rate_bps = 0.0;  // for kBSU, the BS-to-device rate
  double duration_s = 0.0;
};

struct Metrics {
  EnergyLedger ledger;
  std::array<std::int64_t, kNumModes> services{};
  std::int64_t sessions_started = 0;
  std::int64_t sessions_done = 0;
  std::int64_t sessions_dropped = 0;
  std::int64_t sessions_active_at_end = 0;
  // Services still in flight at the horizon; released, never booked.
  std::int64_t truncated_services = 0;
  std::int64_t events = 0;
  int num_devices = 0;
  std::string config_hash;
  std::vector<std::string> warnings;
  int final_channels_in_use = 0;
};

class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);
  // Uses the given topology instead of sampling one.
  Simulator(const SimConfig& cfg, Topology topology);
  ~Simulator();

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Runs until sim.duration_s. Callable once.
  Metrics run();

  // Scripted use (tests): suppress Poisson arrivals, inject sessions, and
  // pre-seed caches before run().
  void disable_poisson_arrivals();
  void schedule_session(double time_s, Session session);
  void seed_device_cache(DeviceId dev, UnitId unit);
  void seed_bs_cache(UnitId unit);
  // Event trace as CSV: time_s,event,requester,unit,mode,duration_s,joules.
  void set_trace(std::ostream* out);

  const SimConfig& config() const { return cfg_; }
  const Catalog& catalog() const { return catalog_; }
  const Topology& topology() const { return topology_; }
  const ProspectiveEnergy& prospective() const { return *prospective_; }
  const CacheState& device_cache(DeviceId dev) const;
  const CacheState& bs_cache() const { return bs_cache_; }
  int channels_in_use() const;

  // Cascade decision for the session's next unit. Acquires the channel when
  // the decision is not blocked.
  ServiceDecision dispatch_unit(DeviceId requester, UnitId unit);
  double service_duration(UnitId unit, Mode mode, double rate_bps) const;
  // Realized rate of a radio link.
  double d2d_rate(double distance_m) const;
  double bs_rate(DeviceId dev) const;

 private:
  struct InFlight {
    int session = -1;
    UnitId unit = 0;
    ServiceDecision decision;
    ChannelPool* pool = nullptr;
    bool active = false;
  };

  void init();
  void schedule(double t, EventKind kind, std::int64_t payload);
  void on_arrival(DeviceId dev, double now);
  void start_session(Session s, double now);
  void dispatch_next(int session, double now);
  void complete(std::int64_t slot, double now);
  void drop_session(int session);
  void cache_unit(DeviceId dev, UnitId unit, double now);
  void cache_at_bs(UnitId unit, double now);
  bool holds(DeviceId dev, UnitId unit) const;
  void set_holds(DeviceId dev, UnitId unit, bool on);
  UnitInfo unit_info(UnitId unit) const;
  ChannelPool* pool_for(Mode mode);
  void audit() const;
  void trace(double t, const char* event, DeviceId requester, UnitId unit,
             const char* mode, double duration, double joules);

  SimConfig cfg_;
  Catalog catalog_;
  Topology topology_;
  ProspectiveRates rates_;
  std::unique_ptr<ProspectiveEnergy> prospective_;
  std::vector<double> bs_rate_;
  std::vector<Bits> unit_bits_;

  std::vector<CacheState> device_caches_;
  CacheState bs_cache_;
  std::vector<std::uint64_t> resident_;  // device-major bitmap
  std::size_t words_per_device_ = 0;

  ChannelPool shared_pool_;
  ChannelPool d2d_pool_;
  std::vector<int> tx_busy_;

  Rng rng_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t seq_ = 0;
  std::vector<SessionState> sessions_;
  std::vector<std::pair<double, Session>> scripted_;
  std::vector<InFlight> in_flight_;
  std::vector<std::int64_t> free_slots_;
  bool poisson_ = true;
  bool ran_ = false;
  std::ostream* trace_ = nullptr;
  Metrics metrics_;
};

// Convenience: build, run and return metrics.
Metrics run(const SimConfig& cfg);

}  // namespace d2dcache

#endif  // D2DCACHE_ENGINE_HPP
