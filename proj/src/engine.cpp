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

#include "d2dcache/engine.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "d2dcache/errors.hpp"

namespace d2dcache {
namespace {

// Independent streams for topology and traffic from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

constexpr std::uint64_t kTopologyStream = 1;
constexpr std::uint64_t kTrafficStream = 2;

CellConfig topology_config(const SimConfig& cfg) {
  CellConfig cell = cfg.topology;
  cell.rng_seed = derive_seed(cfg.sim.seed, kTopologyStream);
  return cell;
}

const SimConfig& validated(const SimConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Simulator::Simulator(const SimConfig& cfg)
    : Simulator(cfg, sample_topology(topology_config(validated(cfg)))) {}

Simulator::Simulator(const SimConfig& cfg, Topology topology)
    : cfg_(validated(cfg)),
      catalog_(cfg.catalog),
      topology_(std::move(topology)),
      bs_cache_(cfg.cache.c_bs_bits),
      shared_pool_(cfg.channel.pool_size),
      d2d_pool_(cfg.channel.pool_size),
      rng_(derive_seed(cfg.sim.seed, kTrafficStream)) {
  init();
}

Simulator::~Simulator() = default;

void Simulator::init() {
  rates_ = prospective_rates(cfg_.channel, cfg_.power.p_d2d_w,
                             cfg_.power.p_bs_w, cfg_.topology.r_d2d_m,
                             cfg_.topology.cell_radius_m);
  AvailabilityParams avail;
  avail.c_dev_bits = static_cast<double>(cfg_.cache.c_dev_bits);
  avail.c_bs_bits = static_cast<double>(cfg_.cache.c_bs_bits);
  avail.n_ngh = expected_neighbor_count(cfg_.topology);
  avail.round_n_ngh = cfg_.cache.round_n_ngh;
  prospective_ =
      std::make_unique<ProspectiveEnergy>(catalog_, cfg_.power, rates_, avail);

  const int n = topology_.num_devices();
  bs_rate_.resize(static_cast<std::size_t>(n));
  for (DeviceId d = 0; d < n; ++d) {
    bs_rate_[static_cast<std::size_t>(d)] =
        link_rate(cfg_.channel, cfg_.power.p_bs_w, topology_.distance_to_bs(d),
                  cfg_.channel.pathloss_bs);
  }

  unit_bits_.assign(static_cast<std::size_t>(catalog_.num_units()) + 1, 0);
  for (const ContentUnit& u : catalog_.units()) {
    unit_bits_[static_cast<std::size_t>(u.id)] = std::llround(u.size_bits);
  }

  device_caches_.assign(static_cast<std::size_t>(n),
                        CacheState(cfg_.cache.c_dev_bits));
  words_per_device_ = (static_cast<std::size_t>(catalog_.num_units()) + 64) / 64;
  resident_.assign(words_per_device_ * static_cast<std::size_t>(n), 0);
  tx_busy_.assign(static_cast<std::size_t>(n), 0);

  metrics_.ledger = EnergyLedger(cfg_.power, cfg_.channel.backhaul_bps);
  metrics_.num_devices = n;
  metrics_.config_hash = config_hash(cfg_);
  if (topology_.degenerate()) {
    metrics_.warnings.emplace_back("topology has no devices");
  }
}

const CacheState& Simulator::device_cache(DeviceId dev) const {
  if (dev < 0 || dev >= topology_.num_devices()) {
    throw DomainError("device id out of range: " + std::to_string(dev));
  }
  return device_caches_[static_cast<std::size_t>(dev)];
}

int Simulator::channels_in_use() const {
  return shared_pool_.in_use() + (cfg_.channel.split_pool ? d2d_pool_.in_use() : 0);
}

void Simulator::disable_poisson_arrivals() { poisson_ = false; }

void Simulator::schedule_session(double time_s, Session session) {
  if (ran_) throw DomainError("simulator already ran");
  if (session.requester < 0 || session.requester >= topology_.num_devices()) {
    throw DomainError("session requester out of range");
  }
  for (UnitId u : session.units) (void)catalog_.unit(u);
  scripted_.emplace_back(time_s, std::move(session));
}

void Simulator::seed_device_cache(DeviceId dev, UnitId unit) {
  (void)device_cache(dev);
  cache_unit(dev, unit, 0.0);
}

void Simulator::seed_bs_cache(UnitId unit) { cache_at_bs(unit, 0.0); }

void Simulator::set_trace(std::ostream* out) {
  trace_ = out;
  if (trace_ != nullptr) {
    *trace_ << "time_s,event,requester,unit,mode,duration_s,joules\n";
  }
}

bool Simulator::holds(DeviceId dev, UnitId unit) const {
  const std::size_t w = static_cast<std::size_t>(dev) * words_per_device_ +
                        static_cast<std::size_t>(unit) / 64;
  return (resident_[w] >> (static_cast<unsigned>(unit) % 64)) & 1U;
}

void Simulator::set_holds(DeviceId dev, UnitId unit, bool on) {
  const std::size_t w = static_cast<std::size_t>(dev) * words_per_device_ +
                        static_cast<std::size_t>(unit) / 64;
  const std::uint64_t bit = std::uint64_t{1} << (static_cast<unsigned>(unit) % 64);
  if (on) {
    resident_[w] |= bit;
  } else {
    resident_[w] &= ~bit;
  }
}

UnitInfo Simulator::unit_info(UnitId unit) const {
  UnitInfo info;
  info.unit = unit;
  info.size_bits = unit_bits_[static_cast<std::size_t>(unit)];
  info.e_all = prospective_->e_all(unit);
  info.request_prob = catalog_.request_prob(unit);
  return info;
}

void Simulator::cache_unit(DeviceId dev, UnitId unit, double now) {
  CacheState& cache = device_caches_[static_cast<std::size_t>(dev)];
  const EvictionDecision d =
      insert(cfg_.cache.device_policy(), cache, unit_info(unit), now, &rng_,
             /*list_retained=*/false);
  for (UnitId e : d.evicted) set_holds(dev, e, false);
  if (d.inserted) set_holds(dev, unit, true);
}

void Simulator::cache_at_bs(UnitId unit, double now) {
  insert(cfg_.cache.bs_policy(), bs_cache_, unit_info(unit), now, &rng_,
         /*list_retained=*/false);
}

ChannelPool* Simulator::pool_for(Mode mode) {
  if (mode == Mode::kLocal) return nullptr;
  if (mode == Mode::kD2D && cfg_.channel.split_pool) return &d2d_pool_;
  return &shared_pool_;
}

double Simulator::d2d_rate(double distance_m) const {
  return link_rate(cfg_.channel, cfg_.power.p_d2d_w, distance_m,
                   cfg_.channel.pathloss_d2d);
}

double Simulator::bs_rate(DeviceId dev) const {
  (void)device_cache(dev);
  return bs_rate_[static_cast<std::size_t>(dev)];
}

double Simulator::service_duration(UnitId unit, Mode mode,
                                   double rate_bps) const {
  const double s = catalog_.unit(unit).size_bits;
  switch (mode) {
    case Mode::kLocal:
      return s / cfg_.channel.local_bps;
    case Mode::kD2D:
    case Mode::kBS:
      return s / rate_bps;
    case Mode::kBSU:
      return s / cfg_.channel.backhaul_bps + s / rate_bps;
  }
  throw InvariantViolation("unknown mode");
}

ServiceDecision Simulator::dispatch_unit(DeviceId requester, UnitId unit) {
  ServiceDecision d;
  if (holds(requester, unit)) {
    d.mode = Mode::kLocal;
    d.rate_bps = cfg_.channel.local_bps;
    d.duration_s = service_duration(unit, d.mode, d.rate_bps);
    return d;
  }

  const bool single_tx = cfg_.sim.single_tx_per_device;
  const auto usable = [&](DeviceId h) {
    return holds(h, unit) &&
           !(single_tx && tx_busy_[static_cast<std::size_t>(h)] > 0);
  };
  const std::span<const Neighbor> ngh = topology_.d2d_neighbors(requester);
  const Neighbor* holder = nullptr;
  if (cfg_.sim.holder == HolderSelection::kNearest) {
    for (const Neighbor& n : ngh) {
      if (usable(n.id)) {
        holder = &n;
        break;
      }
    }
  } else {
    std::size_t count = 0;
    for (const Neighbor& n : ngh) {
      // Reservoir sampling keeps one uniform choice without a buffer.
      if (usable(n.id) &&
          std::uniform_int_distribution<std::size_t>(0, count++)(rng_) == 0) {
        holder = &n;
      }
    }
  }

  if (holder != nullptr) {
    d.mode = Mode::kD2D;
    d.holder = holder->id;
    d.distance_m = holder->distance_m;
    d.rate_bps = d2d_rate(holder->distance_m);
  } else {
    d.mode = bs_cache_.contains(unit) ? Mode::kBS : Mode::kBSU;
    d.distance_m = topology_.distance_to_bs(requester);
    d.rate_bps = bs_rate_[static_cast<std::size_t>(requester)];
  }
  d.duration_s = service_duration(unit, d.mode, d.rate_bps);
  if (!pool_for(d.mode)->acquire()) d.blocked = true;
  return d;
}

void Simulator::schedule(double t, EventKind kind, std::int64_t payload) {
  queue_.push(Event{t, kind, seq_++, payload});
}

void Simulator::trace(double t, const char* event, DeviceId requester,
                      UnitId unit, const char* mode, double duration,
                      double joules) {
  if (trace_ == nullptr) return;
  *trace_ << format_double(t) << ',' << event << ',' << requester << ',';
  if (unit > 0) *trace_ << unit;
  *trace_ << ',' << mode << ',' << format_double(duration) << ','
          << format_double(joules) << '\n';
}

void Simulator::on_arrival(DeviceId dev, double now) {
  start_session(catalog_.sample_session(rng_, dev), now);
  const double next =
      now + std::exponential_distribution<double>(cfg_.sim.arrival_rate_hz)(rng_);
  schedule(next, EventKind::kSessionArrival, dev);
}

void Simulator::start_session(Session s, double now) {
  const int id = static_cast<int>(sessions_.size());
  SessionState& st = sessions_.emplace_back();
  st.requester = s.requester;
  st.pending = std::move(s.units);
  ++metrics_.sessions_started;
  trace(now, "arrival", st.requester, 0, "", 0.0, 0.0);
  dispatch_next(id, now);
}

void Simulator::dispatch_next(int session, double now) {
  SessionState& st = sessions_[static_cast<std::size_t>(session)];
  if (st.next >= st.pending.size()) {
    st.status = SessionStatus::kDone;
    ++metrics_.sessions_done;
    return;
  }
  const UnitId unit = st.pending[st.next];
  const ServiceDecision d = dispatch_unit(st.requester, unit);
  if (d.blocked) {
    trace(now, "block", st.requester, unit, mode_name(d.mode).data(), 0.0, 0.0);
    drop_session(session);
    return;
  }
  if (d.mode == Mode::kLocal) {
    device_caches_[static_cast<std::size_t>(st.requester)].touch(unit, now);
  } else if (d.mode == Mode::kBS) {
    bs_cache_.touch(unit, now);
  }
  if (d.mode == Mode::kD2D) ++tx_busy_[static_cast<std::size_t>(d.holder)];

  std::int64_t slot;
  if (free_slots_.empty()) {
    slot = static_cast<std::int64_t>(in_flight_.size());
    in_flight_.emplace_back();
  } else {
    slot = free_slots_.back();
    free_slots_.pop_back();
  }
  InFlight& f = in_flight_[static_cast<std::size_t>(slot)];
  f.session = session;
  f.unit = unit;
  f.decision = d;
  f.pool = pool_for(d.mode);
  f.active = true;
  schedule(now + d.duration_s, EventKind::kUnitCompletion, slot);
}

void Simulator::drop_session(int session) {
  SessionState& st = sessions_[static_cast<std::size_t>(session)];
  st.status = SessionStatus::kDropped;
  ++metrics_.sessions_dropped;
  const auto remaining = static_cast<std::int64_t>(st.pending.size() - st.next);
  // The blocked unit itself plus the ones never requested.
  metrics_.ledger.count_blocked(1, remaining - 1);
  metrics_.ledger.reclassify_failed_session(st.delivered);
  st.delivered.clear();
}

void Simulator::complete(std::int64_t slot, double now) {
  InFlight& f = in_flight_[static_cast<std::size_t>(slot)];
  if (!f.active) throw InvariantViolation("completion of an idle slot");
  f.active = false;
  free_slots_.push_back(slot);
  const ServiceDecision d = f.decision;
  const int session = f.session;
  const UnitId unit = f.unit;
  if (f.pool != nullptr) f.pool->release();
  if (d.mode == Mode::kD2D) --tx_busy_[static_cast<std::size_t>(d.holder)];

  SessionState& st = sessions_[static_cast<std::size_t>(session)];
  double joules = 0.0;
  if (now >= cfg_.sim.warmup_s) {
    const ServiceRecord rec = metrics_.ledger.record_service(
        d.mode, catalog_.unit(unit), d.rate_bps, Outcome::kSuccess);
    st.delivered.push_back(rec);
    joules = rec.joules;
  }
  ++metrics_.services[static_cast<std::size_t>(d.mode)];
  trace(now, "complete", st.requester, unit, mode_name(d.mode).data(),
        d.duration_s, joules);

  if (d.mode != Mode::kLocal) cache_unit(st.requester, unit, now);
  if (d.mode == Mode::kBSU) cache_at_bs(unit, now);
  ++st.next;
  dispatch_next(session, now);
}

void Simulator::audit() const {
  const EnergyLedger& l = metrics_.ledger;
  const double booked = l.joules_booked();
  if (std::abs(l.e_total() - booked) > 1e-9 * std::max(1.0, booked)) {
    throw InvariantViolation("ledger total " + format_double(l.e_total()) +
                             " differs from booked " + format_double(booked));
  }
  std::array<int, 2> held{};
  for (const InFlight& f : in_flight_) {
    if (!f.active || f.pool == nullptr) continue;
    ++held[f.pool == &d2d_pool_ ? 1 : 0];
  }
  if (held[0] != shared_pool_.in_use() || held[1] != d2d_pool_.in_use()) {
    throw InvariantViolation("channel accounting mismatch");
  }
  if (shared_pool_.in_use() > shared_pool_.total() ||
      d2d_pool_.in_use() > d2d_pool_.total()) {
    throw InvariantViolation("channel pool over-subscribed");
  }
  for (std::size_t d = 0; d < device_caches_.size(); ++d) {
    if (device_caches_[d].used_bits() > device_caches_[d].capacity_bits()) {
      throw InvariantViolation("device cache over capacity");
    }
  }
  if (bs_cache_.used_bits() > bs_cache_.capacity_bits()) {
    throw InvariantViolation("BS cache over capacity");
  }
}

Metrics Simulator::run() {
  if (ran_) throw DomainError("simulator already ran");
  ran_ = true;
  const double horizon = cfg_.sim.duration_s;
  // Arrival payloads >= 0 are devices; scripted sessions use -(index+1).
  for (std::size_t i = 0; i < scripted_.size(); ++i) {
    schedule(scripted_[i].first, EventKind::kSessionArrival,
             -static_cast<std::int64_t>(i) - 1);
  }
  if (poisson_) {
    std::exponential_distribution<double> gap(cfg_.sim.arrival_rate_hz);
    for (DeviceId d = 0; d < topology_.num_devices(); ++d) {
      schedule(gap(rng_), EventKind::kSessionArrival, d);
    }
  }

  while (!queue_.empty() && queue_.top().time_s <= horizon) {
    const Event ev = queue_.top();
    queue_.pop();
    ++metrics_.events;
    if (ev.kind == EventKind::kUnitCompletion) {
      complete(ev.payload, ev.time_s);
    } else if (ev.payload < 0) {
      start_session(std::move(scripted_[static_cast<std::size_t>(-ev.payload - 1)].second),
                    ev.time_s);
    } else {
      on_arrival(static_cast<DeviceId>(ev.payload), ev.time_s);
    }
    if (cfg_.sim.audit) audit();
  }

  for (InFlight& f : in_flight_) {
    if (!f.active) continue;
    f.active = false;
    if (f.pool != nullptr) f.pool->release();
    if (f.decision.mode == Mode::kD2D) {
      --tx_busy_[static_cast<std::size_t>(f.decision.holder)];
    }
    ++metrics_.truncated_services;
    trace(horizon, "truncate", sessions_[static_cast<std::size_t>(f.session)].requester,
          f.unit, mode_name(f.decision.mode).data(), 0.0, 0.0);
  }
  for (const SessionState& st : sessions_) {
    if (st.status == SessionStatus::kActive) ++metrics_.sessions_active_at_end;
  }
  metrics_.final_channels_in_use = channels_in_use();
  if (cfg_.sim.audit) audit();
  return std::move(metrics_);
}

Metrics run(const SimConfig& cfg) {
  Simulator sim(cfg);
  return sim.run();
}

}  // namespace d2dcache
