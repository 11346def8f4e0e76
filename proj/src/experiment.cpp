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

#include "d2dcache/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "d2dcache/errors.hpp"

namespace d2dcache {
namespace {

constexpr std::array<SweepParam, 4> kSweepParams = {
    SweepParam::kCDev, SweepParam::kRD2D, SweepParam::kPool,
    SweepParam::kArrival};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  for (std::string& p : parts) boost::trim(p);
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  return parts;
}

double parse_number(std::string_view field, const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    throw ConfigError(std::string(field), "expected a number, got '" + text + "'");
  }
  return v;
}

Mode kModes[] = {Mode::kLocal, Mode::kD2D, Mode::kBS, Mode::kBSU};
Layer kLayers[] = {Layer::kBase, Layer::kEnhancement};
Outcome kOutcomes[] = {Outcome::kSuccess, Outcome::kFail};

std::string cell_name(Mode m, Layer l, Outcome o) {
  return std::string(mode_name(m)) + '_' + std::string(layer_name(l)) + '_' +
         std::string(outcome_name(o));
}

std::vector<std::string> build_columns() {
  std::vector<std::string> cols;
  for (Mode m : kModes) {
    for (Layer l : kLayers) {
      for (Outcome o : kOutcomes) cols.push_back("j_" + cell_name(m, l, o));
    }
  }
  for (Mode m : kModes) {
    for (Layer l : kLayers) {
      for (Outcome o : kOutcomes) cols.push_back("b_" + cell_name(m, l, o));
    }
  }
  for (const char* c :
       {"e_loc", "e_d2d", "e_bs", "e_bs_u", "e_block", "e_total", "bits_loc",
        "bits_d2d", "bits_bs", "bits_bsu", "served_bits", "services_loc",
        "services_d2d", "services_bs", "services_bsu", "blocked_units",
        "dropped_units", "sessions_started", "sessions_done",
        "sessions_dropped", "truncated_services", "num_devices"}) {
    cols.emplace_back(c);
  }
  return cols;
}

std::string csv_double(double v) { return format_double(v); }

}  // namespace

std::string_view sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::kCDev: return "c_dev_bits";
    case SweepParam::kRD2D: return "r_d2d_m";
    case SweepParam::kPool: return "pool_size";
    case SweepParam::kArrival: return "arrival_rate";
  }
  return "?";
}

std::string_view sweep_param_short(SweepParam p) {
  switch (p) {
    case SweepParam::kCDev: return "cdev";
    case SweepParam::kRD2D: return "rd2d";
    case SweepParam::kPool: return "pool";
    case SweepParam::kArrival: return "arrival";
  }
  return "?";
}

SweepParam parse_sweep_param(std::string_view name) {
  for (SweepParam p : kSweepParams) {
    if (name == sweep_param_name(p)) return p;
  }
  throw ConfigError("sweep.parameter",
                    "expected c_dev_bits, r_d2d_m, pool_size or arrival_rate");
}

void apply_sweep_value(SimConfig& cfg, SweepParam p, double value) {
  switch (p) {
    case SweepParam::kCDev:
      cfg.cache.c_dev_bits = std::llround(value);
      break;
    case SweepParam::kRD2D:
      cfg.topology.r_d2d_m = value;
      break;
    case SweepParam::kPool:
      if (value != std::floor(value)) {
        throw ConfigError("sweep.values", "pool_size values must be integers");
      }
      cfg.channel.pool_size = static_cast<int>(value);
      break;
    case SweepParam::kArrival:
      cfg.sim.arrival_rate_hz = value;
      break;
  }
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep.values", "must not be empty");
  if (policies.empty()) throw ConfigError("sweep.policies", "must not be empty");
  if (replications < 1) throw ConfigError("sweep.replications", "must be >= 1");
  base.validate();
  for (double v : values) {
    SimConfig cfg = base;
    apply_sweep_value(cfg, parameter, v);
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), std::string(e.what()) + " (at " +
                                       std::string(sweep_param_name(parameter)) +
                                       " = " + format_double(v) + ")");
    }
  }
}

SweepSpec parse_sweep(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("sweep", e.message() + " at line " + std::to_string(e.line()));
  }
  SweepSpec spec;
  spec.policies.assign(all_policies().begin(), all_policies().end());
  bool have_sweep = false;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section, "key outside of any [section]");
    if (section != "sweep") {
      for (const auto& [key, value] : body) {
        set_config_value(spec.base, section + "." + key, value.data());
      }
      continue;
    }
    have_sweep = true;
    for (const auto& [key, value] : body) {
      const std::string& v = value.data();
      if (key == "parameter") {
        spec.parameter = parse_sweep_param(v);
      } else if (key == "values") {
        spec.values.clear();
        for (const std::string& s : split_list(v)) {
          spec.values.push_back(parse_number("sweep.values", s));
        }
      } else if (key == "policies") {
        spec.policies.clear();
        for (const std::string& s : split_list(v)) {
          try {
            spec.policies.push_back(parse_policy(s));
          } catch (const DomainError& e) {
            throw ConfigError("sweep.policies", e.what());
          }
        }
      } else if (key == "replications") {
        const double r = parse_number("sweep.replications", v);
        if (r != std::floor(r) || r < 1 || r > 1e6) {
          throw ConfigError("sweep.replications", "expected a positive integer");
        }
        spec.replications = static_cast<int>(r);
      } else {
        throw ConfigError("sweep." + key, "unknown configuration key");
      }
    }
  }
  if (!have_sweep) throw ConfigError("sweep", "missing [sweep] section");
  spec.validate();
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("sweep", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_sweep(text.str());
}

std::span<const std::string> metric_columns() {
  static const std::vector<std::string> cols = build_columns();
  return cols;
}

std::size_t metric_index(std::string_view column) {
  const auto cols = metric_columns();
  const auto it = std::find(cols.begin(), cols.end(), column);
  if (it == cols.end()) {
    throw DomainError("unknown metric column: " + std::string(column));
  }
  return static_cast<std::size_t>(it - cols.begin());
}

double ResultRow::get(std::string_view column) const {
  return metrics.at(metric_index(column));
}

ResultRow make_row(PolicyKind policy, double value, int replication,
                   std::uint64_t seed, const Metrics& m) {
  ResultRow row;
  row.policy = policy;
  row.value = value;
  row.replication = replication;
  row.seed = seed;
  row.config_hash = m.config_hash;
  const EnergyLedger& l = m.ledger;
  auto& v = row.metrics;
  v.reserve(metric_columns().size());
  for (Mode md : kModes) {
    for (Layer ly : kLayers) {
      for (Outcome o : kOutcomes) v.push_back(l.joules(md, ly, o));
    }
  }
  for (Mode md : kModes) {
    for (Layer ly : kLayers) {
      for (Outcome o : kOutcomes) v.push_back(l.bits(md, ly, o));
    }
  }
  v.insert(v.end(), {l.e_loc(), l.e_d2d(), l.e_bs(), l.e_bs_u(), l.e_block(),
                     l.e_total()});
  for (Mode md : kModes) {
    v.push_back(l.bits(md, Layer::kBase, Outcome::kSuccess) +
                l.bits(md, Layer::kEnhancement, Outcome::kSuccess));
  }
  v.push_back(l.served_bits());
  for (std::int64_t s : m.services) v.push_back(static_cast<double>(s));
  for (std::int64_t c :
       {l.blocked_units(), l.dropped_units(), m.sessions_started,
        m.sessions_done, m.sessions_dropped, m.truncated_services,
        static_cast<std::int64_t>(m.num_devices)}) {
    v.push_back(static_cast<double>(c));
  }
  for (double x : v) {
    if (!std::isfinite(x) || x < 0) {
      throw InvariantViolation("non-finite or negative metric in result row");
    }
  }
  return row;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec,
                                 const Progress& progress) {
  spec.validate();
  std::vector<ResultRow> rows;
  const std::size_t total =
      spec.policies.size() * spec.values.size() *
      static_cast<std::size_t>(spec.replications);
  rows.reserve(total);
  for (PolicyKind policy : spec.policies) {
    for (double value : spec.values) {
      for (int r = 0; r < spec.replications; ++r) {
        SimConfig cfg = spec.base;
        cfg.cache.policy = policy;
        apply_sweep_value(cfg, spec.parameter, value);
        cfg.sim.seed = spec.base.sim.seed + static_cast<std::uint64_t>(r);
        try {
          cfg.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(e.field(),
                            std::string(e.what()) + " (policy " +
                                std::string(policy_name(policy)) + ", " +
                                std::string(sweep_param_name(spec.parameter)) +
                                " = " + format_double(value) + ", seed " +
                                std::to_string(cfg.sim.seed) + ")");
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Metrics m = run(cfg);
        const auto t1 = std::chrono::steady_clock::now();
        ResultRow row = make_row(policy, value, r, cfg.sim.seed, m);
        row.wall_s = std::chrono::duration<double>(t1 - t0).count();
        rows.push_back(std::move(row));
        if (progress) progress(rows.size(), total);
      }
    }
  }
  return rows;
}

double ci95_half_width(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
                      static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return t * sd / std::sqrt(static_cast<double>(n));
}

std::vector<Aggregate> aggregate(std::span<const ResultRow> rows) {
  // Groups keep first-appearance order so output follows the sweep order.
  std::vector<std::pair<PolicyKind, double>> keys;
  std::map<std::pair<int, double>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) {
    const std::pair<int, double> k{static_cast<int>(r.policy), r.value};
    auto& g = groups[k];
    if (g.empty()) keys.emplace_back(r.policy, r.value);
    g.push_back(&r);
  }
  const auto cols = metric_columns();
  std::vector<Aggregate> out;
  out.reserve(keys.size() * cols.size());
  std::vector<double> xs;
  for (const auto& [policy, value] : keys) {
    const auto& g = groups[{static_cast<int>(policy), value}];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      xs.clear();
      for (const ResultRow* r : g) xs.push_back(r->metrics.at(c));
      Aggregate a;
      a.policy = policy;
      a.value = value;
      a.column = cols[c];
      a.n = static_cast<int>(xs.size());
      a.mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
               static_cast<double>(xs.size());
      a.ci95 = ci95_half_width(xs);
      out.push_back(std::move(a));
    }
  }
  return out;
}

void write_results_csv(std::ostream& out, const SweepSpec& spec,
                       std::span<const ResultRow> rows) {
  out << "policy," << sweep_param_name(spec.parameter)
      << ",replication,seed,config_hash";
  for (const std::string& c : metric_columns()) out << ',' << c;
  out << '\n';
  for (const ResultRow& r : rows) {
    out << policy_name(r.policy) << ',' << csv_double(r.value) << ','
        << r.replication << ',' << r.seed << ',' << r.config_hash;
    for (double v : r.metrics) out << ',' << csv_double(v);
    out << '\n';
  }
}

void write_aggregates_csv(std::ostream& out, const SweepSpec& spec,
                          std::span<const Aggregate> aggs) {
  out << "policy," << sweep_param_name(spec.parameter)
      << ",column,n,mean,ci95\n";
  for (const Aggregate& a : aggs) {
    out << policy_name(a.policy) << ',' << csv_double(a.value) << ','
        << a.column << ',' << a.n << ',' << csv_double(a.mean) << ','
        << csv_double(a.ci95) << '\n';
  }
}

void write_timing_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << "policy,value,replication,seed,wall_s\n";
  for (const ResultRow& r : rows) {
    out << policy_name(r.policy) << ',' << csv_double(r.value) << ','
        << r.replication << ',' << r.seed << ',' << csv_double(r.wall_s)
        << '\n';
  }
}

void write_manifest(std::ostream& out, const SweepSpec& spec,
                    std::span<const ResultRow> rows) {
  nlohmann::ordered_json j;
  j["base_config_hash"] = config_hash(spec.base);
  j["base_config"] = to_ini(spec.base);
  j["parameter"] = sweep_param_name(spec.parameter);
  j["values"] = spec.values;
  std::vector<std::string> policies;
  for (PolicyKind p : spec.policies) policies.emplace_back(policy_name(p));
  j["policies"] = policies;
  j["replications"] = spec.replications;
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < spec.replications; ++r) {
    seeds.push_back(spec.base.sim.seed + static_cast<std::uint64_t>(r));
  }
  j["seeds"] = seeds;
  auto runs = nlohmann::ordered_json::array();
  for (const ResultRow& r : rows) {
    runs.push_back({{"policy", policy_name(r.policy)},
                    {"value", r.value},
                    {"seed", r.seed},
                    {"config_hash", r.config_hash}});
  }
  j["runs"] = std::move(runs);
  j["files"] = {"results.csv", "aggregates.csv", "timing.csv"};
  out << j.dump(2) << '\n';
}

void write_sweep_outputs(const std::filesystem::path& dir,
                         const SweepSpec& spec,
                         std::span<const ResultRow> rows) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) {
      throw ConfigError("out", "cannot write '" + (dir / name).string() + "'");
    }
    return f;
  };
  {
    auto f = open("results.csv");
    write_results_csv(f, spec, rows);
  }
  {
    auto f = open("aggregates.csv");
    write_aggregates_csv(f, spec, aggregate(rows));
  }
  {
    auto f = open("timing.csv");
    write_timing_csv(f, rows);
  }
  {
    auto f = open("manifest.json");
    write_manifest(f, spec, rows);
  }
}

void write_run_metrics(std::ostream& out, const SimConfig& cfg,
                       const Metrics& m) {
  const ResultRow row = make_row(cfg.cache.policy, 0.0, 0, cfg.sim.seed, m);
  out << "key,value\n";
  out << "config_hash," << m.config_hash << '\n';
  out << "policy," << policy_name(cfg.cache.policy) << '\n';
  out << "seed," << cfg.sim.seed << '\n';
  const auto cols = metric_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out << cols[c] << ',' << csv_double(row.metrics[c]) << '\n';
  }
  out << "events," << m.events << '\n';
  out << "final_channels_in_use," << m.final_channels_in_use << '\n';
  for (const std::string& w : m.warnings) out << "warning," << w << '\n';
}

std::vector<std::string> figure_ids() {
  std::vector<std::string> ids;
  for (const char* comp : {"loc", "d2d", "bs", "bsu", "total"}) {
    for (const char* qty : {"energy", "bits"}) {
      for (SweepParam p : kSweepParams) {
        ids.push_back(std::string(comp) + '_' + qty + "_vs_" +
                      std::string(sweep_param_short(p)));
      }
    }
  }
  return ids;
}

AggregateTable read_aggregates_csv(std::istream& in) {
  AggregateTable t;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty aggregates file");
  std::vector<std::string> head = split_list(line);
  if (head.size() != 6 || head[0] != "policy" || head[2] != "column") {
    throw DomainError("not an aggregates file: bad header");
  }
  t.parameter = parse_sweep_param(head[1]);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    boost::split(f, line, boost::is_any_of(","));
    if (f.size() != 6) throw DomainError("bad aggregates row: " + line);
    Aggregate a;
    a.policy = parse_policy(f[0]);
    a.value = parse_number("aggregates.value", f[1]);
    a.column = f[2];
    a.n = static_cast<int>(parse_number("aggregates.n", f[3]));
    a.mean = parse_number("aggregates.mean", f[4]);
    a.ci95 = parse_number("aggregates.ci95", f[5]);
    t.rows.push_back(std::move(a));
  }
  return t;
}

void emit_plot_data(const AggregateTable& table, std::string_view figure_id,
                    std::ostream& out) {
  const std::vector<std::string> ids = figure_ids();
  const auto usage = [&](const std::string& why) {
    throw DomainError(why + "; valid figure ids: " + boost::join(ids, ", "));
  };
  if (std::find(ids.begin(), ids.end(), figure_id) == ids.end()) {
    usage("unknown figure id '" + std::string(figure_id) + "'");
  }
  const std::string id(figure_id);
  const std::size_t vs = id.find("_vs_");
  const std::string axis = id.substr(vs + 4);
  if (axis != sweep_param_short(table.parameter)) {
    usage("figure '" + id + "' needs a sweep over " + axis +
          " but the aggregates sweep " +
          std::string(sweep_param_short(table.parameter)));
  }
  const std::size_t us = id.find('_');
  const std::string comp = id.substr(0, us);
  const std::string qty = id.substr(us + 1, vs - us - 1);
  const std::string prefix = qty == "energy" ? "j_" : "b_";

  std::vector<std::string> components;
  for (Mode m : kModes) {
    if (comp != "total" && comp != mode_name(m)) continue;
    for (Layer l : kLayers) {
      for (Outcome o : kOutcomes) components.push_back(cell_name(m, l, o));
    }
  }
  out << "policy," << sweep_param_name(table.parameter)
      << ",component,mean,ci95\n";
  for (const Aggregate& a : table.rows) {
    if (a.column.rfind(prefix, 0) != 0) continue;
    const std::string cell = a.column.substr(prefix.size());
    if (std::find(components.begin(), components.end(), cell) ==
        components.end()) {
      continue;
    }
    out << policy_name(a.policy) << ',' << csv_double(a.value) << ',' << cell
        << ',' << csv_double(a.mean) << ',' << csv_double(a.ci95) << '\n';
  }
}

namespace {

struct BenchInstance {
  CacheState cache;
  UnitInfo incoming;
};

// Fills a cache from the default catalog in random order and picks a
// non-resident incoming unit that forces an eviction.
BenchInstance catalog_instance(const BenchCase& c, Rng& rng) {
  static const Catalog catalog{CatalogConfig{}};
  static const ProspectiveEnergy energy = [] {
    const SimConfig cfg;
    AvailabilityParams avail;
    avail.c_dev_bits = static_cast<double>(cfg.cache.c_dev_bits);
    avail.c_bs_bits = static_cast<double>(cfg.cache.c_bs_bits);
    avail.n_ngh = expected_neighbor_count(cfg.topology);
    return ProspectiveEnergy(
        catalog, cfg.power,
        prospective_rates(cfg.channel, cfg.power.p_d2d_w, cfg.power.p_bs_w,
                          cfg.topology.r_d2d_m, cfg.topology.cell_radius_m),
        avail);
  }();
  const auto info = [&](UnitId u) {
    return UnitInfo{u, std::llround(catalog.unit(u).size_bits), energy.e_all(u),
                    catalog.request_prob(u)};
  };
  BenchInstance inst{CacheState(c.capacity_bits), {}};
  std::uniform_int_distribution<UnitId> pick(1, catalog.num_units());
  int misses = 0;
  while (misses < 64) {
    const UnitInfo u = info(pick(rng));
    if (inst.cache.contains(u.unit) || u.size_bits > inst.cache.free_bits()) {
      ++misses;
      continue;
    }
    CacheEntry e;
    e.unit = u.unit;
    e.size_bits = u.size_bits;
    e.last_access = static_cast<double>(inst.cache.size());
    e.access_count = 1 + static_cast<std::int64_t>(rng() % 8);
    e.e_all = u.e_all;
    e.request_prob = u.request_prob;
    inst.cache.add(e);
  }
  do {
    inst.incoming = info(pick(rng));
  } while (inst.cache.contains(inst.incoming.unit) ||
           inst.incoming.size_bits <= inst.cache.free_bits());
  return inst;
}

// n synthetic residents with sizes around capacity / n.
BenchInstance synthetic_instance(const BenchCase& c, Rng& rng) {
  BenchInstance inst{CacheState(c.capacity_bits), {}};
  const double mean = static_cast<double>(c.capacity_bits) / c.residents;
  std::uniform_real_distribution<double> frac(0.5, 1.0);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  for (int i = 0; i < c.residents; ++i) {
    CacheEntry e;
    e.unit = i + 1;
    e.size_bits = std::max<Bits>(1, std::llround(mean * frac(rng)));
    if (e.size_bits > inst.cache.free_bits()) break;
    e.last_access = static_cast<double>(i);
    e.access_count = 1 + static_cast<std::int64_t>(rng() % 8);
    e.e_all = unit01(rng);
    e.request_prob = unit01(rng) * 1e-3;
    inst.cache.add(e);
  }
  // Large enough to force at least one eviction.
  inst.incoming = UnitInfo{c.residents + 1,
                           inst.cache.free_bits() + std::llround(mean),
                           unit01(rng), unit01(rng) * 1e-3};
  return inst;
}

}  // namespace

std::vector<BenchCase> default_bench_cases() {
  const CacheConfig cc;
  return {{"device", cc.c_dev_bits, cc.delta_dev_bits, 0},
          {"bs", cc.c_bs_bits, cc.delta_bs_bits, 0}};
}

std::vector<BenchRow> bench_policies(std::span<const PolicyKind> policies,
                                     std::span<const BenchCase> cases,
                                     std::uint64_t seed, double min_seconds) {
  std::vector<BenchRow> rows;
  for (const BenchCase& c : cases) {
    Rng rng(seed);
    const BenchInstance inst =
        c.residents > 0 ? synthetic_instance(c, rng) : catalog_instance(c, rng);
    for (PolicyKind p : policies) {
      PolicyConfig pc;
      pc.kind = p;
      pc.delta_bits = c.delta_bits;
      pc.opt_solver = OptSolver::kTable;
      Rng policy_rng(seed);
      std::int64_t decisions = 0;
      std::size_t sink = 0;
      const auto t0 = std::chrono::steady_clock::now();
      double elapsed = 0.0;
      do {
        const EvictionDecision d =
            decide(pc, inst.cache, inst.incoming, &policy_rng);
        sink += d.evicted.size();
        ++decisions;
        elapsed = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      } while (elapsed < min_seconds);
      if (sink == 0) throw InvariantViolation("benchmark decision evicted nothing");
      BenchRow row;
      row.policy = p;
      row.scale = c.scale;
      row.residents = static_cast<int>(inst.cache.size());
      row.capacity_bits = c.capacity_bits;
      row.delta_bits = c.delta_bits;
      row.decisions = decisions;
      row.seconds_per_decision = elapsed / static_cast<double>(decisions);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double fit_exponent(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DomainError("fit_exponent needs at least two matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0)) throw DomainError("fit_exponent needs positive data");
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) throw DomainError("fit_exponent needs distinct x values");
  return (n * sxy - sx * sy) / den;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "policy,scale,residents,capacity_bits,delta_bits,decisions,"
         "seconds_per_decision\n";
  for (const BenchRow& r : rows) {
    out << policy_name(r.policy) << ',' << r.scale << ',' << r.residents << ','
        << r.capacity_bits << ',' << r.delta_bits << ',' << r.decisions << ','
        << csv_double(r.seconds_per_decision) << '\n';
  }
}

}  // namespace d2dcache
