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
/// Parameter sweeps, replication statistics, output files and the policy
/// micro-benchmark.
///
/// A sweep file is a config file with one extra section:
///
///   [sweep]
///   parameter = c_dev_bits        ; c_dev_bits | r_d2d_m | pool_size | arrival_rate
///   values = 100e6,150e6,200e6
///   policies = lru,pdc,sxo,epdc,opt
///   replications = 10
///
/// Replication r of every (policy, value) point runs with seed
/// sim.seed + r, so policies are compared on identical topologies and
/// request streams.

#ifndef D2DCACHE_EXPERIMENT_HPP
#define D2DCACHE_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "d2dcache/config.hpp"
#include "d2dcache/engine.hpp"
#include "d2dcache/policies.hpp"

namespace d2dcache {

enum class SweepParam : std::uint8_t { kCDev, kRD2D, kPool, kArrival };

std::string_view sweep_param_name(SweepParam p);  // "c_dev_bits", ...
std::string_view sweep_param_short(SweepParam p);  // "cdev", ...
SweepParam parse_sweep_param(std::string_view name);
// Applies a swept value to a config.
void apply_sweep_value(SimConfig& cfg, SweepParam p, double value);

struct SweepSpec {
  SimConfig base;
  SweepParam parameter = SweepParam::kCDev;
  std::vector<double> values;
  std::vector<PolicyKind> policies;
  int replications = 1;

  void validate() const;
};

SweepSpec parse_sweep(const std::string& text);
SweepSpec load_sweep(const std::string& path);

// Fixed metric columns of a result row, in output order.
std::span<const std::string> metric_columns();
std::size_t metric_index(std::string_view column);

struct ResultRow {
  PolicyKind policy = PolicyKind::kEpdc;
  double value = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<double> metrics;  // aligned with metric_columns()
  double wall_s = 0.0;

  double get(std::string_view column) const;
};

ResultRow make_row(PolicyKind policy, double value, int replication,
                   std::uint64_t seed, const Metrics& m);

// Optional progress callback: (done, total).
using Progress = std::function<void(std::size_t, std::size_t)>;
std::vector<ResultRow> run_sweep(const SweepSpec& spec,
                                 const Progress& progress = {});

struct Aggregate {
  PolicyKind policy = PolicyKind::kEpdc;
  double value = 0.0;
  std::string column;
  int n = 0;
  double mean = 0.0;
  double ci95 = 0.0;  // half-width, Student t
};

std::vector<Aggregate> aggregate(std::span<const ResultRow> rows);
// Half-width of the two-sided 95% Student-t interval of the mean.
double ci95_half_width(std::span<const double> xs);

void write_results_csv(std::ostream& out, const SweepSpec& spec,
                       std::span<const ResultRow> rows);
void write_aggregates_csv(std::ostream& out, const SweepSpec& spec,
                          std::span<const Aggregate> aggs);
void write_timing_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_manifest(std::ostream& out, const SweepSpec& spec,
                    std::span<const ResultRow> rows);
// results.csv, aggregates.csv, manifest.json, timing.csv under dir.
void write_sweep_outputs(const std::filesystem::path& dir,
                         const SweepSpec& spec,
                         std::span<const ResultRow> rows);

// Single run as key,value CSV (no timing).
void write_run_metrics(std::ostream& out, const SimConfig& cfg,
                       const Metrics& m);

// Figure ids: <loc|d2d|bs|bsu|total>_<energy|bits>_vs_<cdev|rd2d|pool|arrival>.
std::vector<std::string> figure_ids();
// Aggregates as read back from aggregates.csv.
struct AggregateTable {
  SweepParam parameter = SweepParam::kCDev;
  std::vector<Aggregate> rows;
};
AggregateTable read_aggregates_csv(std::istream& in);
// Long CSV: policy,value,component,mean,ci95. Throws DomainError listing
// valid ids for an unknown or mismatched figure id.
void emit_plot_data(const AggregateTable& table, std::string_view figure_id,
                    std::ostream& out);

struct BenchCase {
  std::string scale;
  Bits capacity_bits = 0;
  Bits delta_bits = 0;
  int residents = 0;  // 0: fill the cache from the default catalog
};

struct BenchRow {
  PolicyKind policy = PolicyKind::kEpdc;
  std::string scale;
  int residents = 0;
  Bits capacity_bits = 0;
  Bits delta_bits = 0;
  std::int64_t decisions = 0;
  double seconds_per_decision = 0.0;
};

// Device scale (150 Mbit, 0.01 Mbit) and BS scale (2.8 Gbit, 0.1 Mbit),
// caches filled from the default catalog.
std::vector<BenchCase> default_bench_cases();
// OPT uses the plain table DP here. Each case repeats decisions for at least
// min_seconds.
std::vector<BenchRow> bench_policies(std::span<const PolicyKind> policies,
                                     std::span<const BenchCase> cases,
                                     std::uint64_t seed, double min_seconds);
// Least-squares slope of log(y) against log(x).
double fit_exponent(std::span<const double> xs, std::span<const double> ys);
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace d2dcache

#endif  // D2DCACHE_EXPERIMENT_HPP
