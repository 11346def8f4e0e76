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

// d2dsim: run, sweep, bench and plotdata verbs.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 internal
// invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "d2dcache/config.hpp"
#include "d2dcache/engine.hpp"
#include "d2dcache/errors.hpp"
#include "d2dcache/experiment.hpp"

namespace fs = std::filesystem;
using namespace d2dcache;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

std::vector<PolicyKind> parse_policy_list(const std::vector<std::string>& names) {
  std::vector<PolicyKind> out;
  for (const std::string& n : names) {
    try {
      out.push_back(parse_policy(n));
    } catch (const DomainError& e) {
      throw ConfigError("--policies", e.what());
    }
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("--out", "cannot write '" + path.string() + "'");
  return f;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> policies;
  std::optional<int> replications;
  bool trace = false;
  bool quiet = false;
  double min_time = 0.2;
  std::string figure;
  std::string aggregates;
};

int cmd_run(const Options& o) {
  SimConfig cfg = o.config.empty() ? SimConfig{} : load_config(o.config);
  if (o.seed) cfg.sim.seed = *o.seed;
  const std::vector<PolicyKind> policies = parse_policy_list(o.policies);
  if (policies.size() > 1) {
    throw ConfigError("--policies", "run takes a single policy");
  }
  if (!policies.empty()) cfg.cache.policy = policies.front();
  cfg.validate();

  Simulator sim(cfg);
  std::ofstream trace_file;
  if (o.trace) {
    if (o.out.empty()) throw ConfigError("--trace", "requires --out");
    trace_file = open_out(fs::path(o.out) / "trace.csv");
    sim.set_trace(&trace_file);
  }
  const Metrics m = sim.run();
  if (o.out.empty()) {
    write_run_metrics(std::cout, cfg, m);
  } else {
    auto f = open_out(fs::path(o.out) / "metrics.csv");
    write_run_metrics(f, cfg, m);
    auto c = open_out(fs::path(o.out) / "config.ini");
    c << to_ini(cfg);
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config", "sweep needs a sweep file");
  if (o.out.empty()) throw ConfigError("--out", "sweep needs an output directory");
  SweepSpec spec = load_sweep(o.config);
  if (o.seed) spec.base.sim.seed = *o.seed;
  if (!o.policies.empty()) spec.policies = parse_policy_list(o.policies);
  if (o.replications) spec.replications = *o.replications;
  spec.validate();
  Progress progress;
  if (!o.quiet) {
    progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\r" << done << "/" << total << " runs" << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }
  const std::vector<ResultRow> rows = run_sweep(spec, progress);
  write_sweep_outputs(o.out, spec, rows);
  return 0;
}

int cmd_bench(const Options& o) {
  std::vector<PolicyKind> policies = parse_policy_list(o.policies);
  if (policies.empty()) policies.assign(all_policies().begin(), all_policies().end());
  const std::vector<BenchCase> cases = default_bench_cases();
  const std::vector<BenchRow> rows =
      bench_policies(policies, cases, o.seed.value_or(1), o.min_time);
  if (o.out.empty()) {
    write_bench_csv(std::cout, rows);
  } else {
    auto f = open_out(fs::path(o.out) / "bench.csv");
    write_bench_csv(f, rows);
  }
  return 0;
}

int cmd_plotdata(const Options& o) {
  fs::path agg = o.aggregates;
  if (fs::is_directory(agg)) agg /= "aggregates.csv";
  std::ifstream in(agg);
  if (!in) throw ConfigError("aggregates", "cannot read '" + agg.string() + "'");
  const AggregateTable table = read_aggregates_csv(in);
  if (o.out.empty()) {
    emit_plot_data(table, o.figure, std::cout);
  } else {
    auto f = open_out(fs::path(o.out) / (o.figure + ".csv"));
    emit_plot_data(table, o.figure, f);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware D2D caching simulator"};
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Master seed (sweep: base seed)");
    sub->add_option("--out", o.out, "Output directory");
  };

  CLI::App* run = app.add_subcommand("run", "Simulate one configuration");
  run->add_option("--config", o.config, "Config file")->check(CLI::ExistingFile);
  run->add_option("--policies", o.policies, "Policy (one)")->delimiter(',');
  run->add_flag("--trace", o.trace, "Write trace.csv to --out");
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", o.config, "Sweep file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--policies", o.policies, "Policy list")->delimiter(',');
  sweep->add_option("--replications", o.replications, "Seeds per point")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--quiet", o.quiet, "No progress output");
  add_common(sweep);

  CLI::App* bench = app.add_subcommand("bench", "Per-decision policy timing");
  bench->add_option("--policies", o.policies, "Policy list")->delimiter(',');
  bench->add_option("--min-time", o.min_time, "Seconds per measurement")
      ->check(CLI::PositiveNumber);
  add_common(bench);

  CLI::App* plot = app.add_subcommand("plotdata", "Figure data from aggregates");
  plot->add_option("aggregates", o.aggregates,
                   "aggregates.csv or a sweep output directory")
      ->required();
  plot->add_option("figure", o.figure, "Figure id")->required();
  plot->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*bench) return cmd_bench(o);
    return cmd_plotdata(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
}
