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

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "d2dcache/errors.hpp"
#include "d2dcache/experiment.hpp"

namespace d2dcache {
namespace {

ResultRow fixture_row(PolicyKind p, double value, int rep, double e_total) {
  ResultRow r;
  r.policy = p;
  r.value = value;
  r.replication = rep;
  r.seed = static_cast<std::uint64_t>(rep + 1);
  r.config_hash = "0123456789abcdef";
  r.metrics.assign(metric_columns().size(), 0.0);
  r.metrics[metric_index("e_total")] = e_total;
  return r;
}

const Aggregate& find(const std::vector<Aggregate>& aggs, PolicyKind p,
                      double value, const std::string& column) {
  for (const Aggregate& a : aggs) {
    if (a.policy == p && a.value == value && a.column == column) return a;
  }
  throw std::runtime_error("missing aggregate " + column);
}

std::string tiny_sweep_text() {
  return "[catalog]\ncontents = 6\nchunks = 4\n"
         "[sim]\nduration_s = 30\nseed = 5\n"
         "[sweep]\nparameter = c_dev_bits\nvalues = 50e6, 100e6\n"
         "policies = lru, epdc\nreplications = 2\n";
}

TEST(Aggregate, MeanAndStudentInterval) {
  const std::vector<ResultRow> rows = {
      fixture_row(PolicyKind::kLru, 1.0, 0, 10.0),
      fixture_row(PolicyKind::kLru, 1.0, 1, 12.5),
      fixture_row(PolicyKind::kLru, 1.0, 2, 11.0),
      fixture_row(PolicyKind::kEpdc, 1.0, 0, 4.0),
  };
  const std::vector<Aggregate> aggs = aggregate(rows);
  const Aggregate& lru = find(aggs, PolicyKind::kLru, 1.0, "e_total");
  EXPECT_EQ(lru.n, 3);
  EXPECT_NEAR(lru.mean, 11.166666666666666, 1e-12);
  EXPECT_NEAR(lru.ci95, 3.125804739649152, 1e-9);
  const Aggregate& epdc = find(aggs, PolicyKind::kEpdc, 1.0, "e_total");
  EXPECT_EQ(epdc.n, 1);
  EXPECT_EQ(epdc.ci95, 0.0);
  EXPECT_EQ(aggs.size(), 2 * metric_columns().size());
}

TEST(Aggregate, HalfWidth) {
  const std::vector<double> xs = {1, 2, 3, 4};
  EXPECT_NEAR(ci95_half_width(xs), 2.054260256760879, 1e-9);
  const std::vector<double> same = {7, 7, 7};
  EXPECT_EQ(ci95_half_width(same), 0.0);
}

TEST(Aggregate, AllZeroRows) {
  const std::vector<ResultRow> rows = {
      fixture_row(PolicyKind::kOpt, 2.0, 0, 0.0),
      fixture_row(PolicyKind::kOpt, 2.0, 1, 0.0)};
  for (const Aggregate& a : aggregate(rows)) {
    EXPECT_EQ(a.mean, 0.0);
    EXPECT_EQ(a.ci95, 0.0);
  }
}

TEST(Columns, LayoutIsStable) {
  const auto cols = metric_columns();
  EXPECT_EQ(cols.front(), "j_loc_base_succ");
  EXPECT_EQ(cols[16], "b_loc_base_succ");
  EXPECT_NO_THROW(metric_index("e_block"));
  EXPECT_THROW(metric_index("nope"), DomainError);
}

TEST(Row, RejectsNonFinite) {
  Metrics m;
  EXPECT_NO_THROW(make_row(PolicyKind::kLru, 1.0, 0, 1, m));
}

TEST(Sweep, ParseAndValidate) {
  const SweepSpec spec = parse_sweep(tiny_sweep_text());
  EXPECT_EQ(spec.parameter, SweepParam::kCDev);
  EXPECT_EQ(spec.values, (std::vector<double>{50e6, 100e6}));
  EXPECT_EQ(spec.policies.size(), 2u);
  EXPECT_EQ(spec.replications, 2);
  EXPECT_EQ(spec.base.catalog.contents, 6);
}

TEST(Sweep, ParseErrors) {
  EXPECT_THROW(parse_sweep("[sweep]\nparameter = colour\nvalues = 1\n"),
               ConfigError);
  EXPECT_THROW(parse_sweep("[sweep]\nparameter = r_d2d_m\nvalues = \n"),
               ConfigError);
  EXPECT_THROW(parse_sweep("[sweep]\nparameter = r_d2d_m\nvalues = 1, x\n"),
               ConfigError);
  EXPECT_THROW(
      parse_sweep("[sweep]\nparameter = r_d2d_m\nvalues = 1\npolicies = fifo\n"),
      ConfigError);
  EXPECT_THROW(parse_sweep("[sweep]\nparameter = r_d2d_m\nvalues = -5\n"),
               ConfigError);
  EXPECT_THROW(load_sweep("/nonexistent.ini"), ConfigError);
}

TEST(Sweep, CardinalityAndCommonSeeds) {
  const SweepSpec spec = parse_sweep(tiny_sweep_text());
  std::size_t calls = 0;
  const std::vector<ResultRow> rows =
      run_sweep(spec, [&](std::size_t, std::size_t total) {
        ++calls;
        EXPECT_EQ(total, 8u);
      });
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(calls, 8u);
  std::map<std::pair<double, int>, std::uint64_t> seeds;
  for (const ResultRow& r : rows) {
    EXPECT_EQ(r.seed, 5u + static_cast<std::uint64_t>(r.replication));
    const auto key = std::make_pair(r.value, r.replication);
    if (seeds.contains(key)) {
      EXPECT_EQ(seeds[key], r.seed);
    } else {
      seeds[key] = r.seed;
    }
  }
  // Same topology and traffic across policies: device counts agree.
  EXPECT_EQ(rows[0].get("num_devices"), rows[4].get("num_devices"));
}

TEST(Sweep, OutputsAreDeterministic) {
  const SweepSpec spec = parse_sweep(tiny_sweep_text());
  const auto a = run_sweep(spec);
  const auto b = run_sweep(spec);
  std::ostringstream ra, rb, ma, mb;
  write_results_csv(ra, spec, a);
  write_results_csv(rb, spec, b);
  write_manifest(ma, spec, a);
  write_manifest(mb, spec, b);
  EXPECT_EQ(ra.str(), rb.str());
  EXPECT_EQ(ma.str(), mb.str());
  EXPECT_EQ(ra.str().rfind("policy,c_dev_bits,replication,seed,config_hash,", 0),
            0u);
}

TEST(PlotData, StackedComponentsSumToTotal) {
  const SweepSpec spec = parse_sweep(tiny_sweep_text());
  const auto rows = run_sweep(spec);
  std::ostringstream agg_csv;
  write_aggregates_csv(agg_csv, spec, aggregate(rows));
  std::istringstream in(agg_csv.str());
  const AggregateTable table = read_aggregates_csv(in);
  EXPECT_EQ(table.parameter, SweepParam::kCDev);

  std::ostringstream plot;
  emit_plot_data(table, "total_energy_vs_cdev", plot);
  std::istringstream lines(plot.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "policy,c_dev_bits,component,mean,ci95");
  std::map<std::pair<std::string, double>, double> sums;
  int count = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ASSERT_EQ(f.size(), 5u);
    sums[{f[0], std::stod(f[1])}] += std::stod(f[3]);
    ++count;
  }
  EXPECT_EQ(count, 2 * 2 * 16);
  for (const Aggregate& a : table.rows) {
    if (a.column != "e_total") continue;
    const double s = sums.at({std::string(policy_name(a.policy)), a.value});
    EXPECT_NEAR(s, a.mean, 1e-9 * std::max(1.0, a.mean));
  }

  std::ostringstream d2d;
  emit_plot_data(table, "d2d_bits_vs_cdev", d2d);
  EXPECT_NE(d2d.str().find(",d2d_enh_fail,"), std::string::npos);
  EXPECT_EQ(d2d.str().find(",loc_"), std::string::npos);
}

TEST(PlotData, UnknownOrMismatchedFigure) {
  AggregateTable table;
  table.parameter = SweepParam::kRD2D;
  std::ostringstream out;
  try {
    emit_plot_data(table, "bogus", out);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("total_energy_vs_rd2d"),
              std::string::npos);
  }
  EXPECT_THROW(emit_plot_data(table, "total_energy_vs_cdev", out), DomainError);
  EXPECT_NO_THROW(emit_plot_data(table, "total_energy_vs_rd2d", out));
  EXPECT_EQ(figure_ids().size(), 5u * 2u * 4u);
}

TEST(Bench, FitExponent) {
  const std::vector<double> xs = {10, 100, 1000};
  const std::vector<double> ys = {3 * std::pow(10.0, 1.5),
                                  3 * std::pow(100.0, 1.5),
                                  3 * std::pow(1000.0, 1.5)};
  EXPECT_NEAR(fit_exponent(xs, ys), 1.5, 1e-12);
  const std::vector<double> one = {1};
  EXPECT_THROW(fit_exponent(one, one), DomainError);
}

TEST(Bench, SyntheticCaseRuns) {
  const std::vector<PolicyKind> policies = {PolicyKind::kEpdc};
  const std::vector<BenchCase> cases = {{"synthetic", 1'000'000, 1000, 100}};
  const auto rows = bench_policies(policies, cases, 1, 0.01);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].decisions, 0);
  EXPECT_GT(rows[0].seconds_per_decision, 0.0);
  EXPECT_EQ(rows[0].residents, 100);
}

}  // namespace
}  // namespace d2dcache
