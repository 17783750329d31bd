/*
 * Copyright 2026 The FairKM Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Multi-restart benchmark protocol and lambda sweeps.
//
// Run i of every method uses seed `seed_base + i`. DevC and DevO of run i
// are measured against the blind K-Means clustering with the same seed, and
// all per-run metrics are averaged afterwards. Fairness metrics are always
// computed over every categorical sensitive attribute of the dataset, also
// for single-attribute FairKM runs, so the columns line up across methods.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairkm/core.hpp"
#include "fairkm/metrics.hpp"

namespace fairkm::bench {

struct Method {
  enum class Kind { kFairAll, kFairSingle, kBlind };
  Kind kind = Kind::kFairAll;
  std::string attribute;  // kFairSingle only

  // "fairkm_all", "fairkm_single(<attr>)" or "kmeans_blind".
  std::string label() const;
  // Accepts the labels above and "fairkm_single:<attr>".
  static Method parse(std::string_view text);

  bool operator==(const Method&) const = default;
};

struct BenchConfig {
  std::vector<std::size_t> ks = {5};
  std::size_t restarts = 100;
  std::uint64_t seed_base = 0;
  std::vector<Method> methods = {Method{Method::Kind::kBlind, {}},
                                 Method{Method::Kind::kFairAll, {}}};
  Lambda lambda = Lambda::automatic();
  std::size_t max_iter = 30;
  InitPolicy init = InitPolicy::kRandomPartition;
  OrderPolicy order = OrderPolicy::kDatasetOrder;
  std::size_t jobs = 1;
  metrics::ReportOptions report;

  // Throws kInvalidArgument (restarts, k list, unknown attributes).
  void validate(const Dataset& data) const;
};

struct RunRecord {
  std::string method;
  std::size_t k = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Clustering clustering;
  metrics::MetricsReport metrics;
};

// Column names of the per-run table, in output order, and the numeric
// values of one record under those names (NaN where a value is absent).
std::vector<std::string> metric_columns(const Dataset& data);
std::vector<double> metric_values(const RunRecord& record,
                                  const Dataset& data);

struct GroupSummary {
  std::string method;
  std::size_t k = 0;
  std::size_t runs_ok = 0;
  std::size_t runs_failed = 0;
  // Mean of each metric column over successful runs with a value.
  std::map<std::string, double> means;
};

struct BenchResult {
  std::vector<std::string> columns;
  std::vector<RunRecord> runs;  // ordered by (k, run, method)
  std::vector<GroupSummary> summary;  // ordered by (k, method)
  std::vector<std::string> attributes;

  std::size_t failed_runs() const;
};

BenchResult run_bench(const Dataset& data, const BenchConfig& config);

// Writes runs.csv, summary.csv (rows = metrics, columns = methods per k,
// with "Impr(%)" columns against kmeans_blind) and summary.json.
void write_bench_reports(const std::filesystem::path& out_dir,
                         const BenchResult& result, const BenchConfig& config);

nlohmann::json summary_to_json(const BenchResult& result,
                               const BenchConfig& config);

// ---------------------------------------------------------------------------

struct SweepConfig {
  std::vector<double> lambdas;
  std::size_t k = 5;
  std::size_t restarts = 10;
  std::uint64_t seed_base = 0;
  std::size_t max_iter = 30;
  InitPolicy init = InitPolicy::kRandomPartition;
  OrderPolicy order = OrderPolicy::kDatasetOrder;
  std::size_t jobs = 1;
  metrics::ReportOptions report;
};

struct SweepPoint {
  double lambda = 0.0;
  std::size_t runs_ok = 0;
  // Means of co, sh, dev_c, dev_o, ae, aw, me, mw (fairness: mean across
  // attributes).
  std::map<std::string, double> means;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  // Spearman rank correlation of each metric's mean with lambda.
  std::map<std::string, double> spearman;
};

SweepResult run_sweep(const Dataset& data, const SweepConfig& config);

// Writes sweep.csv, sweep.json and three SVG charts: sweep_quality.svg
// (CO, SH), sweep_deviation.svg (DevC, DevO), sweep_fairness.svg (AE, AW,
// ME, MW).
void write_sweep_reports(const std::filesystem::path& out_dir,
                         const SweepResult& result, const SweepConfig& config);

// Spearman's rho with average ranks for ties; NaN if either side is
// constant or sizes differ / are below 2.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace fairkm::bench
