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

// fairkm: fit / bench / sweep-lambda / metrics / make-standin.
//
// Exit codes: 0 ok, 1 ingest or engine failure, 2 bad arguments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "fairkm/bench.hpp"
#include "fairkm/core.hpp"
#include "fairkm/csv.hpp"
#include "fairkm/engine.hpp"
#include "fairkm/error.hpp"
#include "fairkm/ingest.hpp"
#include "fairkm/io.hpp"
#include "fairkm/metrics.hpp"
#include "fairkm/synthetic.hpp"

namespace fs = std::filesystem;
using namespace fairkm;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Usage errors detected after CLI11 parsing (values it cannot check itself).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataArgs {
  std::string data;
  std::string schema;
  std::string standardize = "zscore";
  bool undersample = false;
  std::uint64_t seed = 0;
};

struct RunArgs {
  std::string lambda = "auto";
  std::size_t max_iter = 30;
  std::string init = "random";
  std::string order = "dataset";
  std::size_t jobs = 1;
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--data", a.data, "input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--schema", a.schema, "schema JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--standardize", a.standardize,
                  "numeric feature scaling: zscore | minmax | none")
      ->check(CLI::IsMember({"zscore", "minmax", "none"}));
  cmd->add_flag("--undersample", a.undersample,
                "balance classes of the balance_class column before fitting");
}

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--lambda", a.lambda, "fairness weight: real or 'auto'");
  cmd->add_option("--max-iter", a.max_iter, "maximum round-robin passes")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--init", a.init, "random | kmeanspp")
      ->check(CLI::IsMember({"random", "kmeanspp"}));
  cmd->add_option("--order", a.order, "dataset | shuffle")
      ->check(CLI::IsMember({"dataset", "shuffle"}));
}

Lambda parse_lambda(const std::string& text) {
  try {
    return Lambda::parse(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

ingest::LoadResult load(const DataArgs& a) {
  const Schema schema = read_schema(a.schema);
  ingest::IngestOptions opts;
  opts.standardize = ingest::parse_standardization(a.standardize);
  opts.undersample_balance = a.undersample;
  opts.seed = a.seed;
  auto result = ingest::load_csv(a.data, schema, opts);
  spdlog::info("loaded {} of {} rows, dim {}", result.report.rows_kept,
               result.report.rows_read, result.dataset.dim());
  if (result.report.single_class_warning) {
    spdlog::warn("undersampling requested but only one class present");
  }
  return result;
}

void print_breakdown(const Clustering& c) {
  fmt::print("k              {}\n", c.k);
  fmt::print("lambda         {:.10g}\n", c.objective.lambda);
  fmt::print("km_term        {:.10g}\n", c.objective.km_term);
  fmt::print("fairness_term  {:.10g}\n", c.objective.fairness_term);
  fmt::print("objective      {:.10g}\n", c.objective.total);
  fmt::print("iterations     {}\n", c.iterations_run);
  fmt::print("converged      {}\n", c.converged ? "yes" : "no");
}

int cmd_fit(const DataArgs& d, const RunArgs& r, std::size_t k,
            const std::string& out) {
  FairKMConfig config;
  config.k = k;
  config.lambda = parse_lambda(r.lambda);
  config.seed = d.seed;
  config.max_iter = r.max_iter;
  config.init = parse_init(r.init);
  config.order = parse_order(r.order);

  const auto loaded = load(d);
  const Clustering c = engine::fit(loaded.dataset, config);

  fs::create_directories(out);
  write_assignment_csv(fs::path(out) / "assignment.csv", c,
                       loaded.dataset.source_rows);
  auto doc = clustering_to_json(c);
  doc["config"] = {{"lambda", config.lambda.to_string()},
                   {"seed", config.seed},
                   {"max_iter", config.max_iter},
                   {"init", to_string(config.init)},
                   {"order", to_string(config.order)}};
  write_json_file(fs::path(out) / "objective.json", doc);
  print_breakdown(c);
  return EXIT_SUCCESS;
}

int cmd_bench(const DataArgs& d, const RunArgs& r,
              const std::vector<std::size_t>& ks, std::size_t restarts,
              const std::vector<std::string>& methods, const std::string& out) {
  bench::BenchConfig config;
  config.ks = ks;
  config.restarts = restarts;
  config.seed_base = d.seed;
  config.lambda = parse_lambda(r.lambda);
  config.max_iter = r.max_iter;
  config.init = parse_init(r.init);
  config.order = parse_order(r.order);
  config.jobs = r.jobs;
  config.methods.clear();
  try {
    for (const auto& m : methods) config.methods.push_back(bench::Method::parse(m));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  const auto loaded = load(d);
  try {
    config.validate(loaded.dataset);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto result = bench::run_bench(loaded.dataset, config);
  bench::write_bench_reports(out, result, config);

  const std::size_t failed = result.failed_runs();
  fmt::print("{} runs, {} failed; reports in {}\n", result.runs.size(), failed,
             out);
  for (const auto& g : result.summary) {
    const auto ae = g.means.find("mean.ae");
    fmt::print("k={} {:<24} CO {:.6g}", g.k, g.method, g.means.at("co"));
    if (ae != g.means.end()) fmt::print("  AE {:.6g}", ae->second);
    fmt::print("\n");
  }
  if (failed == result.runs.size()) {
    std::cerr << "fairkm: every run failed; first error: "
              << result.runs.front().error << "\n";
    return kExitFailure;
  }
  return EXIT_SUCCESS;
}

int cmd_sweep(const DataArgs& d, const RunArgs& r, std::size_t k,
              std::size_t restarts, const std::vector<double>& lambdas,
              const std::string& out) {
  bench::SweepConfig config;
  config.lambdas = lambdas;
  config.k = k;
  config.restarts = restarts;
  config.seed_base = d.seed;
  config.max_iter = r.max_iter;
  config.init = parse_init(r.init);
  config.order = parse_order(r.order);
  config.jobs = r.jobs;
  if (lambdas.size() < 2) throw UsageError("--lambdas needs at least two values");
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw UsageError(fmt::format("invalid lambda {}", l));
  }

  const auto loaded = load(d);
  const auto result = bench::run_sweep(loaded.dataset, config);
  bench::write_sweep_reports(out, result, config);
  fmt::print("lambda grid {}; reports in {}\n", lambdas, out);
  for (const auto& [key, rho] : result.spearman) {
    fmt::print("spearman({}, lambda) = {:.4f}\n", key, rho);
  }
  return EXIT_SUCCESS;
}

int cmd_metrics(const DataArgs& d, const std::string& assignment_path,
                const std::string& reference_path, const std::string& out) {
  const auto loaded = load(d);
  const auto assignment = read_assignment_csv(assignment_path);
  std::vector<ClusterId> reference;
  std::optional<std::span<const ClusterId>> ref;
  if (!reference_path.empty()) {
    reference = read_assignment_csv(reference_path);
    ref = std::span<const ClusterId>(reference);
  }
  const auto report = metrics::evaluate(loaded.dataset, assignment, ref);
  const auto doc = report.to_json();
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_json_file(out, doc);
  }
  return EXIT_SUCCESS;
}

int cmd_make_standin(std::uint64_t seed, const std::string& out) {
  fs::create_directories(out);
  const auto table = synthetic::kinematics_standin(seed);
  std::ofstream csv_out(fs::path(out) / "kinematics_standin.csv",
                        std::ios::binary);
  if (!csv_out) throw Error(ErrorCode::kIo, "cannot write stand-in CSV");
  csv::write_row(csv_out, table.header);
  for (const auto& row : table.rows) csv::write_row(csv_out, row);
  write_schema(fs::path(out) / "kinematics_schema.json",
               synthetic::kinematics_schema());
  fmt::print("wrote {} rows to {}\n", table.rows.size(), out);
  return EXIT_SUCCESS;
}

void configure_logging() {
  auto logger = spdlog::stderr_logger_mt("fairkm");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FAIRKM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Fair K-Means clustering and benchmarks"};
  app.require_subcommand(1);

  DataArgs data;
  RunArgs run;
  std::size_t k = 2;
  std::vector<std::size_t> ks = {5};
  std::size_t restarts = 100;
  std::size_t sweep_restarts = 10;
  std::vector<std::string> methods = {"kmeans_blind", "fairkm_all"};
  std::vector<double> lambdas;
  std::string out = "out";
  std::string assignment, reference;
  std::string metrics_out;

  auto* fit = app.add_subcommand("fit", "fit FairKM once");
  add_data_options(fit, data);
  add_run_options(fit, run);
  fit->add_option("--k", k, "number of clusters")->check(CLI::PositiveNumber);
  fit->add_option("--seed", data.seed, "random seed");
  fit->add_option("--out", out, "output directory");

  auto* bench_cmd = app.add_subcommand("bench", "multi-restart benchmark");
  add_data_options(bench_cmd, data);
  add_run_options(bench_cmd, run);
  bench_cmd->add_option("--k", ks, "cluster counts (comma separated)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", data.seed, "seed of run 0");
  bench_cmd->add_option("--methods", methods,
                        "fairkm_all, fairkm_single(<attr>), kmeans_blind")
      ->delimiter(',');
  bench_cmd->add_option("--jobs", run.jobs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", out, "output directory");

  auto* sweep = app.add_subcommand("sweep-lambda", "fairness weight sweep");
  add_data_options(sweep, data);
  add_run_options(sweep, run);
  sweep->add_option("--lambdas", lambdas, "grid (comma separated)")
      ->required()
      ->delimiter(',');
  sweep->add_option("--k", k)->check(CLI::PositiveNumber);
  sweep->add_option("--restarts", sweep_restarts)->check(CLI::PositiveNumber);
  sweep->add_option("--seed", data.seed, "seed of run 0");
  sweep->add_option("--jobs", run.jobs)->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "output directory");

  auto* metrics_cmd =
      app.add_subcommand("metrics", "evaluate an assignment file");
  add_data_options(metrics_cmd, data);
  metrics_cmd->add_option("--assignment", assignment)
      ->required()
      ->check(CLI::ExistingFile);
  metrics_cmd->add_option("--reference", reference,
                          "reference assignment for DevC / DevO")
      ->check(CLI::ExistingFile);
  metrics_cmd->add_option("--out", metrics_out, "report JSON (default stdout)");

  auto* standin = app.add_subcommand(
      "make-standin", "write the synthetic 161-problem stand-in dataset");
  std::uint64_t standin_seed = 2020;
  standin->add_option("--seed", standin_seed);
  standin->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? EXIT_SUCCESS : kExitUsage;
  }

  try {
    if (*fit) return cmd_fit(data, run, k, out);
    if (*bench_cmd) return cmd_bench(data, run, ks, restarts, methods, out);
    if (*sweep) return cmd_sweep(data, run, k, sweep_restarts, lambdas, out);
    if (*metrics_cmd) return cmd_metrics(data, assignment, reference, metrics_out);
    if (*standin) return cmd_make_standin(standin_seed, out);
  } catch (const UsageError& e) {
    std::cerr << "fairkm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "fairkm: " << error_code_name(e.code()) << ": " << e.what()
              << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "fairkm: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
