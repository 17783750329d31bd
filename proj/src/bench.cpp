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

#include "fairkm/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairkm/baseline.hpp"
#include "fairkm/csv.hpp"
#include "fairkm/engine.hpp"
#include "fairkm/error.hpp"
#include "fairkm/io.hpp"
#include "fairkm/svg.hpp"

namespace fairkm::bench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::array<std::string_view, 4> kFairnessKeys = {"ae", "aw", "me",
                                                           "mw"};
constexpr std::array<std::string_view, 4> kFairnessNames = {"AE", "AW", "ME",
                                                            "MW"};

// Runs fn(i) for i in [0, count) on up to `jobs` threads. fn must not throw.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

double score(const metrics::FairnessScores& s, std::string_view key) {
  if (key == "ae") return s.ae;
  if (key == "aw") return s.aw;
  if (key == "me") return s.me;
  return s.mw;
}

std::string cell(double v) {
  return std::isnan(v) ? std::string() : csv::format_double(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  }
  return out;
}

FairKMConfig fair_config(std::size_t k, Lambda lambda, std::uint64_t seed,
                         std::size_t max_iter, InitPolicy init,
                         OrderPolicy order) {
  FairKMConfig c;
  c.k = k;
  c.lambda = lambda;
  c.seed = seed;
  c.max_iter = max_iter;
  c.init = init;
  c.order = order;
  return c;
}

std::vector<std::string> attribute_names(const Dataset& data) {
  std::vector<std::string> names;
  for (const auto& a : data.categorical) names.push_back(a.name);
  return names;
}

std::vector<double> record_values(const RunRecord& record,
                                  bool with_fairness) {
  const auto& m = record.metrics;
  const auto& obj = record.clustering.objective;
  std::vector<double> v = {m.co,
                           opt_or_nan(m.sh),
                           opt_or_nan(m.dev_c),
                           opt_or_nan(m.dev_c_dot),
                           opt_or_nan(m.dev_o),
                           obj.km_term,
                           obj.fairness_term,
                           obj.lambda,
                           obj.total,
                           static_cast<double>(record.clustering.iterations_run),
                           record.clustering.converged ? 1.0 : 0.0};
  if (with_fairness) {
    for (const auto& entry : m.fairness.per_attribute) {
      for (auto key : kFairnessKeys) v.push_back(score(entry.scores, key));
    }
    for (auto key : kFairnessKeys) v.push_back(score(m.fairness.mean, key));
  }
  return v;
}

}  // namespace

std::string Method::label() const {
  switch (kind) {
    case Kind::kFairAll: return "fairkm_all";
    case Kind::kFairSingle: return fmt::format("fairkm_single({})", attribute);
    case Kind::kBlind: return "kmeans_blind";
  }
  return "?";
}

Method Method::parse(std::string_view text) {
  if (text == "fairkm_all") return {Kind::kFairAll, {}};
  if (text == "kmeans_blind") return {Kind::kBlind, {}};
  constexpr std::string_view kSingle = "fairkm_single";
  if (text.starts_with(kSingle)) {
    auto rest = text.substr(kSingle.size());
    std::string_view attr;
    if (rest.size() > 2 && rest.front() == '(' && rest.back() == ')') {
      attr = rest.substr(1, rest.size() - 2);
    } else if (rest.size() > 1 && rest.front() == ':') {
      attr = rest.substr(1);
    }
    if (!attr.empty()) return {Kind::kFairSingle, std::string(attr)};
  }
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown method '{}' (expected fairkm_all, "
                          "fairkm_single(<attr>) or kmeans_blind)",
                          text));
}

void BenchConfig::validate(const Dataset& data) const {
  if (restarts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "restarts must be >= 1");
  }
  if (ks.empty()) throw Error(ErrorCode::kInvalidArgument, "empty k list");
  for (auto k : ks) {
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  }
  if (methods.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no methods selected");
  }
  for (const auto& m : methods) {
    if (m.kind != Method::Kind::kFairSingle) continue;
    bool found = false;
    for (const auto& a : data.categorical) found = found || a.name == m.attribute;
    for (const auto& a : data.numeric) found = found || a.name == m.attribute;
    if (!found) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("fairkm_single attribute '{}' is not a "
                              "sensitive column",
                              m.attribute));
    }
  }
  if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter >= 1");
}

std::vector<std::string> metric_columns(const Dataset& data) {
  std::vector<std::string> cols = {
      "co",      "sh",        "dev_c",         "dev_c_dot",
      "dev_o",   "km_term",   "fairness_term", "lambda",
      "objective", "iterations", "converged"};
  for (const auto& attr : data.categorical) {
    for (auto key : kFairnessKeys) {
      cols.push_back(fmt::format("{}.{}", attr.name, key));
    }
  }
  if (!data.categorical.empty()) {
    for (auto key : kFairnessKeys) cols.push_back(fmt::format("mean.{}", key));
  }
  return cols;
}

std::vector<double> metric_values(const RunRecord& record,
                                  const Dataset& data) {
  if (!record.ok) {
    return std::vector<double>(metric_columns(data).size(), kNaN);
  }
  return record_values(record, !data.categorical.empty());
}

std::size_t BenchResult::failed_runs() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(),
                    [](const RunRecord& r) { return !r.ok; }));
}

BenchResult run_bench(const Dataset& data, const BenchConfig& config) {
  config.validate(data);
  const std::size_t per_unit = config.methods.size();
  const std::size_t units = config.ks.size() * config.restarts;

  BenchResult result;
  result.columns = metric_columns(data);
  result.attributes = attribute_names(data);
  result.runs.resize(units * per_unit);

  std::map<std::string, Dataset> single_views;
  for (const auto& m : config.methods) {
    if (m.kind == Method::Kind::kFairSingle &&
        !single_views.contains(m.attribute)) {
      const std::vector<std::string> names = {m.attribute};
      single_views.emplace(m.attribute, restrict_sensitive(data, names));
    }
  }

  parallel_for(units, config.jobs, [&](std::size_t unit) {
    const std::size_t k = config.ks[unit / config.restarts];
    const std::size_t run = unit % config.restarts;
    const std::uint64_t seed = config.seed_base + run;

    std::optional<Clustering> reference;
    std::string reference_error;
    try {
      reference = baseline::kmeans_fit(
          data, {k, seed, std::max<std::size_t>(config.max_iter, 100),
                 config.init});
    } catch (const std::exception& e) {
      reference_error = e.what();
    }

    for (std::size_t mi = 0; mi < per_unit; ++mi) {
      const Method& method = config.methods[mi];
      RunRecord& rec = result.runs[unit * per_unit + mi];
      rec.method = method.label();
      rec.k = k;
      rec.run = run;
      rec.seed = seed;
      try {
        switch (method.kind) {
          case Method::Kind::kBlind:
            if (!reference) throw std::runtime_error(reference_error);
            rec.clustering = *reference;
            break;
          case Method::Kind::kFairAll:
            rec.clustering = engine::fit(
                data, fair_config(k, config.lambda, seed, config.max_iter,
                                  config.init, config.order));
            break;
          case Method::Kind::kFairSingle:
            rec.clustering = engine::fit(
                single_views.at(method.attribute),
                fair_config(k, config.lambda, seed, config.max_iter,
                            config.init, config.order));
            break;
        }
        std::optional<std::span<const ClusterId>> ref_span;
        if (reference) ref_span = std::span<const ClusterId>(reference->assignment);
        rec.metrics = metrics::evaluate(data, rec.clustering.assignment,
                                        ref_span, config.report);
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
      spdlog::debug("bench k={} run={} method={} {}", k, run, rec.method,
                    rec.ok ? "ok" : rec.error);
    }
  });

  for (std::size_t ki = 0; ki < config.ks.size(); ++ki) {
    for (std::size_t mi = 0; mi < per_unit; ++mi) {
      GroupSummary group;
      group.method = config.methods[mi].label();
      group.k = config.ks[ki];
      std::vector<double> sums(result.columns.size(), 0.0);
      std::vector<std::size_t> counts(result.columns.size(), 0);
      for (std::size_t run = 0; run < config.restarts; ++run) {
        const auto& rec =
            result.runs[(ki * config.restarts + run) * per_unit + mi];
        if (!rec.ok) {
          ++group.runs_failed;
          continue;
        }
        ++group.runs_ok;
        const auto values = metric_values(rec, data);
        for (std::size_t c = 0; c < values.size(); ++c) {
          if (std::isnan(values[c])) continue;
          sums[c] += values[c];
          ++counts[c];
        }
      }
      for (std::size_t c = 0; c < result.columns.size(); ++c) {
        group.means[result.columns[c]] =
            counts[c] ? sums[c] / static_cast<double>(counts[c]) : kNaN;
      }
      result.summary.push_back(std::move(group));
    }
  }
  return result;
}

nlohmann::json summary_to_json(const BenchResult& result,
                               const BenchConfig& config) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : config.methods) methods.push_back(m.label());
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : result.summary) {
    nlohmann::json means = nlohmann::json::object();
    for (const auto& [col, v] : g.means) {
      means[col] = std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
    }
    groups.push_back({{"method", g.method},
                      {"k", g.k},
                      {"runs_ok", g.runs_ok},
                      {"runs_failed", g.runs_failed},
                      {"means", std::move(means)}});
  }
  return {{"spec_version", kReportVersion},
          {"config",
           {{"k", config.ks},
            {"restarts", config.restarts},
            {"seed_base", config.seed_base},
            {"methods", std::move(methods)},
            {"lambda", config.lambda.to_string()},
            {"max_iter", config.max_iter},
            {"init", to_string(config.init)},
            {"order", to_string(config.order)}}},
          {"improvement_baseline", "kmeans_blind"},
          {"improvement_formula", "(baseline - method) / baseline * 100"},
          {"reference_pairing",
           "DevC/DevO of run i are taken against kmeans_blind with the same "
           "seed"},
          {"attributes", result.attributes},
          {"groups", std::move(groups)}};
}

void write_bench_reports(const std::filesystem::path& out_dir,
                         const BenchResult& result,
                         const BenchConfig& config) {
  std::filesystem::create_directories(out_dir);

  {
    auto out = open_out(out_dir / "runs.csv");
    std::vector<std::string> header = {"method", "k", "run", "seed", "status",
                                       "error"};
    header.insert(header.end(), result.columns.begin(), result.columns.end());
    csv::write_row(out, header);
    for (const auto& rec : result.runs) {
      std::vector<std::string> row = {rec.method, std::to_string(rec.k),
                                      std::to_string(rec.run),
                                      std::to_string(rec.seed),
                                      rec.ok ? "ok" : "failed", rec.error};
      if (rec.ok) {
        for (double x : record_values(rec, !result.attributes.empty())) {
          row.push_back(cell(x));
        }
      } else {
        row.resize(header.size());
      }
      csv::write_row(out, row);
    }
  }

  // Table-shaped summary: rows are metrics, columns are methods per k.
  {
    const bool has_blind = std::any_of(
        config.methods.begin(), config.methods.end(),
        [](const Method& m) { return m.kind == Method::Kind::kBlind; });
    auto find_group = [&](const std::string& method, std::size_t k) {
      for (const auto& g : result.summary) {
        if (g.method == method && g.k == k) return &g;
      }
      return static_cast<const GroupSummary*>(nullptr);
    };
    struct Column {
      std::string title;
      const GroupSummary* group;
      const GroupSummary* blind;  // set for Impr(%) columns
    };
    std::vector<Column> columns;
    for (auto k : config.ks) {
      const GroupSummary* blind = find_group("kmeans_blind", k);
      for (const auto& m : config.methods) {
        columns.push_back({fmt::format("k={} {}", k, m.label()),
                           find_group(m.label(), k), nullptr});
      }
      if (!has_blind) continue;
      for (const auto& m : config.methods) {
        if (m.kind == Method::Kind::kBlind) continue;
        columns.push_back({fmt::format("k={} {} Impr(%)", k, m.label()),
                           find_group(m.label(), k), blind});
      }
    }

    auto out = open_out(out_dir / "summary.csv");
    std::vector<std::string> header = {"attribute", "metric"};
    for (const auto& c : columns) header.push_back(c.title);
    csv::write_row(out, header);

    auto emit = [&](const std::string& section, const std::string& metric,
                    const std::string& key, bool with_impr) {
      std::vector<std::string> row = {section, metric};
      for (const auto& c : columns) {
        const double v = c.group ? c.group->means.at(key) : kNaN;
        if (c.blind == nullptr) {
          row.push_back(cell(v));
        } else if (!with_impr) {
          row.emplace_back();
        } else {
          const double base = c.blind->means.at(key);
          row.push_back(base != 0.0 ? cell((base - v) / base * 100.0)
                                    : std::string());
        }
      }
      csv::write_row(out, row);
    };
    emit("quality", "CO", "co", false);
    emit("quality", "SH", "sh", false);
    emit("quality", "DevC", "dev_c", false);
    emit("quality", "DevO", "dev_o", false);
    if (!result.attributes.empty()) {
      for (std::size_t i = 0; i < kFairnessKeys.size(); ++i) {
        emit("Mean across S attributes", std::string(kFairnessNames[i]),
             fmt::format("mean.{}", kFairnessKeys[i]), true);
      }
      for (const auto& attr : result.attributes) {
        for (std::size_t i = 0; i < kFairnessKeys.size(); ++i) {
          emit(attr, std::string(kFairnessNames[i]),
               fmt::format("{}.{}", attr, kFairnessKeys[i]), true);
        }
      }
    }
  }

  write_json_file(out_dir / "summary.json", summary_to_json(result, config));
}

// ---------------------------------------------------------------------------

SweepResult run_sweep(const Dataset& data, const SweepConfig& config) {
  if (config.lambdas.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "a lambda sweep needs at least two grid values");
  }
  if (config.restarts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "restarts must be >= 1");
  }
  for (double l : config.lambdas) (void)Lambda::fixed(l);

  const std::size_t runs = config.restarts;
  std::vector<std::optional<Clustering>> references(runs);
  parallel_for(runs, config.jobs, [&](std::size_t r) {
    try {
      references[r] = baseline::kmeans_fit(
          data, {config.k, config.seed_base + r,
                 std::max<std::size_t>(config.max_iter, 100), config.init});
    } catch (const std::exception& e) {
      spdlog::warn("sweep reference run {} failed: {}", r, e.what());
    }
  });

  const std::size_t points = config.lambdas.size();
  std::vector<std::optional<metrics::MetricsReport>> reports(points * runs);
  parallel_for(points * runs, config.jobs, [&](std::size_t unit) {
    const std::size_t p = unit / runs;
    const std::size_t r = unit % runs;
    try {
      const auto clustering = engine::fit(
          data, fair_config(config.k, Lambda::fixed(config.lambdas[p]),
                            config.seed_base + r, config.max_iter, config.init,
                            config.order));
      std::optional<std::span<const ClusterId>> ref;
      if (references[r]) ref = std::span<const ClusterId>(references[r]->assignment);
      reports[unit] = metrics::evaluate(data, clustering.assignment, ref,
                                        config.report);
    } catch (const std::exception& e) {
      spdlog::warn("sweep lambda={} run {} failed: {}", config.lambdas[p], r,
                   e.what());
    }
  });

  const std::vector<std::string> keys = {"co", "sh", "dev_c", "dev_o",
                                         "ae", "aw", "me",    "mw"};
  SweepResult result;
  for (std::size_t p = 0; p < points; ++p) {
    SweepPoint point;
    point.lambda = config.lambdas[p];
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto& rep = reports[p * runs + r];
      if (!rep) continue;
      ++point.runs_ok;
      auto add = [&](const std::string& key, double v) {
        if (std::isnan(v)) return;
        acc[key].first += v;
        ++acc[key].second;
      };
      add("co", rep->co);
      add("sh", opt_or_nan(rep->sh));
      add("dev_c", opt_or_nan(rep->dev_c));
      add("dev_o", opt_or_nan(rep->dev_o));
      if (!rep->fairness.per_attribute.empty()) {
        for (auto key : kFairnessKeys) {
          add(std::string(key), score(rep->fairness.mean, key));
        }
      }
    }
    for (const auto& key : keys) {
      const auto it = acc.find(key);
      point.means[key] = it != acc.end() && it->second.second
                             ? it->second.first /
                                   static_cast<double>(it->second.second)
                             : kNaN;
    }
    result.points.push_back(std::move(point));
  }
  for (const auto& key : keys) {
    std::vector<double> xs, ys;
    for (const auto& p : result.points) {
      xs.push_back(p.lambda);
      ys.push_back(p.means.at(key));
    }
    result.spearman[key] = spearman(xs, ys);
  }
  return result;
}

void write_sweep_reports(const std::filesystem::path& out_dir,
                         const SweepResult& result,
                         const SweepConfig& config) {
  std::filesystem::create_directories(out_dir);
  const std::vector<std::string> keys = {"co", "sh", "dev_c", "dev_o",
                                         "ae", "aw", "me",    "mw"};
  {
    auto out = open_out(out_dir / "sweep.csv");
    std::vector<std::string> header = {"lambda", "runs_ok"};
    header.insert(header.end(), keys.begin(), keys.end());
    csv::write_row(out, header);
    for (const auto& p : result.points) {
      std::vector<std::string> row = {csv::format_double(p.lambda),
                                      std::to_string(p.runs_ok)};
      for (const auto& key : keys) row.push_back(cell(p.means.at(key)));
      csv::write_row(out, row);
    }
  }

  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : result.points) {
    nlohmann::json means = nlohmann::json::object();
    for (const auto& [key, v] : p.means) {
      means[key] = std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
    }
    pts.push_back({{"lambda", p.lambda},
                   {"runs_ok", p.runs_ok},
                   {"means", std::move(means)}});
  }
  nlohmann::json rho = nlohmann::json::object();
  for (const auto& [key, v] : result.spearman) {
    rho[key] = std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  }
  write_json_file(out_dir / "sweep.json",
                  {{"spec_version", kReportVersion},
                   {"k", config.k},
                   {"restarts", config.restarts},
                   {"seed_base", config.seed_base},
                   {"points", std::move(pts)},
                   {"spearman_vs_lambda", std::move(rho)}});

  auto chart = [&](const std::string& title,
                   const std::vector<std::pair<std::string, std::string>>&
                       series) {
    svg::LineChart c;
    c.title = title;
    c.x_label = "lambda";
    c.y_label = "mean over restarts";
    for (const auto& [key, name] : series) {
      svg::Series s;
      s.name = name;
      for (const auto& p : result.points) {
        s.x.push_back(p.lambda);
        s.y.push_back(p.means.at(key));
      }
      c.series.push_back(std::move(s));
    }
    return svg::render(c);
  };
  auto write_text = [&](const std::string& name, const std::string& text) {
    auto out = open_out(out_dir / name);
    out << text;
  };
  write_text("sweep_quality.svg",
             chart("Clustering quality vs lambda", {{"co", "CO"}, {"sh", "SH"}}));
  write_text("sweep_deviation.svg",
             chart("Deviation from blind K-Means vs lambda",
                   {{"dev_c", "DevC"}, {"dev_o", "DevO"}}));
  write_text("sweep_fairness.svg",
             chart("Fairness vs lambda (mean across attributes)",
                   {{"ae", "AE"}, {"aw", "AW"}, {"me", "ME"}, {"mw", "MW"}}));
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return kNaN;
  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) return kNaN;
  }
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace fairkm::bench
