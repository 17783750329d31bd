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

#include "fairkm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

#include "fairkm/error.hpp"
#include "fairkm/io.hpp"

namespace fairkm::metrics {
namespace {

void check_assignment(const Dataset& data,
                      std::span<const ClusterId> assignment) {
  if (assignment.size() != data.n_objects()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("assignment has {} entries for {} objects",
                            assignment.size(), data.n_objects()));
  }
}

// Maps arbitrary cluster ids onto dense indices in ascending id order.
struct DenseLabels {
  std::vector<ClusterId> ids;
  std::vector<std::size_t> index;  // per object
  std::vector<std::size_t> sizes;
};

DenseLabels densify(std::span<const ClusterId> assignment) {
  DenseLabels out;
  out.ids.assign(assignment.begin(), assignment.end());
  std::sort(out.ids.begin(), out.ids.end());
  out.ids.erase(std::unique(out.ids.begin(), out.ids.end()), out.ids.end());
  out.sizes.assign(out.ids.size(), 0);
  out.index.reserve(assignment.size());
  for (ClusterId c : assignment) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(out.ids.begin(), out.ids.end(), c) - out.ids.begin());
    out.index.push_back(pos);
    ++out.sizes[pos];
  }
  return out;
}

double euclid(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

// Minimum-cost assignment on a square cost matrix (Kuhn-Munkres with
// potentials, O(n^3)). Returns the optimal total cost.
double min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
  return total;
}

// Permutation putting dictionary indices into the requested ground order.
std::vector<std::size_t> ground_order(const CategoricalAttribute& attr,
                                      const FairnessOptions& options) {
  std::vector<std::size_t> order(attr.domain_size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto it = options.value_order.find(attr.name);
  if (it == options.value_order.end()) return order;
  const auto& wanted = it->second;
  if (wanted.size() != attr.domain_size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("value order for '{}' lists {} values, domain has "
                            "{}",
                            attr.name, wanted.size(), attr.domain_size()));
  }
  std::vector<bool> seen(attr.domain_size(), false);
  for (std::size_t pos = 0; pos < wanted.size(); ++pos) {
    const auto found = std::find(attr.dictionary.begin(), attr.dictionary.end(),
                                 wanted[pos]);
    if (found == attr.dictionary.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("value order for '{}' names unknown value '{}'",
                              attr.name, wanted[pos]));
    }
    const auto idx = static_cast<std::size_t>(found - attr.dictionary.begin());
    if (seen[idx]) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("value order for '{}' repeats '{}'", attr.name,
                              wanted[pos]));
    }
    seen[idx] = true;
    order[pos] = idx;
  }
  return order;
}

nlohmann::json scores_json(const FairnessScores& s) {
  return {{"ae", s.ae}, {"aw", s.aw}, {"me", s.me}, {"mw", s.mw}};
}

}  // namespace

double clustering_objective(const Dataset& data,
                            std::span<const ClusterId> assignment) {
  check_assignment(data, assignment);
  const auto labels = densify(assignment);
  const auto cents = centroids(data, assignment);
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    total += squared_distance(data.features.row(i), cents[labels.index[i]]);
  }
  return total;
}

double silhouette(const Dataset& data, std::span<const ClusterId> assignment,
                  std::size_t sample_cap, std::uint64_t seed) {
  check_assignment(data, assignment);
  const auto labels = densify(assignment);
  const std::size_t k = labels.ids.size();
  if (k < 2) {
    throw Error(ErrorCode::kSingleCluster,
                "SingleCluster: silhouette needs at least two non-empty "
                "clusters");
  }
  const std::size_t n = assignment.size();
  std::vector<std::size_t> sample(n);
  std::iota(sample.begin(), sample.end(), std::size_t{0});
  if (sample_cap > 0 && n > sample_cap) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < sample_cap; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(sample[i], sample[pick(rng)]);
    }
    sample.resize(sample_cap);
    std::sort(sample.begin(), sample.end());
  }

  std::vector<double> dist_sum(k);
  double total = 0.0;
  for (std::size_t i : sample) {
    const std::size_t own = labels.index[i];
    if (labels.sizes[own] < 2) continue;  // singleton scores 0
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    auto row = data.features.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist_sum[labels.index[j]] += euclid(row, data.features.row(j));
    }
    const double a =
        dist_sum[own] / static_cast<double>(labels.sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(labels.sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(sample.size());
}

std::vector<Centroid> centroids(const Dataset& data,
                                std::span<const ClusterId> assignment) {
  check_assignment(data, assignment);
  const auto labels = densify(assignment);
  const std::size_t d = data.dim();
  std::vector<Centroid> out(labels.ids.size(), Centroid(d, 0.0));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto row = data.features.row(i);
    auto& c = out[labels.index[i]];
    for (std::size_t j = 0; j < d; ++j) c[j] += row[j];
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (double& v : out[c]) v /= static_cast<double>(labels.sizes[c]);
  }
  return out;
}

double dev_c(const std::vector<Centroid>& a, const std::vector<Centroid>& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "dev_c needs non-empty centroid sets");
  }
  const std::size_t size = std::max(a.size(), b.size());
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[i].size() != b[j].size()) {
        throw Error(ErrorCode::kLengthMismatch,
                    "dev_c centroids differ in dimension");
      }
      cost[i][j] = euclid(a[i], b[j]);
    }
  }
  return min_cost_assignment(cost);
}

double dev_c_dot(const std::vector<Centroid>& a, const std::vector<Centroid>& b) {
  double total = 0.0;
  for (const auto& p : a) {
    for (const auto& q : b) {
      total += std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    }
  }
  return total;
}

double dev_o(std::span<const ClusterId> a, std::span<const ClusterId> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("LengthMismatch: {} vs {} objects", a.size(),
                            b.size()));
  }
  const auto n = static_cast<std::int64_t>(a.size());
  if (n < 2) return 0.0;
  std::unordered_map<ClusterId, std::int64_t> rows, cols;
  std::unordered_map<std::uint64_t, std::int64_t> cells;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++rows[a[i]];
    ++cols[b[i]];
    ++cells[(static_cast<std::uint64_t>(a[i]) << 32) | b[i]];
  }
  auto pairs = [](std::int64_t m) { return m * (m - 1) / 2; };
  std::int64_t same_a = 0, same_b = 0, same_both = 0;
  for (const auto& [id, m] : rows) same_a += pairs(m);
  for (const auto& [id, m] : cols) same_b += pairs(m);
  for (const auto& [key, m] : cells) same_both += pairs(m);
  const std::int64_t disagree = (same_a - same_both) + (same_b - same_both);
  return static_cast<double>(disagree) / static_cast<double>(pairs(n));
}

double euclidean_distance(std::span<const double> p, std::span<const double> q) {
  return euclid(p, q);
}

double wasserstein_1d(std::span<const double> p, std::span<const double> q) {
  double cdf_p = 0.0, cdf_q = 0.0, total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cdf_p += p[i];
    cdf_q += q[i];
    total += std::abs(cdf_p - cdf_q);
  }
  return total;
}

FairnessReport fairness_metrics(const Dataset& data,
                                std::span<const ClusterId> assignment,
                                const FairnessOptions& options) {
  check_assignment(data, assignment);
  if (data.categorical.empty()) {
    throw Error(ErrorCode::kNoCategoricalSensitive,
                "NoCategoricalSensitive: no categorical sensitive attribute");
  }
  const auto labels = densify(assignment);
  const std::size_t k = labels.ids.size();
  FairnessReport report;
  for (const auto& attr : data.categorical) {
    const std::size_t m = attr.domain_size();
    const auto order = ground_order(attr, options);
    std::vector<std::int64_t> counts(k * m, 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      ++counts[labels.index[i] * m + attr.codes[i]];
    }
    std::vector<double> dataset_dist(m), cluster_dist(m);
    for (std::size_t pos = 0; pos < m; ++pos) {
      dataset_dist[pos] = attr.fractions[order[pos]];
    }
    FairnessScores s;
    double weight_total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const auto size = static_cast<double>(labels.sizes[c]);
      for (std::size_t pos = 0; pos < m; ++pos) {
        cluster_dist[pos] =
            static_cast<double>(counts[c * m + order[pos]]) / size;
      }
      const double ed = euclid(cluster_dist, dataset_dist);
      const double w1 = wasserstein_1d(cluster_dist, dataset_dist);
      s.ae += size * ed;
      s.aw += size * w1;
      s.me = std::max(s.me, ed);
      s.mw = std::max(s.mw, w1);
      weight_total += size;
    }
    s.ae /= weight_total;
    s.aw /= weight_total;
    report.per_attribute.push_back({attr.name, s});
  }
  const auto count = static_cast<double>(report.per_attribute.size());
  for (const auto& entry : report.per_attribute) {
    report.mean.ae += entry.scores.ae / count;
    report.mean.aw += entry.scores.aw / count;
    report.mean.me += entry.scores.me / count;
    report.mean.mw += entry.scores.mw / count;
  }
  return report;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json doc{{"spec_version", kReportVersion}, {"co", co}};
  auto optional_field = [&](const char* key, const std::optional<double>& v) {
    doc[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  optional_field("sh", sh);
  optional_field("dev_c", dev_c);
  optional_field("dev_c_dot", dev_c_dot);
  optional_field("dev_o", dev_o);
  nlohmann::json per = nlohmann::json::array();
  for (const auto& entry : fairness.per_attribute) {
    auto item = scores_json(entry.scores);
    item["attribute"] = entry.attribute;
    per.push_back(std::move(item));
  }
  doc["fairness"] = {{"per_attribute", std::move(per)},
                     {"mean_across_attributes", scores_json(fairness.mean)}};
  return doc;
}

MetricsReport evaluate(const Dataset& data,
                       std::span<const ClusterId> assignment,
                       std::optional<std::span<const ClusterId>> reference,
                       const ReportOptions& options) {
  MetricsReport report;
  report.co = clustering_objective(data, assignment);
  const auto labels = densify(assignment);
  if (labels.ids.size() >= 2) {
    report.sh = silhouette(data, assignment, options.silhouette_sample_cap,
                           options.silhouette_seed);
  }
  if (reference) {
    const auto own = centroids(data, assignment);
    const auto ref = centroids(data, *reference);
    report.dev_c = dev_c(own, ref);
    report.dev_c_dot = dev_c_dot(own, ref);
    report.dev_o = dev_o(assignment, *reference);
  }
  if (!data.categorical.empty()) {
    report.fairness = fairness_metrics(data, assignment, options.fairness);
  }
  return report;
}

}  // namespace fairkm::metrics
