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

#include "fairkm/baseline.hpp"

#include <limits>
#include <random>

#include <fmt/format.h>

#include "fairkm/engine.hpp"
#include "fairkm/error.hpp"

namespace fairkm::baseline {
namespace {

class Centroids {
 public:
  Centroids(std::size_t k, std::size_t d) : d_(d), values_(k * d, 0.0) {}

  std::span<const double> operator[](std::size_t c) const {
    return {values_.data() + c * d_, d_};
  }
  std::span<double> operator[](std::size_t c) {
    return {values_.data() + c * d_, d_};
  }

 private:
  std::size_t d_;
  std::vector<double> values_;
};

// Recomputes centroids as member means; returns member counts.
std::vector<std::size_t> update_centroids(const Dataset& data,
                                          std::span<const ClusterId> assignment,
                                          Centroids& centroids,
                                          std::size_t k) {
  const std::size_t d = data.dim();
  std::vector<std::size_t> sizes(k, 0);
  std::vector<double> sums(k * d, 0.0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const ClusterId c = assignment[i];
    ++sizes[c];
    auto row = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += row[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] == 0) continue;
    auto centroid = centroids[c];
    for (std::size_t j = 0; j < d; ++j) {
      centroid[j] = sums[c * d + j] / static_cast<double>(sizes[c]);
    }
  }
  return sizes;
}

// Moves the farthest-from-centroid object into each empty cluster.
void reseed_empty(const Dataset& data, std::vector<ClusterId>& assignment,
                  Centroids& centroids, std::size_t k) {
  for (;;) {
    auto sizes = update_centroids(data, assignment, centroids, k);
    std::size_t empty = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) {
        empty = c;
        break;
      }
    }
    if (empty == k) return;
    std::size_t farthest = assignment.size();
    double best = -1.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double dist =
          squared_distance(data.features.row(i), centroids[assignment[i]]);
      if (dist > best) {
        best = dist;
        farthest = i;
      }
    }
    if (farthest == assignment.size()) return;  // fewer objects than k
    assignment[farthest] = static_cast<ClusterId>(empty);
  }
}

double sse(const Dataset& data, std::span<const ClusterId> assignment,
           const Centroids& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    total += squared_distance(data.features.row(i), centroids[assignment[i]]);
  }
  return total;
}

}  // namespace

Clustering kmeans_fit(const Dataset& data, const KMeansOptions& options,
                      std::vector<double>* trace) {
  const std::size_t n = data.n_objects();
  const std::size_t k = options.k;
  if (n == 0) {
    throw Error(ErrorCode::kEmptyDataset, "EmptyDataset: nothing to cluster");
  }
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (options.max_iter == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  }

  std::mt19937_64 rng(options.seed);
  Centroids centroids(k, data.dim());
  std::vector<ClusterId> assignment(n, 0);

  if (options.init == InitPolicy::kKMeansPlusPlus) {
    const auto seeds = engine::kmeanspp_seeds(data, k, rng);
    for (std::size_t c = 0; c < k; ++c) {
      auto src = data.features.row(seeds[c]);
      std::copy(src.begin(), src.end(), centroids[c].begin());
    }
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(data.features.row(i), centroids[c]);
        if (dist < best) {
          best = dist;
          assignment[i] = static_cast<ClusterId>(c);
        }
      }
    }
  } else {
    std::uniform_int_distribution<ClusterId> pick(
        0, static_cast<ClusterId>(k - 1));
    for (auto& c : assignment) c = pick(rng);
    reseed_empty(data, assignment, centroids, k);
  }
  if (trace) {
    trace->clear();
    trace->push_back(sse(data, assignment, centroids));
  }

  Clustering result;
  result.k = k;
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = data.features.row(i);
      ClusterId best_c = assignment[i];
      double best = squared_distance(row, centroids[best_c]);
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(row, centroids[c]);
        if (dist < best || (dist == best && c < best_c)) {
          best = dist;
          best_c = static_cast<ClusterId>(c);
        }
      }
      if (best_c != assignment[i]) {
        assignment[i] = best_c;
        ++changed;
      }
    }
    reseed_empty(data, assignment, centroids, k);
    result.iterations_run = iter;
    if (trace) trace->push_back(sse(data, assignment, centroids));
    if (changed == 0) {
      result.converged = true;
      break;
    }
  }

  ClusterState state(data, k, assignment);
  result.objective.km_term = engine::km_term(data, state);
  result.objective.fairness_term = engine::fairness_term(data, state);
  result.objective.lambda = 0.0;
  result.objective.total = result.objective.km_term;
  result.assignment = std::move(assignment);
  return result;
}

}  // namespace fairkm::baseline
