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

// The fair K-Means optimizer.
//
// Objective, for a clustering C of the dataset X with n objects:
//
//   O = sum_C sum_{x in C} ||x - mean(C)||^2  +  lambda * F
//
//   F = sum_C (|C|/n)^2 * ( sum_{S categorical} w_S / |V_S| *
//                             sum_{s in V_S} (Fr_C(s) - Fr_X(s))^2
//                         + sum_{S numeric} w_S * (mean_C(S) - mean_X(S))^2 )
//
// Empty clusters contribute zero to both terms. Writing c = |C| and c_s for
// the number of members with S = s, each categorical summand is
// (c_s - c * Fr_X(s))^2 / (n^2 |V_S|), which is what the move deltas expand.
//
// Optimization is round-robin: each object in turn moves to the cluster that
// minimizes O with every other assignment held fixed (staying put is always
// a candidate with delta 0). Deltas are exact and computed from per-cluster
// sufficient statistics, so one candidate costs O(d + sum_S |V_S|).

#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "fairkm/core.hpp"

namespace fairkm::engine {

struct MoveDelta {
  double km = 0.0;
  double fair = 0.0;
  double total = 0.0;
};

// Initial state. kRandomPartition draws each cluster id uniformly;
// kKMeansPlusPlus picks k centers by D^2 sampling over the features and
// assigns every object to its nearest center. Throws kKTooLarge for
// kmeans++ with k > n and kInvalidArgument for k == 0.
ClusterState initialize(const Dataset& data, const FairKMConfig& config,
                        std::mt19937_64& rng);

// Indices of k distinct seed objects chosen by D^2 sampling.
std::vector<std::size_t> kmeanspp_seeds(const Dataset& data, std::size_t k,
                                        std::mt19937_64& rng);

double km_term(const Dataset& data, const ClusterState& state);

// Weighted fairness contribution of every (attribute, cluster) pair;
// categorical attributes first, then numeric, each in dataset order.
struct FairnessBreakdown {
  std::vector<std::vector<double>> categorical;  // [attr][cluster]
  std::vector<std::vector<double>> numeric;      // [attr][cluster]

  double total() const;
};

FairnessBreakdown fairness_breakdown(const Dataset& data,
                                     const ClusterState& state);

double fairness_term(const Dataset& data, const ClusterState& state);

ObjectiveBreakdown objective(const Dataset& data, const ClusterState& state,
                             double lambda);
ObjectiveBreakdown objective(const Dataset& data, const ClusterState& state,
                             const FairKMConfig& config);

// Exact change of the K-Means term if x moved from `from` to `to`.
// Throws kBadMove unless x is in `from` and from != to.
double km_move_delta(const Dataset& data, const ClusterState& state,
                     std::size_t x, ClusterId from, ClusterId to);

// Exact change of the (weighted, unscaled by lambda) fairness term.
double fairness_move_delta(const Dataset& data, const ClusterState& state,
                           std::size_t x, ClusterId from, ClusterId to);

// Both deltas for moving x to `to`; all zero when `to` is x's cluster.
MoveDelta move_delta(const Dataset& data, const ClusterState& state,
                     double lambda, std::size_t x, ClusterId to);

struct BestMove {
  ClusterId cluster = 0;
  MoveDelta delta;
};

// Argmin of the total delta over all clusters, the current one included;
// ties go to the lowest cluster id.
BestMove best_cluster(const Dataset& data, const ClusterState& state,
                      double lambda, std::size_t x);

inline void apply_move(const Dataset& data, ClusterState& state,
                       std::size_t x, ClusterId from, ClusterId to) {
  state.apply_move(data, x, from, to);
}

struct MoveEvent {
  std::size_t iteration = 0;  // 1-based pass number
  std::size_t object = 0;
  ClusterId from = 0;
  ClusterId to = 0;
  MoveDelta delta;
};

// Optional instrumentation; every callback may be left empty.
struct FitHooks {
  std::function<void(const ClusterState&)> on_initialized;
  // Called after the move has been applied.
  std::function<void(const MoveEvent&, const ClusterState&)> on_move;
  std::function<void(std::size_t iteration, std::size_t moves)> on_pass;
};

// Runs initialization then full round-robin passes until a pass makes no
// move (converged) or config.max_iter passes have run.
Clustering fit(const Dataset& data, const FairKMConfig& config,
               const FitHooks& hooks = {});

namespace detail {

// One categorical (cluster, value) summand of the fairness term before
// attribute weighting, evaluated two ways: directly from the fractional
// representations, and in the expanded count form the deltas are built on.
double value_deviation_direct(std::int64_t cluster_size,
                              std::int64_t cluster_value_count,
                              std::int64_t n_objects,
                              std::int64_t dataset_value_count,
                              std::size_t domain_size);
double value_deviation_expanded(std::int64_t cluster_size,
                                std::int64_t cluster_value_count,
                                std::int64_t n_objects,
                                std::int64_t dataset_value_count,
                                std::size_t domain_size);

}  // namespace detail

}  // namespace fairkm::engine
