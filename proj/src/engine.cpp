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

#include "fairkm/engine.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "fairkm/error.hpp"

namespace fairkm::engine {
namespace {

void check_move(const ClusterState& state, std::size_t x, ClusterId from,
                ClusterId to) {
  if (x >= state.n_objects() || from >= state.k() || to >= state.k() ||
      state.cluster_of(x) != from || from == to) {
    throw Error(ErrorCode::kBadMove,
                fmt::format("BadMove: object {} from {} to {}", x, from, to));
  }
}

// ||x - sum/size||^2 without materializing the centroid.
double distance_to_mean(std::span<const double> x, std::span<const double> sum,
                        double size) {
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - sum[j] / size;
    acc += diff * diff;
  }
  return acc;
}

// (|C|/n)^2 (mean_C - mean_X)^2 written over the running sum, which is also
// correct (zero) for an empty cluster.
double numeric_cluster_term(double cluster_sum, double cluster_size,
                            double dataset_mean, double n) {
  const double dev = (cluster_sum - cluster_size * dataset_mean) / n;
  return dev * dev;
}

double km_delta_unchecked(const Dataset& data, const ClusterState& state,
                          std::size_t x, ClusterId from, ClusterId to) {
  auto row = data.features.row(x);
  double delta = 0.0;
  // Leaving a singleton empties it: its K-Means contribution was already 0.
  const auto from_size = static_cast<double>(state.size(from));
  if (state.size(from) > 1) {
    delta -= from_size / (from_size - 1.0) *
             distance_to_mean(row, state.sum(from), from_size);
  }
  const auto to_size = static_cast<double>(state.size(to));
  if (state.size(to) > 0) {
    delta += to_size / (to_size + 1.0) *
             distance_to_mean(row, state.sum(to), to_size);
  }
  return delta;
}

double fairness_delta_unchecked(const Dataset& data, const ClusterState& state,
                                std::size_t x, ClusterId from, ClusterId to) {
  const auto n = static_cast<double>(data.n_objects());
  const double c_out = static_cast<double>(state.size(from));
  const double c_in = static_cast<double>(state.size(to));
  double delta = 0.0;

  for (std::size_t a = 0; a < data.categorical.size(); ++a) {
    const auto& attr = data.categorical[a];
    const std::size_t m = attr.domain_size();
    const auto out_counts = state.counts(a, from);
    const auto in_counts = state.counts(a, to);
    const std::uint32_t value = attr.codes[x];
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const double f = static_cast<double>(attr.value_counts[s]) / n;
      const double ind = s == value ? 1.0 : 0.0;
      const auto cs_out = static_cast<double>(out_counts[s]);
      const auto cs_in = static_cast<double>(in_counts[s]);
      // Removal from the origin, cardinalities taken before the move.
      sum += f * f * (1.0 - 2.0 * c_out) + ind * (1.0 - 2.0 * cs_out) -
             2.0 * f * (ind * (1.0 - c_out) - cs_out);
      // Insertion into the target, cardinalities taken before the move.
      sum += f * f * (1.0 + 2.0 * c_in) + ind * (1.0 + 2.0 * cs_in) -
             2.0 * f * (ind * (1.0 + c_in) + cs_in);
    }
    delta += attr.weight * sum / (n * n * static_cast<double>(m));
  }

  for (std::size_t a = 0; a < data.numeric.size(); ++a) {
    const auto& attr = data.numeric[a];
    const double v = attr.values[x];
    const double s_out = state.numeric_sum(a, from);
    const double s_in = state.numeric_sum(a, to);
    double d = 0.0;
    d += numeric_cluster_term(s_out - v, c_out - 1.0, attr.mean, n) -
         numeric_cluster_term(s_out, c_out, attr.mean, n);
    d += numeric_cluster_term(s_in + v, c_in + 1.0, attr.mean, n) -
         numeric_cluster_term(s_in, c_in, attr.mean, n);
    delta += attr.weight * d;
  }
  return delta;
}

}  // namespace

std::vector<std::size_t> kmeanspp_seeds(const Dataset& data, std::size_t k,
                                        std::mt19937_64& rng) {
  const std::size_t n = data.n_objects();
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (k > n) {
    throw Error(ErrorCode::kKTooLarge,
                fmt::format("kmeans++ needs k <= n ({} > {})", k,
                            n));
  }
  std::vector<std::size_t> seeds;
  seeds.reserve(k);
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  seeds.push_back(pick(rng));
  chosen[seeds.back()] = true;

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    auto last = data.features.row(seeds.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] =
          std::min(nearest[i], squared_distance(data.features.row(i), last));
      if (!chosen[i]) total += nearest[i];
    }
    std::size_t next = n;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        acc += nearest[i];
        next = i;
        if (acc >= target && nearest[i] > 0.0) break;
      }
    } else {
      // Every remaining object coincides with a seed; fall back to uniform.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) rest.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> r(0, rest.size() - 1);
      next = rest[r(rng)];
    }
    seeds.push_back(next);
    chosen[next] = true;
  }
  return seeds;
}

ClusterState initialize(const Dataset& data, const FairKMConfig& config,
                        std::mt19937_64& rng) {
  const std::size_t n = data.n_objects();
  const std::size_t k = config.k;
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  std::vector<ClusterId> assignment(n, 0);
  if (config.init == InitPolicy::kRandomPartition) {
    std::uniform_int_distribution<ClusterId> pick(
        0, static_cast<ClusterId>(k - 1));
    for (auto& c : assignment) c = pick(rng);
  } else {
    const auto seeds = kmeanspp_seeds(data, k, rng);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = data.features.row(i);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(row, data.features.row(seeds[c]));
        if (dist < best) {
          best = dist;
          assignment[i] = static_cast<ClusterId>(c);
        }
      }
    }
  }
  return ClusterState(data, k, std::move(assignment));
}

double km_term(const Dataset& data, const ClusterState& state) {
  const std::size_t k = state.k();
  std::vector<std::vector<double>> centroids(k);
  for (ClusterId c = 0; c < k; ++c) {
    if (state.size(c) > 0) centroids[c] = state.prototype(c);
  }
  double total = 0.0;
  for (std::size_t x = 0; x < data.n_objects(); ++x) {
    total += squared_distance(data.features.row(x),
                              centroids[state.cluster_of(x)]);
  }
  return total;
}

double FairnessBreakdown::total() const {
  double acc = 0.0;
  for (const auto& per_cluster : categorical) {
    for (double v : per_cluster) acc += v;
  }
  for (const auto& per_cluster : numeric) {
    for (double v : per_cluster) acc += v;
  }
  return acc;
}

FairnessBreakdown fairness_breakdown(const Dataset& data,
                                     const ClusterState& state) {
  const auto n = static_cast<double>(data.n_objects());
  const std::size_t k = state.k();
  FairnessBreakdown out;
  for (std::size_t a = 0; a < data.categorical.size(); ++a) {
    const auto& attr = data.categorical[a];
    const std::size_t m = attr.domain_size();
    std::vector<double> per_cluster(k, 0.0);
    for (ClusterId c = 0; c < k; ++c) {
      if (state.size(c) == 0) continue;
      const auto size = static_cast<double>(state.size(c));
      const auto counts = state.counts(a, c);
      double dev = 0.0;
      for (std::size_t s = 0; s < m; ++s) {
        const double diff =
            static_cast<double>(counts[s]) / size - attr.fractions[s];
        dev += diff * diff;
      }
      const double share = size / n;
      per_cluster[c] =
          attr.weight * share * share * dev / static_cast<double>(m);
    }
    out.categorical.push_back(std::move(per_cluster));
  }
  for (std::size_t a = 0; a < data.numeric.size(); ++a) {
    const auto& attr = data.numeric[a];
    std::vector<double> per_cluster(k, 0.0);
    for (ClusterId c = 0; c < k; ++c) {
      per_cluster[c] =
          attr.weight *
          numeric_cluster_term(state.numeric_sum(a, c),
                               static_cast<double>(state.size(c)), attr.mean,
                               n);
    }
    out.numeric.push_back(std::move(per_cluster));
  }
  return out;
}

double fairness_term(const Dataset& data, const ClusterState& state) {
  return fairness_breakdown(data, state).total();
}

ObjectiveBreakdown objective(const Dataset& data, const ClusterState& state,
                             double lambda) {
  ObjectiveBreakdown out;
  out.km_term = km_term(data, state);
  out.fairness_term = fairness_term(data, state);
  out.lambda = lambda;
  out.total = out.km_term + lambda * out.fairness_term;
  return out;
}

ObjectiveBreakdown objective(const Dataset& data, const ClusterState& state,
                             const FairKMConfig& config) {
  return objective(data, state,
                   config.lambda.resolve(data.n_objects(), config.k));
}

double km_move_delta(const Dataset& data, const ClusterState& state,
                     std::size_t x, ClusterId from, ClusterId to) {
  check_move(state, x, from, to);
  return km_delta_unchecked(data, state, x, from, to);
}

double fairness_move_delta(const Dataset& data, const ClusterState& state,
                           std::size_t x, ClusterId from, ClusterId to) {
  check_move(state, x, from, to);
  return fairness_delta_unchecked(data, state, x, from, to);
}

MoveDelta move_delta(const Dataset& data, const ClusterState& state,
                     double lambda, std::size_t x, ClusterId to) {
  const ClusterId from = state.cluster_of(x);
  if (to == from) return {};
  MoveDelta d;
  d.km = km_move_delta(data, state, x, from, to);
  d.fair = fairness_delta_unchecked(data, state, x, from, to);
  d.total = d.km + lambda * d.fair;
  return d;
}

BestMove best_cluster(const Dataset& data, const ClusterState& state,
                      double lambda, std::size_t x) {
  const ClusterId current = state.cluster_of(x);
  // Staying put is the incumbent with delta 0.
  BestMove best{current, {}};
  for (ClusterId c = 0; c < state.k(); ++c) {
    if (c == current) continue;
    MoveDelta d;
    d.km = km_delta_unchecked(data, state, x, current, c);
    d.fair = fairness_delta_unchecked(data, state, x, current, c);
    d.total = d.km + lambda * d.fair;
    if (d.total < best.delta.total ||
        (d.total == best.delta.total && c < best.cluster)) {
      best = {c, d};
    }
  }
  return best;
}

Clustering fit(const Dataset& data, const FairKMConfig& config,
               const FitHooks& hooks) {
  const std::size_t n = data.n_objects();
  if (n == 0) {
    throw Error(ErrorCode::kEmptyDataset, "EmptyDataset: nothing to cluster");
  }
  if (config.max_iter == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  }
  const double lambda = config.lambda.resolve(n, config.k);
  std::mt19937_64 rng(config.seed);
  ClusterState state = initialize(data, config, rng);
  if (hooks.on_initialized) hooks.on_initialized(state);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Clustering result;
  result.k = config.k;
  for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
    if (config.order == OrderPolicy::kShuffledPerIteration) {
      std::shuffle(order.begin(), order.end(), rng);
    }
    std::size_t moves = 0;
    for (std::size_t x : order) {
      const ClusterId from = state.cluster_of(x);
      const BestMove best = best_cluster(data, state, lambda, x);
      if (best.cluster == from) continue;
      state.apply_move(data, x, from, best.cluster);
      ++moves;
      if (hooks.on_move) {
        hooks.on_move(MoveEvent{iter, x, from, best.cluster, best.delta},
                      state);
      }
    }
    result.iterations_run = iter;
    if (hooks.on_pass) hooks.on_pass(iter, moves);
    if (moves == 0) {
      result.converged = true;
      break;
    }
  }
  result.assignment.assign(state.assignment().begin(),
                           state.assignment().end());
  result.objective = objective(data, state, lambda);
  return result;
}

namespace detail {

double value_deviation_direct(std::int64_t cluster_size,
                              std::int64_t cluster_value_count,
                              std::int64_t n_objects,
                              std::int64_t dataset_value_count,
                              std::size_t domain_size) {
  if (cluster_size == 0) return 0.0;
  const double share = static_cast<double>(cluster_size) /
                       static_cast<double>(n_objects);
  const double diff = static_cast<double>(cluster_value_count) /
                          static_cast<double>(cluster_size) -
                      static_cast<double>(dataset_value_count) /
                          static_cast<double>(n_objects);
  return share * share * diff * diff / static_cast<double>(domain_size);
}

double value_deviation_expanded(std::int64_t cluster_size,
                                std::int64_t cluster_value_count,
                                std::int64_t n_objects,
                                std::int64_t dataset_value_count,
                                std::size_t domain_size) {
  if (cluster_size == 0) return 0.0;
  const auto c = static_cast<double>(cluster_size);
  const auto cs = static_cast<double>(cluster_value_count);
  const auto x = static_cast<double>(n_objects);
  const auto xs = static_cast<double>(dataset_value_count);
  const double inner =
      (cs / c) * (cs / c) + (xs / x) * (xs / x) - 2.0 * (cs * xs) / (c * x);
  return c * c * inner / (x * x * static_cast<double>(domain_size));
}

}  // namespace detail

}  // namespace fairkm::engine
