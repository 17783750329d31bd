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

// Clustering evaluation.
//
// Quality over the feature space:
//   CO    K-Means objective (sum of squared distances to cluster means)
//   SH    mean silhouette, plain Euclidean distance
//   DevC  deviation of centroid sets from a reference clustering
//   DevO  fraction of object pairs on which two clusterings disagree about
//         co-membership
//
// Fairness over categorical sensitive attributes, comparing each non-empty
// cluster's value distribution C_S with the dataset distribution X_S:
//   AE / AW  size-weighted mean of Euclidean / Wasserstein-1 distance
//   ME / MW  maximum of the same distances over clusters

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairkm/core.hpp"

namespace fairkm::metrics {

using Centroid = std::vector<double>;

double clustering_objective(const Dataset& data,
                            std::span<const ClusterId> assignment);

inline constexpr std::size_t kDefaultSilhouetteSampleCap = 5000;

// Exact when n <= sample_cap, otherwise averaged over a seeded uniform
// sample of sample_cap objects (distances still taken to all objects).
// Objects in singleton clusters score 0. Throws kSingleCluster when fewer
// than two clusters are non-empty.
double silhouette(const Dataset& data, std::span<const ClusterId> assignment,
                  std::size_t sample_cap = kDefaultSilhouetteSampleCap,
                  std::uint64_t seed = 0);

// Means of the non-empty clusters, in cluster id order.
std::vector<Centroid> centroids(const Dataset& data,
                                std::span<const ClusterId> assignment);

// Minimum total Euclidean distance over one-to-one matchings of the two
// centroid sets; centroids left over in the larger set are unmatched at no
// cost. Identical sets give 0.
double dev_c(const std::vector<Centroid>& a, const std::vector<Centroid>& b);

// Sum of dot products over all (a_i, b_j) pairs.
double dev_c_dot(const std::vector<Centroid>& a, const std::vector<Centroid>& b);

// Fraction of unordered object pairs whose same/different-cluster verdicts
// disagree. Uses the contingency table: O(n + k_a k_b). Throws
// kLengthMismatch.
double dev_o(std::span<const ClusterId> a, std::span<const ClusterId> b);

double euclidean_distance(std::span<const double> p, std::span<const double> q);

// W1 between two distributions over an ordered domain with unit spacing:
// sum over positions of |CDF_p - CDF_q|.
double wasserstein_1d(std::span<const double> p, std::span<const double> q);

struct FairnessScores {
  double ae = 0.0;
  double aw = 0.0;
  double me = 0.0;
  double mw = 0.0;

  bool operator==(const FairnessScores&) const = default;
};

struct AttributeFairness {
  std::string attribute;
  FairnessScores scores;
};

struct FairnessReport {
  std::vector<AttributeFairness> per_attribute;
  FairnessScores mean;  // unweighted mean over attributes
};

struct FairnessOptions {
  // Optional ground order for the Wasserstein distance, keyed by attribute
  // name and listing dictionary values; defaults to dictionary order.
  std::map<std::string, std::vector<std::string>> value_order;
};

// Throws kNoCategoricalSensitive when the dataset has none.
FairnessReport fairness_metrics(const Dataset& data,
                                std::span<const ClusterId> assignment,
                                const FairnessOptions& options = {});

struct MetricsReport {
  double co = 0.0;
  std::optional<double> sh;     // absent for single-cluster partitions
  std::optional<double> dev_c;  // absent without a reference clustering
  std::optional<double> dev_c_dot;
  std::optional<double> dev_o;
  FairnessReport fairness;

  nlohmann::json to_json() const;
};

struct ReportOptions {
  std::size_t silhouette_sample_cap = kDefaultSilhouetteSampleCap;
  std::uint64_t silhouette_seed = 0;
  FairnessOptions fairness;
};

// Full report; DevC/DevO are filled when `reference` is given. Fairness
// fields are left empty when the dataset has no categorical sensitive
// attribute.
MetricsReport evaluate(const Dataset& data,
                       std::span<const ClusterId> assignment,
                       std::optional<std::span<const ClusterId>> reference,
                       const ReportOptions& options = {});

}  // namespace fairkm::metrics
