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

#include "fairkm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairkm/csv.hpp"

namespace fairkm::synthetic {
namespace {

// Embedding mixture used by kinematics_standin.
constexpr double kTypeScale = 0.3;
constexpr double kTopicScale = 0.16;
constexpr std::size_t kTopics = 4;
constexpr double kNoise = 0.1;

std::vector<double> random_direction(std::size_t dim, double norm,
                                     std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double len = 0.0;
  for (double& x : v) {
    x = gauss(rng);
    len += x * x;
  }
  len = std::sqrt(len);
  for (double& x : v) x *= norm / len;
  return v;
}

}  // namespace

Dataset two_blobs(std::size_t n, std::size_t dim, double separation,
                  double stddev, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, stddev);
  FeatureMatrix features(n, dim);
  std::vector<std::uint32_t> group(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t blob = i < n / 2 ? 0 : 1;
    group[i] = blob;
    for (std::size_t j = 0; j < dim; ++j) {
      features(i, j) = gauss(rng);
    }
    features(i, 0) += blob == 0 ? -separation / 2.0 : separation / 2.0;
  }
  Dataset data;
  data.features = std::move(features);
  data.categorical.push_back(make_categorical("group", std::move(group), 2,
                                              1.0, {"a", "b"}));
  data.source_rows.resize(n);
  std::iota(data.source_rows.begin(), data.source_rows.end(), std::size_t{0});
  return data;
}

csv::Table kinematics_standin(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> types;
  for (std::size_t t = 0; t < kKinematicsTypeCounts.size(); ++t) {
    types.insert(types.end(), kKinematicsTypeCounts[t], t);
  }
  std::shuffle(types.begin(), types.end(), rng);

  std::vector<std::vector<double>> type_offsets;
  for (std::size_t t = 0; t < kKinematicsTypeCounts.size(); ++t) {
    type_offsets.push_back(random_direction(kKinematicsDim, kTypeScale, rng));
  }
  std::vector<std::vector<double>> topic_offsets;
  for (std::size_t t = 0; t < kTopics; ++t) {
    topic_offsets.push_back(random_direction(kKinematicsDim, kTopicScale, rng));
  }
  std::uniform_int_distribution<std::size_t> topic_pick(0, kTopics - 1);
  std::normal_distribution<double> noise(0.0, kNoise);

  csv::Table table;
  for (std::size_t j = 0; j < kKinematicsDim; ++j) {
    table.header.push_back("v" + std::to_string(j));
  }
  for (std::size_t t = 0; t < kKinematicsTypeCounts.size(); ++t) {
    table.header.push_back("type" + std::to_string(t + 1));
  }
  for (std::size_t type : types) {
    const std::size_t topic = topic_pick(rng);
    std::vector<std::string> row;
    row.reserve(table.header.size());
    for (std::size_t j = 0; j < kKinematicsDim; ++j) {
      const double v =
          type_offsets[type][j] + topic_offsets[topic][j] + noise(rng);
      row.push_back(csv::format_double(v));
    }
    for (std::size_t t = 0; t < kKinematicsTypeCounts.size(); ++t) {
      row.emplace_back(t == type ? "yes" : "no");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Schema kinematics_schema() {
  Schema schema;
  for (std::size_t j = 0; j < kKinematicsDim; ++j) {
    schema.columns.push_back({"v" + std::to_string(j),
                              ColumnRole::kNonsensitive, ColumnKind::kNumeric,
                              1.0});
  }
  for (std::size_t t = 0; t < kKinematicsTypeCounts.size(); ++t) {
    schema.columns.push_back({"type" + std::to_string(t + 1),
                              ColumnRole::kSensitive, ColumnKind::kCategorical,
                              1.0});
  }
  return schema;
}

}  // namespace fairkm::synthetic
