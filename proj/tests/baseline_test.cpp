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

#include <random>

#include <gtest/gtest.h>

#include "fairkm/baseline.hpp"
#include "fairkm/synthetic.hpp"
#include "oracles.hpp"

namespace fairkm::baseline {
namespace {

TEST(KMeansTest, SingleClusterIsTotalScatter) {
  std::mt19937_64 rng(1);
  const auto data = oracle::random_dataset(rng, {50, 4, 1, 3, 0});
  const auto c = kmeans_fit(data, {1, 0, 100, InitPolicy::kRandomPartition});
  EXPECT_NEAR(c.objective.km_term, oracle::sse(data, c.assignment, 1), 1e-9);
  EXPECT_EQ(c.objective.fairness_term, 0.0);
}

TEST(KMeansTest, SseTraceIsNonIncreasing) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = oracle::random_dataset(rng, {120, 3, 1, 3, 0});
    std::vector<double> trace;
    const auto c = kmeans_fit(data, {5, seed, 100, InitPolicy::kKMeansPlusPlus},
                              &trace);
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      EXPECT_LE(trace[i], trace[i - 1] + 1e-9 * trace[i - 1]);
    }
    EXPECT_NEAR(c.objective.km_term, oracle::sse(data, c.assignment, 5),
                1e-9 * c.objective.km_term);
    EXPECT_EQ(c.objective.lambda, 0.0);
    EXPECT_EQ(c.objective.total, c.objective.km_term);
  }
}

TEST(KMeansTest, RecoversBlobsAndMatchesExhaustiveOptimum) {
  Dataset data;
  data.features = FeatureMatrix(12, 1, {0, 0.5, 1, 0.2, 0.7, 0.9,
                                        30, 30.5, 31, 30.2, 30.7, 30.9});
  data.categorical.push_back(make_categorical("s", std::vector<std::uint32_t>(12, 0), 1));
  const auto c = kmeans_fit(data, {2, 3, 100, InitPolicy::kRandomPartition});
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << 12); ++mask) {
    std::vector<ClusterId> a(12);
    for (std::size_t i = 0; i < 12; ++i) a[i] = (mask >> i) & 1u;
    best = std::min(best, oracle::sse(data, a, 2));
  }
  EXPECT_NEAR(c.objective.km_term, best, 1e-9);
}

TEST(KMeansTest, NoEmptyClustersAfterFit) {
  std::mt19937_64 rng(3);
  const auto data = oracle::random_dataset(rng, {30, 2, 1, 2, 0});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto c = kmeans_fit(data, {8, seed, 100, InitPolicy::kRandomPartition});
    std::vector<int> sizes(8, 0);
    for (auto a : c.assignment) ++sizes[a];
    for (int s : sizes) EXPECT_GT(s, 0) << "seed " << seed;
  }
}

TEST(KMeansTest, DeterministicForSeed) {
  const auto data = synthetic::two_blobs(100, 2, 4.0, 1.0, 5);
  const KMeansOptions o{3, 42, 100, InitPolicy::kKMeansPlusPlus};
  EXPECT_EQ(kmeans_fit(data, o), kmeans_fit(data, o));
}

}  // namespace
}  // namespace fairkm::baseline
