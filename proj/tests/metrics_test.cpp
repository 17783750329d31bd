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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairkm/error.hpp"
#include "fairkm/metrics.hpp"
#include "fairkm/synthetic.hpp"
#include "oracles.hpp"

namespace fairkm::metrics {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected fairkm::Error";
  return ErrorCode::kInvalidArgument;
}

TEST(DevOTest, MatchesPairEnumeration) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 150;
    const auto a = oracle::random_assignment(rng, n, 1 + rng() % 6);
    const auto b = oracle::random_assignment(rng, n, 1 + rng() % 6);
    EXPECT_EQ(dev_o(a, b), oracle::dev_o(a, b));
  }
}

TEST(DevOTest, KnownValues) {
  const std::vector<ClusterId> a = {0, 0, 1, 1};
  const std::vector<ClusterId> b = {0, 1, 0, 1};
  EXPECT_DOUBLE_EQ(dev_o(a, a), 0.0);
  // Relabelling does not matter.
  const std::vector<ClusterId> a2 = {1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(dev_o(a, a2), 0.0);
  // {0,0,0,0} vs all-distinct disagrees on every pair.
  const std::vector<ClusterId> same = {0, 0, 0, 0};
  const std::vector<ClusterId> distinct = {0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(dev_o(same, distinct), 1.0);
  EXPECT_DOUBLE_EQ(dev_o(a, b), 4.0 / 6.0);
  EXPECT_EQ(code_of([&] { dev_o(a, std::vector<ClusterId>{0}); }),
            ErrorCode::kLengthMismatch);
}

TEST(DevCTest, KnownValues) {
  EXPECT_DOUBLE_EQ(dev_c({{0.0, 0.0}}, {{3.0, 4.0}}), 5.0);
  const std::vector<Centroid> c = {{1, 2}, {5, 5}, {-1, 0}};
  EXPECT_DOUBLE_EQ(dev_c(c, c), 0.0);
  const std::vector<Centroid> shuffled = {{5, 5}, {-1, 0}, {1, 2}};
  EXPECT_DOUBLE_EQ(dev_c(c, shuffled), 0.0);
  // Unequal sizes: leftovers are free.
  EXPECT_DOUBLE_EQ(dev_c(c, {{5, 5}}), 0.0);
  EXPECT_DOUBLE_EQ(dev_c_dot({{1, 2}}, {{3, 4}, {1, 0}}), 11.0 + 1.0);
}

TEST(DevCTest, MatchesExhaustiveMatching) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ka = 1 + rng() % 6, kb = 1 + rng() % 6, d = 1 + rng() % 4;
    std::vector<Centroid> a(ka, Centroid(d)), b(kb, Centroid(d));
    for (auto& c : a) for (auto& v : c) v = g(rng);
    for (auto& c : b) for (auto& v : c) v = g(rng);
    EXPECT_NEAR(dev_c(a, b), oracle::dev_c(a, b), 1e-12);
  }
}

TEST(CentroidsTest, SkipEmptyClusters) {
  Dataset data;
  data.features = FeatureMatrix(3, 1, {1.0, 3.0, 10.0});
  const std::vector<ClusterId> a = {0, 0, 2};
  const auto c = centroids(data, a);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_DOUBLE_EQ(c[0][0], 2.0);
  EXPECT_DOUBLE_EQ(c[1][0], 10.0);
}

TEST(FairnessMetricsTest, TinyFixturePureClusters) {
  const auto data = oracle::tiny_fixture();
  const std::vector<ClusterId> a = {0, 0, 0, 1, 1, 1};
  const auto r = fairness_metrics(data, a);
  ASSERT_EQ(r.per_attribute.size(), 1u);
  EXPECT_NEAR(r.mean.ae, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(r.mean.me, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(r.mean.aw, 0.5, 1e-15);
  EXPECT_NEAR(r.mean.mw, 0.5, 1e-15);
}

TEST(FairnessMetricsTest, PerfectlyMixedClustersScoreZero) {
  const auto data = oracle::tiny_fixture();
  const std::vector<ClusterId> a = {0, 1, 2, 0, 1, 2};
  const auto r = fairness_metrics(data, a);
  EXPECT_EQ(r.mean, FairnessScores{});
}

TEST(FairnessMetricsTest, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    oracle::RandomShape shape;
    shape.n = 3 + rng() % 80;
    shape.categorical = 1 + rng() % 3;
    shape.max_domain = 6;
    const auto data = oracle::random_dataset(rng, shape);
    const std::size_t k = 1 + rng() % 6;
    const auto a = oracle::random_assignment(rng, shape.n, k);
    const auto r = fairness_metrics(data, a);
    FairnessScores mean;
    for (std::size_t s = 0; s < data.categorical.size(); ++s) {
      const auto expect =
          oracle::fairness_scores(data, a, k, data.categorical[s]);
      const auto& got = r.per_attribute[s].scores;
      EXPECT_NEAR(got.ae, expect.ae, 1e-12);
      EXPECT_NEAR(got.aw, expect.aw, 1e-12);
      EXPECT_NEAR(got.me, expect.me, 1e-12);
      EXPECT_NEAR(got.mw, expect.mw, 1e-12);
      EXPECT_LE(got.ae, got.me + 1e-15);
      EXPECT_LE(got.aw, got.mw + 1e-15);
      mean.ae += expect.ae;
      mean.mw += expect.mw;
    }
    const double m = static_cast<double>(data.categorical.size());
    EXPECT_NEAR(r.mean.ae, mean.ae / m, 1e-12);
    EXPECT_NEAR(r.mean.mw, mean.mw / m, 1e-12);
  }
}

TEST(FairnessMetricsTest, ValueOrderOverride) {
  Dataset data;
  data.features = FeatureMatrix(4, 1, {0, 1, 2, 3});
  data.categorical.push_back(
      make_categorical("s", {0, 1, 2, 2}, 3, 1.0, {"lo", "mid", "hi"}));
  const std::vector<ClusterId> a = {0, 1, 1, 1};
  FairnessOptions o;
  o.value_order["s"] = {"hi", "lo", "mid"};
  // Reordering changes W1 but not the Euclidean scores.
  const auto base = fairness_metrics(data, a);
  const auto reordered = fairness_metrics(data, a, o);
  EXPECT_DOUBLE_EQ(base.mean.ae, reordered.mean.ae);
  EXPECT_NE(base.mean.aw, reordered.mean.aw);
}

TEST(FairnessMetricsTest, RequiresCategoricalAttribute) {
  Dataset data;
  data.features = FeatureMatrix(2, 1, {0, 1});
  const std::vector<ClusterId> a = {0, 1};
  EXPECT_EQ(code_of([&] { fairness_metrics(data, a); }),
            ErrorCode::kNoCategoricalSensitive);
}

TEST(WassersteinTest, CdfDifference) {
  const std::vector<double> p = {1.0, 0.0, 0.0};
  const std::vector<double> q = {0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(wasserstein_1d(p, q), 2.0);
  EXPECT_DOUBLE_EQ(wasserstein_1d(p, p), 0.0);
}

TEST(SilhouetteTest, MatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng() % 60;
    const auto data = oracle::random_dataset(rng, {n, 3, 1, 2, 0});
    const std::size_t k = 2 + rng() % 4;
    auto a = oracle::random_assignment(rng, n, k);
    a[0] = 0;
    a[1] = 1;
    EXPECT_NEAR(silhouette(data, a), oracle::silhouette(data, a, k), 1e-12);
  }
}

TEST(SilhouetteTest, SeparatedBlobsScoreHigh) {
  const auto data = synthetic::two_blobs(200, 2, 20.0, 1.0, 1);
  std::vector<ClusterId> a(200);
  for (std::size_t i = 0; i < 200; ++i) a[i] = i < 100 ? 0 : 1;
  EXPECT_GT(silhouette(data, a), 0.9);
}

TEST(SilhouetteTest, SampledIsDeterministicAndClose) {
  const auto data = synthetic::two_blobs(400, 2, 6.0, 1.0, 2);
  std::vector<ClusterId> a(400);
  for (std::size_t i = 0; i < 400; ++i) a[i] = i < 200 ? 0 : 1;
  const double exact = silhouette(data, a);
  const double s1 = silhouette(data, a, 100, 7);
  EXPECT_EQ(s1, silhouette(data, a, 100, 7));
  EXPECT_NEAR(s1, exact, 0.1);
}

TEST(SilhouetteTest, SingleClusterIsAnError) {
  const auto data = oracle::tiny_fixture();
  const std::vector<ClusterId> a(6, 0);
  EXPECT_EQ(code_of([&] { silhouette(data, a); }), ErrorCode::kSingleCluster);
}

TEST(ReportTest, IdenticalReferenceGivesZeroDeviation) {
  const auto data = synthetic::two_blobs(60, 2, 5.0, 1.0, 3);
  std::mt19937_64 rng(5);
  const auto a = oracle::random_assignment(rng, 60, 3);
  const auto r = evaluate(data, a, std::span<const ClusterId>(a));
  EXPECT_EQ(r.dev_c, 0.0);
  EXPECT_EQ(r.dev_o, 0.0);
  EXPECT_NEAR(r.co, oracle::sse(data, a, 3), 1e-9);
  const auto doc = r.to_json();
  EXPECT_EQ(doc["spec_version"], "1.0");
  EXPECT_TRUE(doc.contains("fairness"));
}

TEST(ReportTest, SingleClusterOmitsSilhouette) {
  const auto data = oracle::tiny_fixture();
  const std::vector<ClusterId> a(6, 0);
  const auto r = evaluate(data, a, std::nullopt);
  EXPECT_FALSE(r.sh.has_value());
  EXPECT_FALSE(r.dev_o.has_value());
  EXPECT_EQ(r.fairness.mean, FairnessScores{});
}

}  // namespace
}  // namespace fairkm::metrics
