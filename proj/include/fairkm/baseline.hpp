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

#pragma once

#include <cstdint>
#include <vector>

#include "fairkm/core.hpp"

namespace fairkm::baseline {

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  InitPolicy init = InitPolicy::kRandomPartition;
};

// Sensitive-attribute-blind Lloyd's K-Means over the feature matrix only.
// An empty cluster is re-seeded with the object farthest from its own
// centroid. Stops when an assignment step changes nothing or after
// max_iter iterations. The returned objective has lambda = 0 and carries the
// fairness term of the final partition for reference.
//
// If `trace` is given it receives the K-Means objective of the initial
// partition followed by the objective after every iteration.
Clustering kmeans_fit(const Dataset& data, const KMeansOptions& options,
                      std::vector<double>* trace = nullptr);

}  // namespace fairkm::baseline
