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

// Seeded synthetic datasets for tests, demos and desk-scale benchmarks.

#pragma once

#include <array>
#include <cstdint>

#include "fairkm/core.hpp"
#include "fairkm/csv.hpp"

namespace fairkm::synthetic {

// Two isotropic Gaussian blobs in `dim` dimensions, centred at
// -separation/2 and +separation/2 along the first axis, with a categorical
// sensitive attribute "group" equal to the blob index. The first half of the
// rows belong to blob 0.
Dataset two_blobs(std::size_t n, std::size_t dim, double separation,
                  double stddev, std::uint64_t seed);

// Problem-type counts of the 161-problem kinematics collection.
inline constexpr std::array<std::size_t, 5> kKinematicsTypeCounts = {
    60, 36, 15, 31, 19};
inline constexpr std::size_t kKinematicsDim = 100;

// A table in the kinematics file layout: columns v0..v99 hold a
// 100-dimensional document embedding and type1..type5 are binary "yes"/"no"
// problem-type indicators with the collection's type counts. Embeddings mix
// a type-dependent offset, a type-independent topic offset and isotropic
// noise, so type membership is only partly visible in the features. Values
// sit on a document-embedding scale and are meant to be loaded unstandardized.
csv::Table kinematics_standin(std::uint64_t seed);

// Schema for the table above (type columns sensitive and categorical).
Schema kinematics_schema();

}  // namespace fairkm::synthetic
