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

// CSV loading under a Schema.
//
//  * numeric non-sensitive columns are standardized (z-score by default,
//    using the sample standard deviation); constant columns become zeros;
//  * categorical non-sensitive columns are one-hot encoded, one unit
//    coordinate per observed category, categories in lexicographic order;
//  * categorical sensitive columns are dictionary-encoded over the observed
//    values in lexicographic order;
//  * numeric sensitive columns are always z-scored so that attribute weights
//    and lambda are comparable across attributes.
//
// Cells are trimmed of surrounding ASCII whitespace. An empty cell in a
// column the schema uses is an error; columns present in the file but not in
// the schema are skipped.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairkm/core.hpp"
#include "fairkm/csv.hpp"

namespace fairkm::ingest {

enum class Standardization { kZScore, kMinMax, kNone };

Standardization parse_standardization(std::string_view text);

struct IngestOptions {
  Standardization standardize = Standardization::kZScore;
  bool undersample_balance = false;
  std::uint64_t seed = 0;
};

struct ColumnEncoding {
  std::string name;
  ColumnRole role = ColumnRole::kIgnore;
  ColumnKind kind = ColumnKind::kNumeric;
  // Encoded width in the feature matrix (0 for non-feature columns).
  std::size_t width = 0;
  std::size_t offset = 0;
  std::vector<std::string> dictionary;
  // Affine map applied to numeric columns: (raw - center) / scale.
  double center = 0.0;
  double scale = 1.0;
};

struct EncodingReport {
  std::vector<ColumnEncoding> columns;
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  // Set when undersampling was requested but only one class was present.
  bool single_class_warning = false;

  nlohmann::json to_json() const;
};

struct LoadResult {
  Dataset dataset;
  EncodingReport report;
};

// Throws Error with kMissingColumn, kUnparseableNumeric, kEmptyDataset,
// kMissingCell, kInvalidSchema or kIo.
LoadResult load_csv(const std::filesystem::path& path, const Schema& schema,
                    const IngestOptions& options = {});

LoadResult load_table(const csv::Table& table, const Schema& schema,
                      const IngestOptions& options = {});

struct UndersampleResult {
  Dataset dataset;
  // True when there was nothing to balance; `dataset` is then unchanged.
  bool single_class = false;
};

// Keeps min-class-size rows of every class, drawn uniformly without
// replacement under `seed`; retained rows keep their relative order.
UndersampleResult undersample(const Dataset& data,
                              std::span<const std::uint32_t> class_labels,
                              std::uint64_t seed);

}  // namespace fairkm::ingest
