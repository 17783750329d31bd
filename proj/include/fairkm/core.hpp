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

// Domain types shared by ingest, engine, baseline, metrics and the CLI.
//
// Vocabulary: the non-sensitive attributes form the encoded feature matrix
// over which cluster coherence is measured; the sensitive attributes are kept
// separately, either dictionary-encoded (categorical) or as real values
// (numeric), and only ever enter the fairness term.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairkm {

using ClusterId = std::uint32_t;

// ---------------------------------------------------------------------------
// Schema

enum class ColumnRole { kNonsensitive, kSensitive, kBalanceClass, kIgnore };
enum class ColumnKind { kNumeric, kCategorical };

struct ColumnSpec {
  std::string name;
  ColumnRole role = ColumnRole::kNonsensitive;
  ColumnKind kind = ColumnKind::kNumeric;
  // Fairness weight; only meaningful for sensitive columns.
  double weight = 1.0;

  bool operator==(const ColumnSpec&) const = default;
};

struct Schema {
  std::vector<ColumnSpec> columns;

  // Throws Error(kInvalidSchema). Zero sensitive columns are accepted only
  // when `require_sensitive` is false (baseline-only runs).
  void validate(bool require_sensitive) const;

  const ColumnSpec* find(std::string_view name) const;
  std::vector<std::string> sensitive_names() const;

  bool operator==(const Schema&) const = default;
};

// ---------------------------------------------------------------------------
// Dataset

// Dense row-major n x d matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct CategoricalAttribute {
  std::string name;
  double weight = 1.0;
  // Per-object value index into `dictionary`.
  std::vector<std::uint32_t> codes;
  std::vector<std::string> dictionary;
  // Dataset-level count and fractional representation per value.
  std::vector<std::int64_t> value_counts;
  std::vector<double> fractions;

  std::size_t domain_size() const { return dictionary.size(); }
};

struct NumericAttribute {
  std::string name;
  double weight = 1.0;
  std::vector<double> values;
  double mean = 0.0;
};

struct Dataset {
  FeatureMatrix features;
  std::vector<CategoricalAttribute> categorical;
  std::vector<NumericAttribute> numeric;
  // Row index in the source file for every object (survives undersampling).
  std::vector<std::size_t> source_rows;
  // Balance-class labels, empty when the schema has no balance_class column.
  std::vector<std::uint32_t> class_labels;
  std::vector<std::string> class_dictionary;

  std::size_t n_objects() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }

  // Throws Error(kInvalidArgument) on any broken invariant.
  void validate() const;
};

// Builds a categorical attribute from value codes, deriving the dataset
// counts and fractions. Dictionary entries default to "0", "1", ...
CategoricalAttribute make_categorical(std::string name,
                                      std::vector<std::uint32_t> codes,
                                      std::size_t domain_size,
                                      double weight = 1.0,
                                      std::vector<std::string> dictionary = {});

NumericAttribute make_numeric(std::string name, std::vector<double> values,
                              double weight = 1.0);

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

// Copy of `data` keeping only the listed rows, in the given order. Dataset
// fractions and means are recomputed; dictionaries are preserved.
Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows);

// Copy of `data` keeping only the sensitive attributes named in `names`.
Dataset restrict_sensitive(const Dataset& data,
                           std::span<const std::string> names);

// ---------------------------------------------------------------------------
// Configuration

enum class InitPolicy { kRandomPartition, kKMeansPlusPlus };
enum class OrderPolicy { kDatasetOrder, kShuffledPerIteration };

// Either a fixed nonnegative value or the (n / k)^2 heuristic.
class Lambda {
 public:
  static Lambda automatic() { return Lambda(); }
  static Lambda fixed(double value);

  bool is_auto() const { return !value_.has_value(); }
  double resolve(std::size_t n_objects, std::size_t k) const;
  std::string to_string() const;
  // Accepts "auto" or a nonnegative real.
  static Lambda parse(std::string_view text);

  bool operator==(const Lambda&) const = default;

 private:
  std::optional<double> value_;
};

struct FairKMConfig {
  std::size_t k = 2;
  Lambda lambda = Lambda::automatic();
  std::size_t max_iter = 30;
  std::uint64_t seed = 0;
  InitPolicy init = InitPolicy::kRandomPartition;
  OrderPolicy order = OrderPolicy::kDatasetOrder;
};

// ---------------------------------------------------------------------------
// Cluster state

// Per-cluster sufficient statistics, kept exactly in step with the
// assignment vector by apply_move.
class ClusterState {
 public:
  ClusterState() = default;
  // Builds all statistics from scratch. Throws kInvalidArgument when the
  // assignment length or a cluster id does not fit `data` / `k`.
  ClusterState(const Dataset& data, std::size_t k,
               std::vector<ClusterId> assignment);

  std::size_t k() const { return sizes_.size(); }
  std::size_t n_objects() const { return assignment_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<const ClusterId> assignment() const { return assignment_; }
  ClusterId cluster_of(std::size_t x) const { return assignment_[x]; }

  std::int64_t size(ClusterId c) const { return sizes_[c]; }
  std::span<const double> sum(ClusterId c) const {
    return {sums_.data() + c * dim_, dim_};
  }
  double sumsq(ClusterId c) const { return sumsq_[c]; }
  std::span<const std::int64_t> counts(std::size_t attr, ClusterId c) const {
    const std::size_t m = domain_sizes_[attr];
    return {counts_[attr].data() + c * m, m};
  }
  double numeric_sum(std::size_t attr, ClusterId c) const {
    return numeric_sums_[attr][c];
  }
  std::size_t categorical_count() const { return counts_.size(); }
  std::size_t numeric_count() const { return numeric_sums_.size(); }

  // Mean of the cluster's members over the feature space. Throws
  // kInvalidArgument for an empty cluster.
  std::vector<double> prototype(ClusterId c) const;

  // Moves object x from `from` to `to`, updating every statistic. Throws
  // kBadMove unless x is currently in `from` and from != to.
  void apply_move(const Dataset& data, std::size_t x, ClusterId from,
                  ClusterId to);

  // Writable view of one count vector; exists so tests can inject faults.
  std::span<std::int64_t> mutable_counts(std::size_t attr, ClusterId c) {
    const std::size_t m = domain_sizes_[attr];
    return {counts_[attr].data() + c * m, m};
  }

 private:
  std::size_t dim_ = 0;
  std::vector<ClusterId> assignment_;
  std::vector<std::int64_t> sizes_;
  std::vector<double> sums_;
  std::vector<double> sumsq_;
  std::vector<std::size_t> domain_sizes_;
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::vector<double>> numeric_sums_;
};

// One entry per invariant that fails against a brute-force recomputation of
// the statistics from the assignment vector.
struct StateViolation {
  std::string field;  // "size", "sum", "sumsq", "counts", "numeric_sum", ...
  std::optional<ClusterId> cluster;
  std::string attribute;
  std::optional<std::size_t> value;
  std::string message;
};

std::vector<StateViolation> validate_state(const Dataset& data,
                                           const ClusterState& state,
                                           double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Results

struct ObjectiveBreakdown {
  double km_term = 0.0;
  // Raw fairness term, before multiplication by lambda.
  double fairness_term = 0.0;
  double lambda = 0.0;
  double total = 0.0;

  bool operator==(const ObjectiveBreakdown&) const = default;
};

struct Clustering {
  std::size_t k = 0;
  std::vector<ClusterId> assignment;
  ObjectiveBreakdown objective;
  std::size_t iterations_run = 0;
  bool converged = false;

  bool operator==(const Clustering&) const = default;
};

}  // namespace fairkm
