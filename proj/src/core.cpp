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

#include "fairkm/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "fairkm/error.hpp"

namespace fairkm {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSchema: return "InvalidSchema";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kUnparseableNumeric: return "UnparseableNumeric";
    case ErrorCode::kMissingCell: return "MissingCell";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kBadMove: return "BadMove";
    case ErrorCode::kSingleCluster: return "SingleCluster";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNoCategoricalSensitive: return "NoCategoricalSensitive";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Schema

void Schema::validate(bool require_sensitive) const {
  std::size_t nonsensitive = 0;
  std::size_t sensitive = 0;
  std::size_t balance = 0;
  std::set<std::string> names;
  for (const auto& col : columns) {
    if (col.name.empty()) {
      throw Error(ErrorCode::kInvalidSchema, "schema column with empty name");
    }
    if (!names.insert(col.name).second) {
      throw Error(ErrorCode::kInvalidSchema,
                  fmt::format("duplicate schema column '{}'", col.name));
    }
    switch (col.role) {
      case ColumnRole::kNonsensitive: ++nonsensitive; break;
      case ColumnRole::kSensitive:
        ++sensitive;
        if (!(col.weight > 0.0) || !std::isfinite(col.weight)) {
          throw Error(ErrorCode::kInvalidSchema,
                      fmt::format("sensitive column '{}' needs weight > 0",
                                  col.name));
        }
        break;
      case ColumnRole::kBalanceClass: ++balance; break;
      case ColumnRole::kIgnore: break;
    }
  }
  if (nonsensitive == 0) {
    throw Error(ErrorCode::kInvalidSchema,
                "schema needs at least one nonsensitive column");
  }
  if (require_sensitive && sensitive == 0) {
    throw Error(ErrorCode::kInvalidSchema,
                "schema needs at least one sensitive column");
  }
  if (balance > 1) {
    throw Error(ErrorCode::kInvalidSchema,
                "schema allows at most one balance_class column");
  }
}

const ColumnSpec* Schema::find(std::string_view name) const {
  for (const auto& col : columns) {
    if (col.name == name) return &col;
  }
  return nullptr;
}

std::vector<std::string> Schema::sensitive_names() const {
  std::vector<std::string> out;
  for (const auto& col : columns) {
    if (col.role == ColumnRole::kSensitive) out.push_back(col.name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("feature matrix {}x{} given {} values", rows_,
                            cols_, data_.size()));
  }
}

void Dataset::validate() const {
  const std::size_t n = n_objects();
  if (!source_rows.empty() && source_rows.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "source_rows length mismatch");
  }
  if (!class_labels.empty() && class_labels.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "class_labels length mismatch");
  }
  for (const auto& attr : categorical) {
    if (attr.codes.size() != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("attribute '{}' has {} codes for {} objects",
                              attr.name, attr.codes.size(), n));
    }
    const std::size_t m = attr.domain_size();
    if (attr.fractions.size() != m || attr.value_counts.size() != m) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("attribute '{}' domain bookkeeping mismatch",
                              attr.name));
    }
    for (auto code : attr.codes) {
      if (code >= m) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("attribute '{}' code {} outside domain {}",
                                attr.name, code, m));
      }
    }
    double total = 0.0;
    for (double f : attr.fractions) {
      if (f < 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("attribute '{}' has a negative fraction",
                                attr.name));
      }
      total += f;
    }
    if (n > 0 && std::abs(total - 1.0) > 1e-12) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("attribute '{}' fractions sum to {}", attr.name,
                              total));
    }
    if (!(attr.weight > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("attribute '{}' needs weight > 0", attr.name));
    }
  }
  for (const auto& attr : numeric) {
    if (attr.values.size() != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("attribute '{}' has {} values for {} objects",
                              attr.name, attr.values.size(), n));
    }
    if (!(attr.weight > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("attribute '{}' needs weight > 0", attr.name));
    }
  }
}

CategoricalAttribute make_categorical(std::string name,
                                      std::vector<std::uint32_t> codes,
                                      std::size_t domain_size, double weight,
                                      std::vector<std::string> dictionary) {
  CategoricalAttribute attr;
  attr.name = std::move(name);
  attr.weight = weight;
  if (dictionary.empty()) {
    for (std::size_t v = 0; v < domain_size; ++v) {
      dictionary.push_back(std::to_string(v));
    }
  }
  if (dictionary.size() != domain_size) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("attribute '{}': dictionary size {} != domain {}",
                            attr.name, dictionary.size(), domain_size));
  }
  attr.dictionary = std::move(dictionary);
  attr.value_counts.assign(domain_size, 0);
  for (auto code : codes) {
    if (code >= domain_size) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("attribute '{}' code {} outside domain {}",
                              attr.name, code, domain_size));
    }
    ++attr.value_counts[code];
  }
  attr.codes = std::move(codes);
  attr.fractions.assign(domain_size, 0.0);
  if (!attr.codes.empty()) {
    const auto n = static_cast<double>(attr.codes.size());
    for (std::size_t v = 0; v < domain_size; ++v) {
      attr.fractions[v] = static_cast<double>(attr.value_counts[v]) / n;
    }
  }
  return attr;
}

NumericAttribute make_numeric(std::string name, std::vector<double> values,
                              double weight) {
  NumericAttribute attr;
  attr.name = std::move(name);
  attr.weight = weight;
  attr.values = std::move(values);
  if (!attr.values.empty()) {
    attr.mean = std::accumulate(attr.values.begin(), attr.values.end(), 0.0) /
                static_cast<double>(attr.values.size());
  }
  return attr;
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  const std::size_t d = data.dim();
  FeatureMatrix features(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= data.n_objects()) {
      throw Error(ErrorCode::kInvalidArgument, "select_rows index out of range");
    }
    auto src = data.features.row(rows[i]);
    std::copy(src.begin(), src.end(), features.row(i).begin());
  }
  out.features = std::move(features);
  for (const auto& attr : data.categorical) {
    std::vector<std::uint32_t> codes;
    codes.reserve(rows.size());
    for (auto r : rows) codes.push_back(attr.codes[r]);
    out.categorical.push_back(make_categorical(attr.name, std::move(codes),
                                               attr.domain_size(), attr.weight,
                                               attr.dictionary));
  }
  for (const auto& attr : data.numeric) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (auto r : rows) values.push_back(attr.values[r]);
    out.numeric.push_back(make_numeric(attr.name, std::move(values),
                                       attr.weight));
  }
  for (auto r : rows) {
    out.source_rows.push_back(data.source_rows.empty() ? r
                                                       : data.source_rows[r]);
  }
  if (!data.class_labels.empty()) {
    for (auto r : rows) out.class_labels.push_back(data.class_labels[r]);
  }
  out.class_dictionary = data.class_dictionary;
  return out;
}

Dataset restrict_sensitive(const Dataset& data,
                           std::span<const std::string> names) {
  auto wanted = [&](const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
  };
  for (const auto& name : names) {
    bool found = false;
    for (const auto& a : data.categorical) found = found || a.name == name;
    for (const auto& a : data.numeric) found = found || a.name == name;
    if (!found) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("unknown sensitive attribute '{}'", name));
    }
  }
  Dataset out = data;
  std::erase_if(out.categorical,
                [&](const CategoricalAttribute& a) { return !wanted(a.name); });
  std::erase_if(out.numeric,
                [&](const NumericAttribute& a) { return !wanted(a.name); });
  return out;
}

// ---------------------------------------------------------------------------
// Lambda

Lambda Lambda::fixed(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("lambda must be a finite nonnegative real, got {}",
                            value));
  }
  Lambda out;
  out.value_ = value;
  return out;
}

double Lambda::resolve(std::size_t n_objects, std::size_t k) const {
  if (value_) return *value_;
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const double ratio =
      static_cast<double>(n_objects) / static_cast<double>(k);
  return ratio * ratio;
}

std::string Lambda::to_string() const {
  return value_ ? fmt::format("{}", *value_) : std::string("auto");
}

Lambda Lambda::parse(std::string_view text) {
  if (text == "auto" || text == "Auto" || text == "AUTO") return automatic();
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("cannot parse lambda '{}'", text));
  }
  return fixed(value);
}

// ---------------------------------------------------------------------------
// ClusterState

ClusterState::ClusterState(const Dataset& data, std::size_t k,
                           std::vector<ClusterId> assignment)
    : dim_(data.dim()), assignment_(std::move(assignment)) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const std::size_t n = data.n_objects();
  if (assignment_.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("assignment has {} entries for {} objects",
                            assignment_.size(), n));
  }
  sizes_.assign(k, 0);
  sums_.assign(k * dim_, 0.0);
  sumsq_.assign(k, 0.0);
  for (const auto& attr : data.categorical) {
    domain_sizes_.push_back(attr.domain_size());
    counts_.emplace_back(k * attr.domain_size(), 0);
  }
  numeric_sums_.assign(data.numeric.size(), std::vector<double>(k, 0.0));

  for (std::size_t x = 0; x < n; ++x) {
    const ClusterId c = assignment_[x];
    if (c >= k) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("object {} assigned to cluster {} >= k={}", x, c,
                              k));
    }
    ++sizes_[c];
    auto row = data.features.row(x);
    double* sum = sums_.data() + c * dim_;
    double sq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      sum[j] += row[j];
      sq += row[j] * row[j];
    }
    sumsq_[c] += sq;
    for (std::size_t a = 0; a < counts_.size(); ++a) {
      ++counts_[a][c * domain_sizes_[a] + data.categorical[a].codes[x]];
    }
    for (std::size_t a = 0; a < numeric_sums_.size(); ++a) {
      numeric_sums_[a][c] += data.numeric[a].values[x];
    }
  }
}

std::vector<double> ClusterState::prototype(ClusterId c) const {
  if (c >= k()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("cluster {} out of range", c));
  }
  if (sizes_[c] == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("cluster {} is empty and has no prototype", c));
  }
  std::vector<double> out(sum(c).begin(), sum(c).end());
  const auto size = static_cast<double>(sizes_[c]);
  for (double& v : out) v /= size;
  return out;
}

void ClusterState::apply_move(const Dataset& data, std::size_t x,
                              ClusterId from, ClusterId to) {
  if (x >= assignment_.size() || from >= k() || to >= k() ||
      assignment_[x] != from || from == to) {
    throw Error(ErrorCode::kBadMove,
                fmt::format("invalid move of object {} from {} to {}", x, from,
                            to));
  }
  assignment_[x] = to;
  --sizes_[from];
  ++sizes_[to];
  auto row = data.features.row(x);
  double* src = sums_.data() + from * dim_;
  double* dst = sums_.data() + to * dim_;
  double sq = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    src[j] -= row[j];
    dst[j] += row[j];
    sq += row[j] * row[j];
  }
  sumsq_[from] -= sq;
  sumsq_[to] += sq;
  // A cluster that just became empty gets exact zeros rather than the
  // rounding residue of the subtractions above.
  if (sizes_[from] == 0) {
    std::fill(src, src + dim_, 0.0);
    sumsq_[from] = 0.0;
  }
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    const std::size_t m = domain_sizes_[a];
    const auto code = data.categorical[a].codes[x];
    --counts_[a][from * m + code];
    ++counts_[a][to * m + code];
  }
  for (std::size_t a = 0; a < numeric_sums_.size(); ++a) {
    const double v = data.numeric[a].values[x];
    numeric_sums_[a][from] -= v;
    numeric_sums_[a][to] += v;
    if (sizes_[from] == 0) numeric_sums_[a][from] = 0.0;
  }
}

std::vector<StateViolation> validate_state(const Dataset& data,
                                           const ClusterState& state,
                                           double tolerance) {
  std::vector<StateViolation> out;
  const std::size_t n = data.n_objects();
  const std::size_t k = state.k();
  const std::size_t d = data.dim();
  if (state.n_objects() != n || state.dim() != d ||
      state.categorical_count() != data.categorical.size() ||
      state.numeric_count() != data.numeric.size()) {
    out.push_back({"shape", std::nullopt, "", std::nullopt,
                   "state dimensions do not match dataset"});
    return out;
  }

  std::vector<std::int64_t> sizes(k, 0);
  std::vector<double> sums(k * d, 0.0);
  std::vector<double> sumsq(k, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const ClusterId c = state.cluster_of(x);
    if (c >= k) {
      out.push_back({"assignment", c, "", std::nullopt,
                     fmt::format("object {} has cluster id {} >= k", x, c)});
      return out;
    }
    ++sizes[c];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = data.features(x, j);
      sums[c * d + j] += v;
      sumsq[c] += v * v;
    }
  }
  auto close = [tolerance](double a, double b) {
    return std::abs(a - b) <= tolerance;
  };
  for (ClusterId c = 0; c < k; ++c) {
    if (sizes[c] != state.size(c)) {
      out.push_back({"size", c, "", std::nullopt,
                     fmt::format("cluster {} size {} != recomputed {}", c,
                                 state.size(c), sizes[c])});
    }
    auto sum = state.sum(c);
    for (std::size_t j = 0; j < d; ++j) {
      if (!close(sum[j], sums[c * d + j])) {
        out.push_back({"sum", c, "", j,
                       fmt::format("cluster {} sum[{}] {} != recomputed {}", c,
                                   j, sum[j], sums[c * d + j])});
      }
    }
    if (!close(state.sumsq(c), sumsq[c])) {
      out.push_back({"sumsq", c, "", std::nullopt,
                     fmt::format("cluster {} sumsq {} != recomputed {}", c,
                                 state.sumsq(c), sumsq[c])});
    }
  }
  for (std::size_t a = 0; a < data.categorical.size(); ++a) {
    const auto& attr = data.categorical[a];
    const std::size_t m = attr.domain_size();
    std::vector<std::int64_t> counts(k * m, 0);
    for (std::size_t x = 0; x < n; ++x) {
      ++counts[state.cluster_of(x) * m + attr.codes[x]];
    }
    for (ClusterId c = 0; c < k; ++c) {
      auto have = state.counts(a, c);
      for (std::size_t v = 0; v < m; ++v) {
        if (have[v] != counts[c * m + v]) {
          out.push_back({"counts", c, attr.name, v,
                         fmt::format("cluster {} attribute '{}' value '{}' "
                                     "count {} != recomputed {}",
                                     c, attr.name, attr.dictionary[v], have[v],
                                     counts[c * m + v])});
        }
      }
    }
  }
  for (std::size_t a = 0; a < data.numeric.size(); ++a) {
    const auto& attr = data.numeric[a];
    std::vector<double> sums_s(k, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      sums_s[state.cluster_of(x)] += attr.values[x];
    }
    for (ClusterId c = 0; c < k; ++c) {
      if (!close(state.numeric_sum(a, c), sums_s[c])) {
        out.push_back({"numeric_sum", c, attr.name, std::nullopt,
                       fmt::format("cluster {} attribute '{}' sum {} != "
                                   "recomputed {}",
                                   c, attr.name, state.numeric_sum(a, c),
                                   sums_s[c])});
      }
    }
  }
  std::int64_t total = 0;
  for (ClusterId c = 0; c < k; ++c) total += state.size(c);
  if (total != static_cast<std::int64_t>(n)) {
    out.push_back({"size_total", std::nullopt, "", std::nullopt,
                   fmt::format("cluster sizes sum to {} for {} objects", total,
                               n)});
  }
  return out;
}

}  // namespace fairkm
