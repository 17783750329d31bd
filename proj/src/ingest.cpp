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

#include "fairkm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <fmt/format.h>

#include "fairkm/error.hpp"
#include "fairkm/io.hpp"

namespace fairkm::ingest {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_numeric(std::string_view cell, std::size_t row,
                     const std::string& column) {
  double value = 0.0;
  // from_chars rejects a leading '+', which spreadsheets sometimes emit.
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::kUnparseableNumeric,
                fmt::format("UnparseableNumeric(row={}, col={}): '{}'", row,
                            column, cell));
  }
  return value;
}

struct Affine {
  double center = 0.0;
  double scale = 1.0;
};

// Mean and sample standard deviation; constant columns get scale 0, which
// callers turn into all-zero output.
Affine zscore_params(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd};
}

Affine minmax_params(std::span<const double> values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi - *lo};
}

std::vector<double> apply_affine(std::span<const double> values,
                                 const Affine& p) {
  std::vector<double> out(values.size(), 0.0);
  if (p.scale > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[i] = (values[i] - p.center) / p.scale;
    }
  }
  return out;
}

// Dictionary over observed values, lexicographically sorted.
std::vector<std::string> build_dictionary(
    const std::vector<std::string>& cells) {
  std::set<std::string> distinct(cells.begin(), cells.end());
  return {distinct.begin(), distinct.end()};
}

std::vector<std::uint32_t> encode(const std::vector<std::string>& cells,
                                  const std::vector<std::string>& dictionary) {
  std::map<std::string_view, std::uint32_t> index;
  for (std::size_t i = 0; i < dictionary.size(); ++i) {
    index.emplace(dictionary[i], static_cast<std::uint32_t>(i));
  }
  std::vector<std::uint32_t> codes;
  codes.reserve(cells.size());
  for (const auto& cell : cells) codes.push_back(index.at(cell));
  return codes;
}

}  // namespace

Standardization parse_standardization(std::string_view text) {
  if (text == "zscore") return Standardization::kZScore;
  if (text == "minmax") return Standardization::kMinMax;
  if (text == "none") return Standardization::kNone;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown standardization '{}'", text));
}

nlohmann::json EncodingReport::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns) {
    nlohmann::json entry{{"name", c.name},
                         {"role", fairkm::to_string(c.role)},
                         {"kind", fairkm::to_string(c.kind)},
                         {"width", c.width},
                         {"offset", c.offset}};
    if (!c.dictionary.empty()) entry["dictionary"] = c.dictionary;
    if (c.kind == ColumnKind::kNumeric && c.role != ColumnRole::kIgnore) {
      entry["center"] = c.center;
      entry["scale"] = c.scale;
    }
    cols.push_back(std::move(entry));
  }
  return {{"spec_version", kReportVersion},
          {"rows_read", rows_read},
          {"rows_kept", rows_kept},
          {"single_class_warning", single_class_warning},
          {"columns", std::move(cols)}};
}

LoadResult load_table(const csv::Table& table, const Schema& schema,
                      const IngestOptions& options) {
  schema.validate(/*require_sensitive=*/false);
  const ColumnSpec* balance_col = nullptr;
  for (const auto& col : schema.columns) {
    if (col.role == ColumnRole::kBalanceClass) balance_col = &col;
  }
  if (options.undersample_balance && balance_col == nullptr) {
    throw Error(ErrorCode::kInvalidSchema,
                "undersampling requested but the schema has no "
                "balance_class column");
  }

  std::map<std::string, std::size_t, std::less<>> header_index;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    header_index.emplace(std::string(trim(table.header[i])), i);
  }
  for (const auto& col : schema.columns) {
    if (col.role != ColumnRole::kIgnore && !header_index.contains(col.name)) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("MissingColumn: '{}' not in CSV header",
                              col.name));
    }
  }
  const std::size_t n = table.rows.size();
  if (n == 0) {
    throw Error(ErrorCode::kEmptyDataset, "EmptyDataset: CSV has no data rows");
  }

  // Trimmed cells of one column; errors use 1-based data-row numbers.
  auto column_cells = [&](const ColumnSpec& col) {
    const std::size_t j = header_index.at(col.name);
    std::vector<std::string> cells;
    cells.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      auto cell = trim(table.rows[r][j]);
      if (cell.empty()) {
        throw Error(ErrorCode::kMissingCell,
                    fmt::format("MissingCell(row={}, col={})", r + 1,
                                col.name));
      }
      cells.emplace_back(cell);
    }
    return cells;
  };
  auto column_numbers = [&](const ColumnSpec& col,
                            const std::vector<std::string>& cells) {
    std::vector<double> values;
    values.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      values.push_back(parse_numeric(cells[r], r + 1, col.name));
    }
    return values;
  };

  EncodingReport report;
  report.rows_read = n;

  // Encoded feature columns in schema order.
  std::vector<std::vector<double>> feature_columns;
  Dataset data;

  for (const auto& col : schema.columns) {
    ColumnEncoding enc;
    enc.name = col.name;
    enc.role = col.role;
    enc.kind = col.kind;
    if (col.role == ColumnRole::kIgnore) {
      report.columns.push_back(std::move(enc));
      continue;
    }
    const auto cells = column_cells(col);
    switch (col.role) {
      case ColumnRole::kNonsensitive: {
        enc.offset = feature_columns.size();
        if (col.kind == ColumnKind::kNumeric) {
          const auto raw = column_numbers(col, cells);
          Affine p;
          switch (options.standardize) {
            case Standardization::kZScore: p = zscore_params(raw); break;
            case Standardization::kMinMax: p = minmax_params(raw); break;
            case Standardization::kNone: p = {0.0, 1.0}; break;
          }
          enc.center = p.center;
          enc.scale = p.scale;
          enc.width = 1;
          feature_columns.push_back(apply_affine(raw, p));
        } else {
          enc.dictionary = build_dictionary(cells);
          const auto codes = encode(cells, enc.dictionary);
          enc.width = enc.dictionary.size();
          for (std::size_t v = 0; v < enc.width; ++v) {
            std::vector<double> onehot(n, 0.0);
            for (std::size_t r = 0; r < n; ++r) {
              if (codes[r] == v) onehot[r] = 1.0;
            }
            feature_columns.push_back(std::move(onehot));
          }
        }
        break;
      }
      case ColumnRole::kSensitive: {
        if (col.kind == ColumnKind::kCategorical) {
          enc.dictionary = build_dictionary(cells);
          auto codes = encode(cells, enc.dictionary);
          data.categorical.push_back(make_categorical(
              col.name, std::move(codes), enc.dictionary.size(), col.weight,
              enc.dictionary));
        } else {
          const auto raw = column_numbers(col, cells);
          const Affine p = zscore_params(raw);
          enc.center = p.center;
          enc.scale = p.scale;
          data.numeric.push_back(
              make_numeric(col.name, apply_affine(raw, p), col.weight));
        }
        break;
      }
      case ColumnRole::kBalanceClass: {
        enc.dictionary = build_dictionary(cells);
        data.class_labels = encode(cells, enc.dictionary);
        data.class_dictionary = enc.dictionary;
        break;
      }
      case ColumnRole::kIgnore: break;
    }
    report.columns.push_back(std::move(enc));
  }

  const std::size_t d = feature_columns.size();
  FeatureMatrix features(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t r = 0; r < n; ++r) features(r, j) = feature_columns[j][r];
  }
  data.features = std::move(features);
  data.source_rows.resize(n);
  for (std::size_t r = 0; r < n; ++r) data.source_rows[r] = r;

  if (options.undersample_balance) {
    auto labels = data.class_labels;
    auto result = undersample(data, labels, options.seed);
    report.single_class_warning = result.single_class;
    data = std::move(result.dataset);
  }
  report.rows_kept = data.n_objects();
  data.validate();
  return {std::move(data), std::move(report)};
}

LoadResult load_csv(const std::filesystem::path& path, const Schema& schema,
                    const IngestOptions& options) {
  return load_table(csv::read_file(path), schema, options);
}

UndersampleResult undersample(const Dataset& data,
                              std::span<const std::uint32_t> class_labels,
                              std::uint64_t seed) {
  const std::size_t n = data.n_objects();
  if (class_labels.size() != n) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} class labels for {} objects",
                            class_labels.size(), n));
  }
  std::map<std::uint32_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[class_labels[i]].push_back(i);
  if (by_class.size() < 2) return {data, true};

  std::size_t min_size = n;
  for (const auto& [label, rows] : by_class) {
    min_size = std::min(min_size, rows.size());
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep;
  keep.reserve(min_size * by_class.size());
  for (auto& [label, rows] : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    keep.insert(keep.end(), rows.begin(), rows.begin() + min_size);
  }
  std::sort(keep.begin(), keep.end());
  return {select_rows(data, keep), false};
}

}  // namespace fairkm::ingest
