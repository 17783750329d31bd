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

#include "fairkm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fairkm/csv.hpp"
#include "fairkm/error.hpp"

namespace fairkm {

using nlohmann::json;

std::string_view to_string(ColumnRole role) {
  switch (role) {
    case ColumnRole::kNonsensitive: return "nonsensitive";
    case ColumnRole::kSensitive: return "sensitive";
    case ColumnRole::kBalanceClass: return "balance_class";
    case ColumnRole::kIgnore: return "ignore";
  }
  return "?";
}

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

std::string_view to_string(InitPolicy init) {
  return init == InitPolicy::kRandomPartition ? "random" : "kmeanspp";
}

std::string_view to_string(OrderPolicy order) {
  return order == OrderPolicy::kDatasetOrder ? "dataset" : "shuffle";
}

ColumnRole parse_role(std::string_view text) {
  if (text == "nonsensitive") return ColumnRole::kNonsensitive;
  if (text == "sensitive") return ColumnRole::kSensitive;
  if (text == "balance_class") return ColumnRole::kBalanceClass;
  if (text == "ignore") return ColumnRole::kIgnore;
  throw Error(ErrorCode::kInvalidSchema,
              fmt::format("unknown column role '{}'", text));
}

ColumnKind parse_kind(std::string_view text) {
  if (text == "numeric") return ColumnKind::kNumeric;
  if (text == "categorical") return ColumnKind::kCategorical;
  throw Error(ErrorCode::kInvalidSchema,
              fmt::format("unknown column kind '{}'", text));
}

InitPolicy parse_init(std::string_view text) {
  if (text == "random" || text == "random_partition") {
    return InitPolicy::kRandomPartition;
  }
  if (text == "kmeanspp") return InitPolicy::kKMeansPlusPlus;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown init policy '{}'", text));
}

OrderPolicy parse_order(std::string_view text) {
  if (text == "dataset" || text == "dataset_order") {
    return OrderPolicy::kDatasetOrder;
  }
  if (text == "shuffle" || text == "shuffled_per_iteration") {
    return OrderPolicy::kShuffledPerIteration;
  }
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown iteration order '{}'", text));
}

json schema_to_json(const Schema& schema) {
  json cols = json::array();
  for (const auto& col : schema.columns) {
    cols.push_back({{"name", col.name},
                    {"role", to_string(col.role)},
                    {"kind", to_string(col.kind)},
                    {"weight", col.weight}});
  }
  return json{{"columns", std::move(cols)}};
}

Schema schema_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("columns") ||
      !doc["columns"].is_array()) {
    throw Error(ErrorCode::kInvalidSchema,
                "schema must be an object with a \"columns\" array");
  }
  Schema schema;
  for (const auto& entry : doc["columns"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string()) {
      throw Error(ErrorCode::kInvalidSchema,
                  "every schema column needs a string \"name\"");
    }
    ColumnSpec col;
    col.name = entry["name"].get<std::string>();
    try {
      col.role = parse_role(entry.value("role", std::string("nonsensitive")));
      col.kind = parse_kind(entry.value("kind", std::string("numeric")));
      col.weight = entry.value("weight", 1.0);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidSchema,
                  fmt::format("column '{}': {}", col.name, e.what()));
    }
    schema.columns.push_back(std::move(col));
  }
  return schema;
}

Schema read_schema(const std::filesystem::path& path) {
  return schema_from_json(read_json_file(path));
}

void write_schema(const std::filesystem::path& path, const Schema& schema) {
  write_json_file(path, schema_to_json(schema));
}

void write_assignment_csv(const std::filesystem::path& path,
                          const Clustering& clustering,
                          std::span<const std::size_t> object_ids) {
  if (!object_ids.empty() && object_ids.size() != clustering.assignment.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "object id list does not match assignment length");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot write '{}'", path.string()));
  }
  csv::write_row(out, {"object_id", "cluster"});
  for (std::size_t i = 0; i < clustering.assignment.size(); ++i) {
    const std::size_t id = object_ids.empty() ? i : object_ids[i];
    csv::write_row(out, {std::to_string(id),
                         std::to_string(clustering.assignment[i])});
  }
}

json clustering_to_json(const Clustering& clustering) {
  const auto& obj = clustering.objective;
  return json{{"spec_version", kReportVersion},
              {"k", clustering.k},
              {"n_objects", clustering.assignment.size()},
              {"objective",
               {{"km_term", obj.km_term},
                {"fairness_term", obj.fairness_term},
                {"lambda", obj.lambda},
                {"total", obj.total}}},
              {"iterations_run", clustering.iterations_run},
              {"converged", clustering.converged}};
}

void write_clustering(const std::filesystem::path& csv_path,
                      const std::filesystem::path& json_path,
                      const Clustering& clustering,
                      std::span<const std::size_t> object_ids) {
  write_assignment_csv(csv_path, clustering, object_ids);
  write_json_file(json_path, clustering_to_json(clustering));
}

std::vector<ClusterId> read_assignment_csv(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  std::size_t cluster_col = table.header.size();
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "cluster") cluster_col = i;
  }
  if (cluster_col == table.header.size()) {
    throw Error(ErrorCode::kMissingColumn,
                fmt::format("'{}' has no 'cluster' column", path.string()));
  }
  std::vector<ClusterId> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cell = table.rows[r][cluster_col];
    ClusterId value = 0;
    auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw Error(ErrorCode::kUnparseableNumeric,
                  fmt::format("'{}' row {}: bad cluster id '{}'",
                              path.string(), r + 1, cell));
    }
    out.push_back(value);
  }
  return out;
}

Clustering read_clustering(const std::filesystem::path& csv_path,
                           const std::filesystem::path& json_path) {
  Clustering out;
  out.assignment = read_assignment_csv(csv_path);
  const json doc = read_json_file(json_path);
  try {
    out.k = doc.at("k").get<std::size_t>();
    const auto& obj = doc.at("objective");
    out.objective.km_term = obj.at("km_term").get<double>();
    out.objective.fairness_term = obj.at("fairness_term").get<double>();
    out.objective.lambda = obj.at("lambda").get<double>();
    out.objective.total = obj.at("total").get<double>();
    out.iterations_run = doc.at("iterations_run").get<std::size_t>();
    out.converged = doc.at("converged").get<bool>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, fmt::format("'{}': {}", json_path.string(),
                                            e.what()));
  }
  return out;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot write '{}'", path.string()));
  }
  out << doc.dump(2) << '\n';
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kIo,
                fmt::format("'{}' is not valid JSON: {}", path.string(),
                            e.what()));
  }
}

}  // namespace fairkm
