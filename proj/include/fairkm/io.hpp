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

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fairkm/core.hpp"

namespace fairkm {

// Version tag stamped into every JSON report as "spec_version".
inline constexpr std::string_view kReportVersion = "1.0";

std::string_view to_string(ColumnRole role);
std::string_view to_string(ColumnKind kind);
std::string_view to_string(InitPolicy init);
std::string_view to_string(OrderPolicy order);
ColumnRole parse_role(std::string_view text);
ColumnKind parse_kind(std::string_view text);
InitPolicy parse_init(std::string_view text);
OrderPolicy parse_order(std::string_view text);

// Schema file: {"columns":[{"name":..,"role":..,"kind":..,"weight":..}]}.
nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& doc);
Schema read_schema(const std::filesystem::path& path);
void write_schema(const std::filesystem::path& path, const Schema& schema);

// Clustering output: a CSV with header `object_id,cluster` plus a JSON
// sidecar carrying k, the objective breakdown and convergence info.
void write_assignment_csv(const std::filesystem::path& path,
                          const Clustering& clustering,
                          std::span<const std::size_t> object_ids = {});
nlohmann::json clustering_to_json(const Clustering& clustering);
void write_clustering(const std::filesystem::path& csv_path,
                      const std::filesystem::path& json_path,
                      const Clustering& clustering,
                      std::span<const std::size_t> object_ids = {});
// Reads the CSV rows in file order; the assignment is indexed by row.
std::vector<ClusterId> read_assignment_csv(const std::filesystem::path& path);
Clustering read_clustering(const std::filesystem::path& csv_path,
                           const std::filesystem::path& json_path);

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace fairkm
