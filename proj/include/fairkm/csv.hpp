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

// Minimal RFC 4180 reader/writer: comma separator, double-quote quoting,
// CRLF or LF record terminators.

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fairkm::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Throws Error(kIo) on malformed quoting.
std::vector<std::vector<std::string>> parse(std::string_view text);

// First record becomes the header. Throws Error(kIo) if the file cannot be
// read or is empty, and Error(kInvalidArgument) on ragged rows.
Table read_file(const std::filesystem::path& path);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal that round-trips to the same double; "nan"/"inf" for
// non-finite values.
std::string format_double(double value);

}  // namespace fairkm::csv
