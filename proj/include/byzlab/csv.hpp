/*
 * Copyright 2026 The byzlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef BYZLAB_CSV_HPP_
#define BYZLAB_CSV_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace byzlab::csv {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a full-string decimal number; returns false on any trailing junk.
bool parse_double(std::string_view text, double& out);

/// Splits one line on commas (no quoting support; the formats written here
/// never need it). Trailing '\r' is stripped.
std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header, or -1.
  int column(std::string_view name) const;
};

/// Reads a headered CSV file. Throws ParseError (1-based line number) on a
/// ragged row.
Table read_table(const std::filesystem::path& path);
Table parse_table(std::string_view text, std::string_view source);

/// Writes header + rows with LF endings. Goes through a temp file and rename
/// so a failed write never leaves a partial file behind.
void write_table(const std::filesystem::path& path, const Table& table);

std::string read_file(const std::filesystem::path& path);

}  // namespace byzlab::csv

#endif  // BYZLAB_CSV_HPP_
