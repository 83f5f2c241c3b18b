//
// Copyright 2026 The emoflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef EMOFLOW_CSV_H_
#define EMOFLOW_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace emoflow::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
// line breaks. A leading UTF-8 BOM is dropped. Blank lines are skipped.
std::vector<Row> parse(std::string_view content, char delimiter = ',');

std::string escape_field(std::string_view field, char delimiter = ',');
std::string format_row(const Row& row, char delimiter = ',');

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace emoflow::csv

#endif  // EMOFLOW_CSV_H_
