// Copyright 2026 The FairLens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fairlens {

inline constexpr std::string_view kFormatVersion = "fairlens/1";

std::string read_file(const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it over `path`, so the
// target is either untouched or complete. `writer` may throw; the temporary is
// removed and the exception propagates.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

struct NumberedLine {
  std::size_t number;  // 1-based
  std::string_view text;
};

// Splits on '\n'. A single trailing newline does not produce an empty record.
std::vector<NumberedLine> split_records(std::string_view text);

nlohmann::json header_record(std::string_view kind);

// Parses one record line; throws MalformedRecord(line) on bad syntax or a
// non-object value.
nlohmann::json parse_record(const NumberedLine& line);

// Validates `record` as a header of the given kind; throws MalformedRecord.
void expect_header(const nlohmann::json& record, std::string_view kind,
                   std::size_t line);

[[noreturn]] void throw_malformed(std::size_t line, const std::string& why);

}  // namespace fairlens
