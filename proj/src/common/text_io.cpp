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

#include "fairlens/common/text_io.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "fairlens/common/error.hpp"

namespace fairlens {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("FileNotFound", "cannot open " + path.string(),
                {{"path", path.string()}});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const fs::path& path,
                       const std::function<void(std::ostream&)>& writer) {
  const fs::path dir =
      path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp =
      dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw Error("IoFailure", "cannot write " + tmp.string(),
                    {{"path", path.string()}});
      }
      writer(out);
      out.flush();
      if (!out) {
        throw Error("IoFailure", "write failed for " + path.string(),
                    {{"path", path.string()}});
      }
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw;
  }
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  write_file_atomic(path, [&](std::ostream& out) {
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  });
}

std::vector<NumberedLine> split_records(std::string_view text) {
  std::vector<NumberedLine> lines;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({number++, line});
    start = end + 1;
  }
  return lines;
}

nlohmann::json header_record(std::string_view kind) {
  nlohmann::ordered_json h;
  h["format"] = kFormatVersion;
  h["kind"] = kind;
  return h;
}

void throw_malformed(std::size_t line, const std::string& why) {
  throw Error("MalformedRecord",
              "malformed record at line " + std::to_string(line) + ": " + why,
              {{"line", line}});
}

nlohmann::json parse_record(const NumberedLine& line) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line.text);
  } catch (const nlohmann::json::parse_error& e) {
    throw_malformed(line.number, e.what());
  }
  if (!record.is_object()) throw_malformed(line.number, "not an object");
  return record;
}

void expect_header(const nlohmann::json& record, std::string_view kind,
                   std::size_t line) {
  auto format = record.find("format");
  if (format == record.end() || !format->is_string() ||
      format->get<std::string>() != kFormatVersion) {
    throw_malformed(line, "missing or unsupported format header");
  }
  auto k = record.find("kind");
  if (k == record.end() || !k->is_string() || k->get<std::string>() != kind) {
    throw_malformed(line, "expected header kind '" + std::string(kind) + "'");
  }
}

}  // namespace fairlens
