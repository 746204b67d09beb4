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

#include "fairlens/cli/render.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fairlens::cli {
namespace {

constexpr std::string_view kUndefined = "\xE2\x80\x94";  // U+2014

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_field(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

struct Table {
  std::string corner;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<Metric>>> rows;

  std::string render(TableFormat format) const {
    std::ostringstream out;
    if (format == TableFormat::Csv) {
      out << csv_field(corner);
      for (const auto& c : columns) out << ',' << csv_field(c);
      out << '\n';
      for (const auto& [label, values] : rows) {
        out << csv_field(label);
        for (const auto& v : values) out << ',' << format_csv_cell(v);
        out << '\n';
      }
      return out.str();
    }
    out << "| " << md_field(corner) << " |";
    for (const auto& c : columns) out << ' ' << md_field(c) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < columns.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& [label, values] : rows) {
      out << "| " << md_field(label) << " |";
      for (const auto& v : values) out << ' ' << format_markdown_cell(v) << " |";
      out << '\n';
    }
    return out.str();
  }
};

}  // namespace

std::string_view to_string(TableFormat f) {
  return f == TableFormat::Csv ? "csv" : "markdown";
}

std::optional<TableFormat> parse_table_format(std::string_view s) {
  if (s == "markdown") return TableFormat::Markdown;
  if (s == "csv") return TableFormat::Csv;
  return std::nullopt;
}

std::string format_markdown_cell(Metric value) {
  if (!value || !std::isfinite(*value)) return std::string(kUndefined);
  char buf[64];
  const double v = *value;
  std::snprintf(buf, sizeof buf, std::fabs(v) < 0.01 ? "%.3f" : "%.2f", v);
  std::string s = buf;
  if (s == "-0.00" || s == "-0.000") s.erase(0, 1);
  return s;
}

std::string format_csv_cell(Metric value) {
  if (!value) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *value);
  return std::string(buf, end);
}

std::string render_report_table(const FairnessReport& report, TableFormat format) {
  Table t;
  t.corner = "Metrics (M)";
  for (const auto& row : report.rows) t.columns.push_back(row.group);
  for (MetricKind m : kAllMetrics) {
    std::vector<Metric> values;
    for (const auto& row : report.rows) values.push_back(metric_value(row.metrics, m));
    t.rows.emplace_back(std::string(metric_label(m)), std::move(values));
  }
  return t.render(format);
}

std::string render_report_table(
    const std::vector<std::pair<std::string, analytics::ClusterQuality>>& columns,
    TableFormat format) {
  Table t;
  t.corner = "Metrics";
  std::vector<Metric> msc, dbi;
  for (const auto& [name, q] : columns) {
    t.columns.push_back(name);
    msc.push_back(q.msc);
    dbi.push_back(q.dbi);
  }
  t.rows = {{"MSC", msc}, {"DBI", dbi}};
  return t.render(format);
}

}  // namespace fairlens::cli
