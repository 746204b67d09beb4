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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairlens/analytics/quality.hpp"
#include "fairlens/fairness/report.hpp"

namespace fairlens::cli {

enum class TableFormat { Markdown, Csv };

std::string_view to_string(TableFormat f);
std::optional<TableFormat> parse_table_format(std::string_view s);

// Markdown cell: two decimals, three below 0.01 in magnitude, U+2014 when undefined.
std::string format_markdown_cell(Metric value);
// CSV cell: shortest text that parses back to the same double, empty when undefined.
std::string format_csv_cell(Metric value);

/// One row per metric (accuracy, FPR, FNR, PPV) and one column per group,
/// in the report's row order.
std::string render_report_table(const FairnessReport& report, TableFormat format);

/// Rows MSC and DBI, one column per named clustering.
std::string render_report_table(
    const std::vector<std::pair<std::string, analytics::ClusterQuality>>& columns,
    TableFormat format);

}  // namespace fairlens::cli
