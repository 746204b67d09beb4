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

// Acceptance run: prints one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes. With --expect-fail IDS the
// status is 0 when exactly the listed criteria fail, so a known-red criterion
// stays visible in the output without masking regressions elsewhere.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "analytics_checks.hpp"
#include "anonymizer_checks.hpp"
#include "fairlens/cli/render.hpp"
#include "fairlens/fairness/report.hpp"
#include "fairness_checks.hpp"
#include "portal_checks.hpp"
#include "portal_scenario.hpp"
#include "reference_tables.hpp"

using namespace fairlens;
using fairlens::testing::CheckResult;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

FairnessReport table_report(const std::array<testing::ReferenceGroup, 4>& table) {
  const auto scene = testing::reference_scene(table);
  return fairness_report(scene.manifest, scene.detections, kDefaultMatchThreshold, Grouping::Ethnicity);
}

// Splits "| a | b |" into its trimmed cells.
std::vector<std::string> markdown_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  std::getline(in, cell, '|');
  while (std::getline(in, cell, '|')) {
    const auto b = cell.find_first_not_of(' ');
    const auto e = cell.find_last_not_of(' ');
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

CheckResult baseline_replay() {
  CheckResult result;
  const auto start = std::chrono::steady_clock::now();
  const auto report = table_report(testing::kBaselineTable);
  const std::string table = cli::render_report_table(report, cli::TableFormat::Markdown);

  std::vector<std::vector<std::string>> rows;
  std::stringstream lines(table);
  for (std::string line; std::getline(lines, line);) rows.push_back(markdown_cells(line));
  if (rows.size() != 2 + kAllMetrics.size()) {
    result.fail("rendered table has " + std::to_string(rows.size()) + " lines");
    return result;
  }

  int within = 0;
  double worst = 0;
  std::string misses;
  for (std::size_t col = 0; col < testing::kBaselineTable.size(); ++col) {
    const auto& ref = testing::kBaselineTable[col];
    const auto* row = report.find(ref.group);
    if (!row || rows[0][col + 1] != ref.group) {
      result.fail(std::string("column ") + ref.group + " missing from the table");
      return result;
    }
    const double published[4] = {ref.published.accuracy, ref.published.fpr, ref.published.fnr,
                                 ref.published.ppv};
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
      const Metric value = metric_value(row->metrics, kAllMetrics[m]);
      const double err = value ? std::abs(*value - published[m]) : INFINITY;
      worst = std::max(worst, err);
      if (err <= 0.01 + 1e-12) {
        ++within;
      } else {
        misses += std::string(misses.empty() ? "" : ", ") + ref.group + " " +
                  std::string(metric_key(kAllMetrics[m])) + fmt(" %.4f vs %.2f", value.value_or(NAN), published[m]);
      }
    }
  }
  const std::string& white_fpr = rows[3][4];
  const double elapsed = seconds_since(start);
  if (within != 16) result.fail(std::to_string(within) + "/16 cells within 0.01; off: " + misses);
  if (white_fpr != "0.005") result.fail("White FPR renders as " + white_fpr);
  if (elapsed >= 1.0) result.fail(fmt("took %.3f s", elapsed));
  result.note(fmt("16/16 cells within 0.01 (max %.4f), White FPR 0.005, %.3f s", worst, elapsed));
  return result;
}

CheckResult rebalanced_delta() {
  CheckResult result;
  const auto delta = compare_reports(table_report(testing::kBaselineTable),
                                     table_report(testing::kRebalancedTable));
  const auto* asian = delta.find("Asian");
  if (!asian || !(*asian)[MetricKind::Ppv].relative) {
    result.fail("no Asian PPV delta");
    return result;
  }
  const double gain = *(*asian)[MetricKind::Ppv].relative;
  if (std::abs(gain - 0.192) > 0.005) result.fail(fmt("Asian PPV relative gain %.4f", gain));
  std::string gains;
  for (const auto& row : delta.rows) {
    const Metric acc = row[MetricKind::Accuracy].absolute;
    if (!acc) {
      result.fail(row.group + " accuracy delta undefined");
      continue;
    }
    gains += " " + row.group + fmt("=%+.3f", *acc);
    if (std::abs(*acc) <= 1e-12) continue;
    if (*acc < 0.01 - 1e-9 || *acc > 0.055 + 1e-9) {
      result.fail(row.group + fmt(" accuracy gain %.4f outside 0.01..0.055", *acc));
    }
  }
  result.note(fmt("Asian PPV gain %.4f; accuracy", gain) + gains);
  return result;
}

CheckResult timed(const std::function<CheckResult()>& suite, double limit_seconds) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r = suite();
  const double elapsed = seconds_since(start);
  if (elapsed >= limit_seconds) r.fail(fmt("took %.1f s", elapsed));
  if (r.ok) r.detail += fmt(" (%.2f s)", elapsed);
  return r;
}

// All suites must pass; the detail lists each summary or the first failure.
CheckResult combine(const std::vector<std::pair<std::string, std::function<CheckResult()>>>& suites) {
  CheckResult out;
  std::string summary;
  for (const auto& [name, suite] : suites) {
    CheckResult r;
    try {
      r = suite();
    } catch (const std::exception& e) {
      r.fail(std::string("threw: ") + e.what());
    }
    if (!r.ok) out.fail(name + ": " + r.detail);
    summary += (summary.empty() ? "" : "; ") + name + ": " + r.detail;
  }
  out.note(summary);
  return out;
}

CheckResult portal_properties() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("fairlens-acceptance-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  CheckResult r = combine({
      {"conservation", [] {
         CheckResult c;
         for (bool auto_award : {true, false}) {
           portal::PortalConfig config;
           config.auto_award = auto_award;
           const auto one = testing::ledger_conservation(10'000, 20261016, nullptr, config);
           if (!one.ok) c.fail(one.detail);
         }
         c.note("ledger sums to zero over 2 x 10000 operations");
         return c;
       }},
      {"state machine", [] {
         std::int64_t sequences = 0;
         auto c = testing::exhaustive_submission_search(6, {}, &sequences);
         c.note(std::to_string(sequences) + " sequences of depth <= 6");
         return c;
       }},
      {"royalties", [] { return testing::royalty_exactness(1000, 99); }},
      {"replay", [&] {
         int applied = 0;
         auto c = testing::replay_check(dir, 1500, 4242, &applied);
         c.note(std::to_string(applied) + " events replayed identically");
         return c;
       }},
  });
  std::error_code ec;
  fs::remove_all(dir, ec);
  return r;
}

CheckResult http_scenario() {
  auto s = testing::http_end_to_end();
  s.check.note(fmt("balance %.0f, manifest %.0f positive + %.0f negative", static_cast<double>(s.balance),
                   s.positives, s.negatives) +
               fmt(", %.2f s", s.seconds));
  return s.check;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairlens acceptance run"};
  std::vector<std::string> expected_failures;
  app.add_option("--expect-fail", expected_failures, "criteria expected to fail (e.g. AC1)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<CheckResult()>>> criteria = {
      {"AC1", baseline_replay},
      {"AC2", rebalanced_delta},
      {"AC3", [] { return testing::attribute_ordering_check(); }},
      {"AC4", [] {
         return combine({
             {"dbscan", [] { return timed([] { return testing::dbscan_oracle_check(1000, 20240611); }, 30); }},
             {"quality", [] { return timed([] { return testing::quality_oracle_check(300, 99); }, 30); }},
             {"iou", [] { return timed([] { return testing::iou_oracle_check(2000, 42); }, 30); }},
             {"matching", [] { return timed([] { return testing::matching_oracle_check(3000, 5); }, 30); }},
         });
       }},
      {"AC5", [] {
         return combine({
             {"pca", testing::pca_eigensolver_check},
             {"gradient", testing::tsne_gradient_check},
             {"perplexity", testing::perplexity_search_check},
             {"kl", testing::tsne_kl_check},
         });
       }},
      {"AC6", [] {
         return combine({
             {"blur", [] { return testing::blur_oracle_check(200, 2); }},
             {"locality", [] { return testing::blur_locality_check(500, 3); }},
             {"kernel", [] { return testing::kernel_sum_check(500, 1); }},
         });
       }},
      {"AC7", portal_properties},
      {"AC8", http_scenario},
  };

  std::set<std::string> failed;
  for (const auto& [id, run] : criteria) {
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.fail(std::string("threw: ") + e.what());
    }
    if (!r.ok) failed.insert(id);
    std::cout << id << ' ' << (r.ok ? "PASS" : "FAIL") << ' ' << r.detail << std::endl;
  }

  const std::set<std::string> expected(expected_failures.begin(), expected_failures.end());
  if (failed == expected) return 0;
  for (const auto& id : expected) {
    if (!failed.count(id)) std::cout << id << " was expected to fail but passed" << std::endl;
  }
  return 1;
}
