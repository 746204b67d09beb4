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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fairlens/cli/render.hpp"
#include "fairlens/ingest/types.hpp"
#include "fairlens/portal/types.hpp"

namespace fairlens::cli {

enum class Subcommand { Evaluate, Cluster, Anonymize, Serve, ExportRetrain, Report };
std::string_view to_string(Subcommand s);

enum class OutputFormat { Json, Markdown, Csv };
enum class ProjectionKind { Pca, Tsne };
std::string_view to_string(ProjectionKind p);

inline constexpr std::string_view kTokenFileEnv = "FAIRLENS_TOKEN_FILE";

/// Validated options for one invocation. Only the fields of the selected
/// subcommand are meaningful.
struct CommandConfig {
  Subcommand subcommand = Subcommand::Evaluate;
  bool help = false;  // --help was given; `usage` holds the text
  std::string usage;

  // Inputs.
  std::filesystem::path manifest;
  std::filesystem::path detections;
  std::filesystem::path embeddings;
  std::filesystem::path input;
  std::filesystem::path boxes;
  std::filesystem::path data_dir;
  std::filesystem::path tokens;
  std::optional<std::filesystem::path> ui_dir;
  std::optional<std::string> image_id;

  // Outputs. "-" is standard output.
  std::string output = "-";
  std::optional<std::filesystem::path> audit;
  std::optional<std::filesystem::path> scatter;
  OutputFormat format = OutputFormat::Json;

  // evaluate
  double tau = 0.5;
  Grouping grouping = Grouping::Ethnicity;

  // cluster
  std::vector<double> eps_grid;
  int min_pts = 5;
  ProjectionKind projection = ProjectionKind::Pca;
  double perplexity = 30.0;
  int iterations = 1000;
  std::uint64_t seed = 0;

  // anonymize
  std::optional<double> sigma;
  double margin = 0.1;

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  portal::PortalConfig portal;

  // export-retrain
  std::string dataset_id;
  std::optional<std::int64_t> since_ms;
};

class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, std::string usage)
      : std::runtime_error(message), usage_(std::move(usage)) {}
  const std::string& usage() const { return usage_; }

 private:
  std::string usage_;
};

// "0.1,0.2,0.5" or "start:stop:step" (inclusive of stop within 1e-9).
std::vector<double> parse_eps_grid(std::string_view text);

/// `args` excludes the program name. Throws UsageError for unknown
/// subcommands or flags, missing required options and out-of-range values.
/// `env` resolves environment variables (std::getenv when unset).
CommandConfig parse_args(const std::vector<std::string>& args,
                         const std::function<std::optional<std::string>(std::string_view)>& env = {});

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Executes a validated config: 0 on success, 1 on an operational error
/// (reported on `err` as {code, message, details}).
int run(const CommandConfig& config, Streams io);

using Runner = std::function<int(const CommandConfig&, Streams)>;

/// parse_args, then `runner` (run by default). Usage errors return 2 with
/// the message and usage text on `err` without calling the runner.
int main_entry(const std::vector<std::string>& args, Streams io, const Runner& runner = {});

}  // namespace fairlens::cli
