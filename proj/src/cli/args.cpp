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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "CLI11.hpp"
#include "fairlens/cli/cli.hpp"

namespace fairlens::cli {
namespace {

// Option values are collected as text and checked after CLI11 is done, so
// that every problem surfaces as one UsageError type.
struct Raw {
  std::string manifest, detections, embeddings, input, boxes, data_dir, tokens, ui_dir, image_id;
  std::string output = "-", audit, scatter, format, grouping = "ethnicity", projection = "pca";
  std::string eps_grid = "0.05:1:0.05";
  std::string dataset, since, sigma, host = "127.0.0.1";
  double tau = 0.5, perplexity = 30, margin = 0.1;
  int min_pts = 5, iterations = 1000, port = 8080, quorum = 2;
  std::int64_t bounty = 100, fee = 10;
  std::uint64_t seed = 0;
};

[[noreturn]] void usage_error(const std::string& message, const CLI::App& app) {
  throw UsageError(message, app.help());
}

double parse_double(const std::string& text, const std::string& flag, const CLI::App& app) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  usage_error(flag + ": expected a finite number, got \"" + text + "\"", app);
}

}  // namespace

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Evaluate: return "evaluate";
    case Subcommand::Cluster: return "cluster";
    case Subcommand::Anonymize: return "anonymize";
    case Subcommand::Serve: return "serve";
    case Subcommand::ExportRetrain: return "export-retrain";
    case Subcommand::Report: return "report";
  }
  return "";
}

std::string_view to_string(ProjectionKind p) {
  return p == ProjectionKind::Tsne ? "tsne" : "pca";
}

std::vector<double> parse_eps_grid(std::string_view text) {
  auto number = [](std::string_view s) {
    const std::string str(s);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (str.empty() || used != str.size() || !std::isfinite(v) || v <= 0) {
      throw std::invalid_argument("eps values must be positive numbers, got \"" + str + "\"");
    }
    return v;
  };
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
      throw std::invalid_argument("eps range must be start:stop:step");
    }
    const double start = number(text.substr(0, a));
    const double stop = number(text.substr(a + 1, b - a - 1));
    const double step = number(text.substr(b + 1));
    if (stop < start) throw std::invalid_argument("eps range stop is below start");
    const double count = std::floor((stop - start) / step + 1e-9) + 1;
    if (count > 10000) throw std::invalid_argument("eps range has more than 10000 values");
    for (int i = 0; i < static_cast<int>(count); ++i) grid.push_back(start + i * step);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = std::min(text.find(',', pos), text.size());
      grid.push_back(number(text.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  return grid;
}

CommandConfig parse_args(const std::vector<std::string>& args,
                         const std::function<std::optional<std::string>(std::string_view)>& env) {
  CLI::App app{"Fairness evaluation, embedding analytics, anonymization and annotation portal for face detectors.",
               "fairlens"};
  app.require_subcommand(1);
  Raw raw;
  CommandConfig cfg;

  auto* evaluate = app.add_subcommand("evaluate", "Per-group detection metrics for a dataset");
  evaluate->add_option("--manifest", raw.manifest, "Dataset manifest")->required();
  evaluate->add_option("--detections", raw.detections, "Detector output")->required();
  evaluate->add_option("--tau", raw.tau, "IoU match threshold in (0, 1]");
  evaluate->add_option("--grouping", raw.grouping, "ethnicity, gender or age_group");
  evaluate->add_option("--format", raw.format, "json (default), markdown or csv");
  evaluate->add_option("--output", raw.output, "Output path, - for stdout");

  auto* cluster = app.add_subcommand("cluster", "DBSCAN sweep, attribute cluster metrics and 2-D projection");
  cluster->add_option("--embeddings", raw.embeddings, "Embedding store")->required();
  cluster->add_option("--manifest", raw.manifest, "Manifest supplying demographics");
  cluster->add_option("--eps-grid", raw.eps_grid, "Comma list or start:stop:step");
  cluster->add_option("--min-pts", raw.min_pts, "DBSCAN core threshold");
  cluster->add_option("--projection", raw.projection, "pca or tsne");
  cluster->add_option("--perplexity", raw.perplexity, "t-SNE perplexity");
  cluster->add_option("--iterations", raw.iterations, "t-SNE iterations");
  cluster->add_option("--seed", raw.seed, "t-SNE seed");
  cluster->add_option("--scatter", raw.scatter, "Scatter CSV path");
  cluster->add_option("--format", raw.format, "json (default), markdown or csv");
  cluster->add_option("--output", raw.output, "Output path, - for stdout");

  auto* anonymize = app.add_subcommand("anonymize", "Blur face regions of an image");
  anonymize->add_option("--input", raw.input, "PNG or PPM image")->required();
  anonymize->add_option("--boxes", raw.boxes, "Detections file with the boxes to blur")->required();
  anonymize->add_option("--image-id", raw.image_id, "Only use boxes recorded for this image");
  anonymize->add_option("--output", raw.output, "Output image (.ppm for PPM, PNG otherwise)")->required();
  anonymize->add_option("--sigma", raw.sigma, "Gaussian sigma in pixels");
  anonymize->add_option("--margin", raw.margin, "Box expansion per side, fraction of box size");
  anonymize->add_option("--audit", raw.audit, "Audit record path");

  auto* serve = app.add_subcommand("serve", "Run the annotation portal HTTP API");
  serve->add_option("--data-dir", raw.data_dir, "Event log and image directory")->required();
  serve->add_option("--tokens", raw.tokens, "Token file (default: $FAIRLENS_TOKEN_FILE)");
  serve->add_option("--host", raw.host, "Bind address");
  serve->add_option("--port", raw.port, "Port, 0 for any free port");
  serve->add_option("--ui-dir", raw.ui_dir, "Static files served under /ui");
  serve->add_option("--quorum", raw.quorum, "Verdicts needed to verify or reject");
  serve->add_option("--bounty", raw.bounty, "Bounty in minor units");
  serve->add_option("--fee", raw.fee, "Verification fee in minor units");

  auto* export_retrain = app.add_subcommand("export-retrain", "Export verified corrections as a manifest");
  export_retrain->add_option("--data-dir", raw.data_dir, "Portal data directory")->required();
  export_retrain->add_option("--dataset", raw.dataset, "Dataset id")->required();
  export_retrain->add_option("--since", raw.since, "Only submissions verified after this time (ms)");
  export_retrain->add_option("--output", raw.output, "Output path, - for stdout");

  auto* report = app.add_subcommand("report", "Render a fairness or cluster report as a table");
  report->add_option("--input", raw.input, "Report from evaluate or cluster")->required();
  report->add_option("--format", raw.format, "markdown (default) or csv");
  report->add_option("--output", raw.output, "Output path, - for stdout");

  // Unknown subcommands and flags are reported by name before CLI11 gets a
  // chance to complain about something else, such as a missing option.
  if (!args.empty() && !args.front().empty() && args.front()[0] != '-' &&
      app.get_subcommand_no_throw(args.front()) == nullptr) {
    throw UsageError("unknown subcommand: " + args.front(), app.help());
  }
  if (!args.empty()) {
    if (const CLI::App* chosen = app.get_subcommand_no_throw(args.front())) {
      for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.size() < 2 || a[0] != '-' || std::isdigit(static_cast<unsigned char>(a[1])) || a[1] == '.') continue;
        const std::string name = a.substr(0, a.find('='));
        if (chosen->get_option_no_throw(name) == nullptr) {
          throw UsageError("unknown option for " + args.front() + ": " + name, chosen->help());
        }
      }
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    cfg.help = true;
    const auto subs = app.get_subcommands();
    cfg.usage = subs.empty() ? app.help() : subs.front()->help();
    return cfg;
  } catch (const CLI::CallForAllHelp&) {
    cfg.help = true;
    cfg.usage = app.help("", CLI::AppFormatMode::All);
    return cfg;
  } catch (const CLI::ExtrasError&) {
    const auto subs = app.get_subcommands();
    std::string rest;
    for (const auto& r : app.remaining(true)) rest += (rest.empty() ? "" : " ") + r;
    if (rest.empty() && !subs.empty()) {
      for (const auto& r : subs.front()->remaining()) rest += (rest.empty() ? "" : " ") + r;
    }
    throw UsageError("unexpected arguments: " + rest, subs.empty() ? app.help() : subs.front()->help());
  } catch (const CLI::Error& e) {
    const auto subs = app.get_subcommands();
    throw UsageError(e.what(), subs.empty() ? app.help() : subs.front()->help());
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const std::vector<std::pair<std::string, Subcommand>> names = {
      {"evaluate", Subcommand::Evaluate}, {"cluster", Subcommand::Cluster},
      {"anonymize", Subcommand::Anonymize}, {"serve", Subcommand::Serve},
      {"export-retrain", Subcommand::ExportRetrain}, {"report", Subcommand::Report}};
  for (const auto& [n, s] : names) {
    if (n == name) cfg.subcommand = s;
  }
  cfg.usage = sub->help();
  auto fail = [&](const std::string& message) { usage_error(message, *sub); };
  auto present = [&](const std::string& flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };

  if (raw.output.empty()) fail("--output: empty path");
  cfg.output = raw.output;

  if (present("--format")) {
    if (raw.format == "json" && cfg.subcommand != Subcommand::Report) {
      cfg.format = OutputFormat::Json;
    } else if (raw.format == "markdown") {
      cfg.format = OutputFormat::Markdown;
    } else if (raw.format == "csv") {
      cfg.format = OutputFormat::Csv;
    } else {
      fail("--format: unsupported value \"" + raw.format + "\"");
    }
  } else if (cfg.subcommand == Subcommand::Report) {
    cfg.format = OutputFormat::Markdown;
  }

  switch (cfg.subcommand) {
    case Subcommand::Evaluate: {
      cfg.manifest = raw.manifest;
      cfg.detections = raw.detections;
      if (!std::isfinite(raw.tau) || raw.tau <= 0 || raw.tau > 1) fail("--tau: must lie in (0, 1]");
      cfg.tau = raw.tau;
      auto g = parse_grouping(raw.grouping);
      if (!g) fail("--grouping: expected ethnicity, gender or age_group");
      cfg.grouping = *g;
      break;
    }
    case Subcommand::Cluster: {
      cfg.embeddings = raw.embeddings;
      if (present("--manifest")) cfg.manifest = raw.manifest;
      try {
        cfg.eps_grid = parse_eps_grid(raw.eps_grid);
      } catch (const std::invalid_argument& e) {
        fail(std::string("--eps-grid: ") + e.what());
      }
      if (raw.min_pts < 1) fail("--min-pts: must be at least 1");
      cfg.min_pts = raw.min_pts;
      if (raw.projection == "pca") {
        cfg.projection = ProjectionKind::Pca;
      } else if (raw.projection == "tsne") {
        cfg.projection = ProjectionKind::Tsne;
      } else {
        fail("--projection: expected pca or tsne");
      }
      if (!std::isfinite(raw.perplexity) || raw.perplexity <= 0) fail("--perplexity: must be positive");
      cfg.perplexity = raw.perplexity;
      if (raw.iterations < 1 || raw.iterations > 100000) fail("--iterations: must lie in [1, 100000]");
      cfg.iterations = raw.iterations;
      cfg.seed = raw.seed;
      if (present("--scatter")) {
        if (raw.scatter.empty()) fail("--scatter: empty path");
        cfg.scatter = raw.scatter;
      }
      break;
    }
    case Subcommand::Anonymize: {
      cfg.input = raw.input;
      cfg.boxes = raw.boxes;
      if (present("--image-id")) cfg.image_id = raw.image_id;
      if (present("--sigma")) {
        const double s = parse_double(raw.sigma, "--sigma", *sub);
        if (s <= 0) fail("--sigma: must be positive");
        cfg.sigma = s;
      }
      if (!std::isfinite(raw.margin) || raw.margin < 0) fail("--margin: must be non-negative");
      cfg.margin = raw.margin;
      if (present("--audit")) {
        if (raw.audit.empty()) fail("--audit: empty path");
        cfg.audit = raw.audit;
      }
      break;
    }
    case Subcommand::Serve: {
      cfg.data_dir = raw.data_dir;
      std::optional<std::string> tokens;
      if (present("--tokens")) {
        tokens = raw.tokens;
      } else if (env) {
        tokens = env(kTokenFileEnv);
      } else if (const char* v = std::getenv(std::string(kTokenFileEnv).c_str())) {
        tokens = v;
      }
      if (!tokens || tokens->empty()) fail("--tokens or " + std::string(kTokenFileEnv) + " is required");
      cfg.tokens = *tokens;
      if (raw.host.empty()) fail("--host: empty");
      cfg.host = raw.host;
      if (raw.port < 0 || raw.port > 65535) fail("--port: must lie in [0, 65535]");
      cfg.port = raw.port;
      if (present("--ui-dir")) cfg.ui_dir = raw.ui_dir;
      if (raw.quorum < 1) fail("--quorum: must be at least 1");
      if (raw.bounty < 0) fail("--bounty: must be non-negative");
      if (raw.fee < 0) fail("--fee: must be non-negative");
      cfg.portal.quorum = raw.quorum;
      cfg.portal.bounty = raw.bounty;
      cfg.portal.verification_fee = raw.fee;
      break;
    }
    case Subcommand::ExportRetrain: {
      cfg.data_dir = raw.data_dir;
      if (raw.dataset.empty()) fail("--dataset: empty");
      cfg.dataset_id = raw.dataset;
      if (present("--since")) {
        try {
          std::size_t used = 0;
          const long long v = std::stoll(raw.since, &used);
          if (used != raw.since.size()) throw std::invalid_argument("trailing text");
          cfg.since_ms = v;
        } catch (const std::exception&) {
          fail("--since: expected integer milliseconds, got \"" + raw.since + "\"");
        }
      }
      break;
    }
    case Subcommand::Report:
      cfg.input = raw.input;
      break;
  }
  for (const auto* opt : sub->get_options()) {
    if (opt->get_required() && opt->as<std::string>().empty()) fail(opt->get_name() + ": empty value");
  }
  return cfg;
}

}  // namespace fairlens::cli
