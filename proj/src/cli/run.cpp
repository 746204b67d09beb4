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

#include <pthread.h>

#include <csignal>
#include <sstream>
#include <thread>

#include "fairlens/analytics/dbscan.hpp"
#include "fairlens/analytics/distance.hpp"
#include "fairlens/analytics/outliers.hpp"
#include "fairlens/analytics/projection.hpp"
#include "fairlens/analytics/quality.hpp"
#include "fairlens/anonymizer/blur.hpp"
#include "fairlens/anonymizer/raster.hpp"
#include "fairlens/cli/cli.hpp"
#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"
#include "fairlens/fairness/report.hpp"
#include "fairlens/ingest/loaders.hpp"
#include "fairlens/portal/http.hpp"
#include "fairlens/portal/portal.hpp"
#include "fairlens/portal/users.hpp"

namespace fairlens::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void emit(const std::string& output, std::string_view text, Streams io) {
  if (output == "-") {
    io.out << text;
    io.out.flush();
  } else {
    write_file_atomic(output, text);
  }
}

TableFormat table_format(OutputFormat f) {
  return f == OutputFormat::Csv ? TableFormat::Csv : TableFormat::Markdown;
}

ordered_json quality_json(const analytics::ClusterQuality& q) {
  return {{"msc", q.msc}, {"dbi", q.dbi}, {"clusters", q.clusters}, {"excluded", q.excluded}};
}

analytics::ClusterQuality quality_from_json(const nlohmann::json& j) {
  analytics::ClusterQuality q;
  q.msc = j.at("msc").get<double>();
  q.dbi = j.at("dbi").get<double>();
  q.clusters = j.at("clusters").get<int>();
  q.excluded = j.at("excluded").get<std::size_t>();
  return q;
}

std::string render_cluster(const nlohmann::json& report, OutputFormat format) {
  std::vector<std::pair<std::string, analytics::ClusterQuality>> columns;
  try {
    columns.emplace_back("DBSCAN", quality_from_json(report.at("dbscan").at("quality")));
    for (const auto& a : report.at("attributes")) {
      if (a.contains("quality")) columns.emplace_back(a.at("labeling").get<std::string>(), quality_from_json(a["quality"]));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedRecord", std::string("bad cluster report: ") + e.what());
  }
  std::string text = render_report_table(columns, table_format(format));
  if (format == OutputFormat::Markdown) {
    text += "\nProjection: " + report.value("projection", std::string("unknown")) + "\n";
  }
  return text;
}

int evaluate(const CommandConfig& cfg, Streams io) {
  const DatasetManifest manifest = load_manifest(cfg.manifest);
  const auto detections = load_detections(cfg.detections);
  const FairnessReport report = fairness_report(manifest, detections, cfg.tau, cfg.grouping);
  if (cfg.format == OutputFormat::Json) {
    emit(cfg.output, to_json(report).dump() + "\n", io);
  } else {
    emit(cfg.output, render_report_table(report, table_format(cfg.format)), io);
  }
  return 0;
}

int cluster(const CommandConfig& cfg, Streams io) {
  using namespace analytics;
  const EmbeddingStore store = load_embeddings(cfg.embeddings);
  const PointSet points = to_point_set(store);
  const SweepResult sweep = sweep_dbscan(points, cfg.eps_grid, cfg.min_pts);

  ordered_json report = header_record("cluster_report");
  report["instances"] = store.size();
  report["projection"] = to_string(cfg.projection);

  ordered_json trace = ordered_json::array();
  for (const auto& t : sweep.trace) {
    trace.push_back({{"eps", t.eps}, {"clusters", t.clusters}, {"noise", t.noise},
                     {"quality", t.quality ? quality_json(*t.quality) : ordered_json(nullptr)}});
  }
  report["dbscan"] = {{"eps", sweep.eps}, {"min_pts", cfg.min_pts},
                      {"clusters", sweep.assignment.cluster_count},
                      {"noise", sweep.assignment.noise_count()},
                      {"quality", quality_json(sweep.quality)}, {"sweep", trace}};

  std::map<std::string, std::string> labels;
  for (std::size_t i = 0; i < sweep.assignment.ids.size(); ++i) {
    const int l = sweep.assignment.labels[i];
    labels[sweep.assignment.ids[i]] = l == kNoise ? "noise" : "cluster-" + std::to_string(l);
  }

  ordered_json attributes = ordered_json::array();
  ordered_json outliers = ordered_json::array();
  if (!cfg.manifest.empty()) {
    const DatasetManifest manifest = load_manifest(cfg.manifest);
    std::map<std::string, Demographics> demographics;
    for (const auto& f : manifest.instances) {
      if (f.region_kind == RegionKind::Positive && store.count(f.instance_id)) {
        demographics[f.instance_id] = f.demographics;
      }
    }
    for (auto labeling : {AttributeLabeling::Race, AttributeLabeling::Gender, AttributeLabeling::Both}) {
      ordered_json a = {{"labeling", to_string(labeling)}};
      try {
        a["quality"] = quality_json(attribute_cluster_metrics(store, demographics, labeling));
      } catch (const Error& e) {
        a["error"] = e.to_json();
      }
      attributes.push_back(std::move(a));
    }
    for (const auto& o : outlier_report(sweep.assignment, demographics)) {
      outliers.push_back({{"instance_id", o.instance_id}, {"reason", to_string(o.reason)}});
    }
  }
  report["attributes"] = std::move(attributes);
  report["outliers"] = std::move(outliers);

  Projection2D projection;
  if (cfg.projection == ProjectionKind::Pca) {
    PcaResult pca = pca_project(points, 2);
    ordered_json ratio = ordered_json::array();
    for (Eigen::Index i = 0; i < pca.variance_ratio.size(); ++i) ratio.push_back(pca.variance_ratio[i]);
    report["pca"] = {{"variance_ratio", ratio}};
    projection = std::move(pca.projection);
  } else {
    TsneOptions options;
    options.perplexity = cfg.perplexity;
    options.iterations = cfg.iterations;
    options.seed = cfg.seed;
    TsneResult tsne = tsne_project(points, options);
    ordered_json kl = ordered_json::array();
    for (const auto& [it, v] : tsne.kl_history) kl.push_back({{"iteration", it}, {"kl", v}});
    report["tsne"] = {{"perplexity", cfg.perplexity}, {"iterations", cfg.iterations},
                      {"seed", cfg.seed}, {"kl_history", kl}};
    projection = std::move(tsne.projection);
  }
  if (cfg.scatter) {
    export_scatter(projection, labels, cfg.scatter->string());
    report["scatter"] = cfg.scatter->string();
  } else {
    report["scatter"] = nullptr;
  }

  if (cfg.format == OutputFormat::Json) {
    emit(cfg.output, report.dump() + "\n", io);
  } else {
    emit(cfg.output, render_cluster(report, cfg.format), io);
  }
  return 0;
}

bool is_ppm_path(const std::string& path) {
  return fs::path(path).extension() == ".ppm";
}

int anonymize(const CommandConfig& cfg, Streams io) {
  const std::string bytes = read_file(cfg.input);
  const std::span<const std::uint8_t> view(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
  const anonymizer::RasterImage image = anonymizer::decode_image(view);

  std::vector<BoundingBox> boxes;
  for (const auto& d : load_detections(cfg.boxes)) {
    if (!cfg.image_id || d.image_id == *cfg.image_id) boxes.push_back(d.box);
  }
  anonymizer::BlurConfig blur;
  blur.sigma = cfg.sigma;
  blur.margin = cfg.margin;
  const std::string image_id = cfg.image_id.value_or(fs::path(cfg.input).stem().string());
  const auto result = anonymizer::anonymize(image, boxes, blur, image_id);

  const bool input_ppm = bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '3';
  const bool output_ppm = is_ppm_path(cfg.output);
  std::string encoded;
  if (result.image == image && input_ppm == output_ppm) {
    encoded = bytes;
  } else if (output_ppm) {
    encoded = anonymizer::encode_ppm(result.image);
  } else {
    const auto png = anonymizer::encode_png(result.image);
    encoded.assign(png.begin(), png.end());
  }
  if (cfg.audit) write_file_atomic(*cfg.audit, anonymizer::serialize_audit(result.audit));
  emit(cfg.output, encoded, io);
  return 0;
}

int serve(const CommandConfig& cfg, Streams io) {
  const portal::TokenDirectory tokens = portal::load_token_file(cfg.tokens);
  portal::PortalOptions options;
  options.config = cfg.portal;
  options.data_dir = cfg.data_dir;
  portal::Portal service(tokens.users, options);
  portal::HttpOptions http;
  http.ui_dir = cfg.ui_dir;
  portal::HttpApi api(service, tokens, http);
  const int port = api.bind(cfg.host, cfg.port);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    api.stop();
  });

  io.out << ordered_json{{"listening", "http://" + cfg.host + ":" + std::to_string(port)}}.dump() << std::endl;
  api.serve();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return 0;
}

int export_retrain(const CommandConfig& cfg, Streams io) {
  if (!fs::is_directory(cfg.data_dir) || !fs::exists(cfg.data_dir / "events.jsonl")) {
    throw Error("FileNotFound", "no portal event log in " + cfg.data_dir.string(),
                {{"path", cfg.data_dir.string()}});
  }
  portal::PortalOptions options;
  options.data_dir = cfg.data_dir;
  const portal::Portal service({}, options);
  emit(cfg.output, serialize_manifest(service.export_retrain_manifest(cfg.dataset_id, cfg.since_ms)), io);
  return 0;
}

int report(const CommandConfig& cfg, Streams io) {
  const std::string text = read_file(cfg.input);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedRecord", std::string("report is not valid JSON: ") + e.what());
  }
  const std::string kind = j.is_object() ? j.value("kind", std::string()) : std::string();
  if (kind == "fairness_report") {
    emit(cfg.output, render_report_table(report_from_json(j), table_format(cfg.format)), io);
  } else if (kind == "cluster_report") {
    emit(cfg.output, render_cluster(j, cfg.format), io);
  } else {
    throw Error("MalformedRecord", "expected a fairness_report or cluster_report record",
                {{"kind", kind}});
  }
  return 0;
}

}  // namespace

int run(const CommandConfig& config, Streams io) {
  if (config.help) {
    io.out << config.usage;
    return 0;
  }
  try {
    switch (config.subcommand) {
      case Subcommand::Evaluate: return evaluate(config, io);
      case Subcommand::Cluster: return cluster(config, io);
      case Subcommand::Anonymize: return anonymize(config, io);
      case Subcommand::Serve: return serve(config, io);
      case Subcommand::ExportRetrain: return export_retrain(config, io);
      case Subcommand::Report: return report(config, io);
    }
  } catch (const Error& e) {
    io.err << e.to_json().dump() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    io.err << Error("Internal", e.what()).to_json().dump() << std::endl;
    return 1;
  }
  return 1;
}

int main_entry(const std::vector<std::string>& args, Streams io, const Runner& runner) {
  CommandConfig config;
  try {
    config = parse_args(args);
  } catch (const UsageError& e) {
    io.err << "error: " << e.what() << "\n\n" << e.usage();
    return 2;
  }
  return runner ? runner(config, io) : run(config, io);
}

}  // namespace fairlens::cli
