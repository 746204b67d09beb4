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

#include "fairlens/portal/portal.hpp"

#include <chrono>
#include <fstream>

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"

namespace fs = std::filesystem;

namespace fairlens::portal {

EventLog::EventLog(std::optional<fs::path> path) : path_(std::move(path)) {}

std::vector<Event> EventLog::load() const {
  std::vector<Event> events;
  if (!path_ || !fs::exists(*path_)) return events;
  std::string text = read_file(*path_);
  const auto last_newline = text.rfind('\n');
  text.resize(last_newline == std::string::npos ? 0 : last_newline + 1);
  const auto lines = split_records(text);
  if (lines.empty()) return events;
  expect_header(parse_record(lines[0]), "portal_events", lines[0].number);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    try {
      events.push_back(Event(parse_record(lines[i])));
    } catch (const Error& e) {
      throw Error("CorruptLog", "unreadable event at line " + std::to_string(lines[i].number),
                  {{"line", lines[i].number}, {"cause", e.code()}});
    }
  }
  return events;
}

void EventLog::append(const std::vector<Event>& events) {
  if (!path_ || events.empty()) return;
  const bool fresh = !fs::exists(*path_) || fs::file_size(*path_) == 0;
  std::string chunk;
  if (fresh) chunk += header_record("portal_events").dump() + "\n";
  for (const auto& e : events) chunk += e.dump() + "\n";
  std::ofstream out(*path_, std::ios::binary | std::ios::app);
  out << chunk;
  out.flush();
  if (!out) {
    throw Error("IoFailure", "cannot append to event log " + path_->string(),
                {{"path", path_->string()}});
  }
}

namespace {

std::optional<fs::path> log_path(const PortalOptions& options) {
  if (!options.data_dir) return std::nullopt;
  fs::create_directories(*options.data_dir / "images");
  return *options.data_dir / "events.jsonl";
}

}  // namespace

Portal::Portal(std::map<std::string, User> users, PortalOptions options)
    : state_(std::move(users), options.config), log_(log_path(options)), options_(std::move(options)) {
  state_.apply(log_.load());
}

std::int64_t Portal::now() const {
  if (options_.clock) return options_.clock();
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

fs::path Portal::image_path(const std::string& image_id) const {
  return *options_.data_dir / "images" / (image_id + ".png");
}

std::vector<Event> Portal::transact(
    const std::function<std::vector<Event>(const PortalState&)>& plan) {
  std::unique_lock lock(mutex_);
  std::vector<Event> events = plan(state_);
  log_.append(events);
  state_.apply(events);
  return events;
}

ImageRecord Portal::upload_image(const std::string& uploader, const std::string& dataset_id,
                                 std::span<const std::uint8_t> bytes, const Demographics& group) {
  read([&](const PortalState& s) { return s.register_image(uploader, dataset_id, 1, 1, group, 0); });
  anonymizer::RasterImage raster = anonymizer::decode_image(bytes);
  std::unique_lock lock(mutex_);
  auto events = state_.register_image(uploader, dataset_id, raster.width, raster.height, group, now());
  const std::string id = events.front()["image_id"].get<std::string>();
  if (options_.data_dir) {
    anonymizer::save_image(raster, image_path(id));
  } else {
    images_[id] = std::move(raster);
  }
  log_.append(events);
  state_.apply(events);
  return state_.image(id);
}

Task Portal::create_task(const std::string& actor, const std::string& image_id,
                         const std::vector<MachineDetection>& detections) {
  auto ev = transact([&](const PortalState& s) { return s.create_task(actor, image_id, detections, now()); });
  return read([&](const PortalState& s) { return s.task(ev.front()["task_id"].get<std::string>()); });
}

Task Portal::close_task(const std::string& actor, const std::string& task_id) {
  transact([&](const PortalState& s) { return s.close_task(actor, task_id, now()); });
  return read([&](const PortalState& s) { return s.task(task_id); });
}

Submission Portal::submit_annotation(const std::string& annotator, const std::string& task_id,
                                     const AnnotationPayload& payload) {
  auto ev = transact(
      [&](const PortalState& s) { return s.submit_annotation(annotator, task_id, payload, now()); });
  return read([&](const PortalState& s) {
    return s.submission(ev.front()["submission_id"].get<std::string>());
  });
}

Submission Portal::cast_verdict(const std::string& verifier, const std::string& submission_id,
                                Decision decision) {
  std::unique_lock lock(mutex_);
  auto events = state_.cast_verdict(verifier, submission_id, decision, now());
  log_.append(events);
  state_.apply(events);
  return state_.submission(submission_id);
}

std::vector<LedgerEntry> Portal::award_bounty(const std::string& submission_id) {
  std::unique_lock lock(mutex_);
  auto events = state_.award_bounty(submission_id, now());
  const std::size_t before = state_.ledger().size();
  log_.append(events);
  state_.apply(events);
  return {state_.ledger().begin() + static_cast<std::ptrdiff_t>(before), state_.ledger().end()};
}

RevenueEvent Portal::record_revenue(const std::string& actor, const std::string& dataset_id,
                                    std::int64_t amount) {
  std::unique_lock lock(mutex_);
  auto events = state_.record_revenue(actor, dataset_id, amount, now());
  log_.append(events);
  state_.apply(events);
  return state_.revenue(events.front()["revenue_id"].get<std::string>());
}

std::int64_t Portal::get_balance(const std::string& user_id) const {
  return read([&](const PortalState& s) { return s.balance(user_id); });
}

DatasetManifest Portal::export_retrain_manifest(const std::string& dataset_id,
                                                std::optional<std::int64_t> since_ms) const {
  return read([&](const PortalState& s) { return s.retrain_manifest(dataset_id, since_ms); });
}

FairnessReport Portal::fairness_report(const std::string& dataset_id, double tau,
                                       Grouping grouping) const {
  std::vector<DetectionRecord> detections;
  DatasetManifest truth =
      read([&](const PortalState& s) { return s.ground_truth(dataset_id, &detections); });
  return fairlens::fairness_report(truth, detections, tau, grouping);
}

anonymizer::RasterImage Portal::image_raster(const std::string& image_id) const {
  std::shared_lock lock(mutex_);
  state_.image(image_id);
  if (options_.data_dir) return anonymizer::load_image(image_path(image_id));
  return images_.find(image_id)->second;
}

anonymizer::AnonymizeResult Portal::anonymize(const std::string& image_id,
                                              const anonymizer::BlurConfig& config,
                                              std::optional<std::vector<BoundingBox>> boxes) const {
  anonymizer::RasterImage raster = image_raster(image_id);
  std::vector<BoundingBox> faces =
      boxes ? *boxes : read([&](const PortalState& s) { return s.face_boxes(image_id); });
  return anonymizer::anonymize(raster, faces, config, image_id, now());
}

PortalState Portal::snapshot() const {
  return read([](const PortalState& s) { return s; });
}

}  // namespace fairlens::portal
