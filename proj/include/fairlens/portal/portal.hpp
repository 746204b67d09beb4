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
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "fairlens/anonymizer/blur.hpp"
#include "fairlens/fairness/report.hpp"
#include "fairlens/portal/state.hpp"

namespace fairlens::portal {

// Append-only event file: a "portal_events" header record, then one event per
// line. An unterminated final line (an interrupted append) is ignored.
class EventLog {
 public:
  explicit EventLog(std::optional<std::filesystem::path> path = std::nullopt);

  std::vector<Event> load() const;
  void append(const std::vector<Event>& events);
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
};

struct PortalOptions {
  PortalConfig config;
  // Holds events.jsonl and images/; in-memory only when unset.
  std::optional<std::filesystem::path> data_dir;
  std::function<std::int64_t()> clock;  // milliseconds; system clock when unset
};

/// Thread-safe portal service. Reads run concurrently; every mutation is
/// planned, appended to the event log and applied under one exclusive lock,
/// so the log is a total order of mutations and readers never see half of
/// one.
class Portal {
 public:
  // Replays an existing event log from the data directory.
  Portal(std::map<std::string, User> users, PortalOptions options = {});

  ImageRecord upload_image(const std::string& uploader, const std::string& dataset_id,
                           std::span<const std::uint8_t> bytes, const Demographics& group = {});
  Task create_task(const std::string& actor, const std::string& image_id,
                   const std::vector<MachineDetection>& detections);
  Task close_task(const std::string& actor, const std::string& task_id);
  Submission submit_annotation(const std::string& annotator, const std::string& task_id,
                               const AnnotationPayload& payload);
  Submission cast_verdict(const std::string& verifier, const std::string& submission_id,
                          Decision decision);
  std::vector<LedgerEntry> award_bounty(const std::string& submission_id);
  RevenueEvent record_revenue(const std::string& actor, const std::string& dataset_id,
                              std::int64_t amount);

  std::int64_t get_balance(const std::string& user_id) const;
  DatasetManifest export_retrain_manifest(const std::string& dataset_id,
                                          std::optional<std::int64_t> since_ms) const;
  FairnessReport fairness_report(const std::string& dataset_id, double tau,
                                 Grouping grouping) const;
  anonymizer::RasterImage image_raster(const std::string& image_id) const;
  anonymizer::AnonymizeResult anonymize(const std::string& image_id,
                                        const anonymizer::BlurConfig& config,
                                        std::optional<std::vector<BoundingBox>> boxes) const;

  // Consistent copy of the whole state.
  PortalState snapshot() const;

  // Plans against the current state, then logs and applies the events, all
  // under the writer lock.
  std::vector<Event> transact(const std::function<std::vector<Event>(const PortalState&)>& plan);

  template <typename Fn>
  auto read(Fn&& fn) const {
    std::shared_lock lock(mutex_);
    return fn(state_);
  }

 private:
  std::int64_t now() const;
  std::filesystem::path image_path(const std::string& image_id) const;

  mutable std::shared_mutex mutex_;
  PortalState state_;
  EventLog log_;
  PortalOptions options_;
  std::map<std::string, anonymizer::RasterImage, std::less<>> images_;  // in-memory mode
};

}  // namespace fairlens::portal
