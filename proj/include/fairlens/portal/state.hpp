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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairlens/portal/types.hpp"
#include "json.hpp"

namespace fairlens::portal {

// One persisted event: {"seq", "type", "at_ms", ...payload}.
using Event = nlohmann::ordered_json;

/// Portal state as a pure fold over events. Command methods validate against
/// the current state and return the events that carry the change out; nothing
/// changes until those events are passed to apply(). Copies are independent.
class PortalState {
 public:
  explicit PortalState(std::map<std::string, User> users = {}, PortalConfig config = {});

  // Commands.
  std::vector<Event> register_image(const std::string& uploader, const std::string& dataset_id,
                                    int width, int height, const Demographics& group,
                                    std::int64_t now_ms) const;
  std::vector<Event> create_task(const std::string& actor, const std::string& image_id,
                                 const std::vector<MachineDetection>& detections,
                                 std::int64_t now_ms) const;
  std::vector<Event> close_task(const std::string& actor, const std::string& task_id,
                                std::int64_t now_ms) const;
  std::vector<Event> submit_annotation(const std::string& annotator, const std::string& task_id,
                                       const AnnotationPayload& payload,
                                       std::int64_t now_ms) const;
  std::vector<Event> cast_verdict(const std::string& verifier, const std::string& submission_id,
                                  Decision decision, std::int64_t now_ms) const;
  std::vector<Event> award_bounty(const std::string& submission_id, std::int64_t now_ms) const;
  std::vector<Event> record_revenue(const std::string& actor, const std::string& dataset_id,
                                    std::int64_t amount, std::int64_t now_ms) const;

  // Throws CorruptLog when the event does not follow this state.
  void apply(const Event& event);
  void apply(const std::vector<Event>& events);

  // Queries. Lookups throw UnknownImage, UnknownTask, UnknownSubmission,
  // UnknownRevenue or UnknownUser.
  const User& user(std::string_view user_id) const;
  const ImageRecord& image(std::string_view image_id) const;
  const Task& task(std::string_view task_id) const;
  const Submission& submission(std::string_view submission_id) const;
  const RevenueEvent& revenue(std::string_view revenue_id) const;
  std::vector<Task> tasks(std::optional<TaskState> state = std::nullopt) const;
  std::vector<Submission> submissions(std::optional<SubmissionState> state = std::nullopt) const;
  std::vector<ImageRecord> images(std::optional<std::string> dataset_id = std::nullopt) const;
  std::optional<std::string> open_task_for(std::string_view image_id) const;

  std::int64_t balance(std::string_view account) const;
  const std::map<std::string, std::int64_t, std::less<>>& balances() const { return balances_; }
  const std::vector<LedgerEntry>& ledger() const { return ledger_; }
  std::map<std::string, ContributionCounts> contributions(std::string_view dataset_id) const;

  /// Verified corrections decided strictly after `since_ms`: missed boxes as
  /// Positive instances and flagged machine detections as Negative ones,
  /// ordered by (image_id, instance_id).
  DatasetManifest retrain_manifest(const std::string& dataset_id,
                                   std::optional<std::int64_t> since_ms = std::nullopt) const;

  /// Current ground truth for every image of the dataset that has a task,
  /// using each image's latest task: unflagged machine detections and
  /// verified missed boxes become Positive regions, verified false-positive
  /// flags become Negative regions. `detections` receives that task's machine
  /// detections.
  DatasetManifest ground_truth(const std::string& dataset_id,
                               std::vector<DetectionRecord>* detections) const;

  // Faces to blur on an image under the current ground truth.
  std::vector<BoundingBox> face_boxes(std::string_view image_id) const;

  const PortalConfig& config() const { return config_; }
  std::int64_t next_seq() const { return next_seq_; }

 private:
  Event make_event(std::string_view type, std::int64_t seq, std::int64_t now_ms) const;
  void require_role(const std::string& user_id, Role role) const;
  void check_box(const BoundingBox& box, const ImageRecord& image) const;
  std::vector<Event> bounty_events(const Submission& s, std::int64_t seq, std::int64_t now_ms) const;
  void post(std::string debit, std::string credit, std::int64_t amount, EntryReason reason,
            std::string reference, std::int64_t at_ms);
  std::string latest_task_for(std::string_view image_id) const;

  std::map<std::string, User, std::less<>> users_;
  PortalConfig config_;

  std::map<std::string, ImageRecord, std::less<>> images_;
  std::map<std::string, Task, std::less<>> tasks_;
  std::map<std::string, Submission, std::less<>> submissions_;
  std::map<std::string, RevenueEvent, std::less<>> revenue_;
  std::map<std::string, std::string, std::less<>> open_tasks_;  // image -> task
  std::map<std::string, std::vector<std::string>, std::less<>> image_tasks_;
  std::map<std::string, std::map<std::string, ContributionCounts>, std::less<>> contributions_;
  std::vector<LedgerEntry> ledger_;
  std::map<std::string, std::int64_t, std::less<>> balances_;

  std::int64_t next_seq_ = 1;
  std::int64_t image_counter_ = 0;
  std::int64_t task_counter_ = 0;
  std::int64_t submission_counter_ = 0;
  std::int64_t revenue_counter_ = 0;
};

std::string format_id(std::string_view prefix, std::int64_t n);

}  // namespace fairlens::portal
