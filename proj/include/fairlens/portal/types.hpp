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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fairlens/ingest/types.hpp"
#include "json.hpp"

namespace fairlens::portal {

inline constexpr std::string_view kTreasury = "platform-treasury";

enum class Role { Uploader, Annotator, Verifier };
std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view s);

struct User {
  std::string user_id;
  std::set<Role> roles;

  bool has(Role r) const { return roles.count(r) > 0; }
};

enum class TaskState { Open, Closed };
enum class SubmissionState { Submitted, Verified, Rejected };
enum class Decision { Approve, Reject };
enum class EntryReason { Bounty, VerificationFee, Royalty };

std::string_view to_string(TaskState s);
std::string_view to_string(SubmissionState s);
std::string_view to_string(Decision d);
std::string_view to_string(EntryReason r);
std::optional<TaskState> parse_task_state(std::string_view s);
std::optional<SubmissionState> parse_submission_state(std::string_view s);
std::optional<Decision> parse_decision(std::string_view s);

struct ImageRecord {
  std::string image_id;
  std::string dataset_id;
  std::string uploader;
  int width = 0;
  int height = 0;
  Demographics group;
  std::int64_t uploaded_at_ms = 0;
};

struct MachineDetection {
  BoundingBox box;
  double confidence = 0;
};

struct Task {
  std::string task_id;
  std::string image_id;
  std::vector<MachineDetection> detections;
  TaskState state = TaskState::Open;
  std::int64_t created_at_ms = 0;
  std::string created_by;
};

struct MissedBox {
  BoundingBox box;
  std::optional<Demographics> demographics;
};

struct AnnotationPayload {
  std::vector<MissedBox> missed_boxes;
  std::vector<int> false_positive_flags;
};

struct Verdict {
  std::string verifier;
  Decision decision = Decision::Approve;
  std::int64_t at_ms = 0;
};

struct Submission {
  std::string submission_id;
  std::string task_id;
  std::string annotator;
  AnnotationPayload payload;
  SubmissionState state = SubmissionState::Submitted;
  std::vector<Verdict> verdicts;
  std::int64_t submitted_at_ms = 0;
  std::optional<std::int64_t> decided_at_ms;
  bool awarded = false;

  bool has_verdict_from(std::string_view user) const;
  int count(Decision d) const;
};

struct LedgerEntry {
  std::int64_t entry_id = 0;
  std::string debit;
  std::string credit;
  std::int64_t amount = 0;
  EntryReason reason = EntryReason::Bounty;
  std::string reference;
  std::int64_t at_ms = 0;
};

struct Allocation {
  std::string user_id;
  std::int64_t amount = 0;
};

struct RevenueEvent {
  std::string revenue_id;
  std::string dataset_id;
  std::int64_t amount = 0;
  std::vector<Allocation> allocations;
  std::vector<std::int64_t> entry_ids;
  std::int64_t at_ms = 0;
};

// Contribution counts for one user within one dataset.
struct ContributionCounts {
  std::int64_t uploads = 0;
  std::int64_t annotations = 0;  // verified submissions authored
  std::int64_t verdicts = 0;     // verdicts cast on submissions that became verified
};

// Weights in parts per million.
struct RoleWeights {
  std::int64_t uploader = 500000;
  std::int64_t annotator = 300000;
  std::int64_t verifier = 200000;
};

struct PortalConfig {
  int quorum = 2;
  std::int64_t bounty = 100;
  std::int64_t verification_fee = 10;
  RoleWeights royalty_weights;
  bool auto_award = true;
};

nlohmann::ordered_json to_json(const ImageRecord& r);
nlohmann::ordered_json to_json(const Task& t);
nlohmann::ordered_json to_json(const Submission& s);
nlohmann::ordered_json to_json(const AnnotationPayload& p);
nlohmann::ordered_json to_json(const LedgerEntry& e);
nlohmann::ordered_json to_json(const RevenueEvent& r);

Demographics demographics_or_unknown(const nlohmann::json& j);
AnnotationPayload payload_from_json(const nlohmann::json& j);
std::vector<MachineDetection> detections_from_json(const nlohmann::json& j);

}  // namespace fairlens::portal
