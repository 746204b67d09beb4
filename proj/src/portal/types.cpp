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

#include "fairlens/portal/types.hpp"

#include <algorithm>

#include "fairlens/common/error.hpp"
#include "fairlens/ingest/loaders.hpp"

namespace fairlens::portal {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Uploader: return "uploader";
    case Role::Annotator: return "annotator";
    case Role::Verifier: return "verifier";
  }
  return "uploader";
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "uploader") return Role::Uploader;
  if (s == "annotator") return Role::Annotator;
  if (s == "verifier") return Role::Verifier;
  return std::nullopt;
}

std::string_view to_string(TaskState s) { return s == TaskState::Open ? "open" : "closed"; }

std::string_view to_string(SubmissionState s) {
  switch (s) {
    case SubmissionState::Submitted: return "submitted";
    case SubmissionState::Verified: return "verified";
    case SubmissionState::Rejected: return "rejected";
  }
  return "submitted";
}

std::string_view to_string(Decision d) { return d == Decision::Approve ? "approve" : "reject"; }

std::string_view to_string(EntryReason r) {
  switch (r) {
    case EntryReason::Bounty: return "bounty";
    case EntryReason::VerificationFee: return "verification_fee";
    case EntryReason::Royalty: return "royalty";
  }
  return "bounty";
}

std::optional<TaskState> parse_task_state(std::string_view s) {
  if (s == "open") return TaskState::Open;
  if (s == "closed") return TaskState::Closed;
  return std::nullopt;
}

std::optional<SubmissionState> parse_submission_state(std::string_view s) {
  if (s == "submitted") return SubmissionState::Submitted;
  if (s == "verified") return SubmissionState::Verified;
  if (s == "rejected") return SubmissionState::Rejected;
  return std::nullopt;
}

std::optional<Decision> parse_decision(std::string_view s) {
  if (s == "approve") return Decision::Approve;
  if (s == "reject") return Decision::Reject;
  return std::nullopt;
}

bool Submission::has_verdict_from(std::string_view user) const {
  return std::any_of(verdicts.begin(), verdicts.end(),
                     [&](const Verdict& v) { return v.verifier == user; });
}

int Submission::count(Decision d) const {
  return static_cast<int>(std::count_if(verdicts.begin(), verdicts.end(),
                                        [&](const Verdict& v) { return v.decision == d; }));
}

ordered_json to_json(const ImageRecord& r) {
  return {{"image_id", r.image_id},     {"dataset_id", r.dataset_id},
          {"uploader", r.uploader},     {"width", r.width},
          {"height", r.height},         {"group", fairlens::to_json(r.group)},
          {"uploaded_at_ms", r.uploaded_at_ms}};
}

ordered_json to_json(const Task& t) {
  ordered_json dets = ordered_json::array();
  for (const auto& d : t.detections) {
    dets.push_back({{"box", fairlens::to_json(d.box)}, {"confidence", d.confidence}});
  }
  return {{"task_id", t.task_id},
          {"image_id", t.image_id},
          {"state", to_string(t.state)},
          {"detections", dets},
          {"created_at_ms", t.created_at_ms},
          {"created_by", t.created_by}};
}

ordered_json to_json(const AnnotationPayload& p) {
  ordered_json boxes = ordered_json::array();
  for (const auto& m : p.missed_boxes) {
    ordered_json b = {{"box", fairlens::to_json(m.box)}};
    if (m.demographics) b["demographics"] = fairlens::to_json(*m.demographics);
    boxes.push_back(b);
  }
  return {{"missed_boxes", boxes}, {"false_positive_flags", p.false_positive_flags}};
}

ordered_json to_json(const Submission& s) {
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : s.verdicts) {
    verdicts.push_back(
        {{"verifier", v.verifier}, {"decision", to_string(v.decision)}, {"at_ms", v.at_ms}});
  }
  ordered_json payload = to_json(s.payload);
  return {{"submission_id", s.submission_id},
          {"task_id", s.task_id},
          {"annotator", s.annotator},
          {"state", to_string(s.state)},
          {"missed_boxes", payload["missed_boxes"]},
          {"false_positive_flags", payload["false_positive_flags"]},
          {"verdicts", verdicts},
          {"submitted_at_ms", s.submitted_at_ms},
          {"decided_at_ms", s.decided_at_ms ? ordered_json(*s.decided_at_ms) : ordered_json()},
          {"awarded", s.awarded}};
}

ordered_json to_json(const LedgerEntry& e) {
  return {{"entry_id", e.entry_id}, {"debit", e.debit},   {"credit", e.credit},
          {"amount", e.amount},     {"reason", to_string(e.reason)},
          {"reference", e.reference}, {"at_ms", e.at_ms}};
}

ordered_json to_json(const RevenueEvent& r) {
  ordered_json alloc = ordered_json::array();
  for (const auto& a : r.allocations) alloc.push_back({{"user_id", a.user_id}, {"amount", a.amount}});
  return {{"revenue_id", r.revenue_id}, {"dataset_id", r.dataset_id}, {"amount", r.amount},
          {"allocations", alloc},       {"entry_ids", r.entry_ids},   {"at_ms", r.at_ms}};
}

namespace {

[[noreturn]] void bad_request(const std::string& why) {
  throw Error("MalformedRequest", why);
}

BoundingBox request_box(const json& j) {
  if (!j.is_object()) bad_request("box must be an object");
  for (const char* k : {"x_min", "y_min", "x_max", "y_max"}) {
    if (!j.contains(k) || !j[k].is_number()) bad_request(std::string("box needs numeric ") + k);
  }
  return {j["x_min"].get<double>(), j["y_min"].get<double>(), j["x_max"].get<double>(),
          j["y_max"].get<double>()};
}

// Accepts either {"box": {...}, ...} or the box fields inline.
BoundingBox box_member(const json& j) {
  return j.contains("box") ? request_box(j["box"]) : request_box(j);
}

}  // namespace

Demographics demographics_or_unknown(const json& j) {
  if (j.is_null()) return {};
  try {
    return demographics_from_json(j, 0);
  } catch (const Error& e) {
    throw Error("InvalidDemographics", e.what());
  }
}

AnnotationPayload payload_from_json(const json& j) {
  if (!j.is_object()) bad_request("annotation body must be an object");
  AnnotationPayload p;
  if (j.contains("missed_boxes")) {
    if (!j["missed_boxes"].is_array()) bad_request("missed_boxes must be an array");
    for (const auto& m : j["missed_boxes"]) {
      if (!m.is_object()) bad_request("missed box must be an object");
      MissedBox box{box_member(m), std::nullopt};
      if (m.contains("demographics") && !m["demographics"].is_null()) {
        box.demographics = demographics_or_unknown(m["demographics"]);
      }
      p.missed_boxes.push_back(box);
    }
  }
  if (j.contains("false_positive_flags")) {
    if (!j["false_positive_flags"].is_array()) bad_request("false_positive_flags must be an array");
    for (const auto& f : j["false_positive_flags"]) {
      if (!f.is_number_integer()) bad_request("false positive flags must be integers");
      p.false_positive_flags.push_back(f.get<int>());
    }
  }
  return p;
}

std::vector<MachineDetection> detections_from_json(const json& j) {
  if (!j.is_array()) bad_request("detections must be an array");
  std::vector<MachineDetection> out;
  for (const auto& d : j) {
    if (!d.is_object()) bad_request("detection must be an object");
    if (!d.contains("confidence") || !d["confidence"].is_number()) {
      bad_request("detection needs a numeric confidence");
    }
    out.push_back({box_member(d), d["confidence"].get<double>()});
  }
  return out;
}

}  // namespace fairlens::portal
