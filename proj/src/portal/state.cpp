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

#include "fairlens/portal/state.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "fairlens/common/error.hpp"
#include "fairlens/ingest/loaders.hpp"
#include "fairlens/portal/royalty.hpp"

namespace fairlens::portal {

using json = nlohmann::json;

std::string format_id(std::string_view prefix, std::int64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%06lld", static_cast<long long>(n));
  return std::string(prefix) + buf;
}

namespace {

std::string revenue_account(std::string_view dataset_id) {
  return "revenue:" + std::string(dataset_id);
}

Event box_json(const BoundingBox& b) { return Event(fairlens::to_json(b)); }

BoundingBox box_of(const json& j) { return box_from_json(j, 0); }

}  // namespace

PortalState::PortalState(std::map<std::string, User> users, PortalConfig config)
    : config_(config) {
  for (auto& [id, u] : users) users_.emplace(id, std::move(u));
  if (config_.quorum < 1) {
    throw Error("BadParameter", "quorum must be at least 1", {{"quorum", config_.quorum}});
  }
  if (config_.bounty < 0 || config_.verification_fee < 0) {
    throw Error("BadParameter", "bounty and fee must be non-negative");
  }
}

Event PortalState::make_event(std::string_view type, std::int64_t seq, std::int64_t now_ms) const {
  Event e;
  e["seq"] = seq;
  e["type"] = type;
  e["at_ms"] = now_ms;
  return e;
}

const User& PortalState::user(std::string_view user_id) const {
  auto it = users_.find(user_id);
  if (it == users_.end()) {
    throw Error("UnknownUser", "unknown user " + std::string(user_id), {{"user_id", user_id}});
  }
  return it->second;
}

void PortalState::require_role(const std::string& user_id, Role role) const {
  auto it = users_.find(user_id);
  if (it == users_.end() || !it->second.has(role)) {
    throw Error("Unauthorized", "user " + user_id + " lacks the " + std::string(to_string(role)) +
                                    " role",
                {{"user_id", user_id}, {"role", to_string(role)}});
  }
}

void PortalState::check_box(const BoundingBox& box, const ImageRecord& image) const {
  if (!box.valid() || box.x_max > image.width || box.y_max > image.height) {
    throw Error("InvalidBox", "box must lie inside the " + std::to_string(image.width) + "x" +
                                  std::to_string(image.height) + " image",
                {{"box", fairlens::to_json(box)}, {"image_id", image.image_id}});
  }
}

const ImageRecord& PortalState::image(std::string_view image_id) const {
  auto it = images_.find(image_id);
  if (it == images_.end()) {
    throw Error("UnknownImage", "unknown image " + std::string(image_id), {{"image_id", image_id}});
  }
  return it->second;
}

const Task& PortalState::task(std::string_view task_id) const {
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) {
    throw Error("UnknownTask", "unknown task " + std::string(task_id), {{"task_id", task_id}});
  }
  return it->second;
}

const Submission& PortalState::submission(std::string_view submission_id) const {
  auto it = submissions_.find(submission_id);
  if (it == submissions_.end()) {
    throw Error("UnknownSubmission", "unknown submission " + std::string(submission_id),
                {{"submission_id", submission_id}});
  }
  return it->second;
}

const RevenueEvent& PortalState::revenue(std::string_view revenue_id) const {
  auto it = revenue_.find(revenue_id);
  if (it == revenue_.end()) {
    throw Error("UnknownRevenue", "unknown revenue event " + std::string(revenue_id),
                {{"revenue_id", revenue_id}});
  }
  return it->second;
}

std::vector<Task> PortalState::tasks(std::optional<TaskState> state) const {
  std::vector<Task> out;
  for (const auto& [id, t] : tasks_) {
    if (!state || t.state == *state) out.push_back(t);
  }
  return out;
}

std::vector<Submission> PortalState::submissions(std::optional<SubmissionState> state) const {
  std::vector<Submission> out;
  for (const auto& [id, s] : submissions_) {
    if (!state || s.state == *state) out.push_back(s);
  }
  return out;
}

std::vector<ImageRecord> PortalState::images(std::optional<std::string> dataset_id) const {
  std::vector<ImageRecord> out;
  for (const auto& [id, img] : images_) {
    if (!dataset_id || img.dataset_id == *dataset_id) out.push_back(img);
  }
  return out;
}

std::optional<std::string> PortalState::open_task_for(std::string_view image_id) const {
  auto it = open_tasks_.find(image_id);
  if (it == open_tasks_.end()) return std::nullopt;
  return it->second;
}

std::int64_t PortalState::balance(std::string_view account) const {
  auto it = balances_.find(account);
  if (it != balances_.end()) return it->second;
  if (users_.count(account) || account == kTreasury) return 0;
  throw Error("UnknownUser", "unknown account " + std::string(account), {{"user_id", account}});
}

std::map<std::string, ContributionCounts> PortalState::contributions(
    std::string_view dataset_id) const {
  auto it = contributions_.find(dataset_id);
  return it == contributions_.end() ? std::map<std::string, ContributionCounts>{} : it->second;
}

std::vector<Event> PortalState::register_image(const std::string& uploader,
                                               const std::string& dataset_id, int width,
                                               int height, const Demographics& group,
                                               std::int64_t now_ms) const {
  require_role(uploader, Role::Uploader);
  if (dataset_id.empty()) throw Error("BadParameter", "dataset_id must not be empty");
  if (width < 1 || height < 1) {
    throw Error("InvalidImage", "image dimensions must be positive",
                {{"width", width}, {"height", height}});
  }
  if (!TaxonomyRegistry::defaults().accepts(dataset_id, group.ethnicity)) {
    throw Error("InvalidDemographics",
                "ethnicity '" + group.ethnicity + "' is not in the taxonomy of " + dataset_id,
                {{"dataset_id", dataset_id}, {"ethnicity", group.ethnicity}});
  }
  Event e = make_event("image_registered", next_seq_, now_ms);
  e["image_id"] = format_id("img", image_counter_ + 1);
  e["dataset_id"] = dataset_id;
  e["uploader"] = uploader;
  e["width"] = width;
  e["height"] = height;
  e["group"] = Event(fairlens::to_json(group));
  return {e};
}

std::vector<Event> PortalState::create_task(const std::string& actor, const std::string& image_id,
                                            const std::vector<MachineDetection>& detections,
                                            std::int64_t now_ms) const {
  require_role(actor, Role::Uploader);
  const ImageRecord& img = image(image_id);
  if (auto open = open_task_for(image_id)) {
    throw Error("DuplicateOpenTask", "image " + image_id + " already has open task " + *open,
                {{"image_id", image_id}, {"task_id", *open}});
  }
  Event dets = Event::array();
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    check_box(d.box, img);
    if (!(d.confidence >= 0 && d.confidence <= 1)) {
      throw Error("ConfidenceOutOfRange", "detection confidence must lie in [0,1]",
                  {{"index", i}, {"confidence", d.confidence}});
    }
    dets.push_back({{"box", box_json(d.box)}, {"confidence", d.confidence}});
  }
  Event e = make_event("task_created", next_seq_, now_ms);
  e["task_id"] = format_id("task", task_counter_ + 1);
  e["image_id"] = image_id;
  e["created_by"] = actor;
  e["detections"] = dets;
  return {e};
}

std::vector<Event> PortalState::close_task(const std::string& actor, const std::string& task_id,
                                           std::int64_t now_ms) const {
  require_role(actor, Role::Uploader);
  if (task(task_id).state == TaskState::Closed) {
    throw Error("TaskClosed", "task " + task_id + " is already closed", {{"task_id", task_id}});
  }
  Event e = make_event("task_closed", next_seq_, now_ms);
  e["task_id"] = task_id;
  return {e};
}

std::vector<Event> PortalState::submit_annotation(const std::string& annotator,
                                                  const std::string& task_id,
                                                  const AnnotationPayload& payload,
                                                  std::int64_t now_ms) const {
  require_role(annotator, Role::Annotator);
  const Task& t = task(task_id);
  if (t.state != TaskState::Open) {
    throw Error("TaskClosed", "task " + task_id + " is closed", {{"task_id", task_id}});
  }
  if (payload.missed_boxes.empty() && payload.false_positive_flags.empty()) {
    throw Error("EmptyAnnotation", "an annotation needs a missed box or a false-positive flag");
  }
  const ImageRecord& img = image(t.image_id);
  Event boxes = Event::array();
  for (const auto& m : payload.missed_boxes) {
    check_box(m.box, img);
    Event b = {{"box", box_json(m.box)}};
    if (m.demographics) {
      if (!TaxonomyRegistry::defaults().accepts(img.dataset_id, m.demographics->ethnicity)) {
        throw Error("InvalidDemographics",
                    "ethnicity '" + m.demographics->ethnicity + "' is not in the taxonomy of " +
                        img.dataset_id,
                    {{"dataset_id", img.dataset_id}, {"ethnicity", m.demographics->ethnicity}});
      }
      b["demographics"] = Event(fairlens::to_json(*m.demographics));
    }
    boxes.push_back(b);
  }
  std::set<int> flags;
  for (int f : payload.false_positive_flags) {
    if (f < 0 || static_cast<std::size_t>(f) >= t.detections.size()) {
      throw Error("UnknownDetectionIndex",
                  "task " + task_id + " has no detection " + std::to_string(f),
                  {{"index", f}, {"detections", t.detections.size()}});
    }
    flags.insert(f);
  }
  Event e = make_event("annotation_submitted", next_seq_, now_ms);
  e["submission_id"] = format_id("sub", submission_counter_ + 1);
  e["task_id"] = task_id;
  e["annotator"] = annotator;
  e["missed_boxes"] = boxes;
  e["false_positive_flags"] = std::vector<int>(flags.begin(), flags.end());
  return {e};
}

std::vector<Event> PortalState::bounty_events(const Submission& s, std::int64_t seq,
                                              std::int64_t now_ms) const {
  Event e = make_event("bounty_awarded", seq, now_ms);
  e["submission_id"] = s.submission_id;
  e["bounty"] = config_.bounty;
  e["verification_fee"] = config_.verification_fee;
  return {e};
}

std::vector<Event> PortalState::cast_verdict(const std::string& verifier,
                                             const std::string& submission_id, Decision decision,
                                             std::int64_t now_ms) const {
  const Submission& s = submission(submission_id);
  if (verifier == s.annotator) {
    throw Error("SelfVerification", "annotators cannot verify their own submissions",
                {{"submission_id", submission_id}, {"user_id", verifier}});
  }
  require_role(verifier, Role::Verifier);
  if (s.state != SubmissionState::Submitted) {
    throw Error("AlreadyTerminal", "submission " + submission_id + " is already " +
                                       std::string(to_string(s.state)),
                {{"submission_id", submission_id}, {"state", to_string(s.state)}});
  }
  if (s.has_verdict_from(verifier)) {
    throw Error("DuplicateVerdict", verifier + " has already voted on " + submission_id,
                {{"submission_id", submission_id}, {"user_id", verifier}});
  }
  Event e = make_event("verdict_cast", next_seq_, now_ms);
  e["submission_id"] = submission_id;
  e["verifier"] = verifier;
  e["decision"] = to_string(decision);
  std::vector<Event> out{e};
  const bool verifies = decision == Decision::Approve &&
                        s.count(Decision::Approve) + 1 >= config_.quorum;
  if (verifies && config_.auto_award) {
    auto bounty = bounty_events(s, next_seq_ + 1, now_ms);
    out.insert(out.end(), bounty.begin(), bounty.end());
  }
  return out;
}

std::vector<Event> PortalState::award_bounty(const std::string& submission_id,
                                             std::int64_t now_ms) const {
  const Submission& s = submission(submission_id);
  if (s.state != SubmissionState::Verified) {
    throw Error("NotVerified", "submission " + submission_id + " is not verified",
                {{"submission_id", submission_id}, {"state", to_string(s.state)}});
  }
  if (s.awarded) {
    throw Error("AlreadyAwarded", "submission " + submission_id + " was already awarded",
                {{"submission_id", submission_id}});
  }
  return bounty_events(s, next_seq_, now_ms);
}

std::vector<Event> PortalState::record_revenue(const std::string& actor,
                                               const std::string& dataset_id,
                                               std::int64_t amount, std::int64_t now_ms) const {
  require_role(actor, Role::Uploader);
  if (amount <= 0) throw Error("BadAmount", "amount must be positive", {{"amount", amount}});
  const auto weights = royalty_weights(contributions(dataset_id), config_.royalty_weights);
  if (weights.empty()) {
    throw Error("NoContributors", "dataset " + dataset_id + " has no contributions",
                {{"dataset_id", dataset_id}});
  }
  const auto allocations = allocate_largest_remainder(amount, weights);
  Event e = make_event("revenue_recorded", next_seq_, now_ms);
  e["revenue_id"] = format_id("rev", revenue_counter_ + 1);
  e["dataset_id"] = dataset_id;
  e["amount"] = amount;
  Event alloc = Event::array();
  for (const auto& a : allocations) alloc.push_back({{"user_id", a.user_id}, {"amount", a.amount}});
  e["allocations"] = alloc;
  return {e};
}

void PortalState::post(std::string debit, std::string credit, std::int64_t amount,
                       EntryReason reason, std::string reference, std::int64_t at_ms) {
  if (amount <= 0) return;
  LedgerEntry entry{static_cast<std::int64_t>(ledger_.size()) + 1, std::move(debit),
                    std::move(credit), amount, reason, std::move(reference), at_ms};
  balances_[entry.debit] -= amount;
  balances_[entry.credit] += amount;
  ledger_.push_back(std::move(entry));
}

void PortalState::apply(const std::vector<Event>& events) {
  for (const auto& e : events) apply(e);
}

void PortalState::apply(const Event& e) {
  try {
    const std::int64_t seq = e.at("seq").get<std::int64_t>();
    if (seq != next_seq_) {
      throw Error("CorruptLog", "event out of sequence",
                  {{"expected", next_seq_}, {"found", seq}});
    }
    const std::string type = e.at("type").get<std::string>();
    const std::int64_t at = e.at("at_ms").get<std::int64_t>();

    if (type == "image_registered") {
      ImageRecord r{e.at("image_id").get<std::string>(), e.at("dataset_id").get<std::string>(),
                    e.at("uploader").get<std::string>(), e.at("width").get<int>(),
                    e.at("height").get<int>(), demographics_or_unknown(json(e.at("group"))), at};
      contributions_[r.dataset_id][r.uploader].uploads += 1;
      images_[r.image_id] = std::move(r);
      ++image_counter_;
    } else if (type == "task_created") {
      Task t{e.at("task_id").get<std::string>(), e.at("image_id").get<std::string>(), {},
             TaskState::Open, at, e.at("created_by").get<std::string>()};
      for (const auto& d : e.at("detections")) {
        t.detections.push_back({box_of(json(d.at("box"))), d.at("confidence").get<double>()});
      }
      open_tasks_[t.image_id] = t.task_id;
      image_tasks_[t.image_id].push_back(t.task_id);
      tasks_[t.task_id] = std::move(t);
      ++task_counter_;
    } else if (type == "task_closed") {
      auto& t = tasks_.at(e.at("task_id").get<std::string>());
      t.state = TaskState::Closed;
      open_tasks_.erase(t.image_id);
    } else if (type == "annotation_submitted") {
      Submission s;
      s.submission_id = e.at("submission_id").get<std::string>();
      s.task_id = e.at("task_id").get<std::string>();
      s.annotator = e.at("annotator").get<std::string>();
      s.submitted_at_ms = at;
      for (const auto& m : e.at("missed_boxes")) {
        MissedBox box{box_of(json(m.at("box"))), std::nullopt};
        if (m.contains("demographics")) box.demographics = demographics_or_unknown(json(m["demographics"]));
        s.payload.missed_boxes.push_back(box);
      }
      s.payload.false_positive_flags = e.at("false_positive_flags").get<std::vector<int>>();
      submissions_[s.submission_id] = std::move(s);
      ++submission_counter_;
    } else if (type == "verdict_cast") {
      auto& s = submissions_.at(e.at("submission_id").get<std::string>());
      const auto decision = parse_decision(e.at("decision").get<std::string>());
      if (!decision) throw Error("CorruptLog", "bad decision");
      s.verdicts.push_back({e.at("verifier").get<std::string>(), *decision, at});
      if (s.count(Decision::Approve) >= config_.quorum) {
        s.state = SubmissionState::Verified;
        s.decided_at_ms = at;
        const std::string& dataset = images_.at(tasks_.at(s.task_id).image_id).dataset_id;
        auto& counts = contributions_[dataset];
        counts[s.annotator].annotations += 1;
        for (const auto& v : s.verdicts) counts[v.verifier].verdicts += 1;
      } else if (s.count(Decision::Reject) >= config_.quorum) {
        s.state = SubmissionState::Rejected;
        s.decided_at_ms = at;
      }
    } else if (type == "bounty_awarded") {
      auto& s = submissions_.at(e.at("submission_id").get<std::string>());
      if (s.awarded || s.state != SubmissionState::Verified) {
        throw Error("CorruptLog", "bounty for a submission that cannot be awarded",
                    {{"submission_id", s.submission_id}});
      }
      const std::string treasury(kTreasury);
      post(treasury, s.annotator, e.at("bounty").get<std::int64_t>(), EntryReason::Bounty,
           s.submission_id, at);
      const auto fee = e.at("verification_fee").get<std::int64_t>();
      for (const auto& v : s.verdicts) {
        if (v.decision == Decision::Approve) {
          post(treasury, v.verifier, fee, EntryReason::VerificationFee, s.submission_id, at);
        }
      }
      s.awarded = true;
    } else if (type == "revenue_recorded") {
      RevenueEvent r{e.at("revenue_id").get<std::string>(), e.at("dataset_id").get<std::string>(),
                     e.at("amount").get<std::int64_t>(), {}, {}, at};
      for (const auto& a : e.at("allocations")) {
        Allocation alloc{a.at("user_id").get<std::string>(), a.at("amount").get<std::int64_t>()};
        const auto before = ledger_.size();
        post(revenue_account(r.dataset_id), alloc.user_id, alloc.amount, EntryReason::Royalty,
             r.revenue_id, at);
        if (ledger_.size() > before) r.entry_ids.push_back(ledger_.back().entry_id);
        r.allocations.push_back(std::move(alloc));
      }
      revenue_[r.revenue_id] = std::move(r);
      ++revenue_counter_;
    } else {
      throw Error("CorruptLog", "unknown event type " + type, {{"type", type}});
    }
    ++next_seq_;
  } catch (const json::exception& ex) {
    throw Error("CorruptLog", std::string("malformed event: ") + ex.what());
  } catch (const std::out_of_range& ex) {
    throw Error("CorruptLog", std::string("event refers to unknown state: ") + ex.what());
  }
}

std::string PortalState::latest_task_for(std::string_view image_id) const {
  auto it = image_tasks_.find(image_id);
  return it == image_tasks_.end() || it->second.empty() ? std::string() : it->second.back();
}

namespace {

std::string indexed(const std::string& base, const char* tag, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-%s%03zu", tag, i);
  return base + buf;
}

}  // namespace

DatasetManifest PortalState::retrain_manifest(const std::string& dataset_id,
                                              std::optional<std::int64_t> since_ms) const {
  DatasetManifest m;
  m.dataset_id = dataset_id;
  m.provenance = "portal retrain export" +
                 (since_ms ? " since_ms=" + std::to_string(*since_ms) : std::string());
  std::set<std::string> image_ids;
  for (const auto& [id, s] : submissions_) {
    if (s.state != SubmissionState::Verified) continue;
    if (since_ms && !(s.decided_at_ms && *s.decided_at_ms > *since_ms)) continue;
    const Task& t = tasks_.at(s.task_id);
    const ImageRecord& img = images_.at(t.image_id);
    if (img.dataset_id != dataset_id) continue;
    image_ids.insert(img.image_id);
    for (std::size_t k = 0; k < s.payload.missed_boxes.size(); ++k) {
      const auto& mb = s.payload.missed_boxes[k];
      m.instances.push_back({indexed(id, "m", k), img.image_id, mb.box, RegionKind::Positive,
                             mb.demographics.value_or(img.group), std::nullopt});
    }
    for (int f : s.payload.false_positive_flags) {
      m.instances.push_back({indexed(id, "fp", static_cast<std::size_t>(f)), img.image_id,
                             t.detections[static_cast<std::size_t>(f)].box, RegionKind::Negative,
                             img.group, std::nullopt});
    }
  }
  for (const auto& id : image_ids) m.images.push_back({id, std::nullopt, images_.at(id).group});
  std::sort(m.instances.begin(), m.instances.end(), [](const auto& a, const auto& b) {
    return std::tie(a.image_id, a.instance_id) < std::tie(b.image_id, b.instance_id);
  });
  return m;
}

DatasetManifest PortalState::ground_truth(const std::string& dataset_id,
                                          std::vector<DetectionRecord>* detections) const {
  DatasetManifest m;
  m.dataset_id = dataset_id;
  m.provenance = "portal ground truth";
  for (const auto& [image_id, img] : images_) {
    if (img.dataset_id != dataset_id) continue;
    const std::string task_id = latest_task_for(image_id);
    if (task_id.empty()) continue;
    const Task& t = tasks_.at(task_id);
    m.images.push_back({image_id, std::nullopt, img.group});
    std::set<int> flagged;
    std::vector<FaceInstance> missed;
    for (const auto& [sid, s] : submissions_) {
      if (s.task_id != task_id || s.state != SubmissionState::Verified) continue;
      flagged.insert(s.payload.false_positive_flags.begin(), s.payload.false_positive_flags.end());
      for (std::size_t k = 0; k < s.payload.missed_boxes.size(); ++k) {
        const auto& mb = s.payload.missed_boxes[k];
        missed.push_back({indexed(sid, "m", k), image_id, mb.box, RegionKind::Positive,
                          mb.demographics.value_or(img.group), std::nullopt});
      }
    }
    for (std::size_t i = 0; i < t.detections.size(); ++i) {
      const bool fp = flagged.count(static_cast<int>(i)) > 0;
      m.instances.push_back({indexed(task_id, "d", i), image_id, t.detections[i].box,
                             fp ? RegionKind::Negative : RegionKind::Positive, img.group,
                             std::nullopt});
      if (detections) detections->push_back({image_id, t.detections[i].box, t.detections[i].confidence});
    }
    m.instances.insert(m.instances.end(), missed.begin(), missed.end());
  }
  return m;
}

std::vector<BoundingBox> PortalState::face_boxes(std::string_view image_id) const {
  const ImageRecord& img = image(image_id);
  std::vector<BoundingBox> out;
  const std::string task_id = latest_task_for(image_id);
  if (task_id.empty()) return out;
  std::vector<DetectionRecord> unused;
  const DatasetManifest truth = ground_truth(img.dataset_id, &unused);
  for (const auto& f : truth.instances) {
    if (f.image_id == image_id && f.region_kind == RegionKind::Positive) out.push_back(f.box);
  }
  return out;
}

}  // namespace fairlens::portal
