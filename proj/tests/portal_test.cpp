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

#include <atomic>
#include <thread>

#include "doctest.h"
#include "fairlens/common/text_io.hpp"
#include "portal_checks.hpp"
#include "portal_scenario.hpp"
#include "test_util.hpp"

using namespace fairlens;
using namespace fairlens::portal;
using fairlens::testing::error_code_of;
using fairlens::testing::portal_users;
using fairlens::testing::try_apply;

namespace {

// uma uploads img-000001 (rfw, Asian) and opens task-000001 with two detections.
struct Fixture {
  PortalState s;

  explicit Fixture(PortalConfig config = {}) : s(portal_users(), config) {
    run([](const PortalState& st) { return st.register_image("uma", "rfw", 100, 80, {"Asian"}, 10); });
    run([](const PortalState& st) {
      return st.create_task("uma", "img-000001", {{{1, 1, 20, 20}, 0.9}, {{40, 40, 60, 60}, 0.6}}, 20);
    });
  }

  template <typename Plan>
  void run(Plan&& plan) {
    s.apply(plan(static_cast<const PortalState&>(s)));
  }

  std::string submit(const std::string& who, AnnotationPayload p, std::int64_t at = 30) {
    run([&](const PortalState& st) { return st.submit_annotation(who, "task-000001", p, at); });
    return format_id("sub", static_cast<std::int64_t>(s.submissions().size()));
  }

  void vote(const std::string& who, const std::string& sub, Decision d, std::int64_t at = 40) {
    run([&](const PortalState& st) { return st.cast_verdict(who, sub, d, at); });
  }
};

AnnotationPayload one_missed_one_flag() {
  return {{{{70, 10, 90, 30}, std::nullopt}}, {1}};
}

}  // namespace

TEST_CASE("create_task freezes detections and allows one open task per image") {
  Fixture f;
  const Task& t = f.s.task("task-000001");
  CHECK(t.state == TaskState::Open);
  REQUIRE(t.detections.size() == 2);
  CHECK(t.detections[1].box == BoundingBox{40, 40, 60, 60});
  CHECK(f.s.open_task_for("img-000001") == "task-000001");

  CHECK(error_code_of([&] { (void)f.s.create_task("uma", "img-000001", {}, 21); }) == "DuplicateOpenTask");
  CHECK(error_code_of([&] { (void)f.s.create_task("uma", "img-999999", {}, 21); }) == "UnknownImage");
  CHECK(error_code_of([&] { (void)f.s.create_task("alice", "img-000001", {}, 21); }) == "Unauthorized");
  CHECK(error_code_of([&] {
          (void)f.s.create_task("uma", "img-000001", {{{90, 70, 120, 79}, 0.5}}, 21);
        }) != "");

  f.run([](const PortalState& st) { return st.close_task("uma", "task-000001", 22); });
  CHECK(f.s.task("task-000001").state == TaskState::Closed);
  CHECK_FALSE(f.s.open_task_for("img-000001"));
  f.run([](const PortalState& st) { return st.create_task("uma", "img-000001", {}, 23); });
  CHECK(f.s.open_task_for("img-000001") == "task-000002");
}

TEST_CASE("submit_annotation") {
  Fixture f;
  const std::string sub = f.submit("alice", one_missed_one_flag());
  const Submission& s = f.s.submission(sub);
  CHECK(s.state == SubmissionState::Submitted);
  CHECK(s.verdicts.empty());
  CHECK(f.s.task("task-000001").state == TaskState::Open);

  AnnotationPayload bad_flag{{}, {5}};
  CHECK(error_code_of([&] { (void)f.s.submit_annotation("alice", "task-000001", bad_flag, 31); }) ==
        "UnknownDetectionIndex");
  CHECK(error_code_of([&] { (void)f.s.submit_annotation("vera", "task-000001", one_missed_one_flag(), 31); }) ==
        "Unauthorized");
  AnnotationPayload bad_box{{{{10, 10, 5, 20}, std::nullopt}}, {}};
  CHECK(error_code_of([&] { (void)f.s.submit_annotation("alice", "task-000001", bad_box, 31); }) == "InvalidBox");
  CHECK(error_code_of([&] { (void)f.s.submit_annotation("alice", "task-000001", {}, 31); }) == "EmptyAnnotation");

  // Multiple independent submissions per task.
  const std::string second = f.submit("bob", {{}, {0, 0}});
  CHECK(f.s.submission(second).payload.false_positive_flags == std::vector<int>{0});

  f.run([](const PortalState& st) { return st.close_task("uma", "task-000001", 32); });
  CHECK(error_code_of([&] { (void)f.s.submit_annotation("alice", "task-000001", one_missed_one_flag(), 33); }) ==
        "TaskClosed");
}

TEST_CASE("cast_verdict follows the quorum rule") {
  Fixture f;
  const std::string sub = f.submit("alice", one_missed_one_flag());
  CHECK(error_code_of([&] { (void)f.s.cast_verdict("alice", sub, Decision::Approve, 41); }) == "SelfVerification");
  CHECK(error_code_of([&] { (void)f.s.cast_verdict("bob", sub, Decision::Approve, 41); }) == "Unauthorized");

  f.vote("vera", sub, Decision::Approve);
  CHECK(f.s.submission(sub).state == SubmissionState::Submitted);
  CHECK(error_code_of([&] { (void)f.s.cast_verdict("vera", sub, Decision::Reject, 41); }) == "DuplicateVerdict");

  f.vote("victor", sub, Decision::Approve);
  CHECK(f.s.submission(sub).state == SubmissionState::Verified);
  bool bounty = false;
  for (const auto& e : f.s.ledger()) bounty |= e.reason == EntryReason::Bounty && e.reference == sub;
  CHECK(bounty);
  CHECK(error_code_of([&] { (void)f.s.cast_verdict("vince", sub, Decision::Reject, 42); }) == "AlreadyTerminal");

  const std::string other = f.submit("bob", {{}, {0}});
  f.vote("vera", other, Decision::Reject);
  f.vote("vince", other, Decision::Reject);
  CHECK(f.s.submission(other).state == SubmissionState::Rejected);
  CHECK(error_code_of([&] { (void)f.s.cast_verdict("victor", other, Decision::Approve, 43); }) ==
        "AlreadyTerminal");
}

TEST_CASE("award_bounty pays the annotator and approvers once") {
  PortalConfig config;
  config.auto_award = false;
  Fixture f(config);
  const std::string sub = f.submit("alice", one_missed_one_flag());
  CHECK(error_code_of([&] { (void)f.s.award_bounty(sub, 50); }) == "NotVerified");
  f.vote("vera", sub, Decision::Approve);
  f.vote("victor", sub, Decision::Approve);
  CHECK(f.s.ledger().empty());

  f.run([&](const PortalState& st) { return st.award_bounty(sub, 50); });
  REQUIRE(f.s.ledger().size() == 3);
  CHECK(f.s.balance("alice") == 100);
  CHECK(f.s.balance("vera") == 10);
  CHECK(f.s.balance("victor") == 10);
  CHECK(f.s.balance(kTreasury) == -120);
  for (const auto& e : f.s.ledger()) CHECK(e.debit == kTreasury);
  CHECK(error_code_of([&] { (void)f.s.award_bounty(sub, 51); }) == "AlreadyAwarded");

  const std::string rejected = f.submit("bob", {{}, {0}});
  f.vote("vera", rejected, Decision::Reject);
  f.vote("victor", rejected, Decision::Reject);
  CHECK(error_code_of([&] { (void)f.s.award_bounty(rejected, 52); }) == "NotVerified");
}

TEST_CASE("automatic award happens once at quorum") {
  Fixture f;
  const std::string sub = f.submit("alice", one_missed_one_flag());
  f.vote("vera", sub, Decision::Approve);
  f.vote("victor", sub, Decision::Approve);
  CHECK(f.s.submission(sub).awarded);
  CHECK(f.s.balance("alice") == 100);
  CHECK(f.s.balance(kTreasury) == -120);
  CHECK(error_code_of([&] { (void)f.s.award_bounty(sub, 60); }) == "AlreadyAwarded");
}

TEST_CASE("largest-remainder allocation examples") {
  auto alloc = allocate_largest_remainder(100, {{"a", 5}, {"b", 3}, {"c", 2}});
  REQUIRE(alloc.size() == 3);
  CHECK(alloc[0].amount == 50);
  CHECK(alloc[1].amount == 30);
  CHECK(alloc[2].amount == 20);

  alloc = allocate_largest_remainder(101, {{"carol", 1}, {"alice", 1}, {"bob", 1}});
  CHECK(alloc[0].user_id == "carol");
  CHECK(alloc[0].amount == 33);
  CHECK(alloc[1].amount == 34);
  CHECK(alloc[2].amount == 34);

  CHECK(error_code_of([] { (void)allocate_largest_remainder(0, {{"a", 1}}); }) == "BadAmount");
  CHECK(error_code_of([] { (void)allocate_largest_remainder(10, {{"a", 0}}); }) == "NoContributors");
  CHECK(error_code_of([] { (void)allocate_largest_remainder(10, {}); }) == "NoContributors");
}

TEST_CASE("record_revenue splits by role-weighted contributions") {
  PortalConfig config;
  config.quorum = 1;
  Fixture f(config);
  CHECK(error_code_of([&] { (void)f.s.record_revenue("uma", "nobody", 100, 70); }) == "NoContributors");
  CHECK(error_code_of([&] { (void)f.s.record_revenue("uma", "rfw", 0, 70); }) == "BadAmount");

  const std::string sub = f.submit("alice", one_missed_one_flag());
  f.vote("vera", sub, Decision::Approve);
  const std::int64_t alice = f.s.balance("alice"), vera = f.s.balance("vera");
  f.run([](const PortalState& st) { return st.record_revenue("uma", "rfw", 100, 80); });
  const RevenueEvent& rev = f.s.revenue("rev-000001");
  REQUIRE(rev.allocations.size() == 3);
  std::int64_t total = 0;
  for (const auto& a : rev.allocations) total += a.amount;
  CHECK(total == 100);
  CHECK(f.s.balance("uma") == 50);
  CHECK(f.s.balance("alice") - alice == 30);
  CHECK(f.s.balance("vera") - vera == 20);
  CHECK(f.s.balance("revenue:rfw") == -100);
}

TEST_CASE("royalty weights renormalize over the roles present") {
  std::map<std::string, ContributionCounts> c;
  c["uma"].uploads = 3;
  c["max"].uploads = 1;
  const auto w = royalty_weights(c, RoleWeights{});
  auto alloc = allocate_largest_remainder(1000, w);
  std::map<std::string, std::int64_t> got;
  for (const auto& a : alloc) got[a.user_id] = a.amount;
  CHECK(got["uma"] == 750);
  CHECK(got["max"] == 250);
}

TEST_CASE("get_balance") {
  Fixture f;
  CHECK(f.s.balance("alice") == 0);
  CHECK(error_code_of([&] { (void)f.s.balance("nobody"); }) == "UnknownUser");
  const std::string sub = f.submit("alice", one_missed_one_flag());
  f.vote("vera", sub, Decision::Approve);
  f.vote("victor", sub, Decision::Approve);
  CHECK(f.s.balance("alice") == 100);
}

TEST_CASE("retrain manifest export") {
  Fixture f;
  CHECK(f.s.retrain_manifest("rfw").instances.empty());

  AnnotationPayload p{{{{70, 10, 90, 30}, std::nullopt}, {{5, 50, 25, 70}, Demographics{"Indian"}}}, {1}};
  const std::string sub = f.submit("alice", p);
  f.submit("bob", {{{{60, 5, 70, 15}, std::nullopt}}, {}});
  f.vote("vera", sub, Decision::Approve, 100);
  CHECK(f.s.retrain_manifest("rfw").instances.empty());
  f.vote("victor", sub, Decision::Approve, 200);

  const DatasetManifest m = f.s.retrain_manifest("rfw");
  int pos = 0, neg = 0;
  for (const auto& i : m.instances) (i.region_kind == RegionKind::Positive ? pos : neg) += 1;
  CHECK(pos == 2);
  CHECK(neg == 1);
  CHECK(std::is_sorted(m.instances.begin(), m.instances.end(), [](const auto& a, const auto& b) {
    return std::tie(a.image_id, a.instance_id) < std::tie(b.image_id, b.instance_id);
  }));
  for (const auto& i : m.instances) {
    if (i.region_kind == RegionKind::Negative) CHECK(i.box == BoundingBox{40, 40, 60, 60});
  }

  CHECK(f.s.retrain_manifest("rfw", 10'000).instances.empty());
  CHECK(f.s.retrain_manifest("rfw", 199).instances.size() == 3);
  CHECK(f.s.retrain_manifest("miap").instances.empty());

  const DatasetManifest round = parse_manifest(serialize_manifest(m));
  CHECK(round.instances.size() == m.instances.size());
  CHECK(serialize_manifest(round) == serialize_manifest(m));
}

TEST_CASE("ledger conservation over randomized operations") {
  std::map<std::string, int> successes;
  for (bool auto_award : {true, false}) {
    PortalConfig config;
    config.auto_award = auto_award;
    const auto r = fairlens::testing::ledger_conservation(10'000, 20261016, &successes, config);
    INFO(r.detail);
    CHECK(r.ok);
  }
  // The stream must exercise every command, not only the failure paths.
  for (std::string op : {"register_image", "create_task", "close_task", "submit_annotation", "cast_verdict",
                         "award_bounty", "record_revenue"}) {
    INFO(op);
    CHECK(successes[op] > 0);
  }
}

TEST_CASE("exhaustive state machine search on one submission") {
  for (bool auto_award : {true, false}) {
    PortalConfig config;
    config.auto_award = auto_award;
    std::int64_t sequences = 0;
    const auto r = fairlens::testing::exhaustive_submission_search(6, config, &sequences);
    INFO(r.detail);
    CHECK(r.ok);
    CHECK(sequences > 100);
  }
  PortalConfig three;
  three.quorum = 3;
  const auto r = fairlens::testing::exhaustive_submission_search(6, three);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("royalty allocations are exact") {
  const auto r = fairlens::testing::royalty_exactness(1000, 99);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("event log replay reproduces the state") {
  fairlens::testing::TempDir dir;
  int applied = 0;
  const auto r = fairlens::testing::replay_check(dir.path(), 1500, 4242, &applied);
  INFO(r.detail);
  CHECK(r.ok);
  CHECK(applied > 100);
  CHECK(std::filesystem::exists(dir / "events.jsonl"));
}

TEST_CASE("persisted portal keeps images and tolerates a torn final line") {
  fairlens::testing::TempDir dir;
  PortalOptions options;
  options.data_dir = dir.path();
  const auto png = anonymizer::encode_png(anonymizer::RasterImage::filled(32, 24, 3, 200));
  {
    Portal p(portal_users(), options);
    const ImageRecord img = p.upload_image("uma", "rfw", png, {"Black"});
    CHECK(img.width == 32);
    CHECK(img.height == 24);
    p.create_task("uma", img.image_id, {{{2, 2, 12, 12}, 0.8}});
  }
  {
    std::ofstream(dir / "events.jsonl", std::ios::app) << R"({"seq":3,"type":"task_clo)";
  }
  Portal reopened(portal_users(), options);
  CHECK(reopened.snapshot().next_seq() == 3);
  CHECK(reopened.image_raster("img-000001").width == 32);
  CHECK(reopened.snapshot().task("task-000001").state == TaskState::Open);

  const auto anon = reopened.anonymize("img-000001", {}, std::nullopt);
  REQUIRE(anon.audit.regions.size() == 1);
  CHECK(anon.image == reopened.image_raster("img-000001"));  // constant image stays constant

  std::ofstream(dir / "events.jsonl", std::ios::app) << "\n{\"seq\":9,\"type\":\"task_closed\"}\n";
  CHECK(error_code_of([&] { Portal again(portal_users(), options); }) == "CorruptLog");
}

TEST_CASE("portal rejects undecodable uploads") {
  Portal p(portal_users());
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4};
  CHECK(error_code_of([&] { p.upload_image("uma", "rfw", junk, {"Asian"}); }) == "InvalidImage");
  CHECK(p.snapshot().next_seq() == 1);
}

TEST_CASE("self verification is impossible under concurrent attempts") {
  for (int round = 0; round < 20; ++round) {
    Portal p(portal_users());
    const auto png = anonymizer::encode_png(anonymizer::RasterImage::filled(50, 50, 3, 0));
    const ImageRecord img = p.upload_image("max", "rfw", png, {"White"});
    p.create_task("max", img.image_id, {{{1, 1, 10, 10}, 0.9}});
    const Submission sub = p.submit_annotation("max", "task-000001", {{}, {0}});

    std::atomic<int> self_rejections{0};
    std::vector<std::thread> threads;
    for (const char* who : {"max", "vera", "max", "victor", "max", "vince", "max"}) {
      threads.emplace_back([&, who = std::string(who)] {
        try {
          p.cast_verdict(who, sub.submission_id, Decision::Approve);
        } catch (const Error& e) {
          if (e.code() == "SelfVerification") ++self_rejections;
        }
      });
    }
    for (auto& t : threads) t.join();
    const Submission after = p.read([&](const PortalState& s) { return s.submission(sub.submission_id); });
    CHECK(self_rejections == 4);
    CHECK(after.state == SubmissionState::Verified);
    CHECK(after.verdicts.size() == 2);
    for (const auto& v : after.verdicts) CHECK(v.verifier != "max");
    CHECK(fairlens::testing::ledger_sum(p.snapshot()) == 0);
  }
}

TEST_CASE("token file parsing") {
  const auto dir = parse_token_file(
      "{\"format\":\"fairlens/1\",\"kind\":\"tokens\"}\n"
      "{\"token\":\"t1\",\"user_id\":\"alice\",\"roles\":[\"annotator\"]}\n"
      "{\"token\":\"t2\",\"user_id\":\"alice\",\"roles\":[\"annotator\"]}\n"
      "{\"token\":\"t3\",\"user_id\":\"vera\",\"roles\":[\"verifier\",\"uploader\"]}\n");
  REQUIRE(dir.authenticate("t2"));
  CHECK(dir.authenticate("t2")->user_id == "alice");
  CHECK(dir.authenticate("t3")->has(Role::Uploader));
  CHECK(dir.authenticate("nope") == nullptr);
  CHECK(dir.users.size() == 2);

  const std::string header = "{\"format\":\"fairlens/1\",\"kind\":\"tokens\"}\n";
  CHECK(error_code_of([&] {
          parse_token_file(header + "{\"token\":\"t\",\"user_id\":\"a\",\"roles\":[]}\n");
        }) == "MalformedRecord");
  CHECK(error_code_of([&] {
          parse_token_file(header + "{\"token\":\"t\",\"user_id\":\"a\",\"roles\":[\"admin\"]}\n");
        }) == "MalformedRecord");
  CHECK(error_code_of([&] {
          parse_token_file(header + "{\"token\":\"t\",\"user_id\":\"a\",\"roles\":[\"verifier\"]}\n"
                                    "{\"token\":\"t\",\"user_id\":\"b\",\"roles\":[\"verifier\"]}\n");
        }) == "MalformedRecord");
  CHECK(error_code_of([&] {
          parse_token_file(header + "{\"token\":\"t\",\"user_id\":\"a\",\"roles\":[\"verifier\"]}\n"
                                    "{\"token\":\"u\",\"user_id\":\"a\",\"roles\":[\"uploader\"]}\n");
        }) == "MalformedRecord");
}

TEST_CASE("http status mapping") {
  CHECK(http_status_for("Unauthenticated") == 401);
  CHECK(http_status_for("Unauthorized") == 403);
  CHECK(http_status_for("SelfVerification") == 403);
  CHECK(http_status_for("UnknownTask") == 404);
  CHECK(http_status_for("DuplicateOpenTask") == 409);
  CHECK(http_status_for("AlreadyAwarded") == 409);
  CHECK(http_status_for("InvalidBox") == 400);
  CHECK(http_status_for("IoFailure") == 500);
}

TEST_CASE("end-to-end scenario over HTTP") {
  const auto r = fairlens::testing::http_end_to_end();
  INFO(r.check.detail);
  CHECK(r.check.ok);
  CHECK(r.balance == 100);
  CHECK(r.positives == 1);
  CHECK(r.negatives == 1);
  CHECK(r.seconds < 5.0);
}

TEST_CASE("HTTP errors are structured") {
  Portal p(portal_users());
  HttpApi api(p, fairlens::testing::scenario_tokens());
  const int port = api.bind("127.0.0.1", 0);
  std::thread server([&] { api.serve(); });
  api.wait_until_ready();
  httplib::Client c("127.0.0.1", port);
  const httplib::Headers alice{{"Authorization", "Bearer tok-alice"}};

  auto r = c.Get("/health");
  REQUIRE(r);
  CHECK(r->status == 200);

  r = c.Get("/tasks");
  REQUIRE(r);
  CHECK(r->status == 401);
  CHECK(nlohmann::json::parse(r->body)["code"] == "Unauthenticated");

  r = c.Get("/tasks/task-000404", alice);
  REQUIRE(r);
  CHECK(r->status == 404);
  const auto body = nlohmann::json::parse(r->body);
  CHECK(body["code"] == "UnknownTask");
  CHECK(body.contains("message"));
  CHECK(body.contains("details"));

  r = c.Post("/images?dataset_id=x&ethnicity=Asian", alice, "abc", "image/png");
  REQUIRE(r);
  CHECK(r->status == 403);

  r = c.Post("/annotations/sub-000001/verdicts", alice, "{not json", "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);

  r = c.Get("/no/such/route", alice);
  REQUIRE(r);
  CHECK(r->status == 404);

  r = c.Get("/accounts/alice/balance", alice);
  REQUIRE(r);
  CHECK(nlohmann::json::parse(r->body)["balance"] == 0);

  api.stop();
  server.join();
}
