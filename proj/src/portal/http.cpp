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

#include "fairlens/portal/http.hpp"

#include <charconv>
#include <functional>
#include <set>

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"
#include "fairlens/ingest/loaders.hpp"
#include "httplib.h"

namespace fairlens::portal {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int http_status_for(std::string_view code) {
  static const std::set<std::string_view> kNotFound = {
      "UnknownImage", "UnknownTask", "UnknownSubmission", "UnknownUser", "UnknownRevenue",
      "NotFound"};
  static const std::set<std::string_view> kConflict = {
      "DuplicateOpenTask", "TaskClosed",  "DuplicateVerdict", "AlreadyTerminal",
      "AlreadyAwarded",    "NotVerified", "NoContributors"};
  static const std::set<std::string_view> kServer = {"IoFailure", "CorruptLog", "Internal"};
  if (code == "Unauthenticated") return 401;
  if (code == "Unauthorized" || code == "SelfVerification") return 403;
  if (kNotFound.count(code)) return 404;
  if (kConflict.count(code)) return 409;
  if (kServer.count(code)) return 500;
  return 400;
}

namespace {

enum class Units { Pixels, Normalized };

void send_json(httplib::Response& res, const ordered_json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, ordered_json(e.to_json()), http_status_for(e.code()));
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error("MalformedRequest", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error("MalformedRequest", std::string("request body is not JSON: ") + e.what());
  }
}

Units units_of(const json& body) {
  if (!body.contains("units")) return Units::Pixels;
  const auto& u = body["units"];
  if (u == "pixels" || u == "pixel") return Units::Pixels;
  if (u == "normalized") return Units::Normalized;
  throw Error("MalformedRequest", "units must be \"pixels\" or \"normalized\"",
              {{"units", u}});
}

BoundingBox to_pixels(const BoundingBox& b, Units units, const ImageRecord& img) {
  if (units == Units::Pixels) return b;
  for (double v : {b.x_min, b.y_min, b.x_max, b.y_max}) {
    if (!(v >= 0 && v <= 1)) {
      throw Error("InvalidBox", "normalized coordinates must lie in [0,1]",
                  {{"box", fairlens::to_json(b)}});
    }
  }
  return {b.x_min * img.width, b.y_min * img.height, b.x_max * img.width, b.y_max * img.height};
}

std::string query(const httplib::Request& req, const char* key, std::string fallback = "") {
  return req.has_param(key) ? req.get_param_value(key) : fallback;
}

template <typename T>
T parse_number(const std::string& text, const char* name) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size()) {
    throw Error("MalformedRequest", std::string("bad value for ") + name, {{name, text}});
  }
  return v;
}

}  // namespace

struct HttpApi::Impl {
  Portal& portal;
  TokenDirectory tokens;
  HttpOptions options;
  httplib::Server server;

  Impl(Portal& p, TokenDirectory t, HttpOptions o)
      : portal(p), tokens(std::move(t)), options(std::move(o)) {
    routes();
  }

  const User& authenticate(const httplib::Request& req) const {
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    const User* user = nullptr;
    if (header.size() > kBearer.size() && header.compare(0, kBearer.size(), kBearer) == 0) {
      user = tokens.authenticate(std::string_view(header).substr(kBearer.size()));
    }
    if (!user) throw Error("Unauthenticated", "missing or unknown bearer token");
    return *user;
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&, const User&)>;

  httplib::Server::Handler guarded(Handler fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res, authenticate(req));
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, Error("Internal", e.what()));
      }
    };
  }

  ordered_json task_json(const Task& t) const {
    ordered_json j = to_json(t);
    const ImageRecord img = portal.read([&](const PortalState& s) { return s.image(t.image_id); });
    j["width"] = img.width;
    j["height"] = img.height;
    return j;
  }

  void routes() {
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"status", "ok"}});
    });

    server.Get("/me", guarded([](const auto&, auto& res, const User& u) {
      ordered_json roles = ordered_json::array();
      for (Role r : u.roles) roles.push_back(to_string(r));
      send_json(res, {{"user_id", u.user_id}, {"roles", roles}});
    }));

    server.Post("/images", guarded([this](const auto& req, auto& res, const User& u) {
      Demographics group;
      if (req.has_param("ethnicity")) group.ethnicity = req.get_param_value("ethnicity");
      if (req.has_param("gender")) {
        auto g = parse_gender(req.get_param_value("gender"));
        if (!g) throw Error("InvalidDemographics", "unknown gender");
        group.gender = *g;
      }
      if (req.has_param("age_group")) {
        auto a = parse_age_group(req.get_param_value("age_group"));
        if (!a) throw Error("InvalidDemographics", "unknown age group");
        group.age_group = *a;
      }
      if (group.ethnicity.empty()) throw Error("InvalidDemographics", "empty ethnicity");
      const auto* data = reinterpret_cast<const std::uint8_t*>(req.body.data());
      auto img = portal.upload_image(u.user_id, query(req, "dataset_id", "portal"),
                                     {data, req.body.size()}, group);
      send_json(res, to_json(img), 201);
    }));

    server.Get("/images", guarded([this](const auto& req, auto& res, const User&) {
      std::optional<std::string> dataset;
      if (req.has_param("dataset_id")) dataset = req.get_param_value("dataset_id");
      ordered_json list = ordered_json::array();
      for (const auto& img : portal.read([&](const PortalState& s) { return s.images(dataset); })) {
        list.push_back(to_json(img));
      }
      send_json(res, {{"images", list}});
    }));

    server.Get(R"(/images/([^/]+))", guarded([this](const auto& req, auto& res, const User&) {
      const std::string id = req.matches[1];
      send_json(res, to_json(portal.read([&](const PortalState& s) { return s.image(id); })));
    }));

    server.Get(R"(/images/([^/]+)/content)", guarded([this](const auto& req, auto& res, const User&) {
      const auto bytes = anonymizer::encode_png(portal.image_raster(req.matches[1]));
      res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
    }));

    server.Post(R"(/images/([^/]+)/tasks)", guarded([this](const auto& req, auto& res, const User& u) {
      const std::string image_id = req.matches[1];
      const json body = body_json(req);
      const Units units = units_of(body);
      const ImageRecord img = portal.read([&](const PortalState& s) { return s.image(image_id); });
      std::vector<MachineDetection> dets =
          detections_from_json(body.contains("detections") ? body["detections"] : json::array());
      for (auto& d : dets) d.box = to_pixels(d.box, units, img);
      send_json(res, task_json(portal.create_task(u.user_id, image_id, dets)), 201);
    }));

    server.Get("/tasks", guarded([this](const auto& req, auto& res, const User&) {
      std::optional<TaskState> state;
      if (req.has_param("state") && req.get_param_value("state") != "all") {
        state = parse_task_state(req.get_param_value("state"));
        if (!state) throw Error("MalformedRequest", "state must be open, closed or all");
      }
      ordered_json list = ordered_json::array();
      for (const auto& t : portal.read([&](const PortalState& s) { return s.tasks(state); })) {
        list.push_back(task_json(t));
      }
      send_json(res, {{"tasks", list}});
    }));

    server.Get(R"(/tasks/([^/]+))", guarded([this](const auto& req, auto& res, const User&) {
      const std::string id = req.matches[1];
      send_json(res, task_json(portal.read([&](const PortalState& s) { return s.task(id); })));
    }));

    server.Post(R"(/tasks/([^/]+)/close)", guarded([this](const auto& req, auto& res, const User& u) {
      send_json(res, task_json(portal.close_task(u.user_id, req.matches[1])));
    }));

    server.Post(R"(/tasks/([^/]+)/annotations)", guarded([this](const auto& req, auto& res, const User& u) {
      const std::string task_id = req.matches[1];
      const json body = body_json(req);
      const Units units = units_of(body);
      AnnotationPayload payload = payload_from_json(body);
      if (units == Units::Normalized) {
        const ImageRecord img = portal.read(
            [&](const PortalState& s) { return s.image(s.task(task_id).image_id); });
        for (auto& m : payload.missed_boxes) m.box = to_pixels(m.box, units, img);
      }
      send_json(res, to_json(portal.submit_annotation(u.user_id, task_id, payload)), 201);
    }));

    server.Get("/annotations", guarded([this](const auto& req, auto& res, const User& u) {
      std::optional<SubmissionState> state;
      if (req.has_param("state") && req.get_param_value("state") != "all") {
        state = parse_submission_state(req.get_param_value("state"));
        if (!state) throw Error("MalformedRequest", "state must be submitted, verified, rejected or all");
      }
      const bool exclude_own = query(req, "exclude_own") == "true";
      ordered_json list = ordered_json::array();
      for (const auto& s : portal.read([&](const PortalState& st) { return st.submissions(state); })) {
        if (exclude_own && s.annotator == u.user_id) continue;
        list.push_back(to_json(s));
      }
      send_json(res, {{"annotations", list}});
    }));

    server.Get(R"(/annotations/([^/]+))", guarded([this](const auto& req, auto& res, const User&) {
      const std::string id = req.matches[1];
      send_json(res, to_json(portal.read([&](const PortalState& s) { return s.submission(id); })));
    }));

    server.Post(R"(/annotations/([^/]+)/verdicts)", guarded([this](const auto& req, auto& res, const User& u) {
      const json body = body_json(req);
      auto decision = body.contains("decision") && body["decision"].is_string()
                          ? parse_decision(body["decision"].get<std::string>())
                          : std::nullopt;
      if (!decision) throw Error("MalformedRequest", "decision must be \"approve\" or \"reject\"");
      send_json(res, to_json(portal.cast_verdict(u.user_id, req.matches[1], *decision)));
    }));

    server.Post(R"(/annotations/([^/]+)/award)", guarded([this](const auto& req, auto& res, const User&) {
      ordered_json entries = ordered_json::array();
      for (const auto& e : portal.award_bounty(req.matches[1])) entries.push_back(to_json(e));
      send_json(res, {{"entries", entries}});
    }));

    server.Get(R"(/accounts/([^/]+)/balance)", guarded([this](const auto& req, auto& res, const User&) {
      const std::string account = req.matches[1];
      send_json(res, {{"user_id", account}, {"balance", portal.get_balance(account)}});
    }));

    server.Post(R"(/datasets/([^/]+)/revenue)", guarded([this](const auto& req, auto& res, const User& u) {
      const json body = body_json(req);
      if (!body.contains("amount") || !body["amount"].is_number_integer()) {
        throw Error("BadAmount", "amount must be an integer number of minor units");
      }
      send_json(res, to_json(portal.record_revenue(u.user_id, req.matches[1],
                                                   body["amount"].get<std::int64_t>())),
                201);
    }));

    server.Get(R"(/datasets/([^/]+)/retrain-manifest)", guarded([this](const auto& req, auto& res, const User&) {
      std::optional<std::int64_t> since;
      if (req.has_param("since")) since = parse_number<std::int64_t>(req.get_param_value("since"), "since");
      res.set_content(serialize_manifest(portal.export_retrain_manifest(req.matches[1], since)),
                      "application/x-ndjson");
    }));

    server.Get(R"(/datasets/([^/]+)/reports/fairness)", guarded([this](const auto& req, auto& res, const User&) {
      const double tau = parse_number<double>(query(req, "tau", "0.5"), "tau");
      auto grouping = parse_grouping(query(req, "grouping", "ethnicity"));
      if (!grouping) throw Error("MalformedRequest", "grouping must be ethnicity, gender or age_group");
      send_json(res, to_json(portal.fairness_report(req.matches[1], tau, *grouping)));
    }));

    server.Post(R"(/images/([^/]+)/anonymize)", guarded([this](const auto& req, auto& res, const User&) {
      const std::string image_id = req.matches[1];
      const json body = body_json(req);
      anonymizer::BlurConfig cfg;
      if (body.contains("sigma") && !body["sigma"].is_null()) {
        if (!body["sigma"].is_number()) throw Error("BadSigma", "sigma must be a number");
        cfg.sigma = body["sigma"].get<double>();
      }
      if (body.contains("margin") && !body["margin"].is_null()) {
        if (!body["margin"].is_number()) throw Error("BadMargin", "margin must be a number");
        cfg.margin = body["margin"].get<double>();
      }
      std::optional<std::vector<BoundingBox>> boxes;
      if (body.contains("boxes")) {
        const Units units = units_of(body);
        const ImageRecord img = portal.read([&](const PortalState& s) { return s.image(image_id); });
        boxes.emplace();
        for (const auto& d : detections_from_json([&] {
               json wrapped = json::array();
               for (const auto& b : body["boxes"]) wrapped.push_back({{"box", b}, {"confidence", 1.0}});
               return wrapped;
             }())) {
          boxes->push_back(to_pixels(d.box, units, img));
        }
      }
      auto result = portal.anonymize(image_id, cfg, boxes);
      const auto png = anonymizer::encode_png(result.image);
      res.set_header("X-Anonymization-Audit", anonymizer::to_json(result.audit).dump());
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    }));

    if (options.ui_dir) server.set_mount_point("/ui", options.ui_dir->string());

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_json(res, ordered_json(Error("NotFound", "no such route").to_json()), res.status);
      }
    });
  }
};

HttpApi::HttpApi(Portal& portal, TokenDirectory tokens, HttpOptions options)
    : impl_(std::make_unique<Impl>(portal, std::move(tokens), std::move(options))) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error("IoFailure", "cannot bind " + host + ":" + std::to_string(port),
                {{"host", host}, {"port", port}});
  }
  return bound;
}

void HttpApi::serve() { impl_->server.listen_after_bind(); }

void HttpApi::stop() {
  if (impl_) impl_->server.stop();
}

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace fairlens::portal
