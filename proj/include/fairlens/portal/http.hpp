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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "fairlens/portal/portal.hpp"
#include "fairlens/portal/users.hpp"

namespace fairlens::portal {

struct HttpOptions {
  std::optional<std::filesystem::path> ui_dir;  // served under /ui when set
};

// HTTP status for an error code: 401 unauthenticated, 403 forbidden, 404
// unknown entities, 409 state conflicts, 500 server faults, 400 otherwise.
int http_status_for(std::string_view code);

/// JSON-over-HTTP front end for a Portal. Authentication is a bearer token
/// looked up in the token directory.
class HttpApi {
 public:
  HttpApi(Portal& portal, TokenDirectory tokens, HttpOptions options = {});
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws IoFailure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fairlens::portal
