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

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace fairlens {

// Every operational failure carries a stable machine-readable code (the
// operation's error name, e.g. "DuplicateInstanceId") plus free-form details.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(message),
        code_(std::move(code)),
        details_(std::move(details)) {}

  const std::string& code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  // {code, message, details}
  nlohmann::json to_json() const {
    return {{"code", code_}, {"message", what()}, {"details", details_}};
  }

 private:
  std::string code_;
  nlohmann::json details_;
};

}  // namespace fairlens
