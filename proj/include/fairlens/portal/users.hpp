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
#include <map>
#include <string>
#include <string_view>

#include "fairlens/portal/types.hpp"

namespace fairlens::portal {

// Bearer tokens mapped to users. File format: a "tokens" header record, then
// one {"token", "user_id", "roles": [...]} record per token.
struct TokenDirectory {
  std::map<std::string, std::string, std::less<>> tokens;  // token -> user_id
  std::map<std::string, User> users;

  const User* authenticate(std::string_view token) const;
};

// Throws MalformedRecord for bad records, duplicate tokens, empty or unknown
// roles, or a user listed with conflicting roles.
TokenDirectory parse_token_file(std::string_view text);
TokenDirectory load_token_file(const std::filesystem::path& path);

}  // namespace fairlens::portal
