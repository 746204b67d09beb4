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

#include "fairlens/portal/users.hpp"

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"

namespace fairlens::portal {

const User* TokenDirectory::authenticate(std::string_view token) const {
  auto it = tokens.find(token);
  if (it == tokens.end()) return nullptr;
  auto u = users.find(it->second);
  return u == users.end() ? nullptr : &u->second;
}

TokenDirectory parse_token_file(std::string_view text) {
  const auto lines = split_records(text);
  if (lines.empty()) throw_malformed(1, "missing header");
  expect_header(parse_record(lines[0]), "tokens", lines[0].number);
  TokenDirectory dir;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i].number;
    const auto r = parse_record(lines[i]);
    if (!r.contains("token") || !r["token"].is_string() || r["token"].get<std::string>().empty()) {
      throw_malformed(line, "record needs a non-empty token");
    }
    if (!r.contains("user_id") || !r["user_id"].is_string() ||
        r["user_id"].get<std::string>().empty()) {
      throw_malformed(line, "record needs a non-empty user_id");
    }
    if (!r.contains("roles") || !r["roles"].is_array() || r["roles"].empty()) {
      throw_malformed(line, "record needs a non-empty roles array");
    }
    User u{r["user_id"].get<std::string>(), {}};
    for (const auto& role : r["roles"]) {
      auto parsed = role.is_string() ? parse_role(role.get<std::string>()) : std::nullopt;
      if (!parsed) throw_malformed(line, "unknown role " + role.dump());
      u.roles.insert(*parsed);
    }
    const std::string token = r["token"].get<std::string>();
    if (!dir.tokens.emplace(token, u.user_id).second) throw_malformed(line, "duplicate token");
    auto [it, inserted] = dir.users.emplace(u.user_id, u);
    if (!inserted && it->second.roles != u.roles) {
      throw_malformed(line, "user " + u.user_id + " listed with different roles");
    }
  }
  return dir;
}

TokenDirectory load_token_file(const std::filesystem::path& path) {
  return parse_token_file(read_file(path));
}

}  // namespace fairlens::portal
