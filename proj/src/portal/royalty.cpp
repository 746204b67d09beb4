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

#include "fairlens/portal/royalty.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "fairlens/common/error.hpp"

namespace fairlens::portal {

std::vector<Allocation> allocate_largest_remainder(
    std::int64_t amount, const std::vector<std::pair<std::string, BigInt>>& weights) {
  if (amount <= 0) throw Error("BadAmount", "amount must be positive", {{"amount", amount}});
  BigInt total = 0;
  for (const auto& [user, w] : weights) {
    if (w < 0) throw Error("NoContributors", "negative contribution weight", {{"user_id", user}});
    total += w;
  }
  if (total == 0) throw Error("NoContributors", "no contributor has a positive weight");

  std::vector<Allocation> out;
  std::vector<BigInt> remainders;
  out.reserve(weights.size());
  std::int64_t assigned = 0;
  for (const auto& [user, w] : weights) {
    const BigInt scaled = w * amount;
    const BigInt share = scaled / total;
    out.push_back({user, share.convert_to<std::int64_t>()});
    remainders.push_back(scaled % total);
    assigned += out.back().amount;
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return out[a].user_id < out[b].user_id;
  });
  for (std::int64_t k = 0; k < amount - assigned; ++k) {
    out[order[static_cast<std::size_t>(k)]].amount += 1;
  }
  return out;
}

std::vector<std::pair<std::string, BigInt>> royalty_weights(
    const std::map<std::string, ContributionCounts>& contributions, const RoleWeights& weights) {
  BigInt uploads = 0, annotations = 0, verdicts = 0;
  for (const auto& [user, c] : contributions) {
    uploads += c.uploads;
    annotations += c.annotations;
    verdicts += c.verdicts;
  }
  // Pool p pays w_p * c_up / C_p; multiplying through by the product of the
  // present totals keeps every share an integer.
  const BigInt one = 1;
  const BigInt& u_tot = uploads > 0 ? uploads : one;
  const BigInt& a_tot = annotations > 0 ? annotations : one;
  const BigInt& v_tot = verdicts > 0 ? verdicts : one;
  std::vector<std::pair<std::string, BigInt>> out;
  for (const auto& [user, c] : contributions) {
    BigInt w = 0;
    if (uploads > 0) w += BigInt(weights.uploader) * c.uploads * a_tot * v_tot;
    if (annotations > 0) w += BigInt(weights.annotator) * c.annotations * u_tot * v_tot;
    if (verdicts > 0) w += BigInt(weights.verifier) * c.verdicts * u_tot * a_tot;
    if (w > 0) out.emplace_back(user, w);
  }
  return out;
}

}  // namespace fairlens::portal
