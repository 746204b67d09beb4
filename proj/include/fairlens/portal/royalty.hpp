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
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fairlens/portal/types.hpp"

namespace fairlens::portal {

using BigInt = boost::multiprecision::cpp_int;

/// Splits `amount` in proportion to `weights` (largest-remainder method).
/// Each user first receives floor(amount * w / W); the leftover units go one
/// each to the largest fractional remainders, ties to the smaller user id.
/// Output follows the input order, which must have unique ids.
/// Throws BadAmount for amount <= 0 and NoContributors when no weight is
/// positive or any weight is negative.
std::vector<Allocation> allocate_largest_remainder(
    std::int64_t amount, const std::vector<std::pair<std::string, BigInt>>& weights);

/// Exact royalty weights: each role present (with a positive total count)
/// owns a pool proportional to its configured weight, renormalised over the
/// present roles, and a user's share of a pool is proportional to their count
/// in that role. Result is sorted by user id; users with zero weight omitted.
std::vector<std::pair<std::string, BigInt>> royalty_weights(
    const std::map<std::string, ContributionCounts>& contributions, const RoleWeights& weights);

}  // namespace fairlens::portal
