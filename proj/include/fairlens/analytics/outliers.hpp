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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fairlens/analytics/dbscan.hpp"
#include "fairlens/analytics/projection.hpp"

namespace fairlens::analytics {

enum class OutlierReason { Noise, MinorityInCluster };
std::string_view to_string(OutlierReason r);

struct Outlier {
  std::string instance_id;
  OutlierReason reason;
  friend bool operator==(const Outlier&, const Outlier&) = default;
};

/// Flags noise points and members whose attribute differs from their
/// cluster's most common value. A cluster whose top count is shared produces
/// no minority flags. Members with an Unknown value (or no demographics entry)
/// are neither counted nor flagged as minorities. Sorted by instance id.
std::vector<Outlier> outlier_report(const ClusterAssignment& assignment,
                                    const std::map<std::string, Demographics>& demographics,
                                    Grouping grouping = Grouping::Ethnicity);

// Header `instance_id,x,y,label`, rows sorted by id, six fractional digits.
// Throws MissingLabel when an id has no label, IoFailure on write errors.
std::string format_scatter(const Projection2D& proj,
                           const std::map<std::string, std::string>& labels);
void export_scatter(const Projection2D& proj,
                    const std::map<std::string, std::string>& labels,
                    const std::string& path);

}  // namespace fairlens::analytics
