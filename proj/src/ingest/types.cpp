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

#include "fairlens/ingest/types.hpp"

#include <algorithm>
#include <cmath>

namespace fairlens {

bool BoundingBox::valid() const {
  for (double v : {x_min, y_min, x_max, y_max}) {
    if (!std::isfinite(v) || v < 0) return false;
  }
  return x_min < x_max && y_min < y_max;
}

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::Male: return "Male";
    case Gender::Female: return "Female";
    case Gender::Unknown: break;
  }
  return kUnknown;
}

std::string_view to_string(AgeGroup a) {
  switch (a) {
    case AgeGroup::Young: return "Young";
    case AgeGroup::Middle: return "Middle";
    case AgeGroup::Older: return "Older";
    case AgeGroup::Unknown: break;
  }
  return kUnknown;
}

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "Male") return Gender::Male;
  if (s == "Female") return Gender::Female;
  if (s == kUnknown) return Gender::Unknown;
  return std::nullopt;
}

std::optional<AgeGroup> parse_age_group(std::string_view s) {
  if (s == "Young") return AgeGroup::Young;
  if (s == "Middle") return AgeGroup::Middle;
  if (s == "Older") return AgeGroup::Older;
  if (s == kUnknown) return AgeGroup::Unknown;
  return std::nullopt;
}

std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::Ethnicity: return "ethnicity";
    case Grouping::Gender: return "gender";
    case Grouping::AgeGroup: return "age_group";
  }
  return "ethnicity";
}

std::optional<Grouping> parse_grouping(std::string_view s) {
  if (s == "ethnicity" || s == "race") return Grouping::Ethnicity;
  if (s == "gender") return Grouping::Gender;
  if (s == "age_group" || s == "age") return Grouping::AgeGroup;
  return std::nullopt;
}

std::string group_value(const Demographics& d, Grouping g) {
  switch (g) {
    case Grouping::Ethnicity: return d.ethnicity;
    case Grouping::Gender: return std::string(to_string(d.gender));
    case Grouping::AgeGroup: return std::string(to_string(d.age_group));
  }
  return std::string(kUnknown);
}

std::string_view to_string(RegionKind k) {
  return k == RegionKind::Positive ? "Positive" : "Negative";
}

std::optional<RegionKind> parse_region_kind(std::string_view s) {
  if (s == "Positive") return RegionKind::Positive;
  if (s == "Negative") return RegionKind::Negative;
  return std::nullopt;
}

const ManifestImage* DatasetManifest::find_image(
    std::string_view image_id) const {
  auto it = std::find_if(images.begin(), images.end(), [&](const auto& img) {
    return img.image_id == image_id;
  });
  return it == images.end() ? nullptr : &*it;
}

TaxonomyRegistry TaxonomyRegistry::defaults() {
  TaxonomyRegistry r;
  r.register_ethnicities("rfw", {"Asian", "Indian", "Black", "White"});
  r.register_ethnicities(
      "fairface", {"White", "Black", "Latino_Hispanic", "East Asian",
                   "Southeast Asian", "Indian", "Middle Eastern"});
  return r;
}

void TaxonomyRegistry::register_ethnicities(std::string dataset_id,
                                            std::vector<std::string> labels) {
  sets_[std::move(dataset_id)] = std::move(labels);
}

bool TaxonomyRegistry::accepts(std::string_view dataset_id,
                               std::string_view ethnicity) const {
  if (ethnicity.empty()) return false;
  if (ethnicity == kUnknown) return true;
  auto it = sets_.find(dataset_id);
  if (it == sets_.end()) return true;
  return std::find(it->second.begin(), it->second.end(), ethnicity) !=
         it->second.end();
}

const std::vector<std::string>& TaxonomyRegistry::ethnicities(
    std::string_view dataset_id) const {
  static const std::vector<std::string> kEmpty;
  auto it = sets_.find(dataset_id);
  return it == sets_.end() ? kEmpty : it->second;
}

}  // namespace fairlens
