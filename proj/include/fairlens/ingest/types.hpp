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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace fairlens {

inline constexpr int kEmbeddingDim = 128;

template <typename Scalar>
using EmbeddingT = Eigen::Matrix<Scalar, kEmbeddingDim, 1>;
using Embedding = EmbeddingT<double>;

// Keyed by instance_id; std::map iteration gives the stable lexicographic
// order every analytics kernel relies on.
using EmbeddingStore = std::map<std::string, Embedding>;

// Pixel coordinates, origin top-left.
struct BoundingBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  bool valid() const;
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class Gender { Male, Female, Unknown };
enum class AgeGroup { Young, Middle, Older, Unknown };

inline constexpr std::string_view kUnknown = "Unknown";

struct Demographics {
  std::string ethnicity{kUnknown};
  Gender gender = Gender::Unknown;
  AgeGroup age_group = AgeGroup::Unknown;

  friend bool operator==(const Demographics&, const Demographics&) = default;
};

std::string_view to_string(Gender g);
std::string_view to_string(AgeGroup a);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<AgeGroup> parse_age_group(std::string_view s);

// Demographic attribute used to partition evaluation results.
enum class Grouping { Ethnicity, Gender, AgeGroup };
std::string_view to_string(Grouping g);
std::optional<Grouping> parse_grouping(std::string_view s);
std::string group_value(const Demographics& d, Grouping g);

enum class RegionKind { Positive, Negative };
std::string_view to_string(RegionKind k);
std::optional<RegionKind> parse_region_kind(std::string_view s);

struct FaceInstance {
  std::string instance_id;
  std::string image_id;
  BoundingBox box;
  RegionKind region_kind = RegionKind::Positive;
  Demographics demographics;
  std::optional<std::string> embedding_ref;

  friend bool operator==(const FaceInstance&, const FaceInstance&) = default;
};

struct DetectionRecord {
  std::string image_id;
  BoundingBox box;
  double confidence = 0;

  friend bool operator==(const DetectionRecord&,
                         const DetectionRecord&) = default;
};

struct ManifestImage {
  std::string image_id;
  std::optional<std::string> path;
  Demographics group;

  friend bool operator==(const ManifestImage&, const ManifestImage&) = default;
};

struct DatasetManifest {
  std::string dataset_id;
  std::vector<ManifestImage> images;
  std::vector<FaceInstance> instances;
  std::string provenance;

  const ManifestImage* find_image(std::string_view image_id) const;

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

// Canonical ethnicity label sets per dataset. Datasets without a registered
// set accept any non-empty label. "Unknown" is always accepted.
class TaxonomyRegistry {
 public:
  // RFW (Asian, Indian, Black, White) and FairFace's seven classes.
  static TaxonomyRegistry defaults();

  void register_ethnicities(std::string dataset_id,
                            std::vector<std::string> labels);
  bool accepts(std::string_view dataset_id,
               std::string_view ethnicity) const;
  // Registered labels in registration order, or empty when unregistered.
  const std::vector<std::string>& ethnicities(
      std::string_view dataset_id) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> sets_;
};

}  // namespace fairlens
