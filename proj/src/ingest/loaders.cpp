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

#include "fairlens/ingest/loaders.hpp"

#include <openssl/sha.h>

#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"

namespace fairlens {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double number_field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw_malformed(line, std::string("missing numeric field '") + key + "'");
  }
  double v = it->get<double>();
  if (!std::isfinite(v)) throw_malformed(line, std::string(key) + " not finite");
  return v;
}

std::string string_field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw_malformed(line, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> nullable_string(const json& j, const char* key,
                                           std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw_malformed(line, std::string(key) + " not a string");
  return it->get<std::string>();
}

// Drops the header (line 1) after validating it. A zero-byte input yields no
// records when `allow_empty` is set.
std::vector<NumberedLine> body_records(std::string_view text,
                                       std::string_view kind,
                                       json* header_out, bool allow_empty) {
  auto lines = split_records(text);
  if (lines.empty()) {
    if (allow_empty) return {};
    throw_malformed(1, "missing header");
  }
  json header = parse_record(lines.front());
  expect_header(header, kind, 1);
  if (header_out) *header_out = std::move(header);
  lines.erase(lines.begin());
  return lines;
}

}  // namespace

ordered_json to_json(const BoundingBox& box) {
  ordered_json j;
  j["x_min"] = box.x_min;
  j["y_min"] = box.y_min;
  j["x_max"] = box.x_max;
  j["y_max"] = box.y_max;
  return j;
}

ordered_json to_json(const Demographics& d) {
  ordered_json j;
  j["ethnicity"] = d.ethnicity;
  j["gender"] = to_string(d.gender);
  j["age_group"] = to_string(d.age_group);
  return j;
}

ordered_json to_json(const DetectionRecord& d) {
  ordered_json j;
  j["image_id"] = d.image_id;
  j["box"] = to_json(d.box);
  j["confidence"] = d.confidence;
  return j;
}

ordered_json to_json(const FaceInstance& f) {
  ordered_json j;
  j["record"] = "instance";
  j["instance_id"] = f.instance_id;
  j["image_id"] = f.image_id;
  j["box"] = to_json(f.box);
  j["region_kind"] = to_string(f.region_kind);
  j["demographics"] = to_json(f.demographics);
  j["embedding_ref"] =
      f.embedding_ref ? ordered_json(*f.embedding_ref) : ordered_json(nullptr);
  return j;
}

BoundingBox box_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) throw_malformed(line, "box is not an object");
  BoundingBox box{number_field(j, "x_min", line), number_field(j, "y_min", line),
                  number_field(j, "x_max", line), number_field(j, "y_max", line)};
  if (!box.valid()) throw_malformed(line, "invalid bounding box");
  return box;
}

Demographics demographics_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) throw_malformed(line, "demographics is not an object");
  Demographics d;
  if (auto e = nullable_string(j, "ethnicity", line)) d.ethnicity = *e;
  if (d.ethnicity.empty()) throw_malformed(line, "empty ethnicity");
  if (auto g = nullable_string(j, "gender", line)) {
    auto parsed = parse_gender(*g);
    if (!parsed) throw_malformed(line, "unknown gender '" + *g + "'");
    d.gender = *parsed;
  }
  if (auto a = nullable_string(j, "age_group", line)) {
    auto parsed = parse_age_group(*a);
    if (!parsed) throw_malformed(line, "unknown age_group '" + *a + "'");
    d.age_group = *parsed;
  }
  return d;
}

DetectionRecord detection_from_json(const json& j, std::size_t line) {
  auto box = j.find("box");
  if (box == j.end()) throw_malformed(line, "missing box");
  DetectionRecord d{string_field(j, "image_id", line),
                    box_from_json(*box, line),
                    number_field(j, "confidence", line)};
  if (d.confidence < 0 || d.confidence > 1) {
    throw Error("ConfidenceOutOfRange",
                "confidence outside [0,1] at line " + std::to_string(line),
                {{"line", line}, {"confidence", d.confidence}});
  }
  return d;
}

DatasetManifest parse_manifest(std::string_view text,
                               const TaxonomyRegistry& taxonomy) {
  json header;
  auto lines = body_records(text, "manifest", &header, false);
  DatasetManifest m;
  m.dataset_id = string_field(header, "dataset_id", 1);
  if (auto p = nullable_string(header, "provenance", 1)) m.provenance = *p;

  auto check_taxonomy = [&](const Demographics& d, std::size_t line) {
    if (!taxonomy.accepts(m.dataset_id, d.ethnicity)) {
      throw_malformed(line, "ethnicity '" + d.ethnicity +
                                "' not in the taxonomy for " + m.dataset_id);
    }
  };

  std::set<std::string, std::less<>> image_ids;
  std::set<std::string, std::less<>> instance_ids;
  // Negative regions are checked against their image group once all images
  // are known, because records may appear in any order.
  std::vector<std::pair<std::size_t, std::size_t>> negatives_to_check;
  std::vector<bool> negative_has_demographics;

  for (const auto& line : lines) {
    json r = parse_record(line);
    const std::string kind = string_field(r, "record", line.number);
    if (kind == "image") {
      ManifestImage img;
      img.image_id = string_field(r, "image_id", line.number);
      img.path = nullable_string(r, "path", line.number);
      auto g = r.find("group");
      if (g != r.end()) img.group = demographics_from_json(*g, line.number);
      check_taxonomy(img.group, line.number);
      if (!image_ids.insert(img.image_id).second) {
        throw_malformed(line.number, "duplicate image_id " + img.image_id);
      }
      m.images.push_back(std::move(img));
    } else if (kind == "instance") {
      FaceInstance f;
      f.instance_id = string_field(r, "instance_id", line.number);
      f.image_id = string_field(r, "image_id", line.number);
      auto box = r.find("box");
      if (box == r.end()) throw_malformed(line.number, "missing box");
      f.box = box_from_json(*box, line.number);
      auto kind_str = string_field(r, "region_kind", line.number);
      auto rk = parse_region_kind(kind_str);
      if (!rk) throw_malformed(line.number, "bad region_kind " + kind_str);
      f.region_kind = *rk;
      auto d = r.find("demographics");
      const bool has_demo = d != r.end() && !d->is_null();
      if (has_demo) {
        f.demographics = demographics_from_json(*d, line.number);
        check_taxonomy(f.demographics, line.number);
      }
      f.embedding_ref = nullable_string(r, "embedding_ref", line.number);
      if (f.region_kind == RegionKind::Negative && f.embedding_ref) {
        throw_malformed(line.number, "negative region carries embedding_ref");
      }
      if (!instance_ids.insert(f.instance_id).second) {
        throw Error("DuplicateInstanceId",
                    "duplicate instance_id " + f.instance_id,
                    {{"id", f.instance_id}});
      }
      if (f.region_kind == RegionKind::Negative || !has_demo) {
        negatives_to_check.emplace_back(m.instances.size(), line.number);
        negative_has_demographics.push_back(has_demo);
      }
      m.instances.push_back(std::move(f));
    } else {
      throw_malformed(line.number, "unknown record type " + kind);
    }
  }

  for (const auto& f : m.instances) {
    if (!image_ids.contains(f.image_id)) {
      throw Error("DanglingImageRef",
                  "instance " + f.instance_id + " references unknown image " +
                      f.image_id,
                  {{"id", f.image_id}});
    }
  }
  for (std::size_t k = 0; k < negatives_to_check.size(); ++k) {
    auto [idx, line] = negatives_to_check[k];
    FaceInstance& f = m.instances[idx];
    const Demographics& group = m.find_image(f.image_id)->group;
    if (!negative_has_demographics[k]) {
      f.demographics = group;
    } else if (f.demographics != group) {
      throw_malformed(line, "negative region demographics differ from image group");
    }
  }
  return m;
}

std::string serialize_manifest(const DatasetManifest& m) {
  std::ostringstream out;
  ordered_json header = header_record("manifest");
  header["dataset_id"] = m.dataset_id;
  header["provenance"] = m.provenance;
  out << header.dump() << '\n';
  for (const auto& img : m.images) {
    ordered_json j;
    j["record"] = "image";
    j["image_id"] = img.image_id;
    j["path"] = img.path ? ordered_json(*img.path) : ordered_json(nullptr);
    j["group"] = to_json(img.group);
    out << j.dump() << '\n';
  }
  for (const auto& f : m.instances) out << to_json(f).dump() << '\n';
  return out.str();
}

DatasetManifest load_manifest(const std::filesystem::path& path,
                              const TaxonomyRegistry& taxonomy) {
  return parse_manifest(read_file(path), taxonomy);
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_manifest(m));
}

std::vector<DetectionRecord> parse_detections(std::string_view text) {
  std::vector<DetectionRecord> out;
  for (const auto& line : body_records(text, "detections", nullptr, true)) {
    out.push_back(detection_from_json(parse_record(line), line.number));
  }
  return out;
}

std::string serialize_detections(const std::vector<DetectionRecord>& dets) {
  std::ostringstream out;
  out << header_record("detections").dump() << '\n';
  for (const auto& d : dets) out << to_json(d).dump() << '\n';
  return out.str();
}

std::vector<DetectionRecord> load_detections(const std::filesystem::path& path) {
  return parse_detections(read_file(path));
}

void save_detections(const std::vector<DetectionRecord>& dets,
                     const std::filesystem::path& path) {
  write_file_atomic(path, serialize_detections(dets));
}

EmbeddingStore parse_embeddings(std::string_view text) {
  EmbeddingStore store;
  for (const auto& line : body_records(text, "embeddings", nullptr, true)) {
    json r = parse_record(line);
    const std::string id = string_field(r, "instance_id", line.number);
    auto values = r.find("values");
    if (values == r.end() || !values->is_array()) {
      throw_malformed(line.number, "missing values array");
    }
    if (values->size() != static_cast<std::size_t>(kEmbeddingDim)) {
      throw Error("WrongDimension",
                  "embedding " + id + " has " + std::to_string(values->size()) +
                      " values",
                  {{"id", id}, {"n", values->size()}});
    }
    Embedding v;
    for (int k = 0; k < kEmbeddingDim; ++k) {
      const json& x = (*values)[k];
      if (!x.is_number()) throw_malformed(line.number, "non-numeric value");
      v[k] = x.get<double>();
      if (!std::isfinite(v[k])) throw_malformed(line.number, "non-finite value");
    }
    const double norm = v.norm();
    if (norm == 0) {
      throw Error("ZeroVector", "embedding " + id + " is the zero vector",
                  {{"id", id}});
    }
    v /= norm;
    if (!store.emplace(id, v).second) {
      throw_malformed(line.number, "duplicate instance_id " + id);
    }
  }
  return store;
}

std::string serialize_embeddings(const EmbeddingStore& store) {
  std::ostringstream out;
  out << header_record("embeddings").dump() << '\n';
  for (const auto& [id, v] : store) {
    ordered_json j;
    j["instance_id"] = id;
    j["values"] = std::vector<double>(v.data(), v.data() + v.size());
    out << j.dump() << '\n';
  }
  return out.str();
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path));
}

void save_embeddings(const EmbeddingStore& store,
                     const std::filesystem::path& path) {
  write_file_atomic(path, serialize_embeddings(store));
}

Embedding stub_embed(std::string_view seed) {
  if (seed.empty()) throw Error("EmptySeed", "stub_embed needs a non-empty seed");
  constexpr int kPerBlock = SHA256_DIGEST_LENGTH / 4;
  Embedding v;
  std::string input(seed);
  input.append(4, '\0');
  for (int block = 0; block * kPerBlock < kEmbeddingDim; ++block) {
    const auto n = input.size();
    input[n - 4] = static_cast<char>((block >> 24) & 0xff);
    input[n - 3] = static_cast<char>((block >> 16) & 0xff);
    input[n - 2] = static_cast<char>((block >> 8) & 0xff);
    input[n - 1] = static_cast<char>(block & 0xff);
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(reinterpret_cast<const unsigned char*>(input.data()), input.size(),
           digest.data());
    for (int w = 0; w < kPerBlock; ++w) {
      std::uint32_t u = (std::uint32_t{digest[4 * w]} << 24) |
                        (std::uint32_t{digest[4 * w + 1]} << 16) |
                        (std::uint32_t{digest[4 * w + 2]} << 8) |
                        std::uint32_t{digest[4 * w + 3]};
      v[block * kPerBlock + w] = (static_cast<double>(u) + 0.5) / 4294967296.0 * 2.0 - 1.0;
    }
  }
  return v / v.norm();
}

}  // namespace fairlens
