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
#include <string>
#include <string_view>
#include <vector>

#include "fairlens/ingest/types.hpp"
#include "json.hpp"

namespace fairlens {

// Record-level JSON codecs shared by the file formats and the HTTP API.
// Decoders throw fairlens::Error("MalformedRecord") with `line` in details.
nlohmann::ordered_json to_json(const BoundingBox& box);
nlohmann::ordered_json to_json(const Demographics& d);
nlohmann::ordered_json to_json(const DetectionRecord& d);
nlohmann::ordered_json to_json(const FaceInstance& f);
BoundingBox box_from_json(const nlohmann::json& j, std::size_t line = 0);
Demographics demographics_from_json(const nlohmann::json& j,
                                    std::size_t line = 0);
DetectionRecord detection_from_json(const nlohmann::json& j,
                                    std::size_t line = 0);

DatasetManifest parse_manifest(
    std::string_view text,
    const TaxonomyRegistry& taxonomy = TaxonomyRegistry::defaults());
std::string serialize_manifest(const DatasetManifest& manifest);

DatasetManifest load_manifest(
    const std::filesystem::path& path,
    const TaxonomyRegistry& taxonomy = TaxonomyRegistry::defaults());
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

std::vector<DetectionRecord> parse_detections(std::string_view text);
std::string serialize_detections(const std::vector<DetectionRecord>& dets);
std::vector<DetectionRecord> load_detections(
    const std::filesystem::path& path);
void save_detections(const std::vector<DetectionRecord>& dets,
                     const std::filesystem::path& path);

// Vectors are L2-normalized on the way in.
EmbeddingStore parse_embeddings(std::string_view text);
std::string serialize_embeddings(const EmbeddingStore& store);
EmbeddingStore load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingStore& store,
                     const std::filesystem::path& path);

// Deterministic unit-norm stand-in for a face embedder: SHA-256 of
// (seed || big-endian block counter) expanded to 128 values in (-1, 1).
Embedding stub_embed(std::string_view seed);

}  // namespace fairlens
