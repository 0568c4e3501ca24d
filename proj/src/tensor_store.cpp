// Copyright 2026 The CAFS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cafs/tensor_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <set>
#include <unordered_set>

#include "cafs/errors.hpp"
#include "cafs/kernels.hpp"
#include "cafs/npy.hpp"

namespace cafs {

using nlohmann::json;

ProbabilityMap::ProbabilityMap(std::size_t classes, std::size_t height, std::size_t width,
                               std::vector<float> values, bool check_normalization)
    : classes_(classes), height_(height), width_(width), values_(std::move(values)) {
  if (classes_ < 2) {
    fail(ErrorKind::kShape,
         "probability map needs at least 2 classes, got " + std::to_string(classes_));
  }
  if (height_ < 1 || width_ < 1) fail(ErrorKind::kShape, "probability map has an empty raster");
  if (values_.size() != classes_ * height_ * width_) {
    fail(ErrorKind::kShape, "probability buffer size does not match C x H x W");
  }
  if (check_normalization) check_normalized();
}

void ProbabilityMap::check_normalized(double tolerance) const {
  for (float v : values_) {
    if (!(v >= 0.0f && v <= 1.0f + static_cast<float>(tolerance))) {
      fail(ErrorKind::kNormalization, "probability " + std::to_string(v) + " outside [0, 1]");
    }
  }
  std::vector<float> sums(pixels());
  kernels::pixel_sums(values_, classes_, pixels(), sums);
  for (std::size_t j = 0; j < sums.size(); ++j) {
    if (!(std::fabs(static_cast<double>(sums[j]) - 1.0) <= tolerance)) {
      fail(ErrorKind::kNormalization,
           "pixel " + std::to_string(j) + " sums to " + std::to_string(sums[j]));
    }
  }
}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::size_t class_count,
                   std::vector<std::uint16_t> values, std::uint16_t ignore_index)
    : height_(height),
      width_(width),
      class_count_(class_count),
      ignore_index_(ignore_index),
      values_(std::move(values)) {
  if (height_ < 1 || width_ < 1) fail(ErrorKind::kShape, "label map has an empty raster");
  if (values_.size() != height_ * width_) {
    fail(ErrorKind::kShape, "label buffer size does not match H x W");
  }
  if (class_count_ < 1) fail(ErrorKind::kValidation, "label map class count must be positive");
  if (ignore_index_ < class_count_) {
    fail(ErrorKind::kValidation,
         "ignore index " + std::to_string(ignore_index_) + " collides with a class index");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const std::uint16_t v = values_[j];
    if (v != ignore_index_ && v >= class_count_) {
      fail(ErrorKind::kClassRange, "label value " + std::to_string(v) + " at pixel " +
                                       std::to_string(j) + " is not below class count " +
                                       std::to_string(class_count_));
    }
  }
}

std::size_t DatasetManifest::class_frequency(int c) const {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [c](const auto& s) {
    return std::binary_search(s.classes.begin(), s.classes.end(), c);
  }));
}

std::vector<float> softmax_planes(std::span<const float> logits, std::size_t classes,
                                  std::size_t pixels) {
  std::vector<float> out(logits.size());
  for (std::size_t j = 0; j < pixels; ++j) {
    float peak = logits[j];
    for (std::size_t c = 1; c < classes; ++c) peak = std::max(peak, logits[c * pixels + j]);
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      total += std::exp(static_cast<double>(logits[c * pixels + j]) - peak);
    }
    for (std::size_t c = 0; c < classes; ++c) {
      out[c * pixels + j] =
          static_cast<float>(std::exp(static_cast<double>(logits[c * pixels + j]) - peak) / total);
    }
  }
  return out;
}

ProbabilityMap read_probability_map(const std::filesystem::path& path,
                                    const ProbabilityReadOptions& options) {
  npy::Array array = npy::read(path);
  const auto& shape = array.header.shape;
  if (shape.size() != 3) {
    fail(ErrorKind::kShape, "probability map must be 3-dimensional (C, H, W), got ndim=" +
                                std::to_string(shape.size()) + " in " + path.string());
  }
  if (shape[0] < 2) {
    fail(ErrorKind::kShape,
         "probability map needs C >= 2, got " + std::to_string(shape[0]) + " in " + path.string());
  }

  const std::size_t n = array.header.element_count();
  std::vector<float> values(n);
  switch (array.header.dtype) {
    case npy::Dtype::kFloat32:
      std::memcpy(values.data(), array.payload.data(), n * sizeof(float));
      break;
    case npy::Dtype::kFloat64: {
      for (std::size_t i = 0; i < n; ++i) {
        double d;
        std::memcpy(&d, array.payload.data() + i * sizeof(double), sizeof(double));
        values[i] = static_cast<float>(d);
      }
      break;
    }
    default:
      fail(ErrorKind::kMalformedHeader,
           "probability map must have a float element type in " + path.string());
  }

  if (options.from_logits) values = softmax_planes(values, shape[0], shape[1] * shape[2]);

  try {
    ProbabilityMap map(shape[0], shape[1], shape[2], std::move(values), false);
    map.check_normalized(options.tolerance);
    return map;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + " (" + path.string() + ")");
  }
}

void write_probability_map(const ProbabilityMap& map, const std::filesystem::path& path) {
  npy::Header header{npy::Dtype::kFloat32, {map.classes(), map.height(), map.width()}};
  const auto values = map.values();
  npy::write(path, header, std::as_bytes(values));
}

LabelMap read_label_map(const std::filesystem::path& path, std::size_t class_count,
                        std::uint16_t ignore_index) {
  npy::Array array = npy::read(path);
  const auto& shape = array.header.shape;
  if (shape.size() != 2) {
    fail(ErrorKind::kShape, "label map must be 2-dimensional (H, W), got ndim=" +
                                std::to_string(shape.size()) + " in " + path.string());
  }
  const std::size_t n = array.header.element_count();
  std::vector<std::uint16_t> values(n);
  if (array.header.dtype == npy::Dtype::kUInt8) {
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<std::uint8_t>(array.payload[i]);
  } else if (array.header.dtype == npy::Dtype::kUInt16) {
    std::memcpy(values.data(), array.payload.data(), n * sizeof(std::uint16_t));
  } else {
    fail(ErrorKind::kMalformedHeader, "label map must be |u1 or <u2 in " + path.string());
  }
  try {
    return LabelMap(shape[0], shape[1], class_count, std::move(values), ignore_index);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + " (" + path.string() + ")");
  }
}

void write_label_map(const LabelMap& map, const std::filesystem::path& path) {
  const auto values = map.values();
  const bool fits_byte =
      map.ignore_index() <= 0xFF &&
      std::all_of(values.begin(), values.end(), [](auto v) { return v <= 0xFF; });
  if (fits_byte) {
    std::vector<std::uint8_t> narrow(values.begin(), values.end());
    npy::write(path, {npy::Dtype::kUInt8, {map.height(), map.width()}},
               std::as_bytes(std::span<const std::uint8_t>(narrow)));
  } else {
    npy::write(path, {npy::Dtype::kUInt16, {map.height(), map.width()}}, std::as_bytes(values));
  }
}

std::vector<int> present_classes(const LabelMap& map) {
  std::vector<bool> seen(map.class_count(), false);
  for (std::uint16_t v : map.values()) {
    if (v != map.ignore_index()) seen[v] = true;
  }
  std::vector<int> out;
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (seen[c]) out.push_back(static_cast<int>(c));
  }
  return out;
}

void validate_manifest(const DatasetManifest& manifest) {
  if (manifest.class_count < 1) fail(ErrorKind::kSchema, "class_count must be positive");
  if (manifest.ignore_index < manifest.class_count) {
    fail(ErrorKind::kSchema, "ignore_index collides with a class index");
  }
  std::unordered_set<std::string> ids;
  for (const auto& s : manifest.samples) {
    if (!ids.insert(s.id).second)
      fail(ErrorKind::kDuplicateId, "duplicate sample id '" + s.id + "'");
    for (int c : s.classes) {
      if (c < 0 || c >= manifest.class_count) {
        fail(ErrorKind::kSchema, "sample '" + s.id + "' lists class " + std::to_string(c) +
                                     " outside [0, class_count)");
      }
    }
  }
}

namespace {

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::kSchema, where + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, where + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, "manifest " + path.string() + " is not valid JSON: " + e.what());
  }

  DatasetManifest manifest;
  const std::string where = "manifest " + path.string();
  manifest.class_count = required<int>(doc, "class_count", where);
  if (doc.contains("ignore_index")) {
    const int ignore = required<int>(doc, "ignore_index", where);
    if (ignore < 0 || ignore > 0xFFFF)
      fail(ErrorKind::kSchema, where + ": ignore_index out of range");
    manifest.ignore_index = static_cast<std::uint16_t>(ignore);
  }
  const json samples = required<json>(doc, "samples", where);
  if (!samples.is_array()) fail(ErrorKind::kSchema, where + ": samples must be an array");

  std::vector<bool> needs_scan;
  for (const json& entry : samples) {
    ManifestSample s;
    s.id = required<std::string>(entry, "id", where);
    s.image = entry.contains("image") ? required<std::string>(entry, "image", where) : "";
    s.label = entry.contains("label") ? required<std::string>(entry, "label", where) : "";
    const bool has_classes = entry.contains("classes") && !entry.at("classes").is_null();
    if (has_classes) {
      s.classes = required<std::vector<int>>(entry, "classes", where);
      std::sort(s.classes.begin(), s.classes.end());
      s.classes.erase(std::unique(s.classes.begin(), s.classes.end()), s.classes.end());
    }
    needs_scan.push_back(!has_classes);
    manifest.samples.push_back(std::move(s));
  }
  validate_manifest(manifest);

  const auto base = path.parent_path();
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (!needs_scan[i]) continue;
    auto& s = manifest.samples[i];
    if (s.label.empty()) {
      fail(ErrorKind::kSchema, where + ": sample '" + s.id + "' has neither classes nor a label");
    }
    std::filesystem::path label_path(s.label);
    if (label_path.is_relative()) label_path = base / label_path;
    s.classes = present_classes(read_label_map(
        label_path, static_cast<std::size_t>(manifest.class_count), manifest.ignore_index));
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  validate_manifest(manifest);
  json doc;
  doc["class_count"] = manifest.class_count;
  doc["ignore_index"] = manifest.ignore_index;
  doc["samples"] = json::array();
  for (const auto& s : manifest.samples) {
    doc["samples"].push_back(
        {{"id", s.id}, {"image", s.image}, {"label", s.label}, {"classes", s.classes}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace cafs
