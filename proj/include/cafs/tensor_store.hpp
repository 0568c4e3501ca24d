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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cafs {

inline constexpr std::uint16_t kDefaultIgnoreIndex = 255;
inline constexpr double kProbabilitySumTolerance = 1e-4;

// Per-pixel class probabilities stored plane-major (C x H x W).
class ProbabilityMap {
 public:
  ProbabilityMap() = default;

  // Validates shape (C >= 2, H, W >= 1) and, unless `check_normalization` is
  // false, that every pixel column sums to 1 within kProbabilitySumTolerance.
  ProbabilityMap(std::size_t classes, std::size_t height, std::size_t width,
                 std::vector<float> values, bool check_normalization = true);

  std::size_t classes() const { return classes_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }

  std::span<const float> values() const { return values_; }
  std::span<const float> plane(std::size_t c) const {
    return std::span<const float>(values_).subspan(c * pixels(), pixels());
  }
  float at(std::size_t c, std::size_t pixel) const { return values_[c * pixels() + pixel]; }

  // Throws NormalizationError unless every value is in [0, 1] and every
  // pixel column sums to 1 within `tolerance`.
  void check_normalized(double tolerance = kProbabilitySumTolerance) const;

  friend bool operator==(const ProbabilityMap&, const ProbabilityMap&) = default;

 private:
  std::size_t classes_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> values_;
};

// H x W class-index raster; values are < class_count or equal ignore_index.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(std::size_t height, std::size_t width, std::size_t class_count,
           std::vector<std::uint16_t> values, std::uint16_t ignore_index = kDefaultIgnoreIndex);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }
  std::size_t class_count() const { return class_count_; }
  std::uint16_t ignore_index() const { return ignore_index_; }

  std::span<const std::uint16_t> values() const { return values_; }
  std::uint16_t at(std::size_t pixel) const { return values_[pixel]; }
  bool is_ignore(std::size_t pixel) const { return values_[pixel] == ignore_index_; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t class_count_ = 0;
  std::uint16_t ignore_index_ = kDefaultIgnoreIndex;
  std::vector<std::uint16_t> values_;
};

struct ManifestSample {
  std::string id;
  std::string image;
  std::string label;
  std::vector<int> classes;  // sorted, unique

  friend bool operator==(const ManifestSample&, const ManifestSample&) = default;
};

struct DatasetManifest {
  int class_count = 0;
  std::uint16_t ignore_index = kDefaultIgnoreIndex;
  std::vector<ManifestSample> samples;

  std::size_t size() const { return samples.size(); }
  // Number of samples whose present classes contain `c`.
  std::size_t class_frequency(int c) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct ProbabilityReadOptions {
  // Treat the payload as logits and apply a per-pixel softmax.
  bool from_logits = false;
  double tolerance = kProbabilitySumTolerance;
};

ProbabilityMap read_probability_map(const std::filesystem::path& path,
                                    const ProbabilityReadOptions& options = {});
void write_probability_map(const ProbabilityMap& map, const std::filesystem::path& path);

// Numerically stable softmax over the class axis of a C x (H*W) buffer.
std::vector<float> softmax_planes(std::span<const float> logits, std::size_t classes,
                                  std::size_t pixels);

LabelMap read_label_map(const std::filesystem::path& path, std::size_t class_count,
                        std::uint16_t ignore_index = kDefaultIgnoreIndex);
// Writes |u1 when every value and the sentinel fit in a byte, <u2 otherwise.
void write_label_map(const LabelMap& map, const std::filesystem::path& path);

// Sorted unique class indices present in a raster (ignore excluded).
std::vector<int> present_classes(const LabelMap& map);

// Samples without a "classes" entry get them by scanning their label raster,
// resolved relative to the manifest directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Structural checks shared by load_manifest and in-memory constructors.
void validate_manifest(const DatasetManifest& manifest);

}  // namespace cafs
