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
#include <optional>
#include <vector>

#include "cafs/tensor_store.hpp"

namespace cafs {

// Per-class value that may be undefined (0/0). Consumers choose the policy.
using OptionalScores = std::vector<std::optional<double>>;

struct ClassPrecision {
  OptionalScores values;
};

struct ClassIoU {
  OptionalScores values;
};

// Mergeable per-class confusion counts over any number of rasters.
//
// Pixels whose reference is the ignore sentinel are skipped. A prediction of
// ignore on a counted pixel is a miss for the reference class (fn, union) and
// never a false positive.
class ConfusionAccumulator {
 public:
  ConfusionAccumulator() = default;
  explicit ConfusionAccumulator(std::size_t class_count);

  std::size_t class_count() const { return class_count_; }

  const std::vector<std::uint64_t>& tp() const { return tp_; }
  const std::vector<std::uint64_t>& fp() const { return fp_; }
  const std::vector<std::uint64_t>& fn() const { return fn_; }
  const std::vector<std::uint64_t>& intersection() const { return intersection_; }
  const std::vector<std::uint64_t>& unions() const { return unions_; }

  // Pixels that entered the counts (reference not ignore).
  std::uint64_t counted_pixels() const { return counted_; }
  // Counted pixels whose prediction was ignore.
  std::uint64_t abstained_pixels() const { return abstained_; }

  void accumulate(const LabelMap& prediction, const LabelMap& reference);

  // Element-wise sum; throws ClassCountMismatch on differing class counts.
  void merge(const ConfusionAccumulator& other);

  friend bool operator==(const ConfusionAccumulator&, const ConfusionAccumulator&) = default;

 private:
  std::size_t class_count_ = 0;
  std::vector<std::uint64_t> tp_, fp_, fn_, intersection_, unions_;
  std::uint64_t counted_ = 0;
  std::uint64_t abstained_ = 0;
};

ConfusionAccumulator accumulate(ConfusionAccumulator acc, const LabelMap& prediction,
                                const LabelMap& reference);
ConfusionAccumulator merge(ConfusionAccumulator a, const ConfusionAccumulator& b);

ClassPrecision precision(const ConfusionAccumulator& acc);

// Dataset-level IoU: counts are summed before division.
ClassIoU iou(const ConfusionAccumulator& acc);

}  // namespace cafs
