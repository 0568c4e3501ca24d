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

#include "cafs/seg_metrics.hpp"

#include <string>

#include "cafs/errors.hpp"

namespace cafs {

ConfusionAccumulator::ConfusionAccumulator(std::size_t class_count)
    : class_count_(class_count),
      tp_(class_count, 0),
      fp_(class_count, 0),
      fn_(class_count, 0),
      intersection_(class_count, 0),
      unions_(class_count, 0) {}

void ConfusionAccumulator::accumulate(const LabelMap& prediction, const LabelMap& reference) {
  if (prediction.height() != reference.height() || prediction.width() != reference.width()) {
    fail(ErrorKind::kShapeMismatch, "prediction " + std::to_string(prediction.height()) + "x" +
                                        std::to_string(prediction.width()) + " vs reference " +
                                        std::to_string(reference.height()) + "x" +
                                        std::to_string(reference.width()));
  }
  if (prediction.class_count() != class_count_ || reference.class_count() != class_count_) {
    fail(ErrorKind::kClassCountMismatch,
         "accumulator has " + std::to_string(class_count_) + " classes, prediction " +
             std::to_string(prediction.class_count()) + ", reference " +
             std::to_string(reference.class_count()));
  }

  const auto pred = prediction.values();
  const auto ref = reference.values();
  const std::uint16_t pred_ignore = prediction.ignore_index();
  const std::uint16_t ref_ignore = reference.ignore_index();
  for (std::size_t j = 0; j < ref.size(); ++j) {
    const std::uint16_t b = ref[j];
    if (b == ref_ignore) continue;
    ++counted_;
    const std::uint16_t a = pred[j];
    if (a == pred_ignore) {
      ++abstained_;
      ++fn_[b];
      ++unions_[b];
    } else if (a == b) {
      ++tp_[a];
      ++intersection_[a];
      ++unions_[a];
    } else {
      ++fp_[a];
      ++fn_[b];
      ++unions_[a];
      ++unions_[b];
    }
  }
}

void ConfusionAccumulator::merge(const ConfusionAccumulator& other) {
  if (other.class_count_ != class_count_) {
    fail(ErrorKind::kClassCountMismatch, "cannot merge accumulators with " +
                                             std::to_string(class_count_) + " and " +
                                             std::to_string(other.class_count_) + " classes");
  }
  for (std::size_t c = 0; c < class_count_; ++c) {
    tp_[c] += other.tp_[c];
    fp_[c] += other.fp_[c];
    fn_[c] += other.fn_[c];
    intersection_[c] += other.intersection_[c];
    unions_[c] += other.unions_[c];
  }
  counted_ += other.counted_;
  abstained_ += other.abstained_;
}

ConfusionAccumulator accumulate(ConfusionAccumulator acc, const LabelMap& prediction,
                                const LabelMap& reference) {
  acc.accumulate(prediction, reference);
  return acc;
}

ConfusionAccumulator merge(ConfusionAccumulator a, const ConfusionAccumulator& b) {
  a.merge(b);
  return a;
}

ClassPrecision precision(const ConfusionAccumulator& acc) {
  ClassPrecision out;
  out.values.resize(acc.class_count());
  for (std::size_t c = 0; c < acc.class_count(); ++c) {
    const std::uint64_t denom = acc.tp()[c] + acc.fp()[c];
    if (denom > 0) out.values[c] = static_cast<double>(acc.tp()[c]) / static_cast<double>(denom);
  }
  return out;
}

ClassIoU iou(const ConfusionAccumulator& acc) {
  ClassIoU out;
  out.values.resize(acc.class_count());
  for (std::size_t c = 0; c < acc.class_count(); ++c) {
    const std::uint64_t denom = acc.unions()[c];
    if (denom > 0) {
      out.values[c] = static_cast<double>(acc.intersection()[c]) / static_cast<double>(denom);
    }
  }
  return out;
}

}  // namespace cafs
