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
#include <span>
#include <vector>

#include "cafs/seg_metrics.hpp"
#include "cafs/tensor_store.hpp"

namespace cafs {

// Hard-class oversampling driven by validation IoU.
//
// The per-fold IoU vectors are averaged per class (mean_scores), the defined
// means are averaged again into the sampling threshold (sampling_threshold),
// and every class scoring below it gets its labeled images duplicated
// ceil(lambda * (st - s_mean[c])) times (aos_plan, materialize).

struct ClassScores {
  std::vector<ClassIoU> per_fold;
  OptionalScores s_mean;
  double st = 0.0;
};

struct ClassPlan {
  int class_index = 0;
  std::size_t base_count = 0;  // labeled samples containing the class
  std::size_t multiplier = 0;
  std::size_t oversample_count = 0;  // base_count * multiplier
};

struct OversamplingPlan {
  double lambda = 1.0;
  double st = 0.0;
  OptionalScores s_mean;
  std::vector<ClassPlan> per_class;

  std::size_t extra_samples() const;
};

// Mean over the folds that define each class; undefined if none does.
OptionalScores mean_scores(std::span<const ClassIoU> per_fold);

// Mean of the defined entries, skipping classes listed in `excluded`.
double sampling_threshold(const OptionalScores& s_mean, std::span<const int> excluded = {});

ClassScores score_summary(std::vector<ClassIoU> per_fold, std::span<const int> excluded = {});

// ceil(lambda * (st - s)) for st > s, else 0. Values within 1e-9 of an
// integer are treated as that integer so decimal inputs like st = 0.8,
// s = 0.6, lambda = 10 give 2 rather than 3.
std::size_t oversampling_multiplier(double st, std::optional<double> s_mean, double lambda);

OversamplingPlan aos_plan(const OptionalScores& s_mean, double st, const DatasetManifest& manifest,
                          double lambda);

// Original samples followed by, for each class in index order and each
// multiplier unit, one copy of every sample containing that class. Copies
// are named "<id>#os<n>" with n counting that sample's copies from 1.
// `seed` is accepted for interface stability; the expansion is exhaustive.
DatasetManifest materialize(const OversamplingPlan& plan, const DatasetManifest& manifest,
                            std::uint64_t seed = 0);

}  // namespace cafs
