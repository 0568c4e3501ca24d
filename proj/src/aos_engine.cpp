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

#include "cafs/aos_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "cafs/errors.hpp"

namespace cafs {

std::size_t OversamplingPlan::extra_samples() const {
  std::size_t total = 0;
  for (const auto& p : per_class) total += p.oversample_count;
  return total;
}

OptionalScores mean_scores(std::span<const ClassIoU> per_fold) {
  if (per_fold.empty()) fail(ErrorKind::kEmptyInput, "no per-fold scores");
  const std::size_t classes = per_fold.front().values.size();
  OptionalScores out(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& fold : per_fold) {
      if (fold.values.size() != classes) {
        fail(ErrorKind::kClassCountMismatch, "per-fold score vectors differ in length");
      }
      if (fold.values[c]) {
        sum += *fold.values[c];
        ++n;
      }
    }
    if (n > 0) out[c] = sum / static_cast<double>(n);
  }
  return out;
}

double sampling_threshold(const OptionalScores& s_mean, std::span<const int> excluded) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < s_mean.size(); ++c) {
    if (!s_mean[c]) continue;
    if (std::find(excluded.begin(), excluded.end(), static_cast<int>(c)) != excluded.end())
      continue;
    sum += *s_mean[c];
    ++n;
  }
  if (n == 0) fail(ErrorKind::kAllUndefined, "no defined class score to average");
  return sum / static_cast<double>(n);
}

ClassScores score_summary(std::vector<ClassIoU> per_fold, std::span<const int> excluded) {
  ClassScores scores;
  scores.s_mean = mean_scores(per_fold);
  scores.st = sampling_threshold(scores.s_mean, excluded);
  scores.per_fold = std::move(per_fold);
  return scores;
}

std::size_t oversampling_multiplier(double st, std::optional<double> s_mean, double lambda) {
  if (!s_mean || !(st > *s_mean)) return 0;
  constexpr double kSnap = 1e-9;
  const double raw = lambda * (st - *s_mean);
  const double nearest = std::round(raw);
  const double value = std::fabs(raw - nearest) <= kSnap ? nearest : std::ceil(raw);
  return static_cast<std::size_t>(std::max(0.0, value));
}

OversamplingPlan aos_plan(const OptionalScores& s_mean, double st, const DatasetManifest& manifest,
                          double lambda) {
  if (!(lambda > 0.0)) fail(ErrorKind::kValidation, "lambda must be positive");
  if (s_mean.size() != static_cast<std::size_t>(manifest.class_count)) {
    fail(ErrorKind::kClassCountMismatch, "scores cover " + std::to_string(s_mean.size()) +
                                             " classes, manifest has " +
                                             std::to_string(manifest.class_count));
  }
  OversamplingPlan plan;
  plan.lambda = lambda;
  plan.st = st;
  plan.s_mean = s_mean;
  for (std::size_t c = 0; c < s_mean.size(); ++c) {
    ClassPlan p;
    p.class_index = static_cast<int>(c);
    p.base_count = manifest.class_frequency(static_cast<int>(c));
    p.multiplier = oversampling_multiplier(st, s_mean[c], lambda);
    p.oversample_count = p.base_count * p.multiplier;
    plan.per_class.push_back(p);
  }
  return plan;
}

DatasetManifest materialize(const OversamplingPlan& plan, const DatasetManifest& manifest,
                            std::uint64_t /*seed*/) {
  if (plan.per_class.size() != static_cast<std::size_t>(manifest.class_count)) {
    fail(ErrorKind::kClassCountMismatch, "plan and manifest disagree on class count");
  }
  DatasetManifest out = manifest;
  std::unordered_map<std::string, std::size_t> copies;
  for (const auto& p : plan.per_class) {
    for (std::size_t unit = 0; unit < p.multiplier; ++unit) {
      for (const auto& s : manifest.samples) {
        if (!std::binary_search(s.classes.begin(), s.classes.end(), p.class_index)) continue;
        ManifestSample copy = s;
        copy.id = s.id + "#os" + std::to_string(++copies[s.id]);
        out.samples.push_back(std::move(copy));
      }
    }
  }
  return out;
}

}  // namespace cafs
