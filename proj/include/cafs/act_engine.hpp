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
#include <string>
#include <string_view>
#include <vector>

#include "cafs/seg_metrics.hpp"
#include "cafs/tensor_store.hpp"

namespace cafs {

inline constexpr double kDefaultMaxPrecision = 0.95;
inline constexpr double kDefaultThresholdStep = 0.01;

// Per-class confidence cutoffs together with the regime they live in.
struct ClassThresholds {
  std::vector<double> values;
  double min_ct = 0.0;
  double max_ct = 1.0;

  std::size_t size() const { return values.size(); }
  static ClassThresholds uniform(std::size_t classes, double value, double min_ct, double max_ct);

  friend bool operator==(const ClassThresholds&, const ClassThresholds&) = default;
};

// Iteration count implied by a threshold regime: round((max_ct - min_ct) * 100).
int default_iterations(double min_ct, double max_ct);

struct ActConfig {
  double min_ct = 0.85;
  double max_ct = 0.95;
  double max_cp = kDefaultMaxPrecision;
  double epsilon = kDefaultThresholdStep;
  std::optional<int> iterations;  // defaults to default_iterations(min_ct, max_ct)

  int resolved_iterations() const;
  // Throws ValidationError on an inconsistent regime.
  void validate() const;

  // Named threshold regimes, e.g. "0.85-0.95".
  static ActConfig preset(std::string_view name);
  static std::vector<std::string> preset_names();
};

struct ActIteration {
  int iteration = 0;               // 1-based
  ClassPrecision precision;        // measured with the thresholds in force during this iteration
  std::vector<double> thresholds;  // thresholds after this iteration's update
};

struct ActReport {
  ClassThresholds final_thresholds;
  std::vector<ActIteration> per_iteration;
  double coverage = 0.0;  // non-ignore pseudo-label fraction under final thresholds
};

// The threshold-independent part of pseudo-labeling: per-pixel argmax class
// (ties to the lowest index) and its probability.
class ConfidenceMap {
 public:
  ConfidenceMap() = default;
  explicit ConfidenceMap(const ProbabilityMap& probs);

  std::size_t classes() const { return classes_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return best_class_.size(); }
  std::span<const std::uint16_t> best_class() const { return best_class_; }
  std::span<const float> best_prob() const { return best_prob_; }

  LabelMap pseudo_label(const ClassThresholds& thresholds,
                        std::uint16_t ignore_index = kDefaultIgnoreIndex) const;

 private:
  std::size_t classes_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint16_t> best_class_;
  std::vector<float> best_prob_;
};

// Pixel j gets c* = argmax_c p[c][j] when p[c*][j] > thresholds[c*] (strict),
// otherwise the ignore sentinel.
LabelMap pseudo_label(const ProbabilityMap& probs, const ClassThresholds& thresholds,
                      std::uint16_t ignore_index = kDefaultIgnoreIndex);

// Plain argmax raster (no thresholding), ties to the lowest class index.
LabelMap argmax_label(const ProbabilityMap& probs,
                      std::uint16_t ignore_index = kDefaultIgnoreIndex);

// Raises by epsilon (capped at max_ct) every class whose precision is defined
// and below max_cp. Undefined precision leaves the threshold unchanged.
ClassThresholds act_step(const ClassThresholds& thresholds, const ClassPrecision& precision,
                         const ActConfig& config);

struct ActSample {
  ConfidenceMap confidence;
  LabelMap label;
};

ActSample make_act_sample(const ProbabilityMap& probs, LabelMap label);

// Starts every class at min_ct and performs `iterations` rounds of
// pseudo-label -> confusion against labels -> precision -> act_step.
// Per-sample work inside a round is spread over `jobs` threads.
ActReport run_act(std::span<const ActSample> fold, const ActConfig& config, std::size_t jobs = 1);

// Element-wise mean of per-fold thresholds (all in the same regime).
ClassThresholds aggregate_thresholds(std::span<const ClassThresholds> per_fold);

// Per-class count of non-ignore pixels in a pseudo-label.
std::vector<std::uint64_t> supervised_pixel_counts(const LabelMap& pseudo);

}  // namespace cafs
