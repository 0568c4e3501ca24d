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

// Reference implementations written straight from the definitions, with no
// calls into the library under test. Plain vectors in, plain vectors out.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cafs::oracle {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// C x H*W plane-major softmax-like probabilities, column sums within float
// rounding of 1. `peaked` pushes mass onto one class so thresholds bite.
std::vector<float> random_probabilities(std::mt19937_64& rng, int classes, int pixels,
                                        bool peaked = true);

// Labels in [0, classes) with roughly `ignore_rate` set to `ignore`.
std::vector<std::uint16_t> random_labels(std::mt19937_64& rng, int classes, int pixels,
                                         double ignore_rate, std::uint16_t ignore = 255);

struct Confusion {
  std::vector<std::uint64_t> tp, fp, fn, inter, uni;
};

// Per-pixel double loop over (predicted, reference) pairs.
Confusion naive_confusion(const std::vector<std::uint16_t>& pred,
                          const std::vector<std::uint16_t>& ref, int classes,
                          std::uint16_t ignore = 255);

struct NaiveIteration {
  std::vector<std::optional<double>> precision;
  std::vector<double> thresholds;  // after the update
};

struct NaiveImage {
  std::vector<float> probs;  // C x pixels
  std::vector<std::uint16_t> label;
};

// Threshold loop evaluated literally: every iteration recomputes argmax,
// compares in double, counts tp/fp, and raises by eps where needed.
std::vector<NaiveIteration> naive_act(const std::vector<NaiveImage>& fold, int classes,
                                      double min_ct, double max_ct, double max_cp, double eps,
                                      int iterations, std::uint16_t ignore = 255);

// Exact rational arithmetic for the oversampling rule. Scores are given as
// integer numerators over 10^4; absent entries are undefined.
struct GridScores {
  std::vector<std::vector<std::optional<std::int64_t>>> per_fold;  // [fold][class]
};

struct ExactPlan {
  std::vector<std::optional<double>> s_mean;
  std::vector<std::uint64_t> multiplier;
};

ExactPlan exact_multipliers(const GridScores& scores, std::int64_t lambda);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cafs::oracle
