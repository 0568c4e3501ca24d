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
#include <string>
#include <vector>

#include "cafs/tensor_store.hpp"

namespace cafs {

inline constexpr std::size_t kDefaultFoldCount = 5;
inline constexpr double kDefaultValidationFraction = 0.2;
inline constexpr std::size_t kDefaultRepairAttempts = 1000;

// K disjoint validation folds of n_v samples each; every fold covers every
// class. Ids inside folds and residuals keep manifest order.
struct FoldSpec {
  std::size_t k = 0;
  std::size_t n_v = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;
  std::vector<std::vector<std::string>> residuals;

  friend bool operator==(const FoldSpec&, const FoldSpec&) = default;
};

// max(1, round(fraction * N_l)).
std::size_t default_n_v(const DatasetManifest& manifest,
                        double fraction = kDefaultValidationFraction);
std::size_t default_n_v(std::size_t sample_count, double fraction);

// Seeded shuffle, round-robin assignment of the first k * n_v samples, then
// greedy swaps (with pool samples or other folds) until every fold covers all
// classes. Throws SizeError when k * n_v > N_l and InfeasibleCoverage when a
// class occurs in fewer than k samples or repair does not converge within
// `max_attempts` swaps.
FoldSpec build_folds(const DatasetManifest& manifest, std::size_t k, std::size_t n_v,
                     std::uint64_t seed, std::size_t max_attempts = kDefaultRepairAttempts);

// Throws ValidationError describing the first violated invariant.
void check_fold_spec(const FoldSpec& spec, const DatasetManifest& manifest);

}  // namespace cafs
