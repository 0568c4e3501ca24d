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

#include "cafs/kernels.hpp"

namespace cafs::kernels::scalar {

void argmax_planes(const float* planes, std::size_t classes, std::size_t pixels,
                   std::uint16_t* best_class, float* best_prob) {
  for (std::size_t j = 0; j < pixels; ++j) {
    best_class[j] = 0;
    best_prob[j] = planes[j];
  }
  for (std::size_t c = 1; c < classes; ++c) {
    const float* plane = planes + c * pixels;
    for (std::size_t j = 0; j < pixels; ++j) {
      if (plane[j] > best_prob[j]) {
        best_prob[j] = plane[j];
        best_class[j] = static_cast<std::uint16_t>(c);
      }
    }
  }
}

void apply_cutoffs(const std::uint16_t* best_class, const float* best_prob, const float* cutoff,
                   std::uint16_t ignore, std::size_t pixels, std::uint16_t* out) {
  for (std::size_t j = 0; j < pixels; ++j) {
    out[j] = best_prob[j] >= cutoff[best_class[j]] ? best_class[j] : ignore;
  }
}

void pixel_sums(const float* planes, std::size_t classes, std::size_t pixels, float* sums) {
  for (std::size_t j = 0; j < pixels; ++j) sums[j] = planes[j];
  for (std::size_t c = 1; c < classes; ++c) {
    const float* plane = planes + c * pixels;
    for (std::size_t j = 0; j < pixels; ++j) sums[j] += plane[j];
  }
}

}  // namespace cafs::kernels::scalar
