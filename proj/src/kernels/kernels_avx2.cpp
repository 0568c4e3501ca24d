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

// Compiled with -mavx2 when the toolchain targets x86-64. Only reached through
// dispatch after a CPUID check.
#include "cafs/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace cafs::kernels::avx2 {

#if defined(__AVX2__)

namespace {

constexpr std::size_t kLanes = 8;

inline void store_u16x8(std::uint16_t* dst, __m256i idx32) {
  const __m128i lo = _mm256_castsi256_si128(idx32);
  const __m128i hi = _mm256_extracti128_si256(idx32, 1);
  _mm_storeu_si128(reinterpret_cast<__m128i*>(dst), _mm_packus_epi32(lo, hi));
}

}  // namespace

bool compiled() { return true; }

void argmax_planes(const float* planes, std::size_t classes, std::size_t pixels,
                   std::uint16_t* best_class, float* best_prob) {
  const std::size_t whole = pixels - pixels % kLanes;
  for (std::size_t j = 0; j < whole; j += kLanes) {
    __m256 best = _mm256_loadu_ps(planes + j);
    __m256i idx = _mm256_setzero_si256();
    for (std::size_t c = 1; c < classes; ++c) {
      const __m256 v = _mm256_loadu_ps(planes + c * pixels + j);
      const __m256 gt = _mm256_cmp_ps(v, best, _CMP_GT_OQ);
      best = _mm256_blendv_ps(best, v, gt);
      idx = _mm256_castps_si256(
          _mm256_blendv_ps(_mm256_castsi256_ps(idx),
                           _mm256_castsi256_ps(_mm256_set1_epi32(static_cast<int>(c))), gt));
    }
    _mm256_storeu_ps(best_prob + j, best);
    store_u16x8(best_class + j, idx);
  }
  if (whole < pixels) {
    // Tail: same comparisons, one pixel at a time.
    for (std::size_t j = whole; j < pixels; ++j) {
      float b = planes[j];
      std::uint16_t k = 0;
      for (std::size_t c = 1; c < classes; ++c) {
        const float v = planes[c * pixels + j];
        if (v > b) {
          b = v;
          k = static_cast<std::uint16_t>(c);
        }
      }
      best_prob[j] = b;
      best_class[j] = k;
    }
  }
}

void apply_cutoffs(const std::uint16_t* best_class, const float* best_prob, const float* cutoff,
                   std::uint16_t ignore, std::size_t pixels, std::uint16_t* out) {
  const std::size_t whole = pixels - pixels % kLanes;
  const __m256i ignore_v = _mm256_set1_epi32(ignore);
  for (std::size_t j = 0; j < whole; j += kLanes) {
    const __m256i idx =
        _mm256_cvtepu16_epi32(_mm_loadu_si128(reinterpret_cast<const __m128i*>(best_class + j)));
    const __m256 limit = _mm256_i32gather_ps(cutoff, idx, 4);
    const __m256 prob = _mm256_loadu_ps(best_prob + j);
    const __m256 keep = _mm256_cmp_ps(prob, limit, _CMP_GE_OQ);
    const __m256i result = _mm256_castps_si256(
        _mm256_blendv_ps(_mm256_castsi256_ps(ignore_v), _mm256_castsi256_ps(idx), keep));
    store_u16x8(out + j, result);
  }
  for (std::size_t j = whole; j < pixels; ++j) {
    out[j] = best_prob[j] >= cutoff[best_class[j]] ? best_class[j] : ignore;
  }
}

void pixel_sums(const float* planes, std::size_t classes, std::size_t pixels, float* sums) {
  const std::size_t whole = pixels - pixels % kLanes;
  for (std::size_t j = 0; j < whole; j += kLanes) {
    __m256 acc = _mm256_loadu_ps(planes + j);
    for (std::size_t c = 1; c < classes; ++c) {
      acc = _mm256_add_ps(acc, _mm256_loadu_ps(planes + c * pixels + j));
    }
    _mm256_storeu_ps(sums + j, acc);
  }
  for (std::size_t j = whole; j < pixels; ++j) {
    float acc = planes[j];
    for (std::size_t c = 1; c < classes; ++c) acc += planes[c * pixels + j];
    sums[j] = acc;
  }
}

#else  // !__AVX2__

bool compiled() { return false; }

void argmax_planes(const float* planes, std::size_t classes, std::size_t pixels,
                   std::uint16_t* best_class, float* best_prob) {
  scalar::argmax_planes(planes, classes, pixels, best_class, best_prob);
}

void apply_cutoffs(const std::uint16_t* best_class, const float* best_prob, const float* cutoff,
                   std::uint16_t ignore, std::size_t pixels, std::uint16_t* out) {
  scalar::apply_cutoffs(best_class, best_prob, cutoff, ignore, pixels, out);
}

void pixel_sums(const float* planes, std::size_t classes, std::size_t pixels, float* sums) {
  scalar::pixel_sums(planes, classes, pixels, sums);
}

#endif

}  // namespace cafs::kernels::avx2
