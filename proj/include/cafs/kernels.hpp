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
#include <span>
#include <string_view>

// Data-parallel inner loops over plane-major probability buffers. Every
// kernel has a portable scalar reference and, on x86-64, an AVX2 variant
// selected at runtime. Variants are required to agree bit-for-bit.
namespace cafs::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Best ISA supported by both the build and the running CPU.
Isa detected_isa();

// ISA used by the dispatching entry points. Defaults to detected_isa(),
// unless CAFS_ISA=scalar is set in the environment.
Isa active_isa();

// Forces an ISA for the process; clamped to what the CPU supports.
void set_active_isa(Isa isa);

// Per-pixel argmax over `classes` planes of `pixels` floats each. Ties go to
// the lowest class index. `best_class` and `best_prob` have `pixels` entries.
void argmax_planes(std::span<const float> planes, std::size_t classes, std::size_t pixels,
                   std::span<std::uint16_t> best_class, std::span<float> best_prob);

// out[j] = best_class[j] if best_prob[j] >= cutoff[best_class[j]] else ignore.
// `cutoff` holds per-class float cutoffs (see strict_cutoff()).
void apply_cutoffs(std::span<const std::uint16_t> best_class, std::span<const float> best_prob,
                   std::span<const float> cutoff, std::uint16_t ignore,
                   std::span<std::uint16_t> out);

// Column sums over the class axis, accumulated in class order in float.
void pixel_sums(std::span<const float> planes, std::size_t classes, std::size_t pixels,
                std::span<float> sums);

// Smallest float f with f > threshold, so that `p > threshold` evaluated in
// double equals `p >= f` evaluated in float for every float p.
float strict_cutoff(double threshold);

// Direct access to each variant, for equivalence tests and benchmarks.
namespace scalar {
void argmax_planes(const float* planes, std::size_t classes, std::size_t pixels,
                   std::uint16_t* best_class, float* best_prob);
void apply_cutoffs(const std::uint16_t* best_class, const float* best_prob, const float* cutoff,
                   std::uint16_t ignore, std::size_t pixels, std::uint16_t* out);
void pixel_sums(const float* planes, std::size_t classes, std::size_t pixels, float* sums);
}  // namespace scalar

namespace avx2 {
bool compiled();
void argmax_planes(const float* planes, std::size_t classes, std::size_t pixels,
                   std::uint16_t* best_class, float* best_prob);
void apply_cutoffs(const std::uint16_t* best_class, const float* best_prob, const float* cutoff,
                   std::uint16_t ignore, std::size_t pixels, std::uint16_t* out);
void pixel_sums(const float* planes, std::size_t classes, std::size_t pixels, float* sums);
}  // namespace avx2

}  // namespace cafs::kernels
