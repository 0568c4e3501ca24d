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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "cafs/errors.hpp"
#include "cafs/kernels.hpp"

namespace cafs::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("CAFS_ISA"); env != nullptr && std::string(env) == "scalar") {
    return Isa::kScalar;
  }
  return detected_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::kShapeMismatch, what);
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return avx2::compiled() && cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::kAvx2 && detected_isa() != Isa::kAvx2) isa = Isa::kScalar;
  current().store(isa, std::memory_order_relaxed);
}

void argmax_planes(std::span<const float> planes, std::size_t classes, std::size_t pixels,
                   std::span<std::uint16_t> best_class, std::span<float> best_prob) {
  require(classes >= 1 && planes.size() == classes * pixels, "argmax_planes: plane buffer size");
  require(best_class.size() == pixels && best_prob.size() == pixels, "argmax_planes: output size");
  if (active_isa() == Isa::kAvx2) {
    avx2::argmax_planes(planes.data(), classes, pixels, best_class.data(), best_prob.data());
  } else {
    scalar::argmax_planes(planes.data(), classes, pixels, best_class.data(), best_prob.data());
  }
}

void apply_cutoffs(std::span<const std::uint16_t> best_class, std::span<const float> best_prob,
                   std::span<const float> cutoff, std::uint16_t ignore,
                   std::span<std::uint16_t> out) {
  const std::size_t pixels = best_class.size();
  require(best_prob.size() == pixels && out.size() == pixels, "apply_cutoffs: buffer size");
  for (std::uint16_t k : best_class) {
    require(k < cutoff.size(), "apply_cutoffs: class index outside cutoff table");
  }
  if (active_isa() == Isa::kAvx2) {
    avx2::apply_cutoffs(best_class.data(), best_prob.data(), cutoff.data(), ignore, pixels,
                        out.data());
  } else {
    scalar::apply_cutoffs(best_class.data(), best_prob.data(), cutoff.data(), ignore, pixels,
                          out.data());
  }
}

void pixel_sums(std::span<const float> planes, std::size_t classes, std::size_t pixels,
                std::span<float> sums) {
  require(classes >= 1 && planes.size() == classes * pixels, "pixel_sums: plane buffer size");
  require(sums.size() == pixels, "pixel_sums: output size");
  if (active_isa() == Isa::kAvx2) {
    avx2::pixel_sums(planes.data(), classes, pixels, sums.data());
  } else {
    scalar::pixel_sums(planes.data(), classes, pixels, sums.data());
  }
}

float strict_cutoff(double threshold) {
  float f = static_cast<float>(threshold);
  if (!(static_cast<double>(f) > threshold)) {
    f = std::nextafter(f, std::numeric_limits<float>::infinity());
  }
  return f;
}

}  // namespace cafs::kernels
