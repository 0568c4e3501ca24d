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

#include "cafs/act_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cafs/errors.hpp"
#include "cafs/kernels.hpp"
#include "cafs/parallel.hpp"

namespace cafs {
namespace {

struct Preset {
  std::string_view name;
  double min_ct;
  double max_ct;
};

// Threshold regimes evaluated on PASCAL VOC; the first suits the full labeled
// split, the last the 1/8 split.
constexpr std::array<Preset, 4> kPresets{{
    {"0.85-0.95", 0.85, 0.95},
    {"0.85-0.98", 0.85, 0.98},
    {"0.90-0.95", 0.90, 0.95},
    {"0.95-0.98", 0.95, 0.98},
}};

std::vector<float> cutoff_table(const ClassThresholds& thresholds) {
  std::vector<float> out(thresholds.size());
  std::transform(thresholds.values.begin(), thresholds.values.end(), out.begin(),
                 kernels::strict_cutoff);
  return out;
}

void require_classes(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    fail(ErrorKind::kClassCountMismatch, std::string(what) + ": expected " +
                                             std::to_string(expected) + " classes, got " +
                                             std::to_string(actual));
  }
}

}  // namespace

ClassThresholds ClassThresholds::uniform(std::size_t classes, double value, double min_ct,
                                         double max_ct) {
  return ClassThresholds{std::vector<double>(classes, value), min_ct, max_ct};
}

int default_iterations(double min_ct, double max_ct) {
  return static_cast<int>(std::lround((max_ct - min_ct) * 100.0));
}

int ActConfig::resolved_iterations() const {
  return iterations ? *iterations : default_iterations(min_ct, max_ct);
}

void ActConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::kValidation, msg); };
  if (!(min_ct > 0.0 && min_ct < 1.0)) bad("min_ct must lie in (0, 1)");
  if (!(max_ct > min_ct && max_ct <= 1.0)) bad("max_ct must lie in (min_ct, 1]");
  if (!(max_cp > 0.0 && max_cp <= 1.0)) bad("max_cp must lie in (0, 1]");
  if (!(epsilon > 0.0)) bad("epsilon must be positive");
  const int m = resolved_iterations();
  if (m < 1) bad("iteration count must be at least 1");
  if (min_ct + m * epsilon > max_ct + 1e-9) {
    bad("min_ct + iterations * epsilon exceeds max_ct (" + std::to_string(m) + " iterations of " +
        std::to_string(epsilon) + ")");
  }
}

ActConfig ActConfig::preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) {
      ActConfig config;
      config.min_ct = p.min_ct;
      config.max_ct = p.max_ct;
      return config;
    }
  }
  fail(ErrorKind::kValidation, "unknown threshold preset '" + std::string(name) + "'");
}

std::vector<std::string> ActConfig::preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

ConfidenceMap::ConfidenceMap(const ProbabilityMap& probs)
    : classes_(probs.classes()),
      height_(probs.height()),
      width_(probs.width()),
      best_class_(probs.pixels()),
      best_prob_(probs.pixels()) {
  kernels::argmax_planes(probs.values(), classes_, probs.pixels(), best_class_, best_prob_);
}

LabelMap ConfidenceMap::pseudo_label(const ClassThresholds& thresholds,
                                     std::uint16_t ignore_index) const {
  require_classes(classes_, thresholds.size(), "pseudo_label");
  const std::vector<float> cutoff = cutoff_table(thresholds);
  std::vector<std::uint16_t> out(pixels());
  kernels::apply_cutoffs(best_class_, best_prob_, cutoff, ignore_index, out);
  return LabelMap(height_, width_, classes_, std::move(out), ignore_index);
}

LabelMap pseudo_label(const ProbabilityMap& probs, const ClassThresholds& thresholds,
                      std::uint16_t ignore_index) {
  require_classes(probs.classes(), thresholds.size(), "pseudo_label");
  return ConfidenceMap(probs).pseudo_label(thresholds, ignore_index);
}

LabelMap argmax_label(const ProbabilityMap& probs, std::uint16_t ignore_index) {
  const ConfidenceMap confidence(probs);
  const auto best = confidence.best_class();
  return LabelMap(probs.height(), probs.width(), probs.classes(),
                  std::vector<std::uint16_t>(best.begin(), best.end()), ignore_index);
}

ClassThresholds act_step(const ClassThresholds& thresholds, const ClassPrecision& precision,
                         const ActConfig& config) {
  require_classes(thresholds.size(), precision.values.size(), "act_step");
  ClassThresholds next = thresholds;
  for (std::size_t c = 0; c < next.size(); ++c) {
    const auto& cp = precision.values[c];
    if (cp && *cp < config.max_cp) {
      next.values[c] = std::min(next.values[c] + config.epsilon, config.max_ct);
    }
  }
  return next;
}

ActSample make_act_sample(const ProbabilityMap& probs, LabelMap label) {
  require_classes(probs.classes(), label.class_count(), "make_act_sample");
  if (probs.height() != label.height() || probs.width() != label.width()) {
    fail(ErrorKind::kShapeMismatch, "probability map and label raster differ in size");
  }
  return ActSample{ConfidenceMap(probs), std::move(label)};
}

ActReport run_act(std::span<const ActSample> fold, const ActConfig& config, std::size_t jobs) {
  config.validate();
  if (fold.empty()) fail(ErrorKind::kEmptyFold, "validation fold has no samples");
  const std::size_t classes = fold.front().confidence.classes();
  for (const auto& s : fold) {
    require_classes(classes, s.confidence.classes(), "run_act");
    require_classes(classes, s.label.class_count(), "run_act");
  }

  const int iterations = config.resolved_iterations();
  ClassThresholds thresholds =
      ClassThresholds::uniform(classes, config.min_ct, config.min_ct, config.max_ct);

  std::vector<ConfusionAccumulator> partial(fold.size());
  auto confusion_at = [&](const ClassThresholds& ct) {
    parallel_for(fold.size(), jobs, [&](std::size_t i) {
      const auto& s = fold[i];
      ConfusionAccumulator acc(classes);
      acc.accumulate(s.confidence.pseudo_label(ct, s.label.ignore_index()), s.label);
      partial[i] = std::move(acc);
    });
    ConfusionAccumulator total(classes);
    for (const auto& acc : partial) total.merge(acc);
    return total;
  };

  ActReport report;
  report.per_iteration.reserve(static_cast<std::size_t>(iterations));
  for (int m = 1; m <= iterations; ++m) {
    ClassPrecision cp = precision(confusion_at(thresholds));
    thresholds = act_step(thresholds, cp, config);
    report.per_iteration.push_back(ActIteration{m, std::move(cp), thresholds.values});
  }

  std::vector<std::uint64_t> supervised(fold.size());
  std::uint64_t total_pixels = 0;
  for (const auto& s : fold) total_pixels += s.confidence.pixels();
  parallel_for(fold.size(), jobs, [&](std::size_t i) {
    const LabelMap pl = fold[i].confidence.pseudo_label(thresholds, fold[i].label.ignore_index());
    std::uint64_t n = 0;
    for (std::size_t j = 0; j < pl.pixels(); ++j) n += pl.is_ignore(j) ? 0 : 1;
    supervised[i] = n;
  });
  std::uint64_t kept = 0;
  for (auto n : supervised) kept += n;
  report.coverage =
      total_pixels ? static_cast<double>(kept) / static_cast<double>(total_pixels) : 0.0;
  report.final_thresholds = std::move(thresholds);
  return report;
}

ClassThresholds aggregate_thresholds(std::span<const ClassThresholds> per_fold) {
  if (per_fold.empty()) fail(ErrorKind::kEmptyInput, "no per-fold thresholds to aggregate");
  const auto& first = per_fold.front();
  ClassThresholds mean = ClassThresholds::uniform(first.size(), 0.0, first.min_ct, first.max_ct);
  for (const auto& t : per_fold) {
    require_classes(first.size(), t.size(), "aggregate_thresholds");
    if (t.min_ct != first.min_ct || t.max_ct != first.max_ct) {
      fail(ErrorKind::kValidation, "per-fold thresholds come from different regimes");
    }
    for (std::size_t c = 0; c < t.size(); ++c) mean.values[c] += t.values[c];
  }
  // Rounding in the sum must not push the mean outside the regime.
  for (double& v : mean.values) {
    v = std::clamp(v / static_cast<double>(per_fold.size()), first.min_ct, first.max_ct);
  }
  return mean;
}

std::vector<std::uint64_t> supervised_pixel_counts(const LabelMap& pseudo) {
  std::vector<std::uint64_t> counts(pseudo.class_count(), 0);
  for (std::uint16_t v : pseudo.values()) {
    if (v != pseudo.ignore_index()) ++counts[v];
  }
  return counts;
}

}  // namespace cafs
