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

#include <gtest/gtest.h>

#include <map>

#include "cafs/act_engine.hpp"
#include "cafs/synth_bench.hpp"
#include "error_kind.hpp"

namespace cafs::synth {
namespace {

TEST(Synth, EmptyDatasetIsAnError) {
  EXPECT_CAFS_ERROR(generate_dataset(SceneSpec{}, 0), kEmptyDataset);
}

TEST(Synth, GenerationIsDeterministic) {
  SceneSpec spec;
  spec.seed = 17;
  const auto a = generate_dataset(spec, 5);
  const auto b = generate_dataset(spec, 5);
  EXPECT_EQ(a.manifest, b.manifest);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.manifest.samples[3].id, "img_0003");
  EXPECT_EQ(a.manifest.samples[3].label, "labels/img_0003.npy");
  spec.seed = 18;
  EXPECT_NE(generate_dataset(spec, 5).labels, a.labels);
}

TEST(Synth, EveryClassShowsUpInFiftyImages) {
  SceneSpec spec;
  spec.class_count = 3;
  spec.seed = 3;
  const auto data = generate_dataset(spec, 50);
  for (int c = 0; c < 3; ++c) EXPECT_GT(data.manifest.class_frequency(c), 0u);
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    EXPECT_EQ(present_classes(data.labels[i]), data.manifest.samples[i].classes);
  }
}

TEST(Synth, ClassWeightsSteerTheMix) {
  SceneSpec spec;
  spec.class_weights = {1.0, 0.0, 1.0};
  const auto data = generate_dataset(spec, 20);
  EXPECT_EQ(data.manifest.class_frequency(1), 0u);
  spec.class_weights = {1.0};
  EXPECT_CAFS_ERROR(spec.validate(), kValidation);
}

TEST(Synth, PredictionsAreNormalized) {
  SceneSpec spec;
  spec.class_count = 4;
  const auto data = generate_dataset(spec, 3);
  auto profile = PredictorProfile::uniform(4);
  profile.classes[2].error_rate = 0.3;
  for (std::size_t i = 0; i < 3; ++i) {
    const ProbabilityMap p = predict(data.labels[i], profile, i);
    EXPECT_NO_THROW(p.check_normalized(1e-5));
  }
}

TEST(Synth, ConfidentCleanPredictorReproducesLabels) {
  SceneSpec spec;
  spec.class_count = 3;
  ClassBehaviour clean;
  clean.confidence_correct = {0.99, 200.0};
  const auto profile = PredictorProfile::uniform(3, clean);
  const ClassThresholds ct = ClassThresholds::uniform(3, 0.95, 0.85, 0.95);
  std::uint64_t agree = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    const auto data = generate_dataset(spec, 2);
    for (const auto& label : data.labels) {
      const LabelMap pl = pseudo_label(predict(label, profile, seed), ct);
      for (std::size_t j = 0; j < pl.pixels(); ++j) agree += pl.at(j) == label.at(j);
      total += pl.pixels();
    }
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(total), 0.99);
}

TEST(Synth, ErrorRateErodesPrecisionOfTheReceivingClass) {
  SceneSpec spec;
  spec.class_count = 3;
  spec.seed = 9;
  auto profile = PredictorProfile::uniform(3);
  profile.classes[2].error_rate = 0.4;  // steals from class 0
  const auto data = generate_dataset(spec, 10);
  ConfusionAccumulator acc(3);
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    acc.accumulate(argmax_label(predict(data.labels[i], profile, i)), data.labels[i]);
  }
  const auto cp = precision(acc).values;
  EXPECT_EQ(cp[0], 1.0);
  EXPECT_EQ(cp[1], 1.0);
  EXPECT_LT(*cp[2], 0.85);
  EXPECT_GT(acc.fn()[0], 0u);
}

TEST(Synth, CertainConfusionDrivesThresholdToMaximum) {
  SceneSpec spec;
  spec.class_count = 3;
  spec.seed = 21;
  auto profile = PredictorProfile::uniform(3);
  profile.classes[1].error_rate = 0.999;
  profile.classes[1].confidence_wrong = {0.97, 60.0};
  const auto data = generate_dataset(spec, 6);
  std::vector<ActSample> fold;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    fold.push_back(make_act_sample(predict(data.labels[i], profile, i), data.labels[i]));
  }
  const auto report = run_act(fold, ActConfig{});
  EXPECT_NEAR(report.final_thresholds.values[1], 0.95, 1e-12);
}

TEST(Synth, ProfileValidation) {
  auto p = PredictorProfile::uniform(3);
  p.classes[0].confusable = 0;
  EXPECT_CAFS_ERROR(p.validate(), kValidation);
  p = PredictorProfile::uniform(3);
  p.classes[0].error_rate = 0.7;
  p.classes[2].error_rate = 0.7;
  p.classes[2].confusable = 1;
  p.classes[0].confusable = 1;
  EXPECT_CAFS_ERROR(p.validate(), kValidation);
  p = PredictorProfile::uniform(3);
  p.classes[1].confidence_wrong.mean = 0.2;
  EXPECT_CAFS_ERROR(p.validate(), kValidation);
  EXPECT_EQ(PredictorProfile::uniform(4).confusable_of(3), 0);
}

DatasetManifest small_manifest() {
  DatasetManifest m;
  m.class_count = 3;
  for (int i = 0; i < 10; ++i) {
    std::vector<int> cls{0};
    if (i < 2) cls.push_back(2);
    if (i >= 5) cls.push_back(1);
    m.samples.push_back({"s" + std::to_string(i), "", "", cls});
  }
  return m;
}

TEST(Baselines, RandomOversamplingAddsTheRequestedCount) {
  const auto m = small_manifest();
  EXPECT_EQ(baseline_sampler(m, BaselineSampler::kRandom, 0, 1), m);
  const auto out = baseline_sampler(m, BaselineSampler::kRandom, 5, 1);
  EXPECT_EQ(out.size(), 15u);
  EXPECT_NE(out.samples[10].id.find("#ros"), std::string::npos);
  EXPECT_EQ(baseline_sampler(m, BaselineSampler::kRandom, 5, 1), out);
}

TEST(Baselines, StatisticalOversamplingFavoursRareClasses) {
  const auto m = small_manifest();
  const auto out = baseline_sampler(m, BaselineSampler::kStatistical, 4, 1);
  std::map<int, int> extra;
  for (std::size_t i = m.size(); i < out.size(); ++i) {
    for (int c : out.samples[i].classes) ++extra[c];
  }
  // Class 2 (2 images) is walked before class 1 (5 images).
  EXPECT_EQ(extra[2], 2);
  EXPECT_EQ(extra[1], 2);
  EXPECT_EQ(out.samples[m.size()].id, "s0#sos1");
  EXPECT_EQ(out.samples[m.size() + 1].id, "s1#sos1");
}

}  // namespace
}  // namespace cafs::synth
