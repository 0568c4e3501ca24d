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

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <random>

#include "cafs/npy.hpp"
#include "cafs/tensor_store.hpp"
#include "error_kind.hpp"
#include "oracles.hpp"

namespace cafs {
namespace {

void write_floats(const std::filesystem::path& p, std::vector<std::size_t> shape,
                  const std::vector<float>& v) {
  npy::write(p, {npy::Dtype::kFloat32, std::move(shape)}, std::as_bytes(std::span<const float>(v)));
}

TEST(ProbabilityMap, UniformPairReads) {
  oracle::TempDir dir;
  write_floats(dir / "p.npy", {2, 1, 1}, {0.5f, 0.5f});
  const ProbabilityMap m = read_probability_map(dir / "p.npy");
  EXPECT_EQ(m.classes(), 2u);
  EXPECT_EQ(m.height(), 1u);
  EXPECT_EQ(m.width(), 1u);
  EXPECT_EQ(m.at(0, 0), 0.5f);
}

TEST(ProbabilityMap, SingleClassIsAShapeError) {
  oracle::TempDir dir;
  write_floats(dir / "p.npy", {1, 4, 4}, std::vector<float>(16, 1.0f));
  EXPECT_CAFS_ERROR(read_probability_map(dir / "p.npy"), kShape);
  write_floats(dir / "q.npy", {2, 4}, std::vector<float>(8, 0.5f));
  EXPECT_CAFS_ERROR(read_probability_map(dir / "q.npy"), kShape);
}

TEST(ProbabilityMap, NormalizationIsChecked) {
  EXPECT_CAFS_ERROR(ProbabilityMap(2, 1, 1, {0.7f, 0.7f}), kNormalization);
  EXPECT_CAFS_ERROR(ProbabilityMap(2, 1, 1, {1.5f, -0.5f}), kNormalization);
  EXPECT_NO_THROW(ProbabilityMap(2, 1, 1, {0.7f, 0.7f}, false));
  EXPECT_NO_THROW(ProbabilityMap(2, 1, 1, {0.50004f, 0.5f}));
  EXPECT_CAFS_ERROR(ProbabilityMap(2, 1, 2, {0.5f, 0.5f}), kShape);
}

TEST(ProbabilityMap, WrittenFileHasExactLayout) {
  oracle::TempDir dir;
  write_probability_map(ProbabilityMap(2, 1, 1, {1.0f, 0.0f}), dir / "p.npy");
  EXPECT_EQ(std::filesystem::file_size(dir / "p.npy"), 128u + 8u);
}

TEST(ProbabilityMap, RoundTripIsBitExact) {
  oracle::TempDir dir;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 9);
  std::uniform_int_distribution<int> cls(2, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int c = cls(rng), h = dim(rng), w = dim(rng);
    auto v = oracle::random_probabilities(rng, c, h * w, trial % 2 == 0);
    const ProbabilityMap m(c, h, w, v);
    write_probability_map(m, dir / "p.npy");
    const ProbabilityMap back = read_probability_map(dir / "p.npy");
    ASSERT_EQ(back.classes(), m.classes());
    ASSERT_EQ(0, std::memcmp(back.values().data(), v.data(), v.size() * sizeof(float)));
  }
}

TEST(ProbabilityMap, MissingDirectoryIsAnIoError) {
  oracle::TempDir dir;
  EXPECT_CAFS_ERROR(
      write_probability_map(ProbabilityMap(2, 1, 1, {1.0f, 0.0f}), dir / "x" / "p.npy"), kIo);
}

TEST(ProbabilityMap, LogitsAndDoublesAreAccepted) {
  oracle::TempDir dir;
  write_floats(dir / "l.npy", {3, 1, 2}, {0.0f, 10.0f, 0.0f, 0.0f, 0.0f, 0.0f});
  EXPECT_CAFS_ERROR(read_probability_map(dir / "l.npy"), kNormalization);
  ProbabilityReadOptions opts;
  opts.from_logits = true;
  const ProbabilityMap m = read_probability_map(dir / "l.npy", opts);
  EXPECT_NEAR(m.at(0, 0), 1.0 / 3.0, 1e-6);
  EXPECT_GT(m.at(0, 1), 0.9999f);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(m.at(0, j) + m.at(1, j) + m.at(2, j), 1.0, 1e-6);
  }

  const std::vector<double> d{0.25, 0.75};
  npy::write(dir / "d.npy", {npy::Dtype::kFloat64, {2, 1, 1}},
             std::as_bytes(std::span<const double>(d)));
  EXPECT_EQ(read_probability_map(dir / "d.npy").at(1, 0), 0.75f);
}

TEST(Softmax, MatchesDirectFormula) {
  const std::vector<float> logits{1.0f, -2.0f, 3.0f, 0.5f, 500.0f, 0.5f};
  const auto p = softmax_planes(logits, 2, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    const double a = logits[j], b = logits[3 + j];
    const double m = std::max(a, b);
    const double ea = std::exp(a - m), eb = std::exp(b - m);
    EXPECT_NEAR(p[j], ea / (ea + eb), 1e-6);
    EXPECT_NEAR(p[3 + j], eb / (ea + eb), 1e-6);
  }
}

TEST(LabelMap, IgnorePassesThrough) {
  const LabelMap m(2, 2, 2, {0, 1, 255, 1});
  EXPECT_TRUE(m.is_ignore(2));
  EXPECT_EQ(present_classes(m), (std::vector<int>{0, 1}));
}

TEST(LabelMap, OutOfRangeValueIsRejected) {
  EXPECT_CAFS_ERROR(LabelMap(1, 3, 5, {0, 7, 255}), kClassRange);
  EXPECT_CAFS_ERROR(LabelMap(1, 1, 5, {0}, 3), kValidation);
  oracle::TempDir dir;
  const std::vector<std::uint8_t> raw{0, 7};
  npy::write(dir / "l.npy", {npy::Dtype::kUInt8, {1, 2}},
             std::as_bytes(std::span<const std::uint8_t>(raw)));
  EXPECT_CAFS_ERROR(read_label_map(dir / "l.npy", 5), kClassRange);
}

TEST(LabelMap, RoundTripIsIdentity) {
  oracle::TempDir dir;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = trial % 3 == 0 ? 300 : 21;
    const std::uint16_t ignore = trial % 3 == 0 ? 65535 : 255;
    const int h = dim(rng), w = dim(rng);
    const LabelMap m(h, w, classes, oracle::random_labels(rng, classes, h * w, 0.2, ignore),
                     ignore);
    write_label_map(m, dir / "l.npy");
    EXPECT_EQ(read_label_map(dir / "l.npy", classes, ignore), m);
  }
}

TEST(LabelMap, NarrowestDtypeIsWritten) {
  oracle::TempDir dir;
  write_label_map(LabelMap(1, 2, 3, {0, 255}), dir / "a.npy");
  EXPECT_EQ(npy::read(dir / "a.npy").header.dtype, npy::Dtype::kUInt8);
  write_label_map(LabelMap(1, 2, 300, {299, 65535}, 65535), dir / "b.npy");
  EXPECT_EQ(npy::read(dir / "b.npy").header.dtype, npy::Dtype::kUInt16);
}

DatasetManifest random_manifest(std::mt19937_64& rng, std::size_t n, int classes) {
  DatasetManifest m;
  m.class_count = classes;
  std::bernoulli_distribution has(0.4);
  for (std::size_t i = 0; i < n; ++i) {
    ManifestSample s;
    s.id = "s" + std::to_string(i);
    s.image = "images/" + s.id + ".png";
    s.label = "labels/" + s.id + ".npy";
    for (int c = 0; c < classes; ++c) {
      if (has(rng)) s.classes.push_back(c);
    }
    m.samples.push_back(std::move(s));
  }
  return m;
}

TEST(Manifest, EmptySampleListIsValid) {
  oracle::TempDir dir;
  std::ofstream(dir / "m.json") << R"({"class_count": 3, "samples": []})";
  const DatasetManifest m = load_manifest(dir / "m.json");
  EXPECT_EQ(m.size(), 0u);
  EXPECT_EQ(m.ignore_index, 255);
}

TEST(Manifest, DuplicateIdsAreRejected) {
  oracle::TempDir dir;
  std::ofstream(dir / "m.json")
      << R"({"class_count": 2, "samples": [{"id": "a", "classes": [0]}, {"id": "a", "classes": [1]}]})";
  EXPECT_CAFS_ERROR(load_manifest(dir / "m.json"), kDuplicateId);
}

TEST(Manifest, SchemaErrors) {
  oracle::TempDir dir;
  auto check = [&](const char* text) {
    std::ofstream(dir / "m.json") << text;
    return testing::thrown_kind([&] { load_manifest(dir / "m.json"); });
  };
  const auto schema = std::optional(ErrorKind::kSchema);
  EXPECT_EQ(check(R"({"samples": []})"), schema);
  EXPECT_EQ(check(R"({"class_count": 2, "samples": [{"id": "a", "classes": [2]}]})"), schema);
  EXPECT_EQ(check(R"({"class_count": 2, "samples": [{"id": "a"}]})"), schema);
  EXPECT_EQ(check(R"({"class_count": 2, "samples": {}})"), schema);
  EXPECT_EQ(check(R"({"class_count": 2, "samp)"), schema);
}

TEST(Manifest, RoundTripIsIdentity) {
  oracle::TempDir dir;
  std::mt19937_64 rng(5);
  const DatasetManifest m = random_manifest(rng, 50, 6);
  save_manifest(m, dir / "m.json");
  EXPECT_EQ(load_manifest(dir / "m.json"), m);
}

TEST(Manifest, ClassesAreScannedFromLabels) {
  oracle::TempDir dir;
  std::filesystem::create_directory(dir / "labels");
  write_label_map(LabelMap(1, 3, 4, {3, 1, 255}), dir / "labels" / "a.npy");
  std::ofstream(dir / "m.json")
      << R"({"class_count": 4, "samples": [{"id": "a", "label": "labels/a.npy"}]})";
  const DatasetManifest m = load_manifest(dir / "m.json");
  EXPECT_EQ(m.samples[0].classes, (std::vector<int>{1, 3}));
  EXPECT_EQ(m.class_frequency(1), 1u);
  EXPECT_EQ(m.class_frequency(0), 0u);
}

}  // namespace
}  // namespace cafs
