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

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cafs/act_engine.hpp"
#include "cafs/aos_engine.hpp"
#include "cafs/fold_builder.hpp"
#include "cafs/seg_metrics.hpp"
#include "cafs/synth_bench.hpp"

// JSON encodings of every artifact the CLI reads or writes. Field layouts are
// documented in docs/formats.md; undefined scores are encoded as null.
namespace cafs::artifacts {

using nlohmann::json;

json read_json(const std::filesystem::path& path);
// Pretty-printed with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);

json optional_scores_to_json(const OptionalScores& scores);
OptionalScores optional_scores_from_json(const json& j, const std::string& where);

// Folds
json folds_to_json(const FoldSpec& spec);
FoldSpec folds_from_json(const json& j);

// Scores
struct ScoresRecord {
  std::optional<std::size_t> k;
  ClassIoU iou;
  ClassPrecision precision;
  std::vector<std::uint64_t> tp;
  std::vector<std::uint64_t> fp;
};
ScoresRecord scores_record(const ConfusionAccumulator& acc, std::optional<std::size_t> k);
json scores_to_json(const ScoresRecord& record);
ScoresRecord scores_from_json(const json& j);

// Thresholds
struct FoldTrace {
  std::optional<std::size_t> fold;
  ActReport report;
};
struct ThresholdsRecord {
  ActConfig config;
  ClassThresholds thresholds;
  std::vector<FoldTrace> trace;
};
json thresholds_to_json(const ThresholdsRecord& record);
// Reads the config and the aggregated thresholds; per-iteration trace is
// informational and not re-parsed.
ThresholdsRecord thresholds_from_json(const json& j);

// Oversampling plan
json plan_to_json(const OversamplingPlan& plan);
OversamplingPlan plan_from_json(const json& j);

// Simulator inputs
synth::SceneSpec scene_spec_from_json(const json& j);
json scene_spec_to_json(const synth::SceneSpec& spec);
synth::PredictorProfile profile_from_json(const json& j, int class_count);
json profile_to_json(const synth::PredictorProfile& profile);

}  // namespace cafs::artifacts
