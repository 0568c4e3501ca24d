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

#include "cafs/artifacts.hpp"

#include <fstream>

#include "cafs/errors.hpp"

namespace cafs::artifacts {

using synth::ClassBehaviour;
using synth::ConfidenceShape;

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::kSchema, where + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, where + ": bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return field<T>(j, key, where);
}

json iteration_to_json(const ActIteration& it) {
  return {{"iteration", it.iteration},
          {"precision", optional_scores_to_json(it.precision.values)},
          {"thresholds", it.thresholds}};
}

ConfidenceShape shape_from_json(const json& j, ConfidenceShape fallback, const std::string& where) {
  if (j.is_null()) return fallback;
  ConfidenceShape shape;
  shape.mean = field_or<double>(j, "mean", fallback.mean, where);
  shape.strength = field_or<double>(j, "strength", fallback.strength, where);
  return shape;
}

json shape_to_json(const ConfidenceShape& s) {
  return {{"mean", s.mean}, {"strength", s.strength}};
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

json optional_scores_to_json(const OptionalScores& scores) {
  json out = json::array();
  for (const auto& v : scores) out.push_back(v ? json(*v) : json(nullptr));
  return out;
}

OptionalScores optional_scores_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::kSchema, where + ": expected an array of numbers or nulls");
  OptionalScores out;
  for (const auto& v : j) {
    if (v.is_null()) {
      out.emplace_back();
    } else if (v.is_number()) {
      out.emplace_back(v.get<double>());
    } else {
      fail(ErrorKind::kSchema, where + ": expected number or null");
    }
  }
  return out;
}

json folds_to_json(const FoldSpec& spec) {
  return {{"k", spec.k},
          {"n_v", spec.n_v},
          {"seed", spec.seed},
          {"folds", spec.folds},
          {"residuals", spec.residuals}};
}

FoldSpec folds_from_json(const json& j) {
  const std::string where = "folds";
  FoldSpec spec;
  spec.k = field<std::size_t>(j, "k", where);
  spec.n_v = field<std::size_t>(j, "n_v", where);
  spec.seed = field<std::uint64_t>(j, "seed", where);
  spec.folds = field<std::vector<std::vector<std::string>>>(j, "folds", where);
  spec.residuals = field<std::vector<std::vector<std::string>>>(j, "residuals", where);
  if (spec.folds.size() != spec.k || spec.residuals.size() != spec.k) {
    fail(ErrorKind::kSchema, "folds: k does not match the number of folds");
  }
  return spec;
}

ScoresRecord scores_record(const ConfusionAccumulator& acc, std::optional<std::size_t> k) {
  return ScoresRecord{k, iou(acc), precision(acc), acc.tp(), acc.fp()};
}

json scores_to_json(const ScoresRecord& r) {
  return {{"k", r.k ? json(*r.k) : json(nullptr)},
          {"iou", optional_scores_to_json(r.iou.values)},
          {"precision", optional_scores_to_json(r.precision.values)},
          {"tp", r.tp},
          {"fp", r.fp}};
}

ScoresRecord scores_from_json(const json& j) {
  const std::string where = "scores";
  ScoresRecord r;
  if (!j.is_object()) fail(ErrorKind::kSchema, "scores: expected an object");
  if (j.contains("k") && !j.at("k").is_null()) r.k = field<std::size_t>(j, "k", where);
  if (!j.contains("iou")) fail(ErrorKind::kSchema, "scores: missing key 'iou'");
  r.iou.values = optional_scores_from_json(j.at("iou"), "scores.iou");
  if (j.contains("precision")) {
    r.precision.values = optional_scores_from_json(j.at("precision"), "scores.precision");
  }
  r.tp = field_or<std::vector<std::uint64_t>>(j, "tp", {}, where);
  r.fp = field_or<std::vector<std::uint64_t>>(j, "fp", {}, where);
  for (const auto& v : r.iou.values) {
    if (v && !(*v >= 0.0 && *v <= 1.0))
      fail(ErrorKind::kSchema, "scores.iou: value outside [0, 1]");
  }
  return r;
}

json thresholds_to_json(const ThresholdsRecord& r) {
  json trace = json::array();
  for (const auto& ft : r.trace) {
    json iterations = json::array();
    for (const auto& it : ft.report.per_iteration) iterations.push_back(iteration_to_json(it));
    trace.push_back({{"fold", ft.fold ? json(*ft.fold) : json(nullptr)},
                     {"coverage", ft.report.coverage},
                     {"thresholds", ft.report.final_thresholds.values},
                     {"iterations", std::move(iterations)}});
  }
  return {{"min_ct", r.config.min_ct},
          {"max_ct", r.config.max_ct},
          {"epsilon", r.config.epsilon},
          {"max_cp", r.config.max_cp},
          {"iterations", r.config.resolved_iterations()},
          {"thresholds", r.thresholds.values},
          {"trace", std::move(trace)}};
}

ThresholdsRecord thresholds_from_json(const json& j) {
  const std::string where = "thresholds";
  ThresholdsRecord r;
  r.config.min_ct = field<double>(j, "min_ct", where);
  r.config.max_ct = field<double>(j, "max_ct", where);
  r.config.epsilon = field<double>(j, "epsilon", where);
  r.config.max_cp = field<double>(j, "max_cp", where);
  r.config.iterations = field<int>(j, "iterations", where);
  r.thresholds.values = field<std::vector<double>>(j, "thresholds", where);
  r.thresholds.min_ct = r.config.min_ct;
  r.thresholds.max_ct = r.config.max_ct;
  constexpr double kSlack = 1e-9;
  for (double v : r.thresholds.values) {
    if (!(v >= r.config.min_ct - kSlack && v <= r.config.max_ct + kSlack)) {
      fail(ErrorKind::kSchema,
           "thresholds: value " + std::to_string(v) + " outside [min_ct, max_ct]");
    }
  }
  if (r.thresholds.values.size() < 2)
    fail(ErrorKind::kSchema, "thresholds: need at least 2 classes");
  return r;
}

json plan_to_json(const OversamplingPlan& plan) {
  json per_class = json::array();
  for (const auto& p : plan.per_class) {
    per_class.push_back({{"class", p.class_index},
                         {"base", p.base_count},
                         {"multiplier", p.multiplier},
                         {"extra", p.oversample_count}});
  }
  return {{"lambda", plan.lambda},
          {"st", plan.st},
          {"s_mean", optional_scores_to_json(plan.s_mean)},
          {"per_class", std::move(per_class)}};
}

OversamplingPlan plan_from_json(const json& j) {
  const std::string where = "plan";
  OversamplingPlan plan;
  plan.lambda = field<double>(j, "lambda", where);
  plan.st = field<double>(j, "st", where);
  if (!j.contains("s_mean")) fail(ErrorKind::kSchema, "plan: missing key 's_mean'");
  plan.s_mean = optional_scores_from_json(j.at("s_mean"), "plan.s_mean");
  for (const auto& e : field<json>(j, "per_class", where)) {
    ClassPlan p;
    p.class_index = field<int>(e, "class", where);
    p.base_count = field<std::size_t>(e, "base", where);
    p.multiplier = field<std::size_t>(e, "multiplier", where);
    p.oversample_count = field<std::size_t>(e, "extra", where);
    plan.per_class.push_back(p);
  }
  return plan;
}

synth::SceneSpec scene_spec_from_json(const json& j) {
  const std::string where = "scene spec";
  if (!j.is_object()) fail(ErrorKind::kSchema, "scene spec: expected an object");
  synth::SceneSpec spec;
  spec.class_count = field_or<int>(j, "class_count", spec.class_count, where);
  spec.height = field_or<std::size_t>(j, "height", spec.height, where);
  spec.width = field_or<std::size_t>(j, "width", spec.width, where);
  spec.regions_per_image =
      field_or<std::size_t>(j, "regions_per_image", spec.regions_per_image, where);
  spec.seed = field_or<std::uint64_t>(j, "seed", spec.seed, where);
  spec.class_weights = field_or<std::vector<double>>(j, "class_weights", {}, where);
  return spec;
}

json scene_spec_to_json(const synth::SceneSpec& spec) {
  return {{"class_count", spec.class_count},
          {"height", spec.height},
          {"width", spec.width},
          {"regions_per_image", spec.regions_per_image},
          {"seed", spec.seed},
          {"class_weights", spec.class_weights}};
}

synth::PredictorProfile profile_from_json(const json& j, int class_count) {
  const std::string where = "profile";
  if (!j.is_object()) fail(ErrorKind::kSchema, "profile: expected an object");

  // Top-level fields are defaults for every class; "classes" entries override.
  ClassBehaviour defaults;
  defaults.error_rate = field_or<double>(j, "error_rate", 0.0, where);
  defaults.confidence_correct =
      shape_from_json(j.value("confidence_correct", json()), defaults.confidence_correct, where);
  defaults.confidence_wrong =
      shape_from_json(j.value("confidence_wrong", json()), defaults.confidence_wrong, where);

  synth::PredictorProfile profile = synth::PredictorProfile::uniform(class_count, defaults);
  if (j.contains("error_rates")) {
    const auto rates = field<std::vector<double>>(j, "error_rates", where);
    if (rates.size() != static_cast<std::size_t>(class_count)) {
      fail(ErrorKind::kSchema, "profile: error_rates length differs from class count");
    }
    for (std::size_t c = 0; c < rates.size(); ++c) profile.classes[c].error_rate = rates[c];
  }
  if (j.contains("classes")) {
    const json& entries = j.at("classes");
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(class_count)) {
      fail(ErrorKind::kSchema, "profile: classes must list one entry per class");
    }
    for (std::size_t c = 0; c < entries.size(); ++c) {
      const json& e = entries[c];
      auto& b = profile.classes[c];
      b.error_rate = field_or<double>(e, "error_rate", b.error_rate, where);
      b.confusable = field_or<int>(e, "confusable", b.confusable, where);
      b.confidence_correct =
          shape_from_json(e.value("confidence_correct", json()), b.confidence_correct, where);
      b.confidence_wrong =
          shape_from_json(e.value("confidence_wrong", json()), b.confidence_wrong, where);
    }
  }
  try {
    profile.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kSchema, e.what());
  }
  return profile;
}

json profile_to_json(const synth::PredictorProfile& profile) {
  json classes = json::array();
  for (std::size_t c = 0; c < profile.classes.size(); ++c) {
    const auto& b = profile.classes[c];
    classes.push_back({{"error_rate", b.error_rate},
                       {"confusable", profile.confusable_of(static_cast<int>(c))},
                       {"confidence_correct", shape_to_json(b.confidence_correct)},
                       {"confidence_wrong", shape_to_json(b.confidence_wrong)}});
  }
  return {{"classes", std::move(classes)}};
}

}  // namespace cafs::artifacts
