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

#include "cafs/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cafs/act_engine.hpp"
#include "cafs/aos_engine.hpp"
#include "cafs/artifacts.hpp"
#include "cafs/fold_builder.hpp"
#include "cafs/kernels.hpp"
#include "cafs/npy.hpp"
#include "cafs/parallel.hpp"
#include "cafs/seg_metrics.hpp"
#include "cafs/synth_bench.hpp"
#include "cafs/tensor_store.hpp"

namespace cafs::cli {
namespace {

namespace fs = std::filesystem;
using artifacts::json;

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {}
  void set_level(LogLevel level) { level_ = level; }
  void info(const std::string& msg) const {
    if (level_ >= LogLevel::kInfo) err_ << "cafs: " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ >= LogLevel::kDebug) err_ << "cafs: " << msg << '\n';
  }
  void error(const std::string& msg) const { err_ << "cafs: error: " << msg << '\n'; }

 private:
  std::ostream& err_;
  LogLevel level_ = LogLevel::kInfo;
};

// "folds.json:3" -> (folds.json, 3); "folds.json" -> (folds.json, nullopt).
std::pair<fs::path, std::optional<std::size_t>> parse_fold_ref(const std::string& ref) {
  const auto colon = ref.rfind(':');
  if (colon != std::string::npos && colon + 1 < ref.size()) {
    const std::string tail = ref.substr(colon + 1);
    if (std::all_of(tail.begin(), tail.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
      return {fs::path(ref.substr(0, colon)), std::stoul(tail)};
    }
  }
  return {fs::path(ref), std::nullopt};
}

struct FoldSelection {
  std::optional<std::size_t> k;
  std::vector<std::string> ids;
};

// Every fold named by `fold_ref`, or the whole manifest as one unnamed fold.
std::vector<FoldSelection> select_folds(const std::string& fold_ref,
                                        const DatasetManifest& manifest) {
  std::vector<FoldSelection> out;
  if (fold_ref.empty()) {
    FoldSelection all;
    for (const auto& s : manifest.samples) all.ids.push_back(s.id);
    out.push_back(std::move(all));
    return out;
  }
  const auto [path, index] = parse_fold_ref(fold_ref);
  const FoldSpec spec = artifacts::folds_from_json(artifacts::read_json(path));
  if (index) {
    if (*index >= spec.k) {
      fail(ErrorKind::kValidation, "fold index " + std::to_string(*index) +
                                       " out of range for k=" + std::to_string(spec.k));
    }
    out.push_back({index, spec.folds[*index]});
  } else {
    for (std::size_t f = 0; f < spec.k; ++f) out.push_back({f, spec.folds[f]});
  }
  return out;
}

void require_files(const std::vector<std::string>& ids, const fs::path& dir, const char* what) {
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!fs::exists(dir / (id + ".npy"))) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    fail(ErrorKind::kMissingPrediction,
         std::string("no ") + what + " in " + dir.string() + " for: " + list);
  }
}

std::vector<fs::path> npy_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::kValidation, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".npy")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path() && !fs::exists(file.parent_path())) {
    fail(ErrorKind::kIo, "output directory " + file.parent_path().string() + " does not exist");
  }
}

// ---------------------------------------------------------------------------
// split

struct SplitArgs {
  std::string manifest;
  std::size_t k = kDefaultFoldCount;
  std::size_t n_v = 0;
  double fraction = kDefaultValidationFraction;
  std::uint64_t seed = 0;
  std::size_t max_attempts = kDefaultRepairAttempts;
  std::string out;
  CLI::Option* n_v_opt = nullptr;
};

void cmd_split(const SplitArgs& a, const Log& log) {
  const DatasetManifest manifest = load_manifest(a.manifest);
  const std::size_t n_v = a.n_v_opt->count() ? a.n_v : default_n_v(manifest, a.fraction);
  log.info("building " + std::to_string(a.k) + " folds of " + std::to_string(n_v) + " from " +
           std::to_string(manifest.size()) + " samples");
  const FoldSpec spec = build_folds(manifest, a.k, n_v, a.seed, a.max_attempts);
  ensure_parent(a.out);
  artifacts::write_json(a.out, artifacts::folds_to_json(spec));
}

// ---------------------------------------------------------------------------
// scores

struct ScoresArgs {
  std::string manifest;
  std::string preds_dir;
  std::string labels_dir;
  std::string fold;
  bool argmax = false;
  std::string out;
};

LabelMap load_prediction(const fs::path& path, const DatasetManifest& manifest, bool argmax) {
  const npy::Array probe = npy::read(path);
  const auto classes = static_cast<std::size_t>(manifest.class_count);
  if (probe.header.shape.size() == 3) {
    if (!argmax) {
      fail(ErrorKind::kValidation,
           path.string() + " holds probabilities; pass --argmax to score it");
    }
    const ProbabilityMap probs = read_probability_map(path);
    if (probs.classes() != classes) {
      fail(ErrorKind::kClassCountMismatch, path.string() + " has " +
                                               std::to_string(probs.classes()) +
                                               " classes, manifest " + std::to_string(classes));
    }
    return argmax_label(probs, manifest.ignore_index);
  }
  return read_label_map(path, classes, manifest.ignore_index);
}

void cmd_scores(const ScoresArgs& a, std::size_t jobs, const Log& log) {
  const DatasetManifest manifest = load_manifest(a.manifest);
  const auto selections = select_folds(a.fold, manifest);
  if (selections.size() != 1) {
    fail(ErrorKind::kValidation, "scores needs a single fold: use --fold folds.json:k");
  }
  const auto& sel = selections.front();
  require_files(sel.ids, a.preds_dir, "prediction");
  require_files(sel.ids, a.labels_dir, "label");

  const auto classes = static_cast<std::size_t>(manifest.class_count);
  std::vector<ConfusionAccumulator> partial(sel.ids.size());
  parallel_for(sel.ids.size(), jobs, [&](std::size_t i) {
    const auto& id = sel.ids[i];
    const LabelMap pred =
        load_prediction(fs::path(a.preds_dir) / (id + ".npy"), manifest, a.argmax);
    const LabelMap ref =
        read_label_map(fs::path(a.labels_dir) / (id + ".npy"), classes, manifest.ignore_index);
    ConfusionAccumulator acc(classes);
    acc.accumulate(pred, ref);
    partial[i] = std::move(acc);
  });
  ConfusionAccumulator total(classes);
  for (const auto& acc : partial) total.merge(acc);
  log.info("scored " + std::to_string(sel.ids.size()) + " samples");
  ensure_parent(a.out);
  artifacts::write_json(a.out, artifacts::scores_to_json(artifacts::scores_record(total, sel.k)));
}

// ---------------------------------------------------------------------------
// act

struct ActArgs {
  std::string manifest;
  std::string probs_dir;
  std::string labels_dir;
  std::string fold;
  std::string preset;
  double min_ct = 0.0;
  double max_ct = 0.0;
  double max_cp = kDefaultMaxPrecision;
  double eps = kDefaultThresholdStep;
  int iterations = 0;
  bool from_logits = false;
  std::string out;
  CLI::Option* min_opt = nullptr;
  CLI::Option* max_opt = nullptr;
  CLI::Option* iter_opt = nullptr;
};

ActConfig act_config(const ActArgs& a) {
  ActConfig config;
  if (!a.preset.empty()) {
    config = ActConfig::preset(a.preset);
  } else if (!a.min_opt->count() || !a.max_opt->count()) {
    fail(ErrorKind::kValidation, "act needs --min-ct and --max-ct (or --preset)");
  } else {
    config.min_ct = a.min_ct;
    config.max_ct = a.max_ct;
  }
  config.max_cp = a.max_cp;
  config.epsilon = a.eps;
  if (a.iter_opt->count()) config.iterations = a.iterations;
  config.validate();
  return config;
}

void cmd_act(const ActArgs& a, std::size_t jobs, const Log& log) {
  const ActConfig config = act_config(a);
  const DatasetManifest manifest = load_manifest(a.manifest);
  const auto classes = static_cast<std::size_t>(manifest.class_count);
  const auto selections = select_folds(a.fold, manifest);

  artifacts::ThresholdsRecord record;
  record.config = config;
  std::vector<ClassThresholds> per_fold;
  for (const auto& sel : selections) {
    if (sel.ids.empty()) fail(ErrorKind::kEmptyFold, "fold has no samples");
    require_files(sel.ids, a.probs_dir, "probability map");
    require_files(sel.ids, a.labels_dir, "label");

    // Only the argmax/confidence pair is kept per image; the C x H x W
    // tensor is dropped as soon as it is reduced.
    std::vector<ActSample> samples(sel.ids.size());
    ProbabilityReadOptions read_opts;
    read_opts.from_logits = a.from_logits;
    parallel_for(sel.ids.size(), jobs, [&](std::size_t i) {
      const auto& id = sel.ids[i];
      const ProbabilityMap probs =
          read_probability_map(fs::path(a.probs_dir) / (id + ".npy"), read_opts);
      if (probs.classes() != classes) {
        fail(ErrorKind::kClassCountMismatch, id + ": probability map has " +
                                                 std::to_string(probs.classes()) +
                                                 " classes, manifest " + std::to_string(classes));
      }
      samples[i] = make_act_sample(probs, read_label_map(fs::path(a.labels_dir) / (id + ".npy"),
                                                         classes, manifest.ignore_index));
    });

    ActReport report = run_act(samples, config, jobs);
    log.info("fold " + (sel.k ? std::to_string(*sel.k) : std::string("all")) + ": " +
             std::to_string(report.per_iteration.size()) + " iterations, coverage " +
             std::to_string(report.coverage));
    per_fold.push_back(report.final_thresholds);
    record.trace.push_back({sel.k, std::move(report)});
  }
  record.thresholds = aggregate_thresholds(per_fold);
  ensure_parent(a.out);
  artifacts::write_json(a.out, artifacts::thresholds_to_json(record));
}

// ---------------------------------------------------------------------------
// aos

struct AosArgs {
  std::vector<std::string> scores;
  std::string manifest;
  double lambda = 1.0;
  std::vector<int> exclude;
  std::uint64_t seed = 0;
  std::string out_plan;
  std::string out_manifest;
};

void cmd_aos(const AosArgs& a, const Log& log) {
  const DatasetManifest manifest = load_manifest(a.manifest);
  std::vector<ClassIoU> per_fold;
  for (const auto& path : a.scores) {
    per_fold.push_back(artifacts::scores_from_json(artifacts::read_json(path)).iou);
  }
  for (int c : a.exclude) {
    if (c < 0 || c >= manifest.class_count) {
      fail(ErrorKind::kValidation,
           "--exclude-classes names class " + std::to_string(c) + " outside the manifest");
    }
  }
  const ClassScores scores = score_summary(per_fold, a.exclude);
  const OversamplingPlan plan = aos_plan(scores.s_mean, scores.st, manifest, a.lambda);
  const DatasetManifest expanded = materialize(plan, manifest, a.seed);
  log.info("sampling threshold " + std::to_string(plan.st) + ", " +
           std::to_string(plan.extra_samples()) + " extra samples");
  ensure_parent(a.out_plan);
  ensure_parent(a.out_manifest);
  artifacts::write_json(a.out_plan, artifacts::plan_to_json(plan));
  save_manifest(expanded, a.out_manifest);
}

// ---------------------------------------------------------------------------
// pseudo-label

struct PseudoArgs {
  std::string probs_dir;
  std::string thresholds;
  std::string out_dir;
  std::string coverage;
  int ignore_index = kDefaultIgnoreIndex;
  bool from_logits = false;
};

void cmd_pseudo_label(const PseudoArgs& a, std::size_t jobs, const Log& log) {
  const auto record = artifacts::thresholds_from_json(artifacts::read_json(a.thresholds));
  const auto files = npy_files(a.probs_dir);
  if (files.empty()) fail(ErrorKind::kValidation, "no .npy files in " + a.probs_dir);
  if (a.ignore_index < 0 || a.ignore_index > 0xFFFF)
    fail(ErrorKind::kValidation, "bad --ignore-index");
  if (!fs::is_directory(a.out_dir)) fs::create_directories(a.out_dir);

  const auto ignore = static_cast<std::uint16_t>(a.ignore_index);
  const std::size_t classes = record.thresholds.size();
  const ClassThresholds uniform = ClassThresholds::uniform(
      classes, record.config.max_ct, record.config.min_ct, record.config.max_ct);

  struct FileResult {
    std::vector<std::uint64_t> act;
    std::vector<std::uint64_t> fixed;
    std::uint64_t pixels = 0;
    std::string error;
  };
  std::vector<FileResult> results(files.size());
  ProbabilityReadOptions read_opts;
  read_opts.from_logits = a.from_logits;
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    const ProbabilityMap probs = read_probability_map(files[i], read_opts);
    if (probs.classes() != classes) {
      results[i].error = files[i].filename().string() + " has " + std::to_string(probs.classes()) +
                         " classes, thresholds " + std::to_string(classes);
      return;
    }
    const ConfidenceMap confidence(probs);
    const LabelMap pl = confidence.pseudo_label(record.thresholds, ignore);
    write_label_map(pl, fs::path(a.out_dir) / files[i].filename());
    results[i].act = supervised_pixel_counts(pl);
    results[i].fixed = supervised_pixel_counts(confidence.pseudo_label(uniform, ignore));
    results[i].pixels = probs.pixels();
  });

  std::vector<std::string> errors;
  std::vector<std::uint64_t> act_total(classes, 0), fixed_total(classes, 0);
  std::uint64_t pixels = 0;
  bool act_ge_fixed = true;
  json per_file = json::array();
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& r = results[i];
    if (!r.error.empty()) {
      errors.push_back(r.error);
      continue;
    }
    std::uint64_t act_n = 0, fixed_n = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      act_total[c] += r.act[c];
      fixed_total[c] += r.fixed[c];
      act_n += r.act[c];
      fixed_n += r.fixed[c];
    }
    pixels += r.pixels;
    act_ge_fixed = act_ge_fixed && act_n >= fixed_n;
    per_file.push_back({{"file", files[i].filename().string()},
                        {"pixels", r.pixels},
                        {"act", act_n},
                        {"uniform_max_ct", fixed_n}});
  }

  auto summary = [&](const std::vector<std::uint64_t>& counts) {
    std::uint64_t n = 0;
    for (auto v : counts) n += v;
    return json{{"per_class", counts},
                {"supervised", n},
                {"coverage", pixels ? static_cast<double>(n) / static_cast<double>(pixels) : 0.0}};
  };
  json report{{"files", files.size() - errors.size()},  {"pixels", pixels},
              {"thresholds", record.thresholds.values}, {"act", summary(act_total)},
              {"uniform_max_ct", summary(fixed_total)}, {"act_ge_uniform", act_ge_fixed},
              {"per_file", std::move(per_file)}};
  const fs::path coverage_path =
      a.coverage.empty() ? fs::path(a.out_dir) / "coverage.json" : fs::path(a.coverage);
  ensure_parent(coverage_path);
  artifacts::write_json(coverage_path, report);
  log.info("pseudo-labelled " + std::to_string(files.size() - errors.size()) + " files");

  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += "\n  " + e;
    fail(ErrorKind::kClassCountMismatch,
         std::to_string(errors.size()) + " file(s) rejected:" + joined);
  }
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string spec;
  std::string profile;
  std::string out_dir;
  std::size_t n = 0;
  std::size_t unlabeled = 0;
  int classes = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t regions = 0;
  std::uint64_t seed = 0;
  CLI::Option* classes_opt = nullptr;
  CLI::Option* height_opt = nullptr;
  CLI::Option* width_opt = nullptr;
  CLI::Option* regions_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

constexpr std::uint64_t kPredictionStream = 0x5052454449435431ULL;
constexpr std::uint64_t kUnlabeledStream = 0x554E4C4142454C31ULL;

void cmd_simulate(const SimulateArgs& a, std::size_t jobs, const Log& log) {
  synth::SceneSpec spec;
  if (!a.spec.empty()) spec = artifacts::scene_spec_from_json(artifacts::read_json(a.spec));
  if (a.classes_opt->count()) spec.class_count = a.classes;
  if (a.height_opt->count()) spec.height = a.height;
  if (a.width_opt->count()) spec.width = a.width;
  if (a.regions_opt->count()) spec.regions_per_image = a.regions;
  if (a.seed_opt->count()) spec.seed = a.seed;
  spec.validate();

  synth::PredictorProfile profile = synth::PredictorProfile::uniform(spec.class_count);
  if (!a.profile.empty()) {
    profile = artifacts::profile_from_json(artifacts::read_json(a.profile), spec.class_count);
  }
  profile.validate();

  const fs::path out(a.out_dir);
  for (const char* sub : {"labels", "probs"}) fs::create_directories(out / sub);

  synth::SyntheticDataset data = synth::generate_dataset(spec, a.n);
  parallel_for(a.n, jobs, [&](std::size_t i) {
    const auto& id = data.manifest.samples[i].id;
    write_label_map(data.labels[i], out / "labels" / (id + ".npy"));
    const std::uint64_t seed = synth::split_seed(spec.seed ^ kPredictionStream, i);
    write_probability_map(synth::predict(data.labels[i], profile, seed),
                          out / "probs" / (id + ".npy"));
  });
  save_manifest(data.manifest, out / "manifest.json");

  if (a.unlabeled > 0) {
    fs::create_directories(out / "unlabeled");
    fs::create_directories(out / "unlabeled_labels");
    synth::SceneSpec unl_spec = spec;
    unl_spec.seed = synth::split_seed(spec.seed, kUnlabeledStream);
    const synth::SyntheticDataset held = synth::generate_dataset(unl_spec, a.unlabeled, "unl");
    parallel_for(a.unlabeled, jobs, [&](std::size_t i) {
      const auto& id = held.manifest.samples[i].id;
      write_label_map(held.labels[i], out / "unlabeled_labels" / (id + ".npy"));
      const std::uint64_t seed = synth::split_seed(unl_spec.seed ^ kPredictionStream, i);
      write_probability_map(synth::predict(held.labels[i], profile, seed),
                            out / "unlabeled" / (id + ".npy"));
    });
  }

  artifacts::write_json(out / "spec.json", artifacts::scene_spec_to_json(spec));
  artifacts::write_json(out / "profile.json", artifacts::profile_to_json(profile));
  log.info("simulated " + std::to_string(a.n) + " labeled and " + std::to_string(a.unlabeled) +
           " unlabeled images into " + out.string());
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return kExitUsage;
    case ErrorKind::kInfeasibleCoverage:
    case ErrorKind::kSize:
      return kExitInfeasible;
    default:
      return kExitDataError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Log log(err);
  CLI::App app{
      "Class-adaptive self-training toolkit: folds, thresholds, oversampling, pseudo-labels"};
  app.name("cafs");
  app.require_subcommand(1);
  app.fallthrough();

  std::string log_level = "info";
  std::string isa = "auto";
  std::size_t jobs_flag = 0;
  app.add_option("--log-level", log_level, "error, info or debug")
      ->check(CLI::IsMember({"error", "info", "debug"}))
      ->capture_default_str();
  app.add_option("--isa", isa, "Kernel variant: auto or scalar")
      ->check(CLI::IsMember({"auto", "scalar"}))
      ->capture_default_str();
  auto* jobs_opt =
      app.add_option("--jobs", jobs_flag, "Worker threads (falls back to CAFS_JOBS, then 1)");

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Build K class-covering validation folds");
  split_cmd->add_option("--manifest", split.manifest, "Dataset manifest JSON")
      ->check(CLI::ExistingFile)
      ->required();
  split_cmd->add_option("--k", split.k, "Number of folds")->capture_default_str();
  split.n_v_opt = split_cmd->add_option("--nv", split.n_v, "Samples per fold");
  auto* frac_opt = split_cmd
                       ->add_option("--nv-fraction", split.fraction,
                                    "Fold size as a fraction of the labeled set")
                       ->capture_default_str();
  split.n_v_opt->excludes(frac_opt);
  split_cmd->add_option("--seed", split.seed, "Shuffle seed")->capture_default_str();
  split_cmd->add_option("--max-attempts", split.max_attempts, "Repair swap budget")
      ->capture_default_str();
  split_cmd->add_option("--out", split.out, "Output folds JSON")->required();

  ScoresArgs scores;
  auto* scores_cmd = app.add_subcommand("scores", "Per-class IoU and precision for one fold");
  scores_cmd->add_option("--manifest", scores.manifest, "Dataset manifest JSON")
      ->check(CLI::ExistingFile)
      ->required();
  scores_cmd->add_option("--preds-dir", scores.preds_dir, "Directory of <id>.npy predictions")
      ->check(CLI::ExistingDirectory)
      ->required();
  scores_cmd->add_option("--labels-dir", scores.labels_dir, "Directory of <id>.npy labels")
      ->check(CLI::ExistingDirectory)
      ->required();
  scores_cmd->add_option("--fold", scores.fold, "folds.json:k (default: every manifest sample)");
  scores_cmd->add_flag("--argmax", scores.argmax,
                       "Predictions are probability maps; take the argmax");
  scores_cmd->add_option("--out", scores.out, "Output scores JSON")->required();

  ActArgs act;
  auto* act_cmd = app.add_subcommand("act", "Adaptive class-wise confidence thresholds");
  act_cmd->add_option("--manifest", act.manifest, "Dataset manifest JSON")
      ->check(CLI::ExistingFile)
      ->required();
  act_cmd->add_option("--probs-dir", act.probs_dir, "Directory of <id>.npy probability maps")
      ->check(CLI::ExistingDirectory)
      ->required();
  act_cmd->add_option("--labels-dir", act.labels_dir, "Directory of <id>.npy labels")
      ->check(CLI::ExistingDirectory)
      ->required();
  act_cmd->add_option("--fold", act.fold, "folds.json (all folds, averaged) or folds.json:k");
  auto* preset_opt = act_cmd->add_option("--preset", act.preset, "Threshold regime")
                         ->check(CLI::IsMember(ActConfig::preset_names()));
  act.min_opt = act_cmd->add_option("--min-ct", act.min_ct, "Lowest threshold");
  act.max_opt = act_cmd->add_option("--max-ct", act.max_ct, "Highest threshold");
  preset_opt->excludes(act.min_opt)->excludes(act.max_opt);
  act_cmd->add_option("--max-cp", act.max_cp, "Target class precision")->capture_default_str();
  act_cmd->add_option("--eps", act.eps, "Threshold step")->capture_default_str();
  act.iter_opt = act_cmd->add_option("--iterations", act.iterations,
                                     "Update rounds (default round((max-min)*100))");
  act_cmd->add_flag("--from-logits", act.from_logits, "Inputs are logits; apply softmax on load");
  act_cmd->add_option("--out", act.out, "Output thresholds JSON")->required();

  AosArgs aos;
  auto* aos_cmd = app.add_subcommand("aos", "IoU-driven class-wise oversampling");
  aos_cmd->add_option("--scores", aos.scores, "Per-fold scores JSON files")
      ->check(CLI::ExistingFile)
      ->required()
      ->expected(1, -1);
  aos_cmd->add_option("--manifest", aos.manifest, "Labeled dataset manifest")
      ->check(CLI::ExistingFile)
      ->required();
  aos_cmd
      ->add_option("--lambda", aos.lambda,
                   "Oversampling strength (1 by default in the reference setup)")
      ->required();
  aos_cmd
      ->add_option("--exclude-classes", aos.exclude,
                   "Classes left out of the sampling threshold mean")
      ->expected(0, -1);
  aos_cmd->add_option("--seed", aos.seed, "Reserved for sub-sampling modes")->capture_default_str();
  aos_cmd->add_option("--out-plan", aos.out_plan, "Output plan JSON")->required();
  aos_cmd->add_option("--out-manifest", aos.out_manifest, "Output oversampled manifest")
      ->required();

  PseudoArgs pseudo;
  auto* pseudo_cmd =
      app.add_subcommand("pseudo-label", "Threshold probability maps into pseudo-labels");
  pseudo_cmd->add_option("--probs-dir", pseudo.probs_dir, "Directory of probability maps")
      ->check(CLI::ExistingDirectory)
      ->required();
  pseudo_cmd->add_option("--thresholds", pseudo.thresholds, "thresholds.json from `act`")
      ->check(CLI::ExistingFile)
      ->required();
  pseudo_cmd->add_option("--out-dir", pseudo.out_dir, "Directory for label rasters")->required();
  pseudo_cmd->add_option("--coverage", pseudo.coverage,
                         "Coverage report path (default <out-dir>/coverage.json)");
  pseudo_cmd->add_option("--ignore-index", pseudo.ignore_index, "Sentinel for rejected pixels")
      ->capture_default_str();
  pseudo_cmd->add_flag("--from-logits", pseudo.from_logits,
                       "Inputs are logits; apply softmax on load");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic labeled/unlabeled workspace");
  sim_cmd->add_option("--spec", sim.spec, "Scene spec JSON")->check(CLI::ExistingFile);
  sim_cmd->add_option("--profile", sim.profile, "Predictor profile JSON")->check(CLI::ExistingFile);
  sim_cmd->add_option("--out-dir", sim.out_dir, "Workspace directory")->required();
  sim_cmd->add_option("--n", sim.n, "Labeled images")->required();
  sim_cmd->add_option("--unlabeled", sim.unlabeled, "Unlabeled images with held-out labels")
      ->capture_default_str();
  sim.classes_opt = sim_cmd->add_option("--classes", sim.classes, "Override class count");
  sim.height_opt = sim_cmd->add_option("--height", sim.height, "Override raster height");
  sim.width_opt = sim_cmd->add_option("--width", sim.width, "Override raster width");
  sim.regions_opt =
      sim_cmd->add_option("--regions", sim.regions, "Override Voronoi sites per image");
  sim.seed_opt = sim_cmd->add_option("--seed", sim.seed, "Override seed");

  std::vector<const char*> argv;
  argv.push_back("cafs");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log.error(e.what());
    err << app.help();
    return kExitUsage;
  }

  log.set_level(log_level == "error"   ? LogLevel::kError
                : log_level == "debug" ? LogLevel::kDebug
                                       : LogLevel::kInfo);
  if (isa == "scalar") kernels::set_active_isa(kernels::Isa::kScalar);
  log.debug(std::string("kernel isa: ") + std::string(kernels::isa_name(kernels::active_isa())));

  try {
    const std::size_t jobs =
        resolve_jobs(jobs_opt->count() ? std::optional<std::size_t>(jobs_flag) : std::nullopt);
    if (split_cmd->parsed()) cmd_split(split, log);
    if (scores_cmd->parsed()) cmd_scores(scores, jobs, log);
    if (act_cmd->parsed()) cmd_act(act, jobs, log);
    if (aos_cmd->parsed()) cmd_aos(aos, log);
    if (pseudo_cmd->parsed()) cmd_pseudo_label(pseudo, jobs, log);
    if (sim_cmd->parsed()) cmd_simulate(sim, jobs, log);
  } catch (const Error& e) {
    log.error(e.what());
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    log.error(e.what());
    return kExitDataError;
  }
  return kExitOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace cafs::cli
