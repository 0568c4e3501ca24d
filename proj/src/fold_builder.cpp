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

#include "cafs/fold_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "cafs/errors.hpp"

namespace cafs {
namespace {

// Unbiased draw from [0, n) using only the engine's specified output stream,
// so folds are reproducible across standard libraries.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

class Assignment {
 public:
  Assignment(const DatasetManifest& manifest, std::size_t k)
      : manifest_(manifest),
        k_(k),
        classes_(static_cast<std::size_t>(manifest.class_count)),
        fold_of_(manifest.size(), k),
        counts_(k, std::vector<std::size_t>(classes_, 0)) {}

  std::size_t pool() const { return k_; }
  std::size_t fold_of(std::size_t sample) const { return fold_of_[sample]; }

  void place(std::size_t sample, std::size_t fold) {
    if (fold_of_[sample] != k_) adjust(fold_of_[sample], sample, -1);
    fold_of_[sample] = fold;
    if (fold != k_) adjust(fold, sample, +1);
  }

  std::size_t missing(std::size_t fold) const {
    return static_cast<std::size_t>(std::count(counts_[fold].begin(), counts_[fold].end(), 0u));
  }

  std::size_t total_missing() const {
    std::size_t total = 0;
    for (std::size_t f = 0; f < k_; ++f) total += missing(f);
    return total;
  }

  // First (fold, class) pair lacking coverage, or nullopt when complete.
  std::optional<std::pair<std::size_t, int>> first_gap() const {
    for (std::size_t f = 0; f < k_; ++f) {
      for (std::size_t c = 0; c < classes_; ++c) {
        if (counts_[f][c] == 0) return std::make_pair(f, static_cast<int>(c));
      }
    }
    return std::nullopt;
  }

  // Change in total_missing if samples `a` (in fold fa) and `b` (in fb) trade places.
  long swap_delta(std::size_t a, std::size_t b) {
    const std::size_t fa = fold_of_[a];
    const std::size_t fb = fold_of_[b];
    const long before = missing_or_zero(fa) + missing_or_zero(fb);
    place(a, fb);
    place(b, fa);
    const long after = missing_or_zero(fa) + missing_or_zero(fb);
    place(a, fa);
    place(b, fb);
    return after - before;
  }

  void swap(std::size_t a, std::size_t b) {
    const std::size_t fa = fold_of_[a];
    const std::size_t fb = fold_of_[b];
    place(a, fb);
    place(b, fa);
  }

 private:
  long missing_or_zero(std::size_t fold) const {
    return fold == k_ ? 0 : static_cast<long>(missing(fold));
  }

  void adjust(std::size_t fold, std::size_t sample, int delta) {
    for (int c : manifest_.samples[sample].classes) {
      counts_[fold][static_cast<std::size_t>(c)] += delta;
    }
  }

  const DatasetManifest& manifest_;
  std::size_t k_;
  std::size_t classes_;
  std::vector<std::size_t> fold_of_;
  std::vector<std::vector<std::size_t>> counts_;
};

}  // namespace

std::size_t default_n_v(std::size_t sample_count, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    fail(ErrorKind::kValidation, "validation fraction must lie in (0, 1)");
  }
  const auto rounded =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(sample_count)));
  return std::max<std::size_t>(1, rounded);
}

std::size_t default_n_v(const DatasetManifest& manifest, double fraction) {
  return default_n_v(manifest.size(), fraction);
}

FoldSpec build_folds(const DatasetManifest& manifest, std::size_t k, std::size_t n_v,
                     std::uint64_t seed, std::size_t max_attempts) {
  validate_manifest(manifest);
  const std::size_t n = manifest.size();
  if (k < 1 || n_v < 1) fail(ErrorKind::kSize, "need k >= 1 and n_v >= 1");
  if (k * n_v > n) {
    fail(ErrorKind::kSize, std::to_string(k) + " folds of " + std::to_string(n_v) +
                               " samples exceed the " + std::to_string(n) + " labeled samples");
  }
  for (int c = 0; c < manifest.class_count; ++c) {
    const std::size_t freq = manifest.class_frequency(c);
    if (freq < k) {
      fail(ErrorKind::kInfeasibleCoverage, "class " + std::to_string(c) + " occurs in " +
                                               std::to_string(freq) + " samples but " +
                                               std::to_string(k) + " folds must each contain it");
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

  Assignment assignment(manifest, k);
  for (std::size_t i = 0; i < k * n_v; ++i) assignment.place(order[i], i % k);

  std::size_t attempts = 0;
  while (auto gap = assignment.first_gap()) {
    if (attempts++ >= max_attempts) {
      fail(ErrorKind::kInfeasibleCoverage,
           "class coverage not reached after " + std::to_string(max_attempts) + " repair swaps");
    }
    const auto [fold, cls] = *gap;

    std::vector<std::size_t> donors;
    std::vector<std::size_t> members;
    for (std::size_t idx : order) {
      const auto& classes = manifest.samples[idx].classes;
      if (assignment.fold_of(idx) == fold) {
        members.push_back(idx);
      } else if (std::binary_search(classes.begin(), classes.end(), cls)) {
        donors.push_back(idx);
      }
    }

    bool improved = false;
    for (std::size_t donor : donors) {
      for (std::size_t member : members) {
        if (assignment.swap_delta(donor, member) < 0) {
          assignment.swap(donor, member);
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (!improved) {
      // No single improving swap: perturb so the next attempt sees a new configuration.
      assignment.swap(donors[uniform_index(rng, donors.size())],
                      members[uniform_index(rng, members.size())]);
    }
  }

  FoldSpec spec;
  spec.k = k;
  spec.n_v = n_v;
  spec.seed = seed;
  spec.folds.resize(k);
  spec.residuals.resize(k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t f = assignment.fold_of(i);
    for (std::size_t g = 0; g < k; ++g) {
      (g == f ? spec.folds[g] : spec.residuals[g]).push_back(manifest.samples[i].id);
    }
  }
  return spec;
}

void check_fold_spec(const FoldSpec& spec, const DatasetManifest& manifest) {
  auto bad = [](const std::string& msg) { fail(ErrorKind::kValidation, msg); };
  if (spec.folds.size() != spec.k || spec.residuals.size() != spec.k) bad("fold count mismatch");

  std::unordered_map<std::string, const ManifestSample*> by_id;
  for (const auto& s : manifest.samples) by_id.emplace(s.id, &s);

  std::unordered_set<std::string> seen;
  for (std::size_t f = 0; f < spec.k; ++f) {
    if (spec.folds[f].size() != spec.n_v) bad("fold " + std::to_string(f) + " has wrong size");
    std::vector<bool> covered(static_cast<std::size_t>(manifest.class_count), false);
    std::unordered_set<std::string> in_fold;
    for (const auto& id : spec.folds[f]) {
      auto it = by_id.find(id);
      if (it == by_id.end()) bad("fold " + std::to_string(f) + " names unknown id '" + id + "'");
      if (!seen.insert(id).second) bad("sample '" + id + "' appears in two folds");
      in_fold.insert(id);
      for (int c : it->second->classes) covered[static_cast<std::size_t>(c)] = true;
    }
    for (std::size_t c = 0; c < covered.size(); ++c) {
      if (!covered[c]) bad("fold " + std::to_string(f) + " lacks class " + std::to_string(c));
    }
    if (spec.residuals[f].size() != manifest.size() - spec.n_v) {
      bad("residual " + std::to_string(f) + " has wrong size");
    }
    for (const auto& id : spec.residuals[f]) {
      if (in_fold.count(id) || !by_id.count(id))
        bad("residual " + std::to_string(f) + " is not the complement");
    }
  }
}

}  // namespace cafs
