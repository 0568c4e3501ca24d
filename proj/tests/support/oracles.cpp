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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cafs::oracle {
namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  const fs::path base = fs::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    const fs::path candidate = base / ("cafs_test_" + std::to_string(rd()) + std::to_string(rd()));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("could not create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<float> random_probabilities(std::mt19937_64& rng, int classes, int pixels,
                                        bool peaked) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, classes - 1);
  // Values sitting on or next to the threshold grid exercise the strict
  // comparison.
  static const double kGrid[] = {0.85, 0.86, 0.87, 0.9, 0.93, 0.95, 0.98};
  std::vector<float> out(static_cast<std::size_t>(classes * pixels));
  std::vector<double> w(static_cast<std::size_t>(classes));
  for (int j = 0; j < pixels; ++j) {
    const double mode = unit(rng);
    if (mode < 0.05) {
      for (int c = 0; c < classes; ++c)
        out[static_cast<std::size_t>(c * pixels + j)] = 1.0f / classes;
      continue;
    }
    double top;
    if (peaked && mode < 0.25) {
      top = kGrid[static_cast<std::size_t>(unit(rng) * 7) % 7];
    } else if (peaked) {
      top = 0.5 + 0.5 * unit(rng);
    } else {
      top = -1.0;
    }
    if (top < 0.0) {
      double sum = 0.0;
      for (auto& v : w) sum += (v = -std::log(1.0 - unit(rng)));
      for (int c = 0; c < classes; ++c) {
        out[static_cast<std::size_t>(c * pixels + j)] =
            static_cast<float>(w[static_cast<std::size_t>(c)] / sum);
      }
      continue;
    }
    const int winner = pick(rng);
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      w[static_cast<std::size_t>(c)] = c == winner ? 0.0 : unit(rng) + 1e-3;
      sum += w[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < classes; ++c) {
      const double p = c == winner ? top : (1.0 - top) * w[static_cast<std::size_t>(c)] / sum;
      out[static_cast<std::size_t>(c * pixels + j)] = static_cast<float>(p);
    }
  }
  return out;
}

std::vector<std::uint16_t> random_labels(std::mt19937_64& rng, int classes, int pixels,
                                         double ignore_rate, std::uint16_t ignore) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, classes - 1);
  std::vector<std::uint16_t> out(static_cast<std::size_t>(pixels));
  for (auto& v : out) v = unit(rng) < ignore_rate ? ignore : static_cast<std::uint16_t>(pick(rng));
  return out;
}

Confusion naive_confusion(const std::vector<std::uint16_t>& pred,
                          const std::vector<std::uint16_t>& ref, int classes,
                          std::uint16_t ignore) {
  const auto n = static_cast<std::size_t>(classes);
  Confusion out{std::vector<std::uint64_t>(n), std::vector<std::uint64_t>(n),
                std::vector<std::uint64_t>(n), std::vector<std::uint64_t>(n),
                std::vector<std::uint64_t>(n)};
  for (int c = 0; c < classes; ++c) {
    const auto k = static_cast<std::size_t>(c);
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (ref[j] == ignore) continue;
      const bool p = pred[j] == c;
      const bool r = ref[j] == c;
      if (p && r) ++out.tp[k];
      if (p && !r) ++out.fp[k];
      if (!p && r) ++out.fn[k];
      if (p && r) ++out.inter[k];
      if (p || r) ++out.uni[k];
    }
  }
  return out;
}

std::vector<NaiveIteration> naive_act(const std::vector<NaiveImage>& fold, int classes,
                                      double min_ct, double max_ct, double max_cp, double eps,
                                      int iterations, std::uint16_t ignore) {
  std::vector<double> ct(static_cast<std::size_t>(classes), min_ct);
  std::vector<NaiveIteration> trace;
  for (int m = 0; m < iterations; ++m) {
    std::vector<std::uint64_t> tp(ct.size(), 0), fp(ct.size(), 0);
    for (const auto& image : fold) {
      const std::size_t pixels = image.label.size();
      for (std::size_t j = 0; j < pixels; ++j) {
        if (image.label[j] == ignore) continue;
        int best = 0;
        for (int c = 1; c < classes; ++c) {
          if (image.probs[static_cast<std::size_t>(c) * pixels + j] >
              image.probs[static_cast<std::size_t>(best) * pixels + j]) {
            best = c;
          }
        }
        const double p = image.probs[static_cast<std::size_t>(best) * pixels + j];
        if (!(p > ct[static_cast<std::size_t>(best)])) continue;
        if (image.label[j] == best) {
          ++tp[static_cast<std::size_t>(best)];
        } else {
          ++fp[static_cast<std::size_t>(best)];
        }
      }
    }
    NaiveIteration it;
    for (std::size_t c = 0; c < ct.size(); ++c) {
      if (tp[c] + fp[c] == 0) {
        it.precision.emplace_back();
        continue;
      }
      const double cp = static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]);
      it.precision.emplace_back(cp);
      if (cp < max_cp) ct[c] = std::min(ct[c] + eps, max_ct);
    }
    it.thresholds = ct;
    trace.push_back(std::move(it));
  }
  return trace;
}

namespace {

struct Rational {
  __int128 num = 0;
  __int128 den = 1;
};

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a == 0 ? 1 : a;
}

Rational reduce(Rational r) {
  const __int128 g = gcd128(r.num, r.den);
  return {r.num / g, r.den / g};
}

Rational add(Rational a, Rational b) {
  return reduce({a.num * b.den + b.num * a.den, a.den * b.den});
}
Rational sub(Rational a, Rational b) {
  return reduce({a.num * b.den - b.num * a.den, a.den * b.den});
}

// Smallest integer >= r for r > 0.
__int128 ceil_positive(Rational r) { return (r.num + r.den - 1) / r.den; }

}  // namespace

ExactPlan exact_multipliers(const GridScores& scores, std::int64_t lambda) {
  const std::size_t classes = scores.per_fold.front().size();
  std::vector<std::optional<Rational>> mean(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    __int128 sum = 0;
    __int128 n = 0;
    for (const auto& fold : scores.per_fold) {
      if (fold[c]) {
        sum += *fold[c];
        ++n;
      }
    }
    if (n > 0) mean[c] = reduce({sum, n * 10000});
  }
  Rational st;
  __int128 defined = 0;
  for (const auto& m : mean) {
    if (m) {
      st = add(st, *m);
      ++defined;
    }
  }
  st = reduce({st.num, st.den * defined});

  ExactPlan plan;
  for (std::size_t c = 0; c < classes; ++c) {
    plan.s_mean.push_back(mean[c] ? std::optional<double>(static_cast<double>(mean[c]->num) /
                                                          static_cast<double>(mean[c]->den))
                                  : std::nullopt);
    std::uint64_t mult = 0;
    if (mean[c]) {
      const Rational gap = sub(st, *mean[c]);
      if (gap.num > 0)
        mult = static_cast<std::uint64_t>(ceil_positive({gap.num * lambda, gap.den}));
    }
    plan.multiplier.push_back(mult);
  }
  return plan;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace cafs::oracle
