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

#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "cafs/parallel.hpp"

namespace cafs {
namespace {

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (std::size_t jobs : {1u, 2u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, LowestFailingIndexWins) {
  try {
    parallel_for(20, 4, [](std::size_t i) {
      if (i == 3 || i == 17) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "3");
  }
}

TEST(ResolveJobs, FlagThenEnvironmentThenOne) {
  ::unsetenv("CAFS_JOBS");
  EXPECT_EQ(resolve_jobs(std::nullopt), 1u);
  EXPECT_EQ(resolve_jobs(3), 3u);
  ::setenv("CAFS_JOBS", "5", 1);
  EXPECT_EQ(resolve_jobs(std::nullopt), 5u);
  EXPECT_EQ(resolve_jobs(2), 2u);
  ::unsetenv("CAFS_JOBS");
}

}  // namespace
}  // namespace cafs
