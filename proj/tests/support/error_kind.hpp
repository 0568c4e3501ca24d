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

#include <optional>

#include "cafs/errors.hpp"

namespace cafs::testing {

// Kind of the cafs::Error thrown by f, or nullopt when nothing is thrown.
template <typename F>
std::optional<ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace cafs::testing

#define EXPECT_CAFS_ERROR(stmt, kind) \
  EXPECT_EQ(::cafs::testing::thrown_kind([&] { stmt; }), std::optional(::cafs::ErrorKind::kind))
