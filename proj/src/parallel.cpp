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

#include "cafs/parallel.hpp"

#include <cstdlib>
#include <string>

#include "cafs/errors.hpp"

namespace cafs {

std::size_t resolve_jobs(std::optional<std::size_t> requested) {
  if (requested) {
    if (*requested == 0) fail(ErrorKind::kValidation, "--jobs must be at least 1");
    return *requested;
  }
  if (const char* env = std::getenv("CAFS_JOBS"); env != nullptr && *env != '\0') {
    try {
      const long value = std::stol(env);
      if (value >= 1) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
    }
    fail(ErrorKind::kValidation,
         std::string("CAFS_JOBS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

}  // namespace cafs
