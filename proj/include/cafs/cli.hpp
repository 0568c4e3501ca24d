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

#include <ostream>
#include <string>
#include <vector>

#include "cafs/errors.hpp"

// Subcommand front end: split, scores, act, aos, pseudo-label, simulate.
namespace cafs::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,       // bad flags or values failing validation
  kExitInfeasible = 2,  // constraints cannot be met (fold coverage, fold size)
  kExitDataError = 3,   // unreadable, malformed or inconsistent inputs
};

int exit_code_for(ErrorKind kind);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cafs::cli
