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

#include <stdexcept>
#include <string>
#include <string_view>

namespace cafs {

enum class ErrorKind {
  kIo,
  kMalformedHeader,
  kShape,
  kNormalization,
  kClassRange,
  kSchema,
  kDuplicateId,
  kShapeMismatch,
  kClassCountMismatch,
  kEmptyFold,
  kEmptyInput,
  kAllUndefined,
  kInfeasibleCoverage,
  kSize,
  kEmptyDataset,
  kMissingPrediction,
  kValidation,
};

std::string_view error_kind_name(ErrorKind kind);

// All library failures surface as cafs::Error; kind() drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace cafs
