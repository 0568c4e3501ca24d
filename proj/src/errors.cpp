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

#include "cafs/errors.hpp"

namespace cafs {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return "IoError";
    case ErrorKind::kMalformedHeader:
      return "MalformedHeader";
    case ErrorKind::kShape:
      return "ShapeError";
    case ErrorKind::kNormalization:
      return "NormalizationError";
    case ErrorKind::kClassRange:
      return "ClassRangeError";
    case ErrorKind::kSchema:
      return "SchemaError";
    case ErrorKind::kDuplicateId:
      return "DuplicateIdError";
    case ErrorKind::kShapeMismatch:
      return "ShapeMismatch";
    case ErrorKind::kClassCountMismatch:
      return "ClassCountMismatch";
    case ErrorKind::kEmptyFold:
      return "EmptyFold";
    case ErrorKind::kEmptyInput:
      return "EmptyInput";
    case ErrorKind::kAllUndefined:
      return "AllUndefined";
    case ErrorKind::kInfeasibleCoverage:
      return "InfeasibleCoverage";
    case ErrorKind::kSize:
      return "SizeError";
    case ErrorKind::kEmptyDataset:
      return "EmptyDataset";
    case ErrorKind::kMissingPrediction:
      return "MissingPrediction";
    case ErrorKind::kValidation:
      return "ValidationError";
  }
  return "Error";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(error_kind_name(kind)) + ": " + message);
}

}  // namespace cafs
