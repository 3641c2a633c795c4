// Copyright 2026 The Rankdiag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RANKDIAG_ERROR_H_
#define RANKDIAG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankdiag {

// Domain error kinds. The CLI reports these by name in its error JSON.
enum class ErrorCode {
  kDuplicateEdge,
  kSelfLoop,
  kIndexOutOfRange,
  kPromptOutOfDomain,
  kEmptyEdge,
  kInvalidOutcome,
  kEmptyGrid,
  kDimensionMismatch,
  kInvalidConfig,
  kDegenerateInput,
  kAllWindowsEmpty,
  kBadK,
  kCycleDetected,
  kNotAPermutation,
  kNotConverged,
  kParseError,
  kIoError,
};

std::string_view ErrorName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  std::string_view name() const { return ErrorName(code_); }

 private:
  ErrorCode code_;
};

}  // namespace rankdiag

#endif  // RANKDIAG_ERROR_H_
