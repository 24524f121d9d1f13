// Copyright 2026 The gesturedet Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace gesturedet {

enum class ErrorCode {
  kConfig,
  kInvalidBox,
  kDomain,
  kShape,
  kDuplicateId,
  kDimensionMismatch,
  kStoreLocked,
  kStoreIo,
  kCannotSplit,
  kEmptySelection,
  kNotRunning,
  kSessionActive,
  kProtocol,
  kTrainingAborted,
  kInternal,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kInvalidBox: return "invalid box";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kShape: return "shape mismatch";
    case ErrorCode::kDuplicateId: return "duplicate frame id";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kStoreLocked: return "store locked";
    case ErrorCode::kStoreIo: return "store i/o error";
    case ErrorCode::kCannotSplit: return "cannot split";
    case ErrorCode::kEmptySelection: return "empty selection";
    case ErrorCode::kNotRunning: return "sequence not running";
    case ErrorCode::kSessionActive: return "session already active";
    case ErrorCode::kProtocol: return "protocol error";
    case ErrorCode::kTrainingAborted: return "training aborted";
    case ErrorCode::kInternal: return "internal error";
  }
  return "error";
}

}  // namespace gesturedet
