// Copyright 2026 The BioFed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIOFED_COMMON_ERROR_HPP_
#define BIOFED_COMMON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace biofed {

// Every failure raised by the core carries one of these codes. The C API maps
// them onto its status enum; nothing else in the core throws for expected
// error paths.
enum class ErrorCode {
  kInvalidArgument,
  kValidation,
  kShapeMismatch,
  kNonFinite,
  kLabelOutOfRange,
  kSchemaMismatch,
  kEmptyInput,
  kDuplicate,
  kIo,
  kAlreadyExists,
  kMissingFile,
  kUnsupportedFormat,
  kCorruptImage,
  kClassWithoutTestSamples,
  kTooFewSamples,
  kTruncatedFrame,
  kUnknownTag,
  kVersionMismatch,
  kLengthMismatch,
  kMalformedPayload,
  kOversizeFrame,
  kTimeout,
  kConnectionRefused,
  kDisconnected,
  kProtocol,
  kRoundFailed,
  kMismatchedTestSet,
  kUnknownFilter,
  kNotClose,
};

// Stable kebab-case name, used in diagnostics and on the wire.
const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace biofed

#endif  // BIOFED_COMMON_ERROR_HPP_
