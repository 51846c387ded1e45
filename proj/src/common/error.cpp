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

#include "common/error.hpp"

namespace biofed {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kNonFinite: return "non-finite-value";
    case ErrorCode::kLabelOutOfRange: return "label-out-of-range";
    case ErrorCode::kSchemaMismatch: return "schema-mismatch";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kAlreadyExists: return "already-exists";
    case ErrorCode::kMissingFile: return "missing-file";
    case ErrorCode::kUnsupportedFormat: return "unsupported-format";
    case ErrorCode::kCorruptImage: return "corrupt-image";
    case ErrorCode::kClassWithoutTestSamples: return "class-with-no-test-samples";
    case ErrorCode::kTooFewSamples: return "too-few-samples";
    case ErrorCode::kTruncatedFrame: return "truncated-frame";
    case ErrorCode::kUnknownTag: return "unknown-tag";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kMalformedPayload: return "malformed-payload";
    case ErrorCode::kOversizeFrame: return "oversize-frame";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kConnectionRefused: return "connection-refused";
    case ErrorCode::kDisconnected: return "disconnected";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kRoundFailed: return "round-failed";
    case ErrorCode::kMismatchedTestSet: return "mismatched-test-set";
    case ErrorCode::kUnknownFilter: return "unknown-filter";
    case ErrorCode::kNotClose: return "not-close";
  }
  return "unknown";
}

}  // namespace biofed
