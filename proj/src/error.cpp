// src/error.cpp

// Copyright 2026  The mdistill Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mdistill/error.hpp"

namespace mdistill {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kStaleCache: return "stale forward cache";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kHeaderInconsistent: return "inconsistent header";
    case ErrorCode::kTruncated: return "truncated file";
    case ErrorCode::kMissingManifest: return "missing manifest";
    case ErrorCode::kCorpusInconsistent: return "inconsistent corpus";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kUnroutedDomain: return "unrouted domain";
    case ErrorCode::kNoValidAlignment: return "no valid alignment";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kMissingDependency: return "missing dependency";
  }
  return "unknown";
}

}  // namespace mdistill
