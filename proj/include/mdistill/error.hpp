// include/mdistill/error.hpp

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

#ifndef MDISTILL_ERROR_HPP_
#define MDISTILL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mdistill {

enum class ErrorCode {
  kInvalidArgument,
  kNonFinite,
  kShapeMismatch,
  kStaleCache,
  kBadMagic,
  kVersionMismatch,
  kHeaderInconsistent,
  kTruncated,
  kMissingManifest,
  kCorpusInconsistent,
  kIo,
  kConfig,
  kUnroutedDomain,
  kNoValidAlignment,
  kDivergence,
  kMissingDependency,
};

const char *ErrorCodeName(ErrorCode code);

/// All library failures are reported by throwing this type; `code()` lets
/// callers (the CLI, tests) distinguish failure classes without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

}  // namespace mdistill

#endif  // MDISTILL_ERROR_HPP_
