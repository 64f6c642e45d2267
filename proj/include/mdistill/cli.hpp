// include/mdistill/cli.hpp

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

#ifndef MDISTILL_CLI_HPP_
#define MDISTILL_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "mdistill/error.hpp"

namespace mdistill {

/// Process exit codes of the mdistill tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitDependency = 4,
  kExitDivergence = 5,
};

int ExitCodeFor(ErrorCode code);

/// Runs one mdistill command.  `args` excludes the program name.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace mdistill

#endif  // MDISTILL_CLI_HPP_
