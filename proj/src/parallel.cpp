// src/parallel.cpp

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

#include "mdistill/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace mdistill {

int ConfiguredThreads() {
  if (const char *env = std::getenv("MDISTILL_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception &) {
      // Fall through to the runtime default.
    }
  }
  return omp_get_max_threads();
}

void ApplyThreadLimit() { omp_set_num_threads(ConfiguredThreads()); }

void SetThreads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace mdistill
