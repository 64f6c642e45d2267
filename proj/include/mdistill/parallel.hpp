// include/mdistill/parallel.hpp

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

#ifndef MDISTILL_PARALLEL_HPP_
#define MDISTILL_PARALLEL_HPP_

namespace mdistill {

/// Number of worker threads for parallel-safe phases.  Honors the
/// MDISTILL_THREADS environment variable when it holds a positive integer.
int ConfiguredThreads();

/// Applies ConfiguredThreads() to the OpenMP runtime.
void ApplyThreadLimit();

/// Overrides the thread count for the current process (tests, benchmarks).
void SetThreads(int threads);

}  // namespace mdistill

#endif  // MDISTILL_PARALLEL_HPP_
