// bench/bench_kernels.cpp

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

// Serial reference kernels against their OpenMP counterparts, plus serial
// versus parallel corpus generation.

#include <benchmark/benchmark.h>

#include "mdistill/config.hpp"
#include "mdistill/kernels.hpp"
#include "mdistill/numcore.hpp"
#include "mdistill/parallel.hpp"
#include "mdistill/synthcorpus.hpp"

namespace mdistill {
namespace {

Matrix Filled(std::size_t rows, std::size_t cols, std::uint64_t stream) {
  RngStream rng(7, stream);
  Matrix m(rows, cols);
  for (double &v : m.values()) v = rng.Gaussian();
  return m;
}

void BM_GemmNN_Reference(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = Filled(n, n, 1), b = Filled(n, n, 2);
  Matrix c(n, n);
  for (auto _ : state) {
    kernels::reference::GemmNN(a, b, &c);
    benchmark::DoNotOptimize(c.data());
  }
}

void BM_GemmNN_Parallel(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = Filled(n, n, 1), b = Filled(n, n, 2);
  Matrix c(n, n);
  ApplyThreadLimit();
  for (auto _ : state) {
    kernels::GemmNN(a, b, &c);
    benchmark::DoNotOptimize(c.data());
  }
}

void BM_GemmTN_Reference(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = Filled(n, n, 3), b = Filled(n, n, 4);
  Matrix c(n, n);
  for (auto _ : state) {
    kernels::reference::GemmTN(a, b, &c);
    benchmark::DoNotOptimize(c.data());
  }
}

void BM_GemmTN_Parallel(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = Filled(n, n, 3), b = Filled(n, n, 4);
  Matrix c(n, n);
  ApplyThreadLimit();
  for (auto _ : state) {
    kernels::GemmTN(a, b, &c);
    benchmark::DoNotOptimize(c.data());
  }
}

CorpusManifest BenchManifest() { return BuildManifest(PresetConfig("env3")); }

void BM_GenerateSplit_Serial(benchmark::State &state) {
  const CorpusManifest m = BenchManifest();
  for (auto _ : state) benchmark::DoNotOptimize(GenerateSplitSerial(m, Split::kDev));
}

void BM_GenerateSplit_Parallel(benchmark::State &state) {
  const CorpusManifest m = BenchManifest();
  ApplyThreadLimit();
  for (auto _ : state) benchmark::DoNotOptimize(GenerateSplit(m, Split::kDev));
}

BENCHMARK(BM_GemmNN_Reference)->Arg(64)->Arg(192)->Arg(384);
BENCHMARK(BM_GemmNN_Parallel)->Arg(64)->Arg(192)->Arg(384);
BENCHMARK(BM_GemmTN_Reference)->Arg(64)->Arg(192)->Arg(384);
BENCHMARK(BM_GemmTN_Parallel)->Arg(64)->Arg(192)->Arg(384);
BENCHMARK(BM_GenerateSplit_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateSplit_Parallel)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mdistill

BENCHMARK_MAIN();
