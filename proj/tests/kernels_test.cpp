// tests/kernels_test.cpp

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

#include <gtest/gtest.h>

#include "mdistill/error.hpp"
#include "mdistill/kernels.hpp"
#include "mdistill/parallel.hpp"
#include "test_support.hpp"

namespace mdistill {
namespace {

using testing::RandomMatrix;

struct Shape {
  std::size_t m, k, n;
};

class GemmTest : public ::testing::TestWithParam<Shape> {};

TEST_P(GemmTest, MatchesReferenceBitwise) {
  const Shape s = GetParam();
  RngStream rng(21, s.m * 1000 + s.k * 10 + s.n);
  const Matrix a = RandomMatrix(rng, s.m, s.k);
  const Matrix b = RandomMatrix(rng, s.k, s.n);
  const Matrix bt = RandomMatrix(rng, s.n, s.k);
  const Matrix at = RandomMatrix(rng, s.k, s.m);
  const Matrix c0 = RandomMatrix(rng, s.m, s.n);
  for (bool acc : {false, true}) {
    Matrix x = c0, y = c0;
    kernels::GemmNN(a, b, &x, acc);
    kernels::reference::GemmNN(a, b, &y, acc);
    EXPECT_TRUE(x.BitwiseEqual(y));
    x = c0, y = c0;
    kernels::GemmNT(a, bt, &x, acc);
    kernels::reference::GemmNT(a, bt, &y, acc);
    EXPECT_TRUE(x.BitwiseEqual(y));
    x = c0, y = c0;
    kernels::GemmTN(at, b, &x, acc);
    kernels::reference::GemmTN(at, b, &y, acc);
    EXPECT_TRUE(x.BitwiseEqual(y));
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, GemmTest,
                         ::testing::Values(Shape{1, 1, 1}, Shape{3, 5, 2}, Shape{17, 9, 13},
                                           Shape{64, 192, 64}, Shape{200, 64, 21}));

TEST(Gemm, ThreadCountDoesNotChangeBits) {
  RngStream rng(22, 0);
  const Matrix a = RandomMatrix(rng, 128, 96), b = RandomMatrix(rng, 96, 80);
  Matrix one, many;
  SetThreads(1);
  kernels::GemmNN(a, b, &one);
  SetThreads(4);
  kernels::GemmNN(a, b, &many);
  ApplyThreadLimit();
  EXPECT_TRUE(one.BitwiseEqual(many));
}

TEST(Gemm, ShapeMismatchThrows) {
  Matrix a(2, 3), b(4, 2), c;
  EXPECT_THROW(kernels::GemmNN(a, b, &c), Error);
}

TEST(Kernels, RowVectorAndColumnSums) {
  Matrix m(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  Matrix bias(1, 3, std::vector<double>{10, 20, 30});
  kernels::AddRowVector(bias, &m);
  EXPECT_EQ(m, Matrix(2, 3, std::vector<double>{11, 22, 33, 14, 25, 36}));
  Matrix sums(1, 3, 1.0);
  kernels::AccumulateColumnSums(m, &sums);
  EXPECT_EQ(sums, Matrix(1, 3, std::vector<double>{26, 48, 70}));
}

}  // namespace
}  // namespace mdistill
