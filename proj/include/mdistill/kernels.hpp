// include/mdistill/kernels.hpp

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

// Dense matrix products used by the networks.  The default versions are
// OpenMP-parallel over output rows; the `reference` namespace holds the
// plain triple loops they are tested (bitwise) against.  Both variants add
// the k-terms of every output element in ascending order, so the results are
// identical regardless of thread count.

#ifndef MDISTILL_KERNELS_HPP_
#define MDISTILL_KERNELS_HPP_

#include "mdistill/numcore.hpp"

namespace mdistill::kernels {

/// c (+)= a * b
void GemmNN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);
/// c (+)= a * b^T
void GemmNT(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);
/// c (+)= a^T * b
void GemmTN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);

/// Adds `bias` (1 x n) to every row of `m`.
void AddRowVector(const Matrix &bias, Matrix *m);
/// out (+)= column sums of m, as a 1 x n row.
void AccumulateColumnSums(const Matrix &m, Matrix *out);

namespace reference {
void GemmNN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);
void GemmNT(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);
void GemmTN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);
}  // namespace reference

}  // namespace mdistill::kernels

#endif  // MDISTILL_KERNELS_HPP_
