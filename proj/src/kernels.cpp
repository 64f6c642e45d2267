// src/kernels.cpp

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

#include "mdistill/kernels.hpp"

#include <omp.h>

#include "mdistill/error.hpp"

namespace mdistill::kernels {

namespace {

// Below this many multiply-adds a product runs on the calling thread.
constexpr std::size_t kParallelWork = 1 << 16;

void PrepareOutput(std::size_t rows, std::size_t cols, Matrix *c, bool accumulate) {
  if (accumulate) {
    if (c->rows() != rows || c->cols() != cols)
      Fail(ErrorCode::kShapeMismatch, "gemm: accumulator has wrong shape");
  } else {
    if (c->rows() != rows || c->cols() != cols)
      *c = Matrix(rows, cols);
    else
      c->SetZero();
  }
}

}  // namespace

void GemmNN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.cols() != b.rows()) Fail(ErrorCode::kShapeMismatch, "GemmNN: inner dims differ");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  PrepareOutput(m, n, c, accumulate);
  const double *pa = a.data();
  const double *pb = b.data();
  double *pc = c->data();
  const bool par = m * k * n >= kParallelWork && m > 1;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    double *crow = pc + i * n;
    const double *arow = pa + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double *brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void GemmNT(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.cols() != b.cols()) Fail(ErrorCode::kShapeMismatch, "GemmNT: inner dims differ");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  PrepareOutput(m, n, c, accumulate);
  const double *pa = a.data();
  const double *pb = b.data();
  double *pc = c->data();
  const bool par = m * k * n >= kParallelWork && m > 1;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    const double *arow = pa + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double *brow = pb + j * k;
      double s = pc[i * n + j];
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      pc[i * n + j] = s;
    }
  }
}

void GemmTN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.rows() != b.rows()) Fail(ErrorCode::kShapeMismatch, "GemmTN: inner dims differ");
  const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
  PrepareOutput(m, n, c, accumulate);
  const double *pa = a.data();
  const double *pb = b.data();
  double *pc = c->data();
  const bool par = m * k * n >= kParallelWork && m > 1;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    double *crow = pc + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[p * m + i];
      const double *brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void AddRowVector(const Matrix &bias, Matrix *m) {
  if (bias.rows() != 1 || bias.cols() != m->cols())
    Fail(ErrorCode::kShapeMismatch, "AddRowVector: bias shape");
  for (std::size_t r = 0; r < m->rows(); ++r) {
    auto row = m->row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias(0, c);
  }
}

void AccumulateColumnSums(const Matrix &m, Matrix *out) {
  if (out->rows() != 1 || out->cols() != m.cols())
    Fail(ErrorCode::kShapeMismatch, "AccumulateColumnSums: output shape");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) (*out)(0, c) += row[c];
  }
}

namespace reference {

void GemmNN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.cols() != b.rows()) Fail(ErrorCode::kShapeMismatch, "GemmNN: inner dims differ");
  PrepareOutput(a.rows(), b.cols(), c, accumulate);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = (*c)(i, j);
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      (*c)(i, j) = s;
    }
}

void GemmNT(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.cols() != b.cols()) Fail(ErrorCode::kShapeMismatch, "GemmNT: inner dims differ");
  PrepareOutput(a.rows(), b.rows(), c, accumulate);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = (*c)(i, j);
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(j, p);
      (*c)(i, j) = s;
    }
}

void GemmTN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.rows() != b.rows()) Fail(ErrorCode::kShapeMismatch, "GemmTN: inner dims differ");
  PrepareOutput(a.cols(), b.cols(), c, accumulate);
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = (*c)(i, j);
      for (std::size_t p = 0; p < a.rows(); ++p) s += a(p, i) * b(p, j);
      (*c)(i, j) = s;
    }
}

}  // namespace reference
}  // namespace mdistill::kernels
