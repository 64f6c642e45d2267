// include/mdistill/numcore.hpp

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

#ifndef MDISTILL_NUMCORE_HPP_
#define MDISTILL_NUMCORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mdistill {

/// Dense row-major matrix of doubles.  Vectors are stored as 1 x n.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double *data() { return data_.data(); }
  const double *data() const { return data_.data(); }

  void SetZero();
  bool AllFinite() const;
  bool SameShape(const Matrix &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  /// Bit-level equality (distinguishes -0.0 from 0.0).
  bool BitwiseEqual(const Matrix &other) const;

  bool operator==(const Matrix &other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Counter-based random stream (Philox-4x32-10).  The key is the master
/// seed and the high half of the counter is the stream id, so any
/// (master_seed, stream_id) pair names an independent, reproducible sequence.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t NextU64();
  /// Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Uniform integer in the closed range [lo, hi].
  std::uint64_t UniformInt(std::uint64_t lo, std::uint64_t hi);
  /// Standard normal via Box-Muller on two fresh uniforms.
  double Gaussian();

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void Refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

/// Mixes several 64-bit values into one stream id.
std::uint64_t HashStreamId(std::initializer_list<std::uint64_t> parts);

/// Row-wise softmax with per-row max subtraction.  Throws on non-finite input.
Matrix SoftmaxRows(const Matrix &logits);

/// log(sum(exp(v))) with max shift.  Throws on empty input.
double LogSumExp(std::span<const double> values);

/// Central-difference gradient of `loss` at `params`.
std::vector<double> FiniteDiffGrad(
    const std::function<double(std::span<const double>)> &loss,
    std::span<const double> params, double eps);

/// ||a - b|| / max(||a||, ||b||), or 0 when both are zero.  The norm-wise
/// form keeps near-zero coordinates from dominating the comparison.
double RelativeError(std::span<const double> a, std::span<const double> b);

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t ArgMax(std::span<const double> v);

/// Floor applied before taking the log of a produced probability.
inline constexpr double kProbFloor = 1e-12;

}  // namespace mdistill

#endif  // MDISTILL_NUMCORE_HPP_
