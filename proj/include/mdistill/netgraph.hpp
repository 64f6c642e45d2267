// include/mdistill/netgraph.hpp

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

// Acoustic-model architectures: a feedforward network with sequential memory
// blocks (FSMN) and a stacked LSTM with recurrent projection.  Forward and
// backward are pure functions of (params, spec, input).

#ifndef MDISTILL_NETGRAPH_HPP_
#define MDISTILL_NETGRAPH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mdistill/numcore.hpp"

namespace mdistill {

enum class Architecture : std::uint32_t { kFsmn = 0, kLstm = 1 };

std::string_view ArchitectureName(Architecture arch);
Architecture ParseArchitecture(std::string_view name);

struct NetworkSpec {
  Architecture architecture = Architecture::kFsmn;
  std::uint32_t input_dim = 192;
  std::uint32_t hidden_dim = 64;
  std::uint32_t output_dim = 20;
  std::uint32_t fsmn_blocks = 4;
  std::uint32_t lookback_order = 5;   // N1
  std::uint32_t lookahead_order = 1;  // N2, may be 0
  std::uint32_t stride_back = 2;      // s1
  std::uint32_t stride_ahead = 1;     // s2
  std::uint32_t lstm_layers = 2;
  std::uint32_t lstm_proj_dim = 32;

  /// Throws ErrorCode::kInvalidArgument when a count is out of range.
  void Validate() const;
  bool operator==(const NetworkSpec &) const = default;
};

/// One named parameter.  Rank-1 tensors are stored as 1 x n matrices.
struct Tensor {
  std::string name;
  std::uint32_t rank = 2;
  Matrix value;
};

/// Named parameter set.  Gradients use the same type and layout.
class ModelParams {
 public:
  ModelParams() = default;

  void Add(std::string name, std::uint32_t rank, Matrix value);
  const Matrix &at(std::string_view name) const;
  Matrix &at(std::string_view name);
  bool contains(std::string_view name) const;

  const std::vector<Tensor> &tensors() const { return tensors_; }
  std::vector<Tensor> &tensors() { return tensors_; }
  std::size_t NumValues() const;

  /// Same names and shapes, all zero.
  ModelParams ZerosLike() const;
  bool SameLayout(const ModelParams &other) const;
  /// this += alpha * other
  void Axpy(double alpha, const ModelParams &other);
  void Scale(double alpha);

  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> flat);

  bool AllFinite() const;
  bool BitwiseEqual(const ModelParams &other) const;
  /// 64-bit FNV-1a over names, shapes and value bits.
  std::uint64_t Fingerprint() const;

 private:
  std::vector<Tensor> tensors_;
};

/// Per-layer activations recorded by Forward() for Backward().
struct ForwardCache {
  NetworkSpec spec;
  std::uint64_t params_fingerprint = 0;
  std::size_t frames = 0;
  bool valid = false;

  Matrix input;
  // FSMN: pre-activations / activations per affine layer (input layer first)
  // and memory-block outputs per block.
  std::vector<Matrix> pre;
  std::vector<Matrix> act;
  std::vector<Matrix> mem;
  // LSTM: per layer, inputs, gate activations [i f g o], cells, tanh(cells),
  // cell outputs before projection, projected outputs.
  std::vector<Matrix> lstm_in;
  std::vector<Matrix> gates;
  std::vector<Matrix> cells;
  std::vector<Matrix> cells_tanh;
  std::vector<Matrix> cell_out;
  std::vector<Matrix> proj_out;
  Matrix top;  // input to the output affine layer
};

struct ForwardResult {
  Matrix logits;
  ForwardCache cache;
};

/// Xavier-uniform affine weights, zero biases, zero memory coefficients
/// (each block starts as an identity skip) and LSTM forget-gate bias 1.
ModelParams InitParams(const NetworkSpec &spec, RngStream &rng);

/// Zero-initialized parameters with the layout implied by `spec`.
ModelParams ZeroParams(const NetworkSpec &spec);

/// p_t = h_t + sum_i a_i * h_{t - i*s1} + sum_j b_j * h_{t + j*s2}; frames
/// outside [0, T) contribute zero.  `lookback` is N1 x H, `lookahead` N2 x H.
Matrix FsmnMemoryBlock(const Matrix &h, const Matrix &lookback,
                       const Matrix &lookahead, std::uint32_t stride_back,
                       std::uint32_t stride_ahead);

/// Adjoint of FsmnMemoryBlock.  Accumulates into the three gradient outputs.
void FsmnMemoryBlockBackward(const Matrix &h, const Matrix &lookback,
                             const Matrix &lookahead, std::uint32_t stride_back,
                             std::uint32_t stride_ahead, const Matrix &dp,
                             Matrix *dh, Matrix *dlookback, Matrix *dlookahead);

struct LstmResult {
  Matrix hidden;  // T x lstm_proj_dim
  ForwardCache cache;
};

/// Stacked unidirectional LSTMP layers with zero initial state.
LstmResult LstmForward(const ModelParams &params, const NetworkSpec &spec,
                       const Matrix &features);

/// Gradient of sum(dhidden .* hidden) w.r.t. the LSTM parameters (and the
/// input features when `dfeatures` is non-null).
void LstmBackward(const ModelParams &params, const NetworkSpec &spec,
                  const ForwardCache &cache, const Matrix &dhidden,
                  ModelParams *grads, Matrix *dfeatures = nullptr);

ForwardResult Forward(const ModelParams &params, const NetworkSpec &spec,
                      const Matrix &features);

/// Logits only, no cache retained.
Matrix Logits(const ModelParams &params, const NetworkSpec &spec,
              const Matrix &features);

/// Gradient of sum_t sum_l dlogits[t,l] * logits[t,l] w.r.t. every parameter.
ModelParams Backward(const ModelParams &params, const NetworkSpec &spec,
                     const ForwardCache &cache, const Matrix &dlogits);

// Checkpoint file: "MDST", u32 version, NetworkSpec fields as u32 in
// declaration order, u32 tensor count, then per tensor: u32 name length,
// UTF-8 name, u32 rank, u32 dims, f64 values (all little-endian).
inline constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const ModelParams &params, const NetworkSpec &spec,
                    const std::filesystem::path &path);

struct Checkpoint {
  ModelParams params;
  NetworkSpec spec;
};

Checkpoint LoadCheckpoint(const std::filesystem::path &path);

}  // namespace mdistill

#endif  // MDISTILL_NETGRAPH_HPP_
