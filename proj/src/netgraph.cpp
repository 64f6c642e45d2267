// src/netgraph.cpp

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

#include "mdistill/netgraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "mdistill/error.hpp"
#include "mdistill/kernels.hpp"

namespace mdistill {

namespace kn = kernels;

std::string_view ArchitectureName(Architecture arch) {
  return arch == Architecture::kFsmn ? "fsmn" : "lstm";
}

Architecture ParseArchitecture(std::string_view name) {
  if (name == "fsmn" || name == "FSMN") return Architecture::kFsmn;
  if (name == "lstm" || name == "LSTM") return Architecture::kLstm;
  Fail(ErrorCode::kInvalidArgument, "unknown architecture '" + std::string(name) + "'");
}

void NetworkSpec::Validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, std::string("invalid network spec: ") + what);
  };
  require(architecture == Architecture::kFsmn || architecture == Architecture::kLstm,
          "architecture");
  require(input_dim >= 1, "input_dim must be >= 1");
  require(hidden_dim >= 1, "hidden_dim must be >= 1");
  require(output_dim >= 2, "output_dim must be >= 2");
  require(fsmn_blocks >= 1, "fsmn_blocks must be >= 1");
  require(lookback_order >= 1, "lookback_order must be >= 1");
  require(stride_back >= 1, "stride_back must be >= 1");
  require(stride_ahead >= 1, "stride_ahead must be >= 1");
  require(lstm_layers >= 1, "lstm_layers must be >= 1");
  require(lstm_proj_dim >= 1, "lstm_proj_dim must be >= 1");
}

// ---------------------------------------------------------------------------
// ModelParams

void ModelParams::Add(std::string name, std::uint32_t rank, Matrix value) {
  if (contains(name)) Fail(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  tensors_.push_back({std::move(name), rank, std::move(value)});
}

const Matrix &ModelParams::at(std::string_view name) const {
  for (const auto &t : tensors_)
    if (t.name == name) return t.value;
  Fail(ErrorCode::kInvalidArgument, "no parameter named " + std::string(name));
}

Matrix &ModelParams::at(std::string_view name) {
  return const_cast<Matrix &>(std::as_const(*this).at(name));
}

bool ModelParams::contains(std::string_view name) const {
  return std::any_of(tensors_.begin(), tensors_.end(),
                     [&](const Tensor &t) { return t.name == name; });
}

std::size_t ModelParams::NumValues() const {
  std::size_t n = 0;
  for (const auto &t : tensors_) n += t.value.size();
  return n;
}

ModelParams ModelParams::ZerosLike() const {
  ModelParams out;
  for (const auto &t : tensors_)
    out.tensors_.push_back({t.name, t.rank, Matrix(t.value.rows(), t.value.cols())});
  return out;
}

bool ModelParams::SameLayout(const ModelParams &other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const auto &a = tensors_[i];
    const auto &b = other.tensors_[i];
    if (a.name != b.name || a.rank != b.rank || !a.value.SameShape(b.value)) return false;
  }
  return true;
}

void ModelParams::Axpy(double alpha, const ModelParams &other) {
  if (!SameLayout(other)) Fail(ErrorCode::kShapeMismatch, "Axpy: parameter layouts differ");
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    auto dst = tensors_[i].value.values();
    auto src = other.tensors_[i].value.values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += alpha * src[k];
  }
}

void ModelParams::Scale(double alpha) {
  for (auto &t : tensors_)
    for (double &v : t.value.values()) v *= alpha;
}

std::vector<double> ModelParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(NumValues());
  for (const auto &t : tensors_)
    flat.insert(flat.end(), t.value.values().begin(), t.value.values().end());
  return flat;
}

void ModelParams::Unflatten(std::span<const double> flat) {
  if (flat.size() != NumValues())
    Fail(ErrorCode::kShapeMismatch, "Unflatten: wrong number of values");
  std::size_t off = 0;
  for (auto &t : tensors_) {
    auto dst = t.value.values();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), dst.size(), dst.begin());
    off += dst.size();
  }
}

bool ModelParams::AllFinite() const {
  return std::all_of(tensors_.begin(), tensors_.end(),
                     [](const Tensor &t) { return t.value.AllFinite(); });
}

bool ModelParams::BitwiseEqual(const ModelParams &other) const {
  if (!SameLayout(other)) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i)
    if (!tensors_[i].value.BitwiseEqual(other.tensors_[i].value)) return false;
  return true;
}

std::uint64_t ModelParams::Fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto &t : tensors_) {
    for (char c : t.name) mix(static_cast<unsigned char>(c));
    mix(t.value.rows());
    mix(t.value.cols());
    for (double v : t.value.values()) mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Layout and initialization

namespace {

std::string BlockName(std::uint32_t k, const char *field) {
  return "blk" + std::to_string(k) + "." + field;
}
std::string LstmName(std::uint32_t k, const char *field) {
  return "lstm" + std::to_string(k) + "." + field;
}

// Appends the tensors for `spec`, filled by `make(name, rows, cols, kind)`.
enum class Kind { kWeight, kBias, kMemory, kForgetBias };

template <typename Make>
ModelParams BuildLayout(const NetworkSpec &spec, Make make) {
  spec.Validate();
  ModelParams p;
  const std::uint32_t H = spec.hidden_dim;
  auto weight = [&](const std::string &name, std::size_t r, std::size_t c) {
    p.Add(name, 2, make(r, c, Kind::kWeight));
  };
  auto bias = [&](const std::string &name, std::size_t n, Kind kind = Kind::kBias) {
    p.Add(name, 1, make(1, n, kind));
  };
  if (spec.architecture == Architecture::kFsmn) {
    weight("in.W", spec.input_dim, H);
    bias("in.b", H);
    for (std::uint32_t k = 1; k <= spec.fsmn_blocks; ++k) {
      p.Add(BlockName(k, "a"), 2, make(spec.lookback_order, H, Kind::kMemory));
      p.Add(BlockName(k, "b"), 2, make(spec.lookahead_order, H, Kind::kMemory));
      weight(BlockName(k, "W"), H, H);
      bias(BlockName(k, "bias"), H);
    }
    weight("out.W", H, spec.output_dim);
  } else {
    const std::uint32_t P = spec.lstm_proj_dim;
    for (std::uint32_t k = 1; k <= spec.lstm_layers; ++k) {
      const std::uint32_t in = k == 1 ? spec.input_dim : P;
      weight(LstmName(k, "Wx"), in, 4 * H);
      weight(LstmName(k, "Wr"), P, 4 * H);
      bias(LstmName(k, "b"), 4 * H, Kind::kForgetBias);
      weight(LstmName(k, "Wp"), H, P);
    }
    weight("out.W", P, spec.output_dim);
  }
  bias("out.b", spec.output_dim);
  return p;
}

}  // namespace

ModelParams InitParams(const NetworkSpec &spec, RngStream &rng) {
  const std::uint32_t H = spec.hidden_dim;
  return BuildLayout(spec, [&](std::size_t r, std::size_t c, Kind kind) {
    Matrix m(r, c);
    switch (kind) {
      case Kind::kWeight: {
        const double bound = std::sqrt(6.0 / static_cast<double>(r + c));
        for (double &v : m.values()) v = rng.Uniform(-bound, bound);
        break;
      }
      case Kind::kForgetBias:
        for (std::uint32_t j = H; j < 2 * H; ++j) m(0, j) = 1.0;
        break;
      case Kind::kBias:
      case Kind::kMemory:
        break;
    }
    return m;
  });
}

ModelParams ZeroParams(const NetworkSpec &spec) {
  return BuildLayout(spec, [](std::size_t r, std::size_t c, Kind) { return Matrix(r, c); });
}

// ---------------------------------------------------------------------------
// FSMN memory block

Matrix FsmnMemoryBlock(const Matrix &h, const Matrix &lookback, const Matrix &lookahead,
                       std::uint32_t stride_back, std::uint32_t stride_ahead) {
  const std::size_t T = h.rows(), H = h.cols();
  if (lookback.cols() != H || lookahead.cols() != H)
    Fail(ErrorCode::kShapeMismatch, "memory block: coefficient width differs from hidden width");
  Matrix p = h;
  for (std::size_t t = 0; t < T; ++t) {
    auto out = p.row(t);
    for (std::size_t i = 1; i <= lookback.rows(); ++i) {
      const std::size_t back = i * stride_back;
      if (back > t) break;
      auto src = h.row(t - back);
      auto coef = lookback.row(i - 1);
      for (std::size_t c = 0; c < H; ++c) out[c] += coef[c] * src[c];
    }
    for (std::size_t j = 1; j <= lookahead.rows(); ++j) {
      const std::size_t ahead = t + j * stride_ahead;
      if (ahead >= T) break;
      auto src = h.row(ahead);
      auto coef = lookahead.row(j - 1);
      for (std::size_t c = 0; c < H; ++c) out[c] += coef[c] * src[c];
    }
  }
  return p;
}

void FsmnMemoryBlockBackward(const Matrix &h, const Matrix &lookback,
                             const Matrix &lookahead, std::uint32_t stride_back,
                             std::uint32_t stride_ahead, const Matrix &dp, Matrix *dh,
                             Matrix *dlookback, Matrix *dlookahead) {
  const std::size_t T = h.rows(), H = h.cols();
  if (!dp.SameShape(h) || !dh->SameShape(h) || !dlookback->SameShape(lookback) ||
      !dlookahead->SameShape(lookahead))
    Fail(ErrorCode::kShapeMismatch, "memory block backward: shape mismatch");
  for (std::size_t t = 0; t < T; ++t) {
    auto g = dp.row(t);
    auto self = dh->row(t);
    for (std::size_t c = 0; c < H; ++c) self[c] += g[c];
    for (std::size_t i = 1; i <= lookback.rows(); ++i) {
      const std::size_t back = i * stride_back;
      if (back > t) break;
      auto src = h.row(t - back);
      auto coef = lookback.row(i - 1);
      auto dsrc = dh->row(t - back);
      auto dcoef = dlookback->row(i - 1);
      for (std::size_t c = 0; c < H; ++c) {
        dsrc[c] += coef[c] * g[c];
        dcoef[c] += src[c] * g[c];
      }
    }
    for (std::size_t j = 1; j <= lookahead.rows(); ++j) {
      const std::size_t ahead = t + j * stride_ahead;
      if (ahead >= T) break;
      auto src = h.row(ahead);
      auto coef = lookahead.row(j - 1);
      auto dsrc = dh->row(ahead);
      auto dcoef = dlookahead->row(j - 1);
      for (std::size_t c = 0; c < H; ++c) {
        dsrc[c] += coef[c] * g[c];
        dcoef[c] += src[c] * g[c];
      }
    }
  }
}

// ---------------------------------------------------------------------------
// LSTM with recurrent projection

namespace {

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void CheckInput(const NetworkSpec &spec, const Matrix &features) {
  if (features.cols() != spec.input_dim)
    Fail(ErrorCode::kShapeMismatch,
         "feature dim " + std::to_string(features.cols()) + " != spec input_dim " +
             std::to_string(spec.input_dim));
  if (features.rows() == 0) Fail(ErrorCode::kShapeMismatch, "empty feature sequence");
}

void CheckLayout(const ModelParams &params, const NetworkSpec &spec) {
  if (!params.SameLayout(ZeroParams(spec)))
    Fail(ErrorCode::kShapeMismatch, "parameters do not match network spec");
}

}  // namespace

LstmResult LstmForward(const ModelParams &params, const NetworkSpec &spec,
                       const Matrix &features) {
  if (spec.architecture != Architecture::kLstm)
    Fail(ErrorCode::kInvalidArgument, "LstmForward on a non-LSTM spec");
  CheckInput(spec, features);
  CheckLayout(params, spec);
  const std::size_t T = features.rows(), C = spec.hidden_dim, P = spec.lstm_proj_dim;

  LstmResult res;
  ForwardCache &cache = res.cache;
  cache.spec = spec;
  cache.frames = T;
  cache.input = features;

  Matrix layer_in = features;
  for (std::uint32_t k = 1; k <= spec.lstm_layers; ++k) {
    const Matrix &Wx = params.at(LstmName(k, "Wx"));
    const Matrix &Wr = params.at(LstmName(k, "Wr"));
    const Matrix &b = params.at(LstmName(k, "b"));
    const Matrix &Wp = params.at(LstmName(k, "Wp"));

    Matrix gates;
    kn::GemmNN(layer_in, Wx, &gates);
    kn::AddRowVector(b, &gates);
    Matrix cells(T, C), cells_tanh(T, C), cell_out(T, C), proj(T, P);
    for (std::size_t t = 0; t < T; ++t) {
      auto g = gates.row(t);
      if (t > 0) {
        auto rprev = proj.row(t - 1);
        for (std::size_t p = 0; p < P; ++p) {
          const double rv = rprev[p];
          auto wr = Wr.row(p);
          for (std::size_t j = 0; j < 4 * C; ++j) g[j] += rv * wr[j];
        }
      }
      for (std::size_t c = 0; c < C; ++c) {
        const double i = Sigmoid(g[c]);
        const double f = Sigmoid(g[C + c]);
        const double gg = std::tanh(g[2 * C + c]);
        const double o = Sigmoid(g[3 * C + c]);
        g[c] = i;
        g[C + c] = f;
        g[2 * C + c] = gg;
        g[3 * C + c] = o;
        const double cprev = t > 0 ? cells(t - 1, c) : 0.0;
        const double cell = f * cprev + i * gg;
        cells(t, c) = cell;
        cells_tanh(t, c) = std::tanh(cell);
        cell_out(t, c) = o * cells_tanh(t, c);
      }
      auto m = cell_out.row(t);
      auto r = proj.row(t);
      for (std::size_t c = 0; c < C; ++c) {
        const double mv = m[c];
        auto wp = Wp.row(c);
        for (std::size_t p = 0; p < P; ++p) r[p] += mv * wp[p];
      }
    }
    cache.lstm_in.push_back(std::move(layer_in));
    cache.gates.push_back(std::move(gates));
    cache.cells.push_back(std::move(cells));
    cache.cells_tanh.push_back(std::move(cells_tanh));
    cache.cell_out.push_back(std::move(cell_out));
    cache.proj_out.push_back(proj);
    layer_in = std::move(proj);
  }
  res.hidden = std::move(layer_in);
  cache.params_fingerprint = params.Fingerprint();
  cache.valid = true;
  return res;
}

void LstmBackward(const ModelParams &params, const NetworkSpec &spec,
                  const ForwardCache &cache, const Matrix &dhidden, ModelParams *grads,
                  Matrix *dfeatures) {
  if (!cache.valid || cache.spec != spec || cache.gates.size() != spec.lstm_layers ||
      cache.params_fingerprint != params.Fingerprint())
    Fail(ErrorCode::kStaleCache, "LSTM cache does not match this network");
  const std::size_t T = cache.frames, C = spec.hidden_dim, P = spec.lstm_proj_dim;
  if (dhidden.rows() != T || dhidden.cols() != P)
    Fail(ErrorCode::kShapeMismatch, "LSTM backward: output gradient shape");

  Matrix dR = dhidden;
  for (std::uint32_t k = spec.lstm_layers; k >= 1; --k) {
    const std::size_t li = k - 1;
    const Matrix &Wx = params.at(LstmName(k, "Wx"));
    const Matrix &Wr = params.at(LstmName(k, "Wr"));
    const Matrix &Wp = params.at(LstmName(k, "Wp"));
    const Matrix &gates = cache.gates[li];
    const Matrix &cells = cache.cells[li];
    const Matrix &cells_tanh = cache.cells_tanh[li];
    const Matrix &proj = cache.proj_out[li];

    Matrix dG(T, 4 * C), dRtot(T, P);
    std::vector<double> dr_rec(P, 0.0), dc_next(C, 0.0), dm(C);
    for (std::size_t tt = T; tt-- > 0;) {
      auto drt = dRtot.row(tt);
      for (std::size_t p = 0; p < P; ++p) drt[p] = dR(tt, p) + dr_rec[p];
      for (std::size_t c = 0; c < C; ++c) {
        auto wp = Wp.row(c);
        double s = 0.0;
        for (std::size_t p = 0; p < P; ++p) s += wp[p] * drt[p];
        dm[c] = s;
      }
      auto g = gates.row(tt);
      auto dg = dG.row(tt);
      for (std::size_t c = 0; c < C; ++c) {
        const double i = g[c], f = g[C + c], gg = g[2 * C + c], o = g[3 * C + c];
        const double tc = cells_tanh(tt, c);
        const double cprev = tt > 0 ? cells(tt - 1, c) : 0.0;
        const double d_o = dm[c] * tc;
        const double dc = dc_next[c] + dm[c] * o * (1.0 - tc * tc);
        dg[c] = dc * gg * i * (1.0 - i);
        dg[C + c] = dc * cprev * f * (1.0 - f);
        dg[2 * C + c] = dc * i * (1.0 - gg * gg);
        dg[3 * C + c] = d_o * o * (1.0 - o);
        dc_next[c] = dc * f;
      }
      for (std::size_t p = 0; p < P; ++p) {
        auto wr = Wr.row(p);
        double s = 0.0;
        for (std::size_t j = 0; j < 4 * C; ++j) s += wr[j] * dg[j];
        dr_rec[p] = s;
      }
    }
    // Row t of rprev holds r_{t-1}; row 0 is the zero initial state.
    Matrix rprev(T, P);
    for (std::size_t t = 1; t < T; ++t)
      std::copy_n(proj.row(t - 1).begin(), P, rprev.row(t).begin());

    kn::GemmTN(cache.cell_out[li], dRtot, &grads->at(LstmName(k, "Wp")), true);
    kn::GemmTN(cache.lstm_in[li], dG, &grads->at(LstmName(k, "Wx")), true);
    kn::GemmTN(rprev, dG, &grads->at(LstmName(k, "Wr")), true);
    kn::AccumulateColumnSums(dG, &grads->at(LstmName(k, "b")));
    if (k > 1 || dfeatures != nullptr) {
      Matrix dX;
      kn::GemmNT(dG, Wx, &dX);
      if (k > 1)
        dR = std::move(dX);
      else
        *dfeatures = std::move(dX);
    }
  }
}

// ---------------------------------------------------------------------------
// Whole network

namespace {

void ReluInPlace(Matrix *m) {
  for (double &v : m->values()) v = v > 0.0 ? v : 0.0;
}

// dz = dh .* (z > 0)
Matrix ReluBackward(const Matrix &pre, const Matrix &dact) {
  Matrix dz(pre.rows(), pre.cols());
  auto z = pre.values();
  auto d = dact.values();
  auto out = dz.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = z[i] > 0.0 ? d[i] : 0.0;
  return dz;
}

}  // namespace

ForwardResult Forward(const ModelParams &params, const NetworkSpec &spec,
                      const Matrix &features) {
  ForwardResult res;
  if (spec.architecture == Architecture::kLstm) {
    LstmResult lstm = LstmForward(params, spec, features);
    res.cache = std::move(lstm.cache);
    res.cache.top = std::move(lstm.hidden);
  } else {
    CheckInput(spec, features);
    CheckLayout(params, spec);
    ForwardCache &cache = res.cache;
    cache.spec = spec;
    cache.frames = features.rows();
    cache.input = features;

    Matrix z;
    kn::GemmNN(features, params.at("in.W"), &z);
    kn::AddRowVector(params.at("in.b"), &z);
    Matrix h = z;
    ReluInPlace(&h);
    cache.pre.push_back(std::move(z));
    for (std::uint32_t k = 1; k <= spec.fsmn_blocks; ++k) {
      Matrix p = FsmnMemoryBlock(h, params.at(BlockName(k, "a")),
                                 params.at(BlockName(k, "b")), spec.stride_back,
                                 spec.stride_ahead);
      Matrix zk;
      kn::GemmNN(p, params.at(BlockName(k, "W")), &zk);
      kn::AddRowVector(params.at(BlockName(k, "bias")), &zk);
      cache.act.push_back(std::move(h));
      cache.mem.push_back(std::move(p));
      h = zk;
      ReluInPlace(&h);
      cache.pre.push_back(std::move(zk));
    }
    cache.top = std::move(h);
    cache.params_fingerprint = params.Fingerprint();
    cache.valid = true;
  }
  kn::GemmNN(res.cache.top, params.at("out.W"), &res.logits);
  kn::AddRowVector(params.at("out.b"), &res.logits);
  return res;
}

Matrix Logits(const ModelParams &params, const NetworkSpec &spec, const Matrix &features) {
  return Forward(params, spec, features).logits;
}

ModelParams Backward(const ModelParams &params, const NetworkSpec &spec,
                     const ForwardCache &cache, const Matrix &dlogits) {
  if (!cache.valid || cache.spec != spec || cache.params_fingerprint != params.Fingerprint())
    Fail(ErrorCode::kStaleCache, "forward cache is stale or belongs to another model");
  if (dlogits.rows() != cache.frames || dlogits.cols() != spec.output_dim)
    Fail(ErrorCode::kShapeMismatch, "dlogits shape does not match forward output");

  ModelParams grads = params.ZerosLike();
  kn::GemmTN(cache.top, dlogits, &grads.at("out.W"), true);
  kn::AccumulateColumnSums(dlogits, &grads.at("out.b"));
  Matrix dtop;
  kn::GemmNT(dlogits, params.at("out.W"), &dtop);

  if (spec.architecture == Architecture::kLstm) {
    LstmBackward(params, spec, cache, dtop, &grads);
    return grads;
  }

  Matrix dh = std::move(dtop);
  for (std::uint32_t k = spec.fsmn_blocks; k >= 1; --k) {
    Matrix dz = ReluBackward(cache.pre[k], dh);
    kn::GemmTN(cache.mem[k - 1], dz, &grads.at(BlockName(k, "W")), true);
    kn::AccumulateColumnSums(dz, &grads.at(BlockName(k, "bias")));
    Matrix dp;
    kn::GemmNT(dz, params.at(BlockName(k, "W")), &dp);
    const Matrix &hin = cache.act[k - 1];
    Matrix dhin(hin.rows(), hin.cols());
    FsmnMemoryBlockBackward(hin, params.at(BlockName(k, "a")), params.at(BlockName(k, "b")),
                            spec.stride_back, spec.stride_ahead, dp, &dhin,
                            &grads.at(BlockName(k, "a")), &grads.at(BlockName(k, "b")));
    dh = std::move(dhin);
  }
  Matrix dz0 = ReluBackward(cache.pre[0], dh);
  kn::GemmTN(cache.input, dz0, &grads.at("in.W"), true);
  kn::AccumulateColumnSums(dz0, &grads.at("in.b"));
  return grads;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kCheckpointMagic[4] = {'M', 'D', 'S', 'T'};

std::array<std::uint32_t, 11> SpecFields(const NetworkSpec &s) {
  return {static_cast<std::uint32_t>(s.architecture),
          s.input_dim,
          s.hidden_dim,
          s.output_dim,
          s.fsmn_blocks,
          s.lookback_order,
          s.lookahead_order,
          s.stride_back,
          s.stride_ahead,
          s.lstm_layers,
          s.lstm_proj_dim};
}

}  // namespace

void SaveCheckpoint(const ModelParams &params, const NetworkSpec &spec,
                    const std::filesystem::path &path) {
  CheckLayout(params, spec);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  binio::WriteBytes(os, kCheckpointMagic, 4);
  binio::WriteU32(os, kCheckpointVersion);
  for (std::uint32_t f : SpecFields(spec)) binio::WriteU32(os, f);
  binio::WriteU32(os, static_cast<std::uint32_t>(params.tensors().size()));
  for (const auto &t : params.tensors()) {
    binio::WriteU32(os, static_cast<std::uint32_t>(t.name.size()));
    binio::WriteBytes(os, t.name.data(), t.name.size());
    binio::WriteU32(os, t.rank);
    if (t.rank == 2) binio::WriteU32(os, static_cast<std::uint32_t>(t.value.rows()));
    binio::WriteU32(os, static_cast<std::uint32_t>(t.value.cols()));
    binio::WriteF64Array(os, t.value.data(), t.value.size());
  }
  if (!os) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  constexpr const char *kTrunc = "truncated checkpoint";

  char magic[4];
  binio::ReadBytes(is, magic, 4, kTrunc);
  if (!std::equal(magic, magic + 4, kCheckpointMagic))
    Fail(ErrorCode::kBadMagic, "bad magic in " + path.string());
  const std::uint32_t version = binio::ReadU32(is, kTrunc);
  if (version != kCheckpointVersion)
    Fail(ErrorCode::kVersionMismatch,
         "checkpoint version " + std::to_string(version) + " is not supported");

  std::array<std::uint32_t, 11> f;
  for (auto &v : f) v = binio::ReadU32(is, kTrunc);
  if (f[0] > 1) Fail(ErrorCode::kHeaderInconsistent, "unknown architecture id in checkpoint");
  Checkpoint ck;
  ck.spec = NetworkSpec{static_cast<Architecture>(f[0]), f[1], f[2], f[3], f[4], f[5],
                        f[6],                            f[7], f[8], f[9], f[10]};
  ModelParams expected;
  try {
    expected = ZeroParams(ck.spec);
  } catch (const Error &e) {
    Fail(ErrorCode::kHeaderInconsistent, std::string("checkpoint spec invalid: ") + e.what());
  }

  const std::uint32_t count = binio::ReadU32(is, kTrunc);
  if (count != expected.tensors().size())
    Fail(ErrorCode::kHeaderInconsistent, "checkpoint tensor count does not match its spec");
  for (auto &t : expected.tensors()) {
    const std::uint32_t name_len = binio::ReadU32(is, kTrunc);
    if (name_len > 4096) Fail(ErrorCode::kHeaderInconsistent, "implausible tensor name length");
    std::string name(name_len, '\0');
    binio::ReadBytes(is, name.data(), name_len, kTrunc);
    const std::uint32_t rank = binio::ReadU32(is, kTrunc);
    if (rank != 1 && rank != 2) Fail(ErrorCode::kHeaderInconsistent, "bad tensor rank");
    std::uint32_t rows = 1;
    if (rank == 2) rows = binio::ReadU32(is, kTrunc);
    const std::uint32_t cols = binio::ReadU32(is, kTrunc);
    if (name != t.name || rank != t.rank || rows != t.value.rows() || cols != t.value.cols())
      Fail(ErrorCode::kHeaderInconsistent,
           "tensor '" + name + "' does not match the layout implied by the spec");
    binio::ReadF64Array(is, t.value.data(), t.value.size(), kTrunc);
  }
  if (!binio::AtEnd(is))
    Fail(ErrorCode::kHeaderInconsistent, "trailing bytes after last tensor");
  ck.params = std::move(expected);
  return ck;
}

}  // namespace mdistill
