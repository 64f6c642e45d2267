// src/losses.cpp

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

#include "mdistill/losses.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mdistill/error.hpp"

namespace mdistill {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

void CheckLabels(std::span<const std::uint32_t> labels, std::size_t frames,
                 std::size_t num_labels) {
  if (labels.size() != frames)
    Fail(ErrorCode::kShapeMismatch, "label count " + std::to_string(labels.size()) +
                                        " != frame count " + std::to_string(frames));
  for (std::uint32_t l : labels)
    if (l >= num_labels)
      Fail(ErrorCode::kInvalidArgument, "label " + std::to_string(l) + " out of range [0, " +
                                            std::to_string(num_labels) + ")");
}

}  // namespace

bool RowsOnSimplex(const Matrix &m, double tol) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (double v : m.row(r)) {
      if (!(v >= 0.0) || !std::isfinite(v)) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

PosteriorSeq PosteriorSeq::FromProbabilities(Matrix probs) {
  if (!RowsOnSimplex(probs)) Fail(ErrorCode::kInvalidArgument, "posterior rows are not on the simplex");
  return PosteriorSeq{std::move(probs)};
}

PosteriorSeq PosteriorSeq::FromLogits(const Matrix &logits) {
  return PosteriorSeq{SoftmaxRows(logits)};
}

TargetDistribution TargetDistribution::FromProbabilities(Matrix probs) {
  if (!RowsOnSimplex(probs)) Fail(ErrorCode::kInvalidArgument, "target rows are not on the simplex");
  return TargetDistribution{std::move(probs)};
}

TargetDistribution TargetDistribution::OneHot(std::span<const std::uint32_t> labels,
                                              std::size_t num_labels) {
  CheckLabels(labels, labels.size(), num_labels);
  Matrix m(labels.size(), num_labels);
  for (std::size_t t = 0; t < labels.size(); ++t) m(t, labels[t]) = 1.0;
  return TargetDistribution{std::move(m)};
}

LossResult HardCe(std::span<const std::uint32_t> frame_labels, const Matrix &logits) {
  CheckLabels(frame_labels, logits.rows(), logits.cols());
  const std::size_t T = logits.rows();
  if (T == 0) Fail(ErrorCode::kInvalidArgument, "hard_ce on empty sequence");
  LossResult res;
  res.dlogits = SoftmaxRows(logits);
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    auto row = res.dlogits.row(t);
    const std::uint32_t l = frame_labels[t];
    double frame = 0.0;
    // Same accumulation as SoftTargetCe, so one-hot targets agree bit for bit.
    for (std::size_t k = 0; k < row.size(); ++k)
      frame += (k == l ? 1.0 : 0.0) * -std::log(std::max(row[k], kProbFloor));
    total += frame;
    row[l] -= 1.0;
    for (double &v : row) v /= static_cast<double>(T);
  }
  res.loss = total / static_cast<double>(T);
  return res;
}

LossResult SoftTargetCe(const TargetDistribution &targets, const Matrix &logits) {
  if (!targets.rows.SameShape(logits))
    Fail(ErrorCode::kShapeMismatch, "soft_target_ce: targets and logits differ in shape");
  if (!RowsOnSimplex(targets.rows))
    Fail(ErrorCode::kInvalidArgument, "soft_target_ce: target rows are not on the simplex");
  const std::size_t T = logits.rows();
  if (T == 0) Fail(ErrorCode::kInvalidArgument, "soft_target_ce on empty sequence");
  LossResult res;
  res.dlogits = SoftmaxRows(logits);
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    auto row = res.dlogits.row(t);
    auto tgt = targets.rows.row(t);
    double frame = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k)
      frame += tgt[k] * -std::log(std::max(row[k], kProbFloor));
    total += frame;
    for (std::size_t k = 0; k < row.size(); ++k)
      row[k] = (row[k] - tgt[k]) / static_cast<double>(T);
  }
  res.loss = total / static_cast<double>(T);
  return res;
}

double MeanEntropy(const TargetDistribution &targets) {
  const std::size_t T = targets.rows.rows();
  if (T == 0) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t)
    for (double p : targets.rows.row(t))
      if (p > 0.0) total -= p * std::log(std::max(p, kProbFloor));
  return total / static_cast<double>(T);
}

PosteriorSeq EnsemblePosterior(std::span<const PosteriorSeq> teacher_posteriors,
                               std::span<const double> weights) {
  if (teacher_posteriors.empty()) Fail(ErrorCode::kInvalidArgument, "ensemble of zero teachers");
  if (weights.size() != teacher_posteriors.size())
    Fail(ErrorCode::kShapeMismatch, "ensemble weight count != teacher count");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) Fail(ErrorCode::kInvalidArgument, "ensemble weights must be >= 0");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kSimplexTol)
    Fail(ErrorCode::kInvalidArgument, "ensemble weights must sum to 1");
  const Matrix &first = teacher_posteriors.front().rows;
  Matrix out(first.rows(), first.cols());
  for (std::size_t k = 0; k < teacher_posteriors.size(); ++k) {
    const Matrix &p = teacher_posteriors[k].rows;
    if (!p.SameShape(first)) Fail(ErrorCode::kShapeMismatch, "teacher posteriors differ in shape");
    auto dst = out.values();
    auto src = p.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weights[k] * src[i];
  }
  return PosteriorSeq{std::move(out)};
}

TargetDistribution InterpolateTargets(const PosteriorSeq &soft,
                                      std::span<const std::uint32_t> frame_labels,
                                      double w_hard) {
  if (!(w_hard >= 0.0 && w_hard <= 1.0))
    Fail(ErrorCode::kInvalidArgument, "w_hard must lie in [0, 1]");
  CheckLabels(frame_labels, soft.frames(), soft.labels());
  Matrix out(soft.frames(), soft.labels());
  for (std::size_t t = 0; t < soft.frames(); ++t) {
    auto src = soft.rows.row(t);
    auto dst = out.row(t);
    for (std::size_t k = 0; k < dst.size(); ++k)
      dst[k] = (1.0 - w_hard) * src[k] + (k == frame_labels[t] ? w_hard : 0.0);
  }
  return TargetDistribution{std::move(out)};
}

std::size_t CtcMinFrames(std::span<const std::uint32_t> tokens) {
  std::size_t n = tokens.size();
  for (std::size_t i = 1; i < tokens.size(); ++i)
    if (tokens[i] == tokens[i - 1]) ++n;
  return n;
}

LossResult CtcLoss(const Matrix &logits, std::span<const std::uint32_t> tokens) {
  const std::size_t T = logits.rows(), L = logits.cols();
  if (tokens.empty()) Fail(ErrorCode::kInvalidArgument, "ctc: empty token sequence");
  for (std::uint32_t tok : tokens)
    if (tok == kBlank || tok >= L)
      Fail(ErrorCode::kInvalidArgument, "ctc: token " + std::to_string(tok) + " outside [1, L)");
  if (T < CtcMinFrames(tokens)) Fail(ErrorCode::kNoValidAlignment, "no valid alignment");

  // Log-posteriors, computed directly so they never underflow.
  Matrix lp(T, L);
  if (!logits.AllFinite()) Fail(ErrorCode::kNonFinite, "non-finite logits");
  for (std::size_t t = 0; t < T; ++t) {
    const double lse = LogSumExp(logits.row(t));
    for (std::size_t k = 0; k < L; ++k) lp(t, k) = logits(t, k) - lse;
  }

  const std::size_t S = 2 * tokens.size() + 1;
  std::vector<std::uint32_t> ext(S, kBlank);
  for (std::size_t i = 0; i < tokens.size(); ++i) ext[2 * i + 1] = tokens[i];
  auto can_skip = [&](std::size_t s) {
    return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2];
  };

  Matrix alpha(T, S, kNegInf), beta(T, S, kNegInf);
  alpha(0, 0) = lp(0, ext[0]);
  if (S > 1) alpha(0, 1) = lp(0, ext[1]);
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = LogAdd(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = LogAdd(a, alpha(t - 1, s - 2));
      alpha(t, s) = a == kNegInf ? kNegInf : a + lp(t, ext[s]);
    }
  beta(T - 1, S - 1) = lp(T - 1, ext[S - 1]);
  beta(T - 1, S - 2) = lp(T - 1, ext[S - 2]);
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t s = 0; s < S; ++s) {
      double b = beta(t + 1, s);
      if (s + 1 < S) b = LogAdd(b, beta(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = LogAdd(b, beta(t + 1, s + 2));
      beta(t, s) = b == kNegInf ? kNegInf : b + lp(t, ext[s]);
    }

  const double loglik = LogAdd(alpha(T - 1, S - 1), alpha(T - 1, S - 2));
  if (loglik == kNegInf) Fail(ErrorCode::kNoValidAlignment, "no valid alignment");

  LossResult res;
  res.loss = -loglik;
  res.dlogits = Matrix(T, L);
  for (std::size_t t = 0; t < T; ++t) {
    auto row = res.dlogits.row(t);
    for (std::size_t k = 0; k < L; ++k) row[k] = std::exp(lp(t, k));
    for (std::size_t s = 0; s < S; ++s) {
      const double ab = alpha(t, s) + beta(t, s);
      if (ab == kNegInf) continue;
      row[ext[s]] -= std::exp(ab - lp(t, ext[s]) - loglik);
    }
  }
  return res;
}

double CtcBruteForce(const PosteriorSeq &posteriors, std::span<const std::uint32_t> tokens) {
  const std::size_t T = posteriors.frames(), L = posteriors.labels();
  if (T > kCtcBruteForceMaxFrames)
    Fail(ErrorCode::kInvalidArgument, "ctc brute force limited to " +
                                          std::to_string(kCtcBruteForceMaxFrames) + " frames");
  if (T == 0 || L == 0) Fail(ErrorCode::kInvalidArgument, "ctc brute force on empty posteriors");

  std::vector<std::uint32_t> path(T, 0);
  LabelSeq collapsed;
  collapsed.reserve(T);
  double total = 0.0;
  for (bool done = false; !done;) {
    collapsed.clear();
    double prob = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
      prob *= posteriors.rows(t, path[t]);
      if (path[t] != kBlank && (t == 0 || path[t] != path[t - 1])) collapsed.push_back(path[t]);
    }
    if (collapsed.size() == tokens.size() &&
        std::equal(collapsed.begin(), collapsed.end(), tokens.begin()))
      total += prob;
    // Odometer increment over the frame labels.
    for (std::size_t pos = T;;) {
      if (pos == 0) {
        done = true;
        break;
      }
      --pos;
      if (++path[pos] < L) break;
      path[pos] = 0;
    }
  }
  if (!(total > 0.0)) Fail(ErrorCode::kNoValidAlignment, "no valid alignment");
  return -std::log(total);
}

LossResult CtcMixedLoss(const TargetDistribution &soft_targets, const Matrix &logits,
                        std::span<const std::uint32_t> tokens, double w_hard) {
  if (!(w_hard >= 0.0 && w_hard <= 1.0))
    Fail(ErrorCode::kInvalidArgument, "w_hard must lie in [0, 1]");
  LossResult frame = SoftTargetCe(soft_targets, logits);
  LossResult ctc = CtcLoss(logits, tokens);
  LossResult res;
  res.loss = (1.0 - w_hard) * frame.loss + w_hard * ctc.loss;
  res.dlogits = Matrix(logits.rows(), logits.cols());
  auto dst = res.dlogits.values();
  auto a = frame.dlogits.values();
  auto b = ctc.dlogits.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (1.0 - w_hard) * a[i] + w_hard * b[i];
  return res;
}

LabelSeq Dedup(std::span<const std::uint32_t> labels) {
  LabelSeq out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (i == 0 || labels[i] != labels[i - 1]) out.push_back(labels[i]);
  return out;
}

LabelSeq FrameDecode(const Matrix &scores) {
  LabelSeq best(scores.rows());
  for (std::size_t t = 0; t < scores.rows(); ++t)
    best[t] = static_cast<std::uint32_t>(ArgMax(scores.row(t)));
  return Dedup(best);
}

LabelSeq GreedyDecode(const PosteriorSeq &posteriors) {
  LabelSeq merged = FrameDecode(posteriors.rows);
  LabelSeq out;
  for (std::uint32_t l : merged)
    if (l != kBlank) out.push_back(l);
  return out;
}

}  // namespace mdistill
