// include/mdistill/losses.hpp

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

// Training criteria: hard-label and soft-target cross-entropy, teacher
// ensembles, hard/soft target interpolation, CTC, and best-path decoding.

#ifndef MDISTILL_LOSSES_HPP_
#define MDISTILL_LOSSES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mdistill/numcore.hpp"

namespace mdistill {

using LabelSeq = std::vector<std::uint32_t>;

/// Blank symbol of the CTC output layer.
inline constexpr std::uint32_t kBlank = 0;

/// Tolerance for "row lies on the probability simplex".
inline constexpr double kSimplexTol = 1e-9;

/// Per-frame label posteriors.  Rows are non-negative and sum to one.
struct PosteriorSeq {
  Matrix rows;

  /// Validates `probs` (throws kInvalidArgument when a row is off-simplex).
  static PosteriorSeq FromProbabilities(Matrix probs);
  static PosteriorSeq FromLogits(const Matrix &logits);
  std::size_t frames() const { return rows.rows(); }
  std::size_t labels() const { return rows.cols(); }
};

/// Per-frame training targets.  Same simplex invariant as PosteriorSeq.
struct TargetDistribution {
  Matrix rows;

  static TargetDistribution FromProbabilities(Matrix probs);
  static TargetDistribution OneHot(std::span<const std::uint32_t> labels,
                                   std::size_t num_labels);
};

bool RowsOnSimplex(const Matrix &m, double tol = kSimplexTol);

struct LossResult {
  double loss = 0.0;
  Matrix dlogits;
};

/// Mean over frames of -log softmax(logits)[label].
LossResult HardCe(std::span<const std::uint32_t> frame_labels, const Matrix &logits);

/// Mean over frames of -sum_l target[l] log max(softmax(logits)[l], floor).
/// The teacher term is constant in the student parameters, so the gradient
/// equals that of KL(target || student).
LossResult SoftTargetCe(const TargetDistribution &targets, const Matrix &logits);

/// Mean per-frame entropy of the targets; SoftTargetCe minus this is the KLD.
double MeanEntropy(const TargetDistribution &targets);

/// Frame-wise convex combination sum_k w_k p_k.
PosteriorSeq EnsemblePosterior(std::span<const PosteriorSeq> teacher_posteriors,
                               std::span<const double> weights);

/// (1 - w_hard) * soft + w_hard * one_hot(label), frame by frame.
TargetDistribution InterpolateTargets(const PosteriorSeq &soft,
                                      std::span<const std::uint32_t> frame_labels,
                                      double w_hard);

/// -log p(tokens | x) summed over the utterance (not frame-averaged), with the
/// exact gradient w.r.t. the logits.  Blank is label 0; tokens lie in [1, L).
LossResult CtcLoss(const Matrix &logits, std::span<const std::uint32_t> tokens);

/// Shortest alignment length for `tokens`: K plus one blank per adjacent repeat.
std::size_t CtcMinFrames(std::span<const std::uint32_t> tokens);

/// Exhaustive enumeration of all L^T frame paths.  Verification only.
inline constexpr std::size_t kCtcBruteForceMaxFrames = 10;
double CtcBruteForce(const PosteriorSeq &posteriors, std::span<const std::uint32_t> tokens);

/// (1 - w_hard) * SoftTargetCe + w_hard * CtcLoss.
LossResult CtcMixedLoss(const TargetDistribution &soft_targets, const Matrix &logits,
                        std::span<const std::uint32_t> tokens, double w_hard);

/// Best path: per-frame argmax (ties to lowest id), merge repeats, drop blanks.
LabelSeq GreedyDecode(const PosteriorSeq &posteriors);

/// Per-frame argmax then merge consecutive repeats, no blank symbol.  Works on
/// logits or posteriors alike.
LabelSeq FrameDecode(const Matrix &scores);

/// Merges consecutive duplicates.
LabelSeq Dedup(std::span<const std::uint32_t> labels);

}  // namespace mdistill

#endif  // MDISTILL_LOSSES_HPP_
