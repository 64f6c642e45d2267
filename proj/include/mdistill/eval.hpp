// include/mdistill/eval.hpp

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

// Scoring: frame accuracy, token error rate via edit distance, per-domain
// result grids with relative change against a baseline, learning curves.

#ifndef MDISTILL_EVAL_HPP_
#define MDISTILL_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdistill/trainer.hpp"

namespace mdistill {

struct EditCounts {
  std::uint64_t substitutions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;

  std::uint64_t total() const { return substitutions + deletions + insertions; }
  bool operator==(const EditCounts &) const = default;
};

/// Minimal edit counts turning `ref` into `hyp`.  Among minimal alignments the
/// one with the most substitutions is reported (substitution is preferred to a
/// deletion, and deletion to an insertion), which makes the counts unique:
/// swapping the arguments keeps S and swaps D with I.
EditCounts Levenshtein(std::span<const std::uint32_t> ref, std::span<const std::uint32_t> hyp);

/// Per-frame scores (logits or posteriors) for a sample, in output-layer ids.
using Scorer = std::function<Matrix(const Sample &)>;

Scorer ModelScorer(const ModelParams &params, const NetworkSpec &spec);

/// Fraction of frames whose argmax (ties to lowest id) equals the label.
double FrameAccuracy(const Scorer &scorer, std::span<const Sample> samples, TaskMode mode);
double FrameAccuracy(const ModelParams &params, const NetworkSpec &spec,
                     std::span<const Sample> samples, TaskMode mode);

/// Token readout in corpus ids.  FrameCe: argmax then merge repeats.
/// Ctc: best path over the posteriors, blanks removed.
LabelSeq DecodeScores(const Matrix &scores, TaskMode mode);

struct EvalResult {
  std::string model_name;
  std::string domain_name;
  std::string split;
  double frame_acc = 0.0;
  double ter = 0.0;
  std::uint64_t substitutions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t ref_tokens = 0;
};

/// Micro-averaged over the samples: ter = sum(S+D+I) / sum(ref tokens).
EvalResult TokenErrorRate(const Scorer &scorer, std::span<const Sample> samples, TaskMode mode);

/// One EvalResult per domain of `split`.
std::vector<EvalResult> EvaluateByDomain(const std::string &model_name, const ModelParams &params,
                                         const NetworkSpec &spec, const PreparedCorpus &corpus,
                                         Split split, TaskMode mode);

/// (model - baseline) / baseline; negative means the model is better.
double RelativeChange(double model, double baseline);

struct ReportCell {
  double ter = 0.0;
  double rel_delta = 0.0;
};

struct ReportGrid {
  std::string baseline;
  std::string split = "test";        // column prefix in the rendered table
  std::vector<std::string> models;   // row order: first appearance
  std::vector<std::string> domains;  // column order: first appearance
  std::vector<std::vector<ReportCell>> cells;

  const ReportCell &at(const std::string &model, const std::string &domain) const;
};

ReportGrid BuildReport(std::span<const EvalResult> results, const std::string &baseline_name);

/// "-10.4%" style rendering of a relative change.
std::string FormatRelative(double rel_delta);
/// Column-aligned text table, TER in percent with relative change vs baseline.
std::string RenderReport(const ReportGrid &grid);

inline constexpr const char *kReportCsvHeader = "model,domain,ter,rel_delta";
std::string ReportCsv(const ReportGrid &grid);
void WriteReportCsv(const ReportGrid &grid, const std::filesystem::path &path);
ReportGrid ReadReportCsv(const std::filesystem::path &path, const std::string &baseline_name);

inline constexpr const char *kCurvesCsvHeader = "model,stage,epoch,split,frame_acc";
/// multicondition / finetune / student for the model tags used by the trainer.
std::string StageLabelForModel(const std::string &model);
std::string CurvesCsv(const MetricsLog &log);
void ExportCurves(const MetricsLog &log, const std::filesystem::path &path);

}  // namespace mdistill

#endif  // MDISTILL_EVAL_HPP_
