// include/mdistill/trainer.hpp

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

// Three-stage multi-domain teacher-student training: multi-condition
// baseline, per-domain fine-tuned teachers, and a student trained on
// domain-routed soft targets.

#ifndef MDISTILL_TRAINER_HPP_
#define MDISTILL_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdistill/losses.hpp"
#include "mdistill/netgraph.hpp"
#include "mdistill/synthcorpus.hpp"

namespace mdistill {

enum class StageKind { kMultiCondition, kFineTune, kStudent };
enum class TaskMode { kFrameCe, kCtc };

std::string_view TaskModeName(TaskMode mode);
TaskMode ParseTaskMode(std::string_view name);

/// Network output width for a vocabulary: CTC adds the blank at index 0.
std::uint32_t OutputDim(std::uint32_t vocab_size, TaskMode mode);
/// Offset added to corpus token ids to obtain output-layer ids.
inline std::uint32_t LabelOffset(TaskMode mode) { return mode == TaskMode::kCtc ? 1 : 0; }

struct TrainConfig {
  StageKind stage = StageKind::kMultiCondition;
  std::uint32_t finetune_domain = 0;
  TaskMode task_mode = TaskMode::kFrameCe;
  double learning_rate = 0.02;
  double lr_halving_threshold = 0.001;
  std::uint32_t max_epochs = 30;
  std::uint32_t batch_size = 16;
  double clip_bound = 1.0;
  double w_hard = 0.8;
  std::uint64_t shuffle_seed = 1;
  std::string tag = "model";  // model name written to the metrics log

  void Validate() const;
};

/// One normalized training/evaluation example.
struct Sample {
  std::uint64_t utterance_id = 0;
  std::uint32_t domain_id = 0;
  Matrix features;        // T'' x 8*3*D, MVN applied
  LabelSeq frame_labels;  // corpus ids, length T''
  LabelSeq tokens;        // corpus ids
};

struct PreparedCorpus {
  std::uint32_t vocab_size = 0;
  std::uint32_t feature_dim = 0;  // after deltas and stacking
  std::vector<std::uint32_t> domain_ids;
  std::vector<std::string> domain_names;
  MvnStats mvn;
  std::vector<Sample> train;
  std::vector<Sample> dev;
  std::vector<Sample> test;

  const std::string &DomainName(std::uint32_t domain_id) const;
  const std::vector<Sample> &split(Split s) const;
};

/// Feature extraction for every utterance, MVN fitted on the training split
/// only and applied to all splits.  Parallel over utterances.
PreparedCorpus PrepareCorpus(const Corpus &corpus);

/// Same statistics, only samples of `domain_id`.  Throws when no training
/// samples remain.
PreparedCorpus RestrictToDomain(const PreparedCorpus &corpus, std::uint32_t domain_id);

struct Teacher {
  std::uint32_t domain_id = 0;
  std::string name;
  NetworkSpec spec;
  ModelParams params;
};

struct TeacherBank {
  std::vector<Teacher> teachers;
  std::vector<double> weights;  // ensemble weights, sum to one

  /// Uniform 1/N ensemble weights.
  static TeacherBank WithUniformWeights(std::vector<Teacher> teachers);
  const Teacher *Find(std::uint32_t domain_id) const;
  /// Unique domain ids, weights on the simplex, and (when given) coverage of
  /// every domain in `required_domains`.
  void Validate(std::span<const std::uint32_t> required_domains = {}) const;
};

enum class TargetStrategy { kHardOnly, kDomainRouted, kEnsembleDistilled };

struct TargetProvider {
  TargetStrategy strategy = TargetStrategy::kHardOnly;
  const TeacherBank *bank = nullptr;
  double w_hard = 0.8;

  static TargetProvider HardOnly() { return {}; }
  static TargetProvider DomainRouted(const TeacherBank &bank, double w_hard) {
    return {TargetStrategy::kDomainRouted, &bank, w_hard};
  }
  static TargetProvider EnsembleDistilled(const TeacherBank &bank, double w_hard) {
    return {TargetStrategy::kEnsembleDistilled, &bank, w_hard};
  }
};

struct Targets {
  TargetDistribution dist;
  /// Domain of the teacher consulted (DomainRouted only).
  std::optional<std::uint32_t> routed_to;
};

/// Per-frame targets for one sample.  In FrameCe mode the teacher posterior is
/// interpolated with the one-hot labels using w_hard.  In Ctc mode the raw
/// teacher posterior is returned; w_hard then weighs the CTC term instead.
Targets MakeTargets(const TargetProvider &provider, const Sample &sample, TaskMode mode,
                    std::uint32_t num_labels);

struct RoutingEntry {
  std::uint64_t utterance_id;
  std::uint32_t sample_domain;
  std::uint32_t teacher_domain;
};

/// Clamps every gradient entry to [-clip, clip] then takes theta - lr * g.
/// Throws kDivergence on a non-finite gradient.
ModelParams SgdStep(const ModelParams &params, const ModelParams &grads, double learning_rate,
                    double clip_bound);

struct MetricsRow {
  std::string stage;  // model tag: baseline, teacher_<domain>, student
  std::uint32_t epoch = 0;
  std::string split;   // train | train_kld | dev; train_kld repeats the train row with the KLD as loss
  std::string domain;  // domain name or "all"
  double loss = 0.0;
  double frame_acc = 0.0;
  double lr = 0.0;

  bool operator==(const MetricsRow &) const = default;
};

/// Metrics rows, optionally mirrored line by line to a CSV stream.
class MetricsLog {
 public:
  static constexpr const char *kHeader = "stage,epoch,split,domain,loss,frame_acc,lr";

  MetricsLog() = default;
  explicit MetricsLog(std::ostream *sink);

  void Append(const MetricsRow &row);
  void Extend(const MetricsLog &other);
  const std::vector<MetricsRow> &rows() const { return rows_; }

  std::string ToCsv() const;
  void WriteCsv(const std::filesystem::path &path) const;
  static MetricsLog ReadCsv(const std::filesystem::path &path);
  static std::string FormatRow(const MetricsRow &row);

 private:
  std::vector<MetricsRow> rows_;
  std::ostream *sink_ = nullptr;
};

struct StageResult {
  ModelParams params;  // best dev frame accuracy among the evaluated states
  MetricsLog log;
  std::vector<RoutingEntry> routing;
  std::uint32_t epochs_run = 0;
  double best_dev_acc = 0.0;
  double final_lr = 0.0;
};

/// Minibatch SGD with per-epoch shuffling, a halve-on-stagnation schedule and
/// best-on-dev model selection.  Per-utterance gradients inside a minibatch
/// are computed in parallel and summed in sample order.
StageResult TrainStage(const TrainConfig &config, const PreparedCorpus &corpus,
                       const NetworkSpec &spec, const ModelParams &initial,
                       const TargetProvider &provider, MetricsLog *sink = nullptr);

/// HardOnly training on one domain starting from `base`, learning rate scaled
/// by `lr_scale`.
StageResult FineTune(const ModelParams &base, const NetworkSpec &spec, TrainConfig config,
                     const PreparedCorpus &corpus, std::uint32_t domain_id, double lr_scale,
                     MetricsLog *sink = nullptr);

struct PipelineConfig {
  NetworkSpec spec;  // input/output dims are filled from the corpus
  TrainConfig train;
  double finetune_lr_scale = 0.1;
  double student_lr_scale = 1.0;  // student starts at learning_rate * scale
  std::optional<std::uint32_t> finetune_max_epochs;
  bool student_from_scratch = false;
  std::uint64_t init_seed = 1;
};

/// Resolves corpus-dependent fields of the network spec.
NetworkSpec ResolveSpec(const PipelineConfig &config, const PreparedCorpus &corpus);

struct PipelineResult {
  NetworkSpec spec;
  ModelParams baseline;
  TeacherBank bank;
  ModelParams student;
  MetricsLog log;
  std::vector<RoutingEntry> routing;
  double baseline_dev_acc = 0.0;
  double student_dev_acc = 0.0;
};

StageResult RunBaselineStage(const PipelineConfig &config, const PreparedCorpus &corpus,
                             MetricsLog *sink = nullptr);
TeacherBank RunTeacherStage(const PipelineConfig &config, const PreparedCorpus &corpus,
                            const ModelParams &baseline, MetricsLog *sink = nullptr);
StageResult RunStudentStage(const PipelineConfig &config, const PreparedCorpus &corpus,
                            const ModelParams &baseline, const TeacherBank &bank,
                            MetricsLog *sink = nullptr);

/// Stage 1, stage 2 for every domain, stage 3.  When `out_dir` is given,
/// writes baseline.mdst, teacher_<domain>.mdst, student.mdst and metrics.csv.
PipelineResult RunPipeline(const PipelineConfig &config, const PreparedCorpus &corpus,
                           const std::optional<std::filesystem::path> &out_dir = std::nullopt);

std::string TeacherCheckpointName(std::string_view domain_name);

}  // namespace mdistill

#endif  // MDISTILL_TRAINER_HPP_
