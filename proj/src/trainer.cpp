// src/trainer.cpp

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

#include "mdistill/trainer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "mdistill/error.hpp"

namespace mdistill {

namespace fs = std::filesystem;

std::string_view TaskModeName(TaskMode mode) {
  return mode == TaskMode::kCtc ? "ctc" : "frame_ce";
}

TaskMode ParseTaskMode(std::string_view name) {
  if (name == "frame_ce" || name == "FrameCE" || name == "ce") return TaskMode::kFrameCe;
  if (name == "ctc" || name == "CTC") return TaskMode::kCtc;
  Fail(ErrorCode::kInvalidArgument, "unknown task mode '" + std::string(name) + "'");
}

std::uint32_t OutputDim(std::uint32_t vocab_size, TaskMode mode) {
  return vocab_size + LabelOffset(mode);
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, std::string("invalid training config: ") + what);
  };
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning_rate must be >= 0");
  require(clip_bound > 0.0, "clip_bound must be > 0");
  require(w_hard >= 0.0 && w_hard <= 1.0, "w_hard must lie in [0, 1]");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(std::isfinite(lr_halving_threshold), "lr_halving_threshold must be finite");
}

// ---------------------------------------------------------------------------
// Corpus preparation

const std::string &PreparedCorpus::DomainName(std::uint32_t domain_id) const {
  for (std::size_t i = 0; i < domain_ids.size(); ++i)
    if (domain_ids[i] == domain_id) return domain_names[i];
  Fail(ErrorCode::kInvalidArgument, "unknown domain id " + std::to_string(domain_id));
}

const std::vector<Sample> &PreparedCorpus::split(Split s) const {
  switch (s) {
    case Split::kTrain: return train;
    case Split::kDev: return dev;
    case Split::kTest: return test;
  }
  return train;
}

namespace {

std::vector<FeatureView> ExtractAll(const std::vector<Utterance> &utts) {
  std::vector<FeatureView> views(utts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(utts.size()); ++i)
    views[i] = ExtractFeatures(utts[i]);
  return views;
}

std::vector<Sample> MakeSamples(const std::vector<Utterance> &utts,
                                std::vector<FeatureView> views, const MvnStats &mvn) {
  std::vector<Sample> out(utts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(utts.size()); ++i) {
    FeatureView v = ApplyMvn(std::move(views[i]), mvn);
    out[i] = Sample{utts[i].utterance_id, utts[i].domain_id, std::move(v.frames),
                    std::move(v.labels), utts[i].tokens};
  }
  return out;
}

}  // namespace

PreparedCorpus PrepareCorpus(const Corpus &corpus) {
  PreparedCorpus pc;
  pc.vocab_size = corpus.manifest.vocab_size;
  pc.feature_dim = static_cast<std::uint32_t>(3 * kStackFrames * corpus.manifest.feature_dim);
  for (const auto &d : corpus.manifest.domains) {
    pc.domain_ids.push_back(d.domain_id);
    pc.domain_names.push_back(d.name);
  }
  auto train_views = ExtractAll(corpus.train);
  pc.mvn = FitGlobalMvn(train_views);
  pc.train = MakeSamples(corpus.train, std::move(train_views), pc.mvn);
  pc.dev = MakeSamples(corpus.dev, ExtractAll(corpus.dev), pc.mvn);
  pc.test = MakeSamples(corpus.test, ExtractAll(corpus.test), pc.mvn);
  return pc;
}

PreparedCorpus RestrictToDomain(const PreparedCorpus &corpus, std::uint32_t domain_id) {
  PreparedCorpus out;
  out.vocab_size = corpus.vocab_size;
  out.feature_dim = corpus.feature_dim;
  out.mvn = corpus.mvn;
  for (std::size_t i = 0; i < corpus.domain_ids.size(); ++i)
    if (corpus.domain_ids[i] == domain_id) {
      out.domain_ids.push_back(domain_id);
      out.domain_names.push_back(corpus.domain_names[i]);
    }
  auto keep = [domain_id](const std::vector<Sample> &src) {
    std::vector<Sample> dst;
    for (const auto &s : src)
      if (s.domain_id == domain_id) dst.push_back(s);
    return dst;
  };
  out.train = keep(corpus.train);
  out.dev = keep(corpus.dev);
  out.test = keep(corpus.test);
  if (out.train.empty())
    Fail(ErrorCode::kInvalidArgument,
         "domain " + std::to_string(domain_id) + " has no training data");
  return out;
}

// ---------------------------------------------------------------------------
// Teachers and targets

TeacherBank TeacherBank::WithUniformWeights(std::vector<Teacher> teachers) {
  TeacherBank bank;
  const double w = teachers.empty() ? 0.0 : 1.0 / static_cast<double>(teachers.size());
  bank.weights.assign(teachers.size(), w);
  bank.teachers = std::move(teachers);
  return bank;
}

const Teacher *TeacherBank::Find(std::uint32_t domain_id) const {
  for (const auto &t : teachers)
    if (t.domain_id == domain_id) return &t;
  return nullptr;
}

void TeacherBank::Validate(std::span<const std::uint32_t> required_domains) const {
  if (teachers.empty()) Fail(ErrorCode::kInvalidArgument, "teacher bank is empty");
  if (weights.size() != teachers.size())
    Fail(ErrorCode::kInvalidArgument, "teacher bank weights do not match teachers");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) Fail(ErrorCode::kInvalidArgument, "negative ensemble weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    Fail(ErrorCode::kInvalidArgument, "ensemble weights must sum to 1");
  for (std::size_t i = 0; i < teachers.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (teachers[i].domain_id == teachers[j].domain_id)
        Fail(ErrorCode::kInvalidArgument, "duplicate teacher domain");
  for (std::uint32_t d : required_domains)
    if (Find(d) == nullptr)
      Fail(ErrorCode::kUnroutedDomain, "unrouted domain: no teacher for domain " + std::to_string(d));
}

Targets MakeTargets(const TargetProvider &provider, const Sample &sample, TaskMode mode,
                    std::uint32_t num_labels) {
  const std::uint32_t offset = LabelOffset(mode);
  LabelSeq labels(sample.frame_labels);
  for (auto &l : labels) l += offset;

  Targets out;
  switch (provider.strategy) {
    case TargetStrategy::kHardOnly:
      out.dist = TargetDistribution::OneHot(labels, num_labels);
      return out;
    case TargetStrategy::kDomainRouted: {
      if (provider.bank == nullptr) Fail(ErrorCode::kInvalidArgument, "routed provider without bank");
      const Teacher *teacher = provider.bank->Find(sample.domain_id);
      if (teacher == nullptr)
        Fail(ErrorCode::kUnroutedDomain,
             "unrouted domain: no teacher for domain " + std::to_string(sample.domain_id));
      PosteriorSeq post =
          PosteriorSeq::FromLogits(Logits(teacher->params, teacher->spec, sample.features));
      out.routed_to = teacher->domain_id;
      out.dist = mode == TaskMode::kFrameCe
                     ? InterpolateTargets(post, labels, provider.w_hard)
                     : TargetDistribution{std::move(post.rows)};
      return out;
    }
    case TargetStrategy::kEnsembleDistilled: {
      if (provider.bank == nullptr) Fail(ErrorCode::kInvalidArgument, "ensemble provider without bank");
      std::vector<PosteriorSeq> posts;
      posts.reserve(provider.bank->teachers.size());
      for (const auto &t : provider.bank->teachers)
        posts.push_back(PosteriorSeq::FromLogits(Logits(t.params, t.spec, sample.features)));
      PosteriorSeq mixed = EnsemblePosterior(posts, provider.bank->weights);
      out.dist = mode == TaskMode::kFrameCe
                     ? InterpolateTargets(mixed, labels, provider.w_hard)
                     : TargetDistribution{std::move(mixed.rows)};
      return out;
    }
  }
  return out;
}

ModelParams SgdStep(const ModelParams &params, const ModelParams &grads, double learning_rate,
                    double clip_bound) {
  if (!params.SameLayout(grads)) Fail(ErrorCode::kShapeMismatch, "sgd_step: gradient layout differs");
  if (!(clip_bound > 0.0)) Fail(ErrorCode::kInvalidArgument, "clip_bound must be > 0");
  ModelParams out = params;
  for (std::size_t i = 0; i < out.tensors().size(); ++i) {
    auto theta = out.tensors()[i].value.values();
    auto g = grads.tensors()[i].value.values();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      if (!std::isfinite(g[k])) Fail(ErrorCode::kDivergence, "non-finite gradient");
      const double clipped = std::clamp(g[k], -clip_bound, clip_bound);
      assert(clipped >= -clip_bound && clipped <= clip_bound);
      theta[k] -= learning_rate * clipped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

MetricsLog::MetricsLog(std::ostream *sink) : sink_(sink) {
  if (sink_ != nullptr) *sink_ << kHeader << '\n' << std::flush;
}

std::string MetricsLog::FormatRow(const MetricsRow &r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%u,%s,%s,%.17g,%.17g,%.17g", r.stage.c_str(), r.epoch,
                r.split.c_str(), r.domain.c_str(), r.loss, r.frame_acc, r.lr);
  return buf;
}

void MetricsLog::Append(const MetricsRow &row) {
  rows_.push_back(row);
  if (sink_ != nullptr) *sink_ << FormatRow(row) << '\n' << std::flush;
}

void MetricsLog::Extend(const MetricsLog &other) {
  for (const auto &r : other.rows_) Append(r);
}

std::string MetricsLog::ToCsv() const {
  std::string out = std::string(kHeader) + "\n";
  for (const auto &r : rows_) out += FormatRow(r) + "\n";
  return out;
}

void MetricsLog::WriteCsv(const fs::path &path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path.string());
  os << ToCsv();
}

MetricsLog MetricsLog::ReadCsv(const fs::path &path) {
  std::ifstream is(path);
  if (!is) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kHeader)
    Fail(ErrorCode::kIo, "unexpected metrics header in " + path.string());
  MetricsLog log;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) Fail(ErrorCode::kIo, "malformed metrics row: " + line);
    MetricsRow r;
    try {
      r.stage = f[0];
      r.epoch = static_cast<std::uint32_t>(std::stoul(f[1]));
      r.split = f[2];
      r.domain = f[3];
      r.loss = std::stod(f[4]);
      r.frame_acc = std::stod(f[5]);
      r.lr = std::stod(f[6]);
    } catch (const std::exception &) {
      Fail(ErrorCode::kIo, "malformed metrics row: " + line);
    }
    log.rows_.push_back(std::move(r));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

LabelSeq Shift(const LabelSeq &labels, std::uint32_t offset) {
  LabelSeq out(labels);
  for (auto &l : out) l += offset;
  return out;
}

std::size_t CountCorrect(const Matrix &logits, const LabelSeq &labels, std::uint32_t offset) {
  std::size_t correct = 0;
  for (std::size_t t = 0; t < logits.rows(); ++t)
    if (ArgMax(logits.row(t)) == labels[t] + offset) ++correct;
  return correct;
}

struct DomainTally {
  double loss = 0.0;
  std::size_t utterances = 0;
  std::size_t frames = 0;
  std::size_t correct = 0;
};

struct DevSummary {
  std::map<std::uint32_t, DomainTally> per_domain;
  DomainTally overall;
  double accuracy() const {
    return overall.frames == 0 ? 0.0
                               : static_cast<double>(overall.correct) /
                                     static_cast<double>(overall.frames);
  }
};

// Ground-truth loss (hard CE or CTC) and frame accuracy on `samples`.
DevSummary Evaluate(const ModelParams &params, const NetworkSpec &spec,
                    const std::vector<Sample> &samples, TaskMode mode) {
  const std::uint32_t offset = LabelOffset(mode);
  std::vector<DomainTally> each(samples.size());
  std::vector<std::exception_ptr> errors(samples.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(samples.size()); ++i) {
    try {
      const Sample &s = samples[i];
      Matrix logits = Logits(params, spec, s.features);
      each[i].loss = mode == TaskMode::kCtc ? CtcLoss(logits, Shift(s.tokens, offset)).loss
                                            : HardCe(Shift(s.frame_labels, offset), logits).loss;
      each[i].utterances = 1;
      each[i].frames = logits.rows();
      each[i].correct = CountCorrect(logits, s.frame_labels, offset);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  DevSummary sum;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    for (DomainTally *t : {&sum.per_domain[samples[i].domain_id], &sum.overall}) {
      t->loss += each[i].loss;
      t->utterances += each[i].utterances;
      t->frames += each[i].frames;
      t->correct += each[i].correct;
    }
  }
  return sum;
}

double Accuracy(const DomainTally &t) {
  return t.frames == 0 ? 0.0 : static_cast<double>(t.correct) / static_cast<double>(t.frames);
}
double MeanLoss(const DomainTally &t) {
  return t.utterances == 0 ? 0.0 : t.loss / static_cast<double>(t.utterances);
}

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, std::uint32_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream rng(seed, HashStreamId({0x73687566666c65ULL, epoch}));
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.UniformInt(0, i - 1));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

struct SampleOutcome {
  double loss = 0.0;
  double target_entropy = 0.0;  // soft-target FrameCe only; loss minus this is the KLD
  std::size_t frames = 0;
  std::size_t correct = 0;
  ModelParams grads;
  std::optional<std::uint32_t> routed_to;
};

SampleOutcome ProcessSample(const ModelParams &params, const NetworkSpec &spec,
                            const Sample &sample, const TargetProvider &provider,
                            const TrainConfig &config) {
  const std::uint32_t offset = LabelOffset(config.task_mode);
  ForwardResult fwd = Forward(params, spec, sample.features);
  Targets targets = MakeTargets(provider, sample, config.task_mode, spec.output_dim);

  LossResult loss;
  if (config.task_mode == TaskMode::kFrameCe) {
    loss = SoftTargetCe(targets.dist, fwd.logits);
  } else if (provider.strategy == TargetStrategy::kHardOnly) {
    loss = CtcLoss(fwd.logits, Shift(sample.tokens, offset));
  } else {
    loss = CtcMixedLoss(targets.dist, fwd.logits, Shift(sample.tokens, offset), provider.w_hard);
  }
  SampleOutcome out;
  out.loss = loss.loss;
  if (config.task_mode == TaskMode::kFrameCe && provider.strategy != TargetStrategy::kHardOnly)
    out.target_entropy = MeanEntropy(targets.dist);
  out.frames = fwd.logits.rows();
  out.correct = CountCorrect(fwd.logits, sample.frame_labels, offset);
  out.grads = Backward(params, spec, fwd.cache, loss.dlogits);
  out.routed_to = targets.routed_to;
  return out;
}

void LogDev(const TrainConfig &config, const PreparedCorpus &corpus, std::uint32_t epoch,
            double lr, const DevSummary &dev, MetricsLog *log, MetricsLog *sink) {
  auto emit = [&](const MetricsRow &row) {
    log->Append(row);
    if (sink != nullptr) sink->Append(row);
  };
  for (std::uint32_t d : corpus.domain_ids) {
    auto it = dev.per_domain.find(d);
    if (it == dev.per_domain.end()) continue;
    emit({config.tag, epoch, "dev", corpus.DomainName(d), MeanLoss(it->second),
          Accuracy(it->second), lr});
  }
  emit({config.tag, epoch, "dev", "all", MeanLoss(dev.overall), Accuracy(dev.overall), lr});
}

}  // namespace

StageResult TrainStage(const TrainConfig &config, const PreparedCorpus &corpus,
                       const NetworkSpec &spec, const ModelParams &initial,
                       const TargetProvider &provider, MetricsLog *sink) {
  config.Validate();
  spec.Validate();
  if (corpus.train.empty()) Fail(ErrorCode::kInvalidArgument, "training split is empty");
  if (corpus.dev.empty()) Fail(ErrorCode::kInvalidArgument, "dev split is empty");
  if (spec.output_dim != OutputDim(corpus.vocab_size, config.task_mode))
    Fail(ErrorCode::kShapeMismatch, "network output_dim does not match vocabulary and task mode");
  if (spec.input_dim != corpus.feature_dim)
    Fail(ErrorCode::kShapeMismatch, "network input_dim does not match corpus features");
  if (provider.strategy != TargetStrategy::kHardOnly) {
    if (provider.bank == nullptr) Fail(ErrorCode::kInvalidArgument, "soft-target provider without bank");
    provider.bank->Validate(provider.strategy == TargetStrategy::kDomainRouted
                                ? std::span<const std::uint32_t>(corpus.domain_ids)
                                : std::span<const std::uint32_t>());
  }

  StageResult result;
  ModelParams params = initial;
  double lr = config.learning_rate;
  double prev_acc = Evaluate(params, spec, corpus.dev, config.task_mode).accuracy();
  // Only end-of-epoch states are candidates; with no epochs the start is returned.
  result.best_dev_acc = prev_acc;
  result.params = params;
  bool have_best = false;
  int barren_halvings = 0;

  const std::size_t n = corpus.train.size();
  for (std::uint32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto order = EpochOrder(n, config.shuffle_seed, epoch);
    DomainTally train_tally;
    double entropy_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t count = std::min<std::size_t>(config.batch_size, n - start);
      std::vector<SampleOutcome> outcomes(count);
      std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1)
      for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(count); ++b) {
        try {
          outcomes[b] = ProcessSample(params, spec, corpus.train[order[start + b]], provider, config);
        } catch (...) {
          errors[b] = std::current_exception();
        }
      }
      // Fixed-order reduction keeps the update independent of thread count.
      ModelParams grads = params.ZerosLike();
      double batch_loss = 0.0;
      for (std::size_t b = 0; b < count; ++b) {
        if (errors[b]) std::rethrow_exception(errors[b]);
        const Sample &s = corpus.train[order[start + b]];
        batch_loss += outcomes[b].loss;
        train_tally.loss += outcomes[b].loss;
        entropy_sum += outcomes[b].target_entropy;
        train_tally.utterances += 1;
        train_tally.frames += outcomes[b].frames;
        train_tally.correct += outcomes[b].correct;
        grads.Axpy(1.0, outcomes[b].grads);
        if (outcomes[b].routed_to)
          result.routing.push_back({s.utterance_id, s.domain_id, *outcomes[b].routed_to});
      }
      if (!std::isfinite(batch_loss))
        Fail(ErrorCode::kDivergence, "non-finite loss at epoch " + std::to_string(epoch) +
                                         ", batch " + std::to_string(batch_index));
      grads.Scale(1.0 / static_cast<double>(count));
      try {
        params = SgdStep(params, grads, lr, config.clip_bound);
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kDivergence) throw;
        Fail(ErrorCode::kDivergence, std::string(e.what()) + " at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_index));
      }
    }

    MetricsRow train_row{config.tag, epoch, "train", "all", MeanLoss(train_tally),
                         Accuracy(train_tally), lr};
    result.log.Append(train_row);
    if (sink != nullptr) sink->Append(train_row);
    if (config.task_mode == TaskMode::kFrameCe && provider.strategy != TargetStrategy::kHardOnly) {
      // The optimized CE differs from the KLD by the constant target entropy.
      MetricsRow kld_row = train_row;
      kld_row.split = "train_kld";
      kld_row.loss = (train_tally.loss - entropy_sum) / static_cast<double>(train_tally.utterances);
      result.log.Append(kld_row);
      if (sink != nullptr) sink->Append(kld_row);
    }
    const DevSummary dev = Evaluate(params, spec, corpus.dev, config.task_mode);
    LogDev(config, corpus, epoch, lr, dev, &result.log, sink);
    result.epochs_run = epoch;

    const double acc = dev.accuracy();
    const bool improved = !have_best || acc > result.best_dev_acc;
    if (improved) {
      have_best = true;
      result.best_dev_acc = acc;
      result.params = params;
    }
    if (acc - prev_acc < config.lr_halving_threshold) {
      lr *= 0.5;
      barren_halvings = improved ? 0 : barren_halvings + 1;
    } else {
      barren_halvings = 0;
    }
    prev_acc = acc;
    if (barren_halvings >= 2) break;
  }
  result.final_lr = lr;
  return result;
}

StageResult FineTune(const ModelParams &base, const NetworkSpec &spec, TrainConfig config,
                     const PreparedCorpus &corpus, std::uint32_t domain_id, double lr_scale,
                     MetricsLog *sink) {
  PreparedCorpus subset = RestrictToDomain(corpus, domain_id);
  config.stage = StageKind::kFineTune;
  config.finetune_domain = domain_id;
  config.learning_rate *= lr_scale;
  return TrainStage(config, subset, spec, base, TargetProvider::HardOnly(), sink);
}

// ---------------------------------------------------------------------------
// Pipeline

std::string TeacherCheckpointName(std::string_view domain_name) {
  return "teacher_" + std::string(domain_name);
}

NetworkSpec ResolveSpec(const PipelineConfig &config, const PreparedCorpus &corpus) {
  NetworkSpec spec = config.spec;
  spec.input_dim = corpus.feature_dim;
  spec.output_dim = OutputDim(corpus.vocab_size, config.train.task_mode);
  spec.Validate();
  return spec;
}

namespace {

ModelParams FreshParams(const PipelineConfig &config, const NetworkSpec &spec) {
  RngStream rng(config.init_seed, HashStreamId({0x696e6974ULL}));
  return InitParams(spec, rng);
}

}  // namespace

StageResult RunBaselineStage(const PipelineConfig &config, const PreparedCorpus &corpus,
                             MetricsLog *sink) {
  const NetworkSpec spec = ResolveSpec(config, corpus);
  TrainConfig tc = config.train;
  tc.stage = StageKind::kMultiCondition;
  tc.tag = "baseline";
  return TrainStage(tc, corpus, spec, FreshParams(config, spec), TargetProvider::HardOnly(), sink);
}

TeacherBank RunTeacherStage(const PipelineConfig &config, const PreparedCorpus &corpus,
                            const ModelParams &baseline, MetricsLog *sink) {
  const NetworkSpec spec = ResolveSpec(config, corpus);
  std::vector<Teacher> teachers;
  for (std::size_t i = 0; i < corpus.domain_ids.size(); ++i) {
    TrainConfig tc = config.train;
    tc.tag = TeacherCheckpointName(corpus.domain_names[i]);
    if (config.finetune_max_epochs) tc.max_epochs = *config.finetune_max_epochs;
    StageResult r = FineTune(baseline, spec, tc, corpus, corpus.domain_ids[i],
                             config.finetune_lr_scale, sink);
    teachers.push_back({corpus.domain_ids[i], corpus.domain_names[i], spec, std::move(r.params)});
  }
  return TeacherBank::WithUniformWeights(std::move(teachers));
}

StageResult RunStudentStage(const PipelineConfig &config, const PreparedCorpus &corpus,
                            const ModelParams &baseline, const TeacherBank &bank,
                            MetricsLog *sink) {
  const NetworkSpec spec = ResolveSpec(config, corpus);
  TrainConfig tc = config.train;
  tc.stage = StageKind::kStudent;
  tc.tag = "student";
  tc.learning_rate *= config.student_lr_scale;
  const ModelParams initial = config.student_from_scratch ? FreshParams(config, spec) : baseline;
  return TrainStage(tc, corpus, spec, initial,
                    TargetProvider::DomainRouted(bank, config.train.w_hard), sink);
}

PipelineResult RunPipeline(const PipelineConfig &config, const PreparedCorpus &corpus,
                           const std::optional<fs::path> &out_dir) {
  PipelineResult res;
  res.spec = ResolveSpec(config, corpus);

  std::ofstream metrics_file;
  if (out_dir) {
    std::error_code ec;
    fs::create_directories(*out_dir, ec);
    if (ec) Fail(ErrorCode::kIo, "cannot create " + out_dir->string() + ": " + ec.message());
    metrics_file.open(*out_dir / "metrics.csv", std::ios::trunc);
    if (!metrics_file) Fail(ErrorCode::kIo, "cannot write metrics in " + out_dir->string());
  }
  MetricsLog sink(out_dir ? &metrics_file : nullptr);

  auto tagged = [](const char *stage, auto &&fn) {
    try {
      return fn();
    } catch (const Error &e) {
      throw Error(e.code(), std::string(stage) + ": " + e.what());
    }
  };

  StageResult base = tagged("baseline stage", [&] { return RunBaselineStage(config, corpus, &sink); });
  res.baseline = std::move(base.params);
  res.baseline_dev_acc = base.best_dev_acc;
  if (out_dir) SaveCheckpoint(res.baseline, res.spec, *out_dir / "baseline.mdst");

  res.bank = tagged("teacher stage", [&] { return RunTeacherStage(config, corpus, res.baseline, &sink); });
  if (out_dir)
    for (const auto &t : res.bank.teachers)
      SaveCheckpoint(t.params, t.spec, *out_dir / (TeacherCheckpointName(t.name) + ".mdst"));

  StageResult student = tagged("student stage", [&] {
    return RunStudentStage(config, corpus, res.baseline, res.bank, &sink);
  });
  res.student = std::move(student.params);
  res.student_dev_acc = student.best_dev_acc;
  res.routing = std::move(student.routing);
  if (out_dir) SaveCheckpoint(res.student, res.spec, *out_dir / "student.mdst");

  res.log.Extend(sink);
  return res;
}

}  // namespace mdistill
