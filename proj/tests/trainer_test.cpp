// tests/trainer_test.cpp

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

#include <gtest/gtest.h>

#include <limits>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdistill/error.hpp"
#include "mdistill/parallel.hpp"
#include "mdistill/trainer.hpp"
#include "test_support.hpp"

namespace mdistill {
namespace {

namespace fs = std::filesystem;

const PreparedCorpus &TinyCorpus() {
  static const PreparedCorpus corpus = [] {
    CorpusManifest m;
    m.vocab_size = 6;
    m.feature_dim = 3;
    m.master_seed = 5;
    m.tokens_min = 2;
    m.tokens_max = 4;
    m.domains = StyleDomains();
    m.counts.assign(3, SplitCounts{8, 3, 3});
    DrawPrototypes(&m);
    return PrepareCorpus(GenerateCorpus(m));
  }();
  return corpus;
}

NetworkSpec TinySpec(const PreparedCorpus &c, TaskMode mode = TaskMode::kFrameCe,
                     Architecture arch = Architecture::kFsmn) {
  NetworkSpec s;
  s.architecture = arch;
  s.input_dim = c.feature_dim;
  s.hidden_dim = 6;
  s.output_dim = OutputDim(c.vocab_size, mode);
  s.fsmn_blocks = 1;
  s.lookback_order = 2;
  s.lookahead_order = 1;
  s.lstm_layers = 1;
  s.lstm_proj_dim = 4;
  return s;
}

TrainConfig TinyConfig(std::uint32_t epochs = 2) {
  TrainConfig c;
  c.learning_rate = 0.2;
  c.max_epochs = epochs;
  c.batch_size = 4;
  c.tag = "tiny";
  return c;
}

ModelParams Init(const NetworkSpec &s, std::uint64_t seed = 1) {
  RngStream rng(seed, 0);
  return InitParams(s, rng);
}

TeacherBank TinyBank(const PreparedCorpus &c, const NetworkSpec &s) {
  std::vector<Teacher> teachers;
  for (std::size_t i = 0; i < c.domain_ids.size(); ++i)
    teachers.push_back({c.domain_ids[i], c.domain_names[i], s, Init(s, 100 + i)});
  return TeacherBank::WithUniformWeights(std::move(teachers));
}

TEST(SgdStep, ClipsBeforeStepping) {
  ModelParams p;
  p.Add("w", 2, Matrix(1, 3, std::vector<double>{1.0, 1.0, 1.0}));
  ModelParams g;
  g.Add("w", 2, Matrix(1, 3, std::vector<double>{5.0, -0.5, -7.0}));
  const ModelParams q = SgdStep(p, g, 0.1, 1.0);
  EXPECT_EQ(q.at("w")(0, 0), 1.0 - 0.1);
  EXPECT_EQ(q.at("w")(0, 1), 1.0 - 0.1 * -0.5);
  EXPECT_EQ(q.at("w")(0, 2), 1.0 + 0.1);
}

TEST(SgdStep, NonFiniteGradientSignalsDivergence) {
  ModelParams p;
  p.Add("w", 1, Matrix(1, 2));
  ModelParams g;
  g.Add("w", 1, Matrix(1, 2, std::vector<double>{0.0, std::numeric_limits<double>::quiet_NaN()}));
  try {
    SgdStep(p, g, 0.1, 1.0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
  }
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.Validate();
  c.clip_bound = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c = TrainConfig{};
  c.w_hard = 1.2;
  EXPECT_THROW(c.Validate(), Error);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(Targets, Strategies) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  const TeacherBank bank = TinyBank(c, s);
  const Sample &x = c.train[0];
  const Targets hard = MakeTargets(TargetProvider::HardOnly(), x, TaskMode::kFrameCe, s.output_dim);
  EXPECT_EQ(hard.dist.rows, TargetDistribution::OneHot(x.frame_labels, s.output_dim).rows);
  EXPECT_FALSE(hard.routed_to.has_value());

  const Targets routed1 =
      MakeTargets(TargetProvider::DomainRouted(bank, 1.0), x, TaskMode::kFrameCe, s.output_dim);
  EXPECT_EQ(routed1.dist.rows, hard.dist.rows);
  EXPECT_EQ(routed1.routed_to, x.domain_id);

  const Targets routed = MakeTargets(TargetProvider::DomainRouted(bank, 0.8), x,
                                     TaskMode::kFrameCe, s.output_dim);
  EXPECT_TRUE(RowsOnSimplex(routed.dist.rows));
  const Matrix teacher = SoftmaxRows(Logits(bank.Find(x.domain_id)->params, s, x.features));
  for (std::size_t t = 0; t < teacher.rows(); ++t)
    for (std::size_t l = 0; l < teacher.cols(); ++l)
      EXPECT_NEAR(routed.dist.rows(t, l),
                  0.2 * teacher(t, l) + (l == x.frame_labels[t] ? 0.8 : 0.0), 1e-15);

  // A one-teacher ensemble is the routed target for that teacher's domain.
  TeacherBank single = TeacherBank::WithUniformWeights({*bank.Find(x.domain_id)});
  const Targets ens = MakeTargets(TargetProvider::EnsembleDistilled(single, 0.8), x,
                                  TaskMode::kFrameCe, s.output_dim);
  EXPECT_TRUE(ens.dist.rows.BitwiseEqual(routed.dist.rows));
}

TEST(Targets, UnroutedDomainIsAnError) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  TeacherBank bank = TinyBank(c, s);
  bank.teachers.pop_back();
  bank = TeacherBank::WithUniformWeights(bank.teachers);
  try {
    TrainStage(TinyConfig(1), c, s, Init(s), TargetProvider::DomainRouted(bank, 0.8));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnroutedDomain);
  }
}

TEST(TrainStage, ZeroEpochsReturnsInitialParams) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  const ModelParams p0 = Init(s);
  const StageResult r = TrainStage(TinyConfig(0), c, s, p0, TargetProvider::HardOnly());
  EXPECT_TRUE(r.params.BitwiseEqual(p0));
  EXPECT_TRUE(r.log.rows().empty());
  EXPECT_EQ(r.epochs_run, 0u);
}

TEST(TrainStage, DeterministicAcrossRunsAndThreadCounts) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  SetThreads(1);
  const StageResult a = TrainStage(TinyConfig(), c, s, Init(s), TargetProvider::HardOnly());
  SetThreads(3);
  const StageResult b = TrainStage(TinyConfig(), c, s, Init(s), TargetProvider::HardOnly());
  ApplyThreadLimit();
  const StageResult d = TrainStage(TinyConfig(), c, s, Init(s), TargetProvider::HardOnly());
  EXPECT_TRUE(a.params.BitwiseEqual(b.params));
  EXPECT_TRUE(a.params.BitwiseEqual(d.params));
  EXPECT_EQ(a.log.ToCsv(), b.log.ToCsv());
  EXPECT_EQ(a.log.ToCsv(), d.log.ToCsv());
}

TEST(TrainStage, MetricsLayout) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  std::ostringstream sink_text;
  MetricsLog sink(&sink_text);
  const StageResult r = TrainStage(TinyConfig(2), c, s, Init(s), TargetProvider::HardOnly(), &sink);
  ASSERT_EQ(r.log.rows().size(), r.epochs_run * (2 + c.domain_ids.size()));
  const auto &rows = r.log.rows();
  EXPECT_EQ(rows[0].split, "train");
  EXPECT_EQ(rows[0].domain, "all");
  EXPECT_EQ(rows[1].domain, "Read");
  EXPECT_EQ(rows[3].domain, "Spon");
  EXPECT_EQ(rows[4].domain, "all");
  EXPECT_EQ(rows[4].split, "dev");
  for (const auto &row : rows) {
    EXPECT_EQ(row.stage, "tiny");
    EXPECT_GE(row.frame_acc, 0.0);
    EXPECT_LE(row.frame_acc, 1.0);
  }
  EXPECT_EQ(sink_text.str(), r.log.ToCsv());
  EXPECT_EQ(sink_text.str().substr(0, std::string(MetricsLog::kHeader).size()),
            MetricsLog::kHeader);
}

TEST(TrainStage, StagnationHalvesLearningRateAndStops) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  TrainConfig cfg = TinyConfig(30);
  cfg.lr_halving_threshold = 2.0;  // no epoch can gain this much accuracy
  const StageResult r = TrainStage(cfg, c, s, Init(s), TargetProvider::HardOnly());
  double expected = cfg.learning_rate;
  for (std::uint32_t e = 1; e <= r.epochs_run; ++e) {
    for (const auto &row : r.log.rows())
      if (row.epoch == e) EXPECT_EQ(row.lr, expected);
    expected *= 0.5;
  }
  EXPECT_EQ(r.final_lr, expected);
  EXPECT_LT(r.epochs_run, 30u);
  EXPECT_GE(r.epochs_run, 2u);
}

TEST(TrainStage, BestDevStateIsReturned) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  const StageResult r = TrainStage(TinyConfig(4), c, s, Init(s), TargetProvider::HardOnly());
  double best = 0.0;
  for (const auto &row : r.log.rows())
    if (row.split == "dev" && row.domain == "all") best = std::max(best, row.frame_acc);
  EXPECT_GE(r.best_dev_acc, best);
  double acc_of_returned = 0.0;
  {
    std::size_t frames = 0, hits = 0;
    for (const auto &x : c.dev) {
      const Matrix z = Logits(r.params, s, x.features);
      for (std::size_t t = 0; t < z.rows(); ++t, ++frames) hits += ArgMax(z.row(t)) == x.frame_labels[t];
    }
    acc_of_returned = static_cast<double>(hits) / frames;
  }
  EXPECT_EQ(acc_of_returned, r.best_dev_acc);
}

TEST(TrainStage, RoutingTraceAndFrozenTeachers) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  const TeacherBank bank = TinyBank(c, s);
  std::vector<std::uint64_t> before;
  for (const auto &t : bank.teachers) before.push_back(t.params.Fingerprint());
  const StageResult r =
      TrainStage(TinyConfig(1), c, s, Init(s), TargetProvider::DomainRouted(bank, 0.8));
  ASSERT_EQ(r.routing.size(), c.train.size());
  for (const auto &e : r.routing) EXPECT_EQ(e.sample_domain, e.teacher_domain);
  for (std::size_t i = 0; i < bank.teachers.size(); ++i)
    EXPECT_EQ(bank.teachers[i].params.Fingerprint(), before[i]);
}

TEST(TrainStage, SoftTargetStagesLogKld) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  const TeacherBank bank = TinyBank(c, s);
  auto rows_of = [](const StageResult &r, const std::string &split) {
    std::vector<MetricsRow> out;
    for (const auto &row : r.log.rows())
      if (row.split == split) out.push_back(row);
    return out;
  };
  const StageResult hard = TrainStage(TinyConfig(2), c, s, Init(s), TargetProvider::HardOnly());
  EXPECT_TRUE(rows_of(hard, "train_kld").empty());

  const StageResult soft =
      TrainStage(TinyConfig(2), c, s, Init(s), TargetProvider::DomainRouted(bank, 0.8));
  const auto ce = rows_of(soft, "train"), kld = rows_of(soft, "train_kld");
  ASSERT_EQ(kld.size(), ce.size());
  for (std::size_t i = 0; i < ce.size(); ++i) {
    EXPECT_EQ(kld[i].epoch, ce[i].epoch);
    EXPECT_GE(kld[i].loss, 0.0);
    EXPECT_LT(kld[i].loss, ce[i].loss);  // the targets carry positive entropy
  }

  // One-hot targets have zero entropy, so the two rows coincide.
  const StageResult onehot =
      TrainStage(TinyConfig(1), c, s, Init(s), TargetProvider::DomainRouted(bank, 1.0));
  EXPECT_EQ(rows_of(onehot, "train_kld")[0].loss, rows_of(onehot, "train")[0].loss);
}

TEST(TrainStage, CtcModeTrains) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c, TaskMode::kCtc);
  TrainConfig cfg = TinyConfig(1);
  cfg.task_mode = TaskMode::kCtc;
  cfg.learning_rate = 0.05;
  const StageResult hard = TrainStage(cfg, c, s, Init(s), TargetProvider::HardOnly());
  EXPECT_TRUE(hard.params.AllFinite());
  const TeacherBank bank = TinyBank(c, s);
  const StageResult mixed = TrainStage(cfg, c, s, Init(s), TargetProvider::DomainRouted(bank, 0.8));
  EXPECT_TRUE(mixed.params.AllFinite());
  EXPECT_EQ(mixed.routing.size(), c.train.size());
}

TEST(TrainStage, LstmTrains) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c, TaskMode::kFrameCe, Architecture::kLstm);
  const StageResult r = TrainStage(TinyConfig(1), c, s, Init(s), TargetProvider::HardOnly());
  EXPECT_TRUE(r.params.AllFinite());
  EXPECT_EQ(r.epochs_run, 1u);
}

TEST(TrainStage, ShapeMismatchRejected) {
  const PreparedCorpus &c = TinyCorpus();
  NetworkSpec s = TinySpec(c);
  s.output_dim += 1;
  EXPECT_THROW(TrainStage(TinyConfig(1), c, s, Init(s), TargetProvider::HardOnly()), Error);
}

TEST(FineTune, ScalesLearningRateAndUsesOneDomain) {
  const PreparedCorpus &c = TinyCorpus();
  const NetworkSpec s = TinySpec(c);
  const StageResult r = FineTune(Init(s), s, TinyConfig(1), c, 2, 0.1);
  ASSERT_FALSE(r.log.rows().empty());
  EXPECT_EQ(r.log.rows()[0].lr, 0.2 * 0.1);
  for (const auto &row : r.log.rows()) EXPECT_TRUE(row.domain == "all" || row.domain == "Spon");
}

TEST(Metrics, CsvRoundTrip) {
  MetricsLog log;
  log.Append({"baseline", 1, "train", "all", 0.1, 0.9, 0.2});
  log.Append({"teacher_Read", 2, "dev", "Read", 1.0 / 3.0, 2.0 / 3.0, 0.025});
  const fs::path dir = testing::ScratchDir("metrics");
  log.WriteCsv(dir / "m.csv");
  const MetricsLog back = MetricsLog::ReadCsv(dir / "m.csv");
  EXPECT_EQ(back.rows(), log.rows());
  EXPECT_EQ(back.ToCsv(), log.ToCsv());
  fs::remove_all(dir);
}

TEST(Pipeline, WritesCheckpointsAndIsReproducible) {
  const PreparedCorpus &c = TinyCorpus();
  PipelineConfig pc;
  pc.spec = TinySpec(c);
  pc.train = TinyConfig(2);
  const fs::path d1 = testing::ScratchDir("pipe1"), d2 = testing::ScratchDir("pipe2");
  const PipelineResult r1 = RunPipeline(pc, c, d1);
  const PipelineResult r2 = RunPipeline(pc, c, d2);
  for (const char *f : {"baseline.mdst", "teacher_Read.mdst", "teacher_Lect.mdst",
                        "teacher_Spon.mdst", "student.mdst", "metrics.csv"})
    EXPECT_TRUE(fs::exists(d1 / f)) << f;
  auto slurp = [](const fs::path &p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  EXPECT_EQ(slurp(d1 / "metrics.csv"), slurp(d2 / "metrics.csv"));
  EXPECT_EQ(slurp(d1 / "metrics.csv"), r1.log.ToCsv());
  EXPECT_EQ(slurp(d1 / "student.mdst"), slurp(d2 / "student.mdst"));
  EXPECT_TRUE(r1.student.BitwiseEqual(r2.student));
  const Checkpoint teacher = LoadCheckpoint(d1 / "teacher_Lect.mdst");
  EXPECT_TRUE(teacher.params.BitwiseEqual(r1.bank.Find(1)->params));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

}  // namespace
}  // namespace mdistill
