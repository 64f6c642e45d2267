// tests/cli_config_test.cpp

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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdistill/cli.hpp"
#include "mdistill/config.hpp"
#include "mdistill/error.hpp"
#include "mdistill/eval.hpp"
#include "test_support.hpp"

namespace mdistill {
namespace {

namespace fs = std::filesystem;

std::string ReadBytes(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

// Small enough that the whole pipeline runs in seconds.
constexpr const char *kTinyConfig =
    "corpus.preset = style3\n"
    "corpus.vocab_size = 6\n"
    "corpus.tokens_min = 2\n"
    "corpus.tokens_max = 4\n"
    "domain.Read.train = 12\ndomain.Read.dev = 4\ndomain.Read.test = 4\n"
    "domain.Lect.train = 12\ndomain.Lect.dev = 4\ndomain.Lect.test = 4\n"
    "domain.Spon.train = 12\ndomain.Spon.dev = 4\ndomain.Spon.test = 4\n"
    "network.hidden_dim = 6\n"
    "network.fsmn_blocks = 1\n"
    "train.max_epochs = 2\n"
    "train.batch_size = 4\n"
    "train.learning_rate = 0.1\n";

TEST(Config, PresetsValidateAndRoundTrip) {
  for (const char *name : {"style3", "env3"}) {
    const ExperimentConfig c = PresetConfig(name);
    EXPECT_NO_THROW(c.Validate());
    EXPECT_EQ(c.manifest.domains.size(), 3u);
    const ExperimentConfig back = ParseConfig(RenderConfig(c));
    EXPECT_EQ(RenderConfig(back), RenderConfig(c));
  }
  EXPECT_EQ(PresetConfig("style3").manifest.domains[0].name, "Read");
  EXPECT_EQ(PresetConfig("env3").manifest.domains[2].name, "FarNoise");
  try {
    PresetConfig("nope");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Config, OverridesApply) {
  const ExperimentConfig c = ParseConfig(kTinyConfig);
  EXPECT_EQ(c.manifest.vocab_size, 6u);
  EXPECT_EQ(c.pipeline.spec.hidden_dim, 6u);
  EXPECT_EQ(c.pipeline.train.batch_size, 4u);
  EXPECT_EQ(c.manifest.counts[1].train, 12u);
  const ExperimentConfig sub = ParseConfig("corpus.domains = Spon,Read\n");
  ASSERT_EQ(sub.manifest.domains.size(), 2u);
  EXPECT_EQ(sub.manifest.domains[0].name, "Spon");
}

TEST(Config, ErrorsNameTheKey) {
  for (const char *text : {"train.bogus = 1\n", "train.learning_rate = abc\n",
                           "train.max_epochs = 1\ntrain.max_epochs = 2\n",
                           "train.student_lr_scale = 0\n"}) {
    try {
      ParseConfig(text).Validate();
      ADD_FAILURE() << text;
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig) << text;
    }
  }
  try {
    ParseConfig("train.bogus = 1\n");
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("train.bogus"), std::string::npos);
  }
}

TEST(Cli, ExitCodesMap) {
  EXPECT_EQ(ExitCodeFor(ErrorCode::kConfig), kExitConfig);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kIo), kExitIo);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kBadMagic), kExitIo);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kMissingDependency), kExitDependency);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kDivergence), kExitDivergence);
}

TEST(Cli, UnknownKeyAndBadArgs) {
  const fs::path dir = testing::ScratchDir("cli_badkey");
  std::ofstream(dir / "bad.cfg") << "network.colour = blue\n";
  const CliRun r = Invoke({"train", "--config", (dir / "bad.cfg").string(), "--dry-run"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("network.colour"), std::string::npos) << r.err;
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(Invoke({"train", "--preset", "style3"}).code, kExitConfig);
  fs::remove_all(dir);
}

TEST(Cli, DryRunWritesNothing) {
  const fs::path dir = testing::ScratchDir("cli_dry");
  const CliRun r = Invoke({"train", "--preset", "env3", "--stage", "student", "--dry-run", "--out",
                        (dir / "out").string(), "--corpus", (dir / "corpus").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("# stage: student"), std::string::npos);
  EXPECT_NE(r.out.find("domain.FarNoise.noise_snr_db"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out"));
  fs::remove_all(dir);
}

TEST(Cli, EndToEnd) {
  const fs::path dir = testing::ScratchDir("cli_e2e");
  const fs::path cfg = dir / "tiny.cfg";
  std::ofstream(cfg) << kTinyConfig;
  const std::string corpus = (dir / "corpus").string(), models = (dir / "models").string();

  ASSERT_EQ(Invoke({"gen-data", "--config", cfg.string(), "--out", corpus}).code, kExitOk);
  const std::string first = ReadBytes(dir / "corpus" / "train.bin");
  ASSERT_FALSE(first.empty());
  ASSERT_EQ(Invoke({"gen-data", "--config", cfg.string(), "--out", corpus}).code, kExitOk);
  EXPECT_EQ(ReadBytes(dir / "corpus" / "train.bin"), first);

  // The student needs teachers; nothing is written when they are missing.
  const CliRun early = Invoke({"train", "--config", cfg.string(), "--corpus", corpus, "--stage",
                            "student", "--out", models});
  EXPECT_EQ(early.code, kExitDependency);
  EXPECT_NE(early.err.find("baseline"), std::string::npos) << early.err;
  EXPECT_FALSE(fs::exists(dir / "models" / "student.mdst"));

  EXPECT_EQ(Invoke({"train", "--config", cfg.string(), "--corpus", corpus, "--stage", "baseline",
                 "--out", models})
                .code,
            kExitOk);
  EXPECT_EQ(Invoke({"train", "--config", cfg.string(), "--corpus", corpus, "--stage", "student",
                 "--out", models})
                .code,
            kExitDependency);
  for (const char *stage : {"teachers", "student"})
    EXPECT_EQ(Invoke({"train", "--config", cfg.string(), "--corpus", corpus, "--stage", stage,
                   "--out", models})
                  .code,
              kExitOk)
        << stage;
  for (const char *f : {"baseline.mdst", "teacher_Read.mdst", "teacher_Lect.mdst",
                        "teacher_Spon.mdst", "student.mdst", "metrics.csv"})
    EXPECT_TRUE(fs::exists(dir / "models" / f)) << f;

  const std::string staged = ReadBytes(dir / "models" / "metrics.csv");
  const std::string models_all = (dir / "models_all").string();
  ASSERT_EQ(Invoke({"train", "--config", cfg.string(), "--corpus", corpus, "--stage", "all", "--out",
                 models_all})
                .code,
            kExitOk);
  EXPECT_EQ(ReadBytes(dir / "models_all" / "metrics.csv"), staged);
  EXPECT_EQ(ReadBytes(dir / "models_all" / "student.mdst"),
            ReadBytes(dir / "models" / "student.mdst"));

  const std::string report_dir = (dir / "report").string();
  const CliRun ev = Invoke({"eval", "--config", cfg.string(), "--corpus", corpus, "--models", models,
                         "--out", report_dir});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  EXPECT_NE(ev.out.find("test-Spon"), std::string::npos);
  const std::string report = ReadBytes(dir / "report" / "report.csv");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 16);  // header + 5 x 3
  EXPECT_TRUE(fs::exists(dir / "report" / "curves.csv"));

  const CliRun rep = Invoke({"report", "--out", report_dir});
  EXPECT_EQ(rep.code, kExitOk);
  EXPECT_EQ(rep.out, ev.out);
  EXPECT_EQ(Invoke({"report", "--out", (dir / "nowhere").string()}).code, kExitDependency);

  // A corrupted corpus is an I/O-class failure.
  std::ofstream(dir / "corpus" / "train.bin", std::ios::binary | std::ios::trunc) << "XXXX";
  EXPECT_EQ(Invoke({"train", "--config", cfg.string(), "--corpus", corpus, "--stage", "baseline",
                 "--out", (dir / "m3").string()})
                .code,
            kExitIo);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace mdistill
