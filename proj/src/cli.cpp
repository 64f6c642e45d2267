// src/cli.cpp

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

#include "mdistill/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "mdistill/config.hpp"
#include "mdistill/eval.hpp"
#include "mdistill/parallel.hpp"
#include "mdistill/trainer.hpp"

namespace mdistill {

namespace fs = std::filesystem;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kIo:
    case ErrorCode::kMissingManifest:
    case ErrorCode::kCorpusInconsistent:
    case ErrorCode::kBadMagic:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kHeaderInconsistent:
    case ErrorCode::kTruncated:
      return kExitIo;
    case ErrorCode::kMissingDependency:
    case ErrorCode::kUnroutedDomain:
      return kExitDependency;
    case ErrorCode::kDivergence:
      return kExitDivergence;
    default:
      return kExitFailure;
  }
}

namespace {

struct ConfigSource {
  std::string config_path;
  std::string preset;

  ExperimentConfig Load() const {
    std::optional<std::string> p;
    if (!preset.empty()) p = preset;
    if (!config_path.empty()) return LoadConfigFile(config_path, p);
    return ParseConfig("", p);
  }
};

void AddConfigOptions(CLI::App *cmd, ConfigSource *src) {
  cmd->add_option("--config", src->config_path, "experiment config file");
  cmd->add_option("--preset", src->preset, "built-in preset applied first (style3, env3)");
}

void EnsureDir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

fs::path RequireCheckpoint(const fs::path &dir, const std::string &name) {
  const fs::path p = dir / (name + ".mdst");
  if (!fs::exists(p))
    Fail(ErrorCode::kMissingDependency, "missing prerequisite checkpoint " + p.string());
  return p;
}

ModelParams LoadCompatible(const fs::path &path, const NetworkSpec &spec) {
  Checkpoint ck = LoadCheckpoint(path);
  if (!(ck.spec == spec))
    Fail(ErrorCode::kConfig,
         "checkpoint " + path.string() + " was trained with a different network configuration");
  return std::move(ck.params);
}

int StageOrder(const std::string &tag) {
  if (tag == "baseline") return 0;
  if (tag.rfind("teacher_", 0) == 0) return 1;
  if (tag == "student") return 2;
  return 3;
}

// Replaces the rows of the models in `fresh` inside <dir>/metrics.csv, so a
// stage can be re-run without duplicating rows.
void MergeMetrics(const fs::path &dir, const MetricsLog &fresh) {
  const fs::path path = dir / "metrics.csv";
  std::vector<MetricsRow> rows;
  if (fs::exists(path)) {
    std::vector<std::string> replaced;
    for (const auto &r : fresh.rows())
      if (std::find(replaced.begin(), replaced.end(), r.stage) == replaced.end())
        replaced.push_back(r.stage);
    const MetricsLog existing = MetricsLog::ReadCsv(path);
    for (const auto &r : existing.rows())
      if (std::find(replaced.begin(), replaced.end(), r.stage) == replaced.end()) rows.push_back(r);
  }
  rows.insert(rows.end(), fresh.rows().begin(), fresh.rows().end());
  std::stable_sort(rows.begin(), rows.end(), [](const MetricsRow &a, const MetricsRow &b) {
    return StageOrder(a.stage) < StageOrder(b.stage);
  });
  MetricsLog merged;
  for (const auto &r : rows) merged.Append(r);
  merged.WriteCsv(path);
}

int CmdGenData(const ConfigSource &src, const std::string &out_dir, std::ostream &out) {
  const ExperimentConfig cfg = src.Load();
  const Corpus corpus = GenerateCorpus(BuildManifest(cfg));
  WriteCorpus(corpus, out_dir);
  out << "wrote corpus to " << out_dir << ": " << corpus.manifest.domains.size() << " domains, "
      << corpus.train.size() << "/" << corpus.dev.size() << "/" << corpus.test.size()
      << " train/dev/test utterances\n";
  return kExitOk;
}

int CmdTrain(const ConfigSource &src, const std::string &corpus_dir, const std::string &stage,
             const std::string &out_dir, bool dry_run, std::ostream &out) {
  const ExperimentConfig cfg = src.Load();
  if (dry_run) {
    out << "# stage: " << stage << "\n" << RenderConfig(cfg);
    return kExitOk;
  }
  const PreparedCorpus corpus = PrepareCorpus(ReadCorpus(corpus_dir));
  const PipelineConfig &pc = cfg.pipeline;
  const NetworkSpec spec = ResolveSpec(pc, corpus);
  const fs::path dir(out_dir);

  auto report = [&](const std::string &name, double acc) {
    out << name << ": best dev frame accuracy " << acc << "\n";
  };

  if (stage == "all") {
    EnsureDir(dir);
    PipelineResult r = RunPipeline(pc, corpus, dir);
    report("baseline", r.baseline_dev_acc);
    report("student", r.student_dev_acc);
    return kExitOk;
  }

  // Dependencies are checked before any output is written.
  std::optional<ModelParams> baseline;
  if (stage == "teachers" || stage == "student")
    baseline = LoadCompatible(RequireCheckpoint(dir, "baseline"), spec);
  std::vector<Teacher> teachers;
  if (stage == "student")
    for (std::size_t i = 0; i < corpus.domain_ids.size(); ++i) {
      const std::string name = TeacherCheckpointName(corpus.domain_names[i]);
      teachers.push_back({corpus.domain_ids[i], corpus.domain_names[i], spec,
                          LoadCompatible(RequireCheckpoint(dir, name), spec)});
    }

  EnsureDir(dir);
  MetricsLog log;
  if (stage == "baseline") {
    StageResult r = RunBaselineStage(pc, corpus, &log);
    SaveCheckpoint(r.params, spec, dir / "baseline.mdst");
    report("baseline", r.best_dev_acc);
  } else if (stage == "teachers") {
    const TeacherBank bank = RunTeacherStage(pc, corpus, *baseline, &log);
    for (const auto &t : bank.teachers)
      SaveCheckpoint(t.params, t.spec, dir / (TeacherCheckpointName(t.name) + ".mdst"));
    out << "trained " << bank.teachers.size() << " teachers\n";
  } else {
    const TeacherBank bank = TeacherBank::WithUniformWeights(std::move(teachers));
    StageResult r = RunStudentStage(pc, corpus, *baseline, bank, &log);
    SaveCheckpoint(r.params, spec, dir / "student.mdst");
    report("student", r.best_dev_acc);
  }
  MergeMetrics(dir, log);
  return kExitOk;
}

int CmdEval(const ConfigSource &src, const std::string &corpus_dir, const std::string &models_dir,
            const std::string &out_dir, std::ostream &out) {
  const ExperimentConfig cfg = src.Load();
  const PreparedCorpus corpus = PrepareCorpus(ReadCorpus(corpus_dir));
  const fs::path mdir(models_dir);

  // Canonical order: baseline, teachers in domain order, student, others.
  std::vector<std::string> names;
  names.push_back(cfg.eval.baseline);
  for (const auto &d : corpus.domain_names) names.push_back(TeacherCheckpointName(d));
  names.push_back("student");
  std::vector<std::string> extra;
  if (fs::is_directory(mdir))
    for (const auto &entry : fs::directory_iterator(mdir))
      if (entry.path().extension() == ".mdst") {
        const std::string stem = entry.path().stem().string();
        if (std::find(names.begin(), names.end(), stem) == names.end()) extra.push_back(stem);
      }
  std::sort(extra.begin(), extra.end());
  names.insert(names.end(), extra.begin(), extra.end());

  RequireCheckpoint(mdir, cfg.eval.baseline);
  std::vector<EvalResult> results;
  for (const auto &name : names) {
    const fs::path p = mdir / (name + ".mdst");
    if (!fs::exists(p)) continue;
    const Checkpoint ck = LoadCheckpoint(p);
    TaskMode mode;
    if (ck.spec.output_dim == OutputDim(corpus.vocab_size, TaskMode::kFrameCe))
      mode = TaskMode::kFrameCe;
    else if (ck.spec.output_dim == OutputDim(corpus.vocab_size, TaskMode::kCtc))
      mode = TaskMode::kCtc;
    else
      Fail(ErrorCode::kConfig, "checkpoint " + p.string() + " does not match the corpus vocabulary");
    if (ck.spec.input_dim != corpus.feature_dim)
      Fail(ErrorCode::kConfig, "checkpoint " + p.string() + " does not match the corpus features");
    auto r = EvaluateByDomain(name, ck.params, ck.spec, corpus, cfg.eval.split, mode);
    results.insert(results.end(), r.begin(), r.end());
  }

  const fs::path odir(out_dir);
  EnsureDir(odir);
  const ReportGrid grid = BuildReport(results, cfg.eval.baseline);
  WriteReportCsv(grid, odir / cfg.eval.report_csv);
  if (fs::exists(mdir / "metrics.csv"))
    ExportCurves(MetricsLog::ReadCsv(mdir / "metrics.csv"), odir / cfg.eval.curves_csv);
  out << RenderReport(grid);
  return kExitOk;
}

int CmdReport(const std::string &out_dir, const std::string &baseline, const std::string &metrics,
              std::ostream &out) {
  const fs::path dir(out_dir);
  const fs::path report_path = dir / "report.csv";
  if (!fs::exists(report_path))
    Fail(ErrorCode::kMissingDependency, "missing " + report_path.string() + " (run eval first)");
  const ReportGrid grid = ReadReportCsv(report_path, baseline);
  if (!metrics.empty()) ExportCurves(MetricsLog::ReadCsv(metrics), dir / "curves.csv");
  out << RenderReport(grid);
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"mdistill: multi-domain teacher-student acoustic model lab", "mdistill"};
  app.require_subcommand(1);

  ConfigSource gen_src, train_src, eval_src;
  std::string gen_out, corpus_dir, stage = "all", train_out, models_dir, eval_out, report_out;
  std::string report_baseline = "baseline", report_metrics;
  bool dry_run = false;

  auto *gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  AddConfigOptions(gen, &gen_src);
  gen->add_option("--out", gen_out, "output corpus directory")->required();

  auto *train = app.add_subcommand("train", "train baseline, teachers and/or student");
  AddConfigOptions(train, &train_src);
  train->add_option("--corpus", corpus_dir, "corpus directory");
  train->add_option("--stage", stage, "baseline | teachers | student | all")
      ->check(CLI::IsMember({"baseline", "teachers", "student", "all"}));
  train->add_option("--out", train_out, "model directory (checkpoints, metrics.csv)");
  train->add_flag("--dry-run", dry_run, "print the resolved config and exit");

  auto *eval = app.add_subcommand("eval", "score checkpoints per domain");
  AddConfigOptions(eval, &eval_src);
  eval->add_option("--corpus", corpus_dir, "corpus directory")->required();
  eval->add_option("--models", models_dir, "model directory")->required();
  eval->add_option("--out", eval_out, "output directory for report.csv and curves.csv")
      ->required();

  auto *rep = app.add_subcommand("report", "print the report grid from report.csv");
  rep->add_option("--out", report_out, "directory holding report.csv")->required();
  rep->add_option("--baseline", report_baseline, "baseline model name");
  rep->add_option("--metrics", report_metrics, "metrics.csv to export as curves.csv");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  ApplyThreadLimit();
  try {
    if (*gen) return CmdGenData(gen_src, gen_out, out);
    if (*train) {
      if (!dry_run && (corpus_dir.empty() || train_out.empty())) {
        err << "error: train needs --corpus and --out\n";
        return kExitConfig;
      }
      return CmdTrain(train_src, corpus_dir, stage, train_out, dry_run, out);
    }
    if (*eval) return CmdEval(eval_src, corpus_dir, models_dir, eval_out, out);
    return CmdReport(report_out, report_baseline, report_metrics, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace mdistill
