// src/eval.cpp

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

#include "mdistill/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include "mdistill/error.hpp"

namespace mdistill {

namespace fs = std::filesystem;

EditCounts Levenshtein(std::span<const std::uint32_t> ref, std::span<const std::uint32_t> hyp) {
  struct Cell {
    std::uint64_t cost;
    EditCounts counts;
  };
  // Lexicographic (cost, -substitutions); strict improvement only, so the
  // candidate order below is the tie-break.
  auto better = [](const Cell &a, const Cell &b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.counts.substitutions > b.counts.substitutions;
  };
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, {0, 0, j}};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {i, {0, i, 0}};
    for (std::size_t j = 1; j <= m; ++j) {
      Cell best = prev[j - 1];
      if (ref[i - 1] != hyp[j - 1]) {
        best.cost += 1;
        best.counts.substitutions += 1;
      }
      Cell del = prev[j];
      del.cost += 1;
      del.counts.deletions += 1;
      if (better(del, best)) best = del;
      Cell ins = cur[j - 1];
      ins.cost += 1;
      ins.counts.insertions += 1;
      if (better(ins, best)) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m].counts;
}

Scorer ModelScorer(const ModelParams &params, const NetworkSpec &spec) {
  return [&params, &spec](const Sample &s) { return Logits(params, spec, s.features); };
}

namespace {

template <typename Fn>
void ParallelForEach(std::size_t n, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

double FrameAccuracy(const Scorer &scorer, std::span<const Sample> samples, TaskMode mode) {
  if (samples.empty()) Fail(ErrorCode::kInvalidArgument, "frame accuracy of an empty set");
  const std::uint32_t offset = LabelOffset(mode);
  std::vector<std::size_t> frames(samples.size()), correct(samples.size());
  ParallelForEach(samples.size(), [&](std::size_t i) {
    const Matrix scores = scorer(samples[i]);
    if (scores.rows() != samples[i].frame_labels.size())
      Fail(ErrorCode::kShapeMismatch, "scorer frame count differs from labels");
    frames[i] = scores.rows();
    for (std::size_t t = 0; t < scores.rows(); ++t)
      if (ArgMax(scores.row(t)) == samples[i].frame_labels[t] + offset) ++correct[i];
  });
  std::size_t total = 0, hits = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    total += frames[i];
    hits += correct[i];
  }
  if (total == 0) Fail(ErrorCode::kInvalidArgument, "frame accuracy over zero frames");
  return static_cast<double>(hits) / static_cast<double>(total);
}

double FrameAccuracy(const ModelParams &params, const NetworkSpec &spec,
                     std::span<const Sample> samples, TaskMode mode) {
  return FrameAccuracy(ModelScorer(params, spec), samples, mode);
}

LabelSeq DecodeScores(const Matrix &scores, TaskMode mode) {
  if (mode == TaskMode::kFrameCe) return FrameDecode(scores);
  LabelSeq out = GreedyDecode(PosteriorSeq::FromLogits(scores));
  for (auto &l : out) l -= 1;
  return out;
}

EvalResult TokenErrorRate(const Scorer &scorer, std::span<const Sample> samples, TaskMode mode) {
  const std::uint32_t offset = LabelOffset(mode);
  std::vector<EditCounts> edits(samples.size());
  std::vector<std::size_t> frames(samples.size()), correct(samples.size());
  ParallelForEach(samples.size(), [&](std::size_t i) {
    const Matrix scores = scorer(samples[i]);
    frames[i] = scores.rows();
    for (std::size_t t = 0; t < scores.rows() && t < samples[i].frame_labels.size(); ++t)
      if (ArgMax(scores.row(t)) == samples[i].frame_labels[t] + offset) ++correct[i];
    edits[i] = Levenshtein(samples[i].tokens, DecodeScores(scores, mode));
  });
  EvalResult r;
  std::size_t total_frames = 0, hits = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    r.substitutions += edits[i].substitutions;
    r.deletions += edits[i].deletions;
    r.insertions += edits[i].insertions;
    r.ref_tokens += samples[i].tokens.size();
    total_frames += frames[i];
    hits += correct[i];
  }
  r.ter = r.ref_tokens == 0 ? 0.0
                            : static_cast<double>(r.substitutions + r.deletions + r.insertions) /
                                  static_cast<double>(r.ref_tokens);
  r.frame_acc =
      total_frames == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total_frames);
  return r;
}

std::vector<EvalResult> EvaluateByDomain(const std::string &model_name, const ModelParams &params,
                                         const NetworkSpec &spec, const PreparedCorpus &corpus,
                                         Split split, TaskMode mode) {
  std::vector<EvalResult> out;
  const auto &samples = corpus.split(split);
  for (std::size_t d = 0; d < corpus.domain_ids.size(); ++d) {
    std::vector<Sample> subset;
    for (const auto &s : samples)
      if (s.domain_id == corpus.domain_ids[d]) subset.push_back(s);
    if (subset.empty()) continue;
    EvalResult r = TokenErrorRate(ModelScorer(params, spec), subset, mode);
    r.model_name = model_name;
    r.domain_name = corpus.domain_names[d];
    r.split = std::string(SplitName(split));
    out.push_back(std::move(r));
  }
  return out;
}

double RelativeChange(double model, double baseline) {
  if (baseline == 0.0) {
    if (model == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return (model - baseline) / baseline;
}

const ReportCell &ReportGrid::at(const std::string &model, const std::string &domain) const {
  auto mi = std::find(models.begin(), models.end(), model);
  auto di = std::find(domains.begin(), domains.end(), domain);
  if (mi == models.end() || di == domains.end())
    Fail(ErrorCode::kInvalidArgument, "no report cell for " + model + "/" + domain);
  return cells[mi - models.begin()][di - domains.begin()];
}

ReportGrid BuildReport(std::span<const EvalResult> results, const std::string &baseline_name) {
  ReportGrid g;
  g.baseline = baseline_name;
  if (!results.empty() && !results.front().split.empty()) g.split = results.front().split;
  auto index_of = [](std::vector<std::string> &v, const std::string &s) {
    auto it = std::find(v.begin(), v.end(), s);
    if (it != v.end()) return static_cast<std::size_t>(it - v.begin());
    v.push_back(s);
    return v.size() - 1;
  };
  for (const auto &r : results) {
    index_of(g.models, r.model_name);
    index_of(g.domains, r.domain_name);
  }
  if (std::find(g.models.begin(), g.models.end(), baseline_name) == g.models.end())
    Fail(ErrorCode::kInvalidArgument, "baseline '" + baseline_name + "' not among the results");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  g.cells.assign(g.models.size(), std::vector<ReportCell>(g.domains.size(), {nan, nan}));
  for (const auto &r : results)
    g.cells[index_of(g.models, r.model_name)][index_of(g.domains, r.domain_name)].ter = r.ter;
  const std::size_t b = index_of(g.models, baseline_name);
  for (auto &row : g.cells)
    for (std::size_t d = 0; d < g.domains.size(); ++d)
      row[d].rel_delta = RelativeChange(row[d].ter, g.cells[b][d].ter);
  return g;
}

std::string FormatRelative(double rel_delta) {
  if (!std::isfinite(rel_delta)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.1f%%", 100.0 * rel_delta);
  std::string s = buf;
  if (s == "-0.0%" || s == "+0.0%") s = "0.0%";
  return s;
}

std::string RenderReport(const ReportGrid &grid) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"model"};
  for (const auto &d : grid.domains) header.push_back(grid.split + "-" + d);
  table.push_back(header);
  for (std::size_t m = 0; m < grid.models.size(); ++m) {
    std::vector<std::string> row{grid.models[m]};
    for (std::size_t d = 0; d < grid.domains.size(); ++d) {
      const ReportCell &c = grid.cells[m][d];
      if (std::isnan(c.ter)) {
        row.push_back("-");
        continue;
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * c.ter);
      std::string cell = buf;
      if (grid.models[m] != grid.baseline) cell += " (" + FormatRelative(c.rel_delta) + ")";
      row.push_back(cell);
    }
    table.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto &row : table)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  os << "TER (%) per " << grid.split << " domain, relative change vs " << grid.baseline << "\n";
  for (const auto &row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << "\n";
  }
  return os.str();
}

std::string ReportCsv(const ReportGrid &grid) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  char buf[512];
  for (std::size_t m = 0; m < grid.models.size(); ++m)
    for (std::size_t d = 0; d < grid.domains.size(); ++d) {
      const ReportCell &c = grid.cells[m][d];
      if (std::isnan(c.ter)) continue;
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g\n", grid.models[m].c_str(),
                    grid.domains[d].c_str(), c.ter, c.rel_delta);
      out += buf;
    }
  return out;
}

void WriteReportCsv(const ReportGrid &grid, const fs::path &path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path.string());
  os << ReportCsv(grid);
}

ReportGrid ReadReportCsv(const fs::path &path, const std::string &baseline_name) {
  std::ifstream is(path);
  if (!is) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kReportCsvHeader)
    Fail(ErrorCode::kIo, "unexpected report header in " + path.string());
  std::vector<EvalResult> results;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 4) Fail(ErrorCode::kIo, "malformed report row: " + line);
    EvalResult r;
    r.model_name = f[0];
    r.domain_name = f[1];
    try {
      r.ter = std::stod(f[2]);
    } catch (const std::exception &) {
      Fail(ErrorCode::kIo, "malformed report row: " + line);
    }
    results.push_back(std::move(r));
  }
  return BuildReport(results, baseline_name);
}

std::string StageLabelForModel(const std::string &model) {
  if (model == "baseline") return "multicondition";
  if (model.rfind("teacher_", 0) == 0) return "finetune";
  if (model == "student") return "student";
  return "other";
}

std::string CurvesCsv(const MetricsLog &log) {
  if (log.rows().empty()) Fail(ErrorCode::kInvalidArgument, "cannot export curves of an empty log");
  std::string out = std::string(kCurvesCsvHeader) + "\n";
  char buf[512];
  for (const auto &r : log.rows()) {
    if (r.domain != "all" || (r.split != "train" && r.split != "dev")) continue;
    std::snprintf(buf, sizeof(buf), "%s,%s,%u,%s,%.17g\n", r.stage.c_str(),
                  StageLabelForModel(r.stage).c_str(), r.epoch, r.split.c_str(), r.frame_acc);
    out += buf;
  }
  return out;
}

void ExportCurves(const MetricsLog &log, const fs::path &path) {
  const std::string csv = CurvesCsv(log);
  std::ofstream os(path, std::ios::trunc);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path.string());
  os << csv;
}

}  // namespace mdistill
