// src/synthcorpus.cpp

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

#include "mdistill/synthcorpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "binary_io.hpp"
#include "mdistill/error.hpp"

namespace mdistill {

namespace fs = std::filesystem;
using nlohmann::json;

void DomainConfig::Validate() const {
  auto require = [this](bool ok, const char *what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, "domain '" + name + "': " + what);
  };
  require(!name.empty(), "empty name");
  require(duration_min >= 1, "duration_min must be >= 1");
  require(duration_max >= duration_min, "duration_max must be >= duration_min");
  require(emission_noise_sigma >= 0.0 && std::isfinite(emission_noise_sigma),
          "emission_noise_sigma must be >= 0");
  require(mean_shift_sigma >= 0.0 && std::isfinite(mean_shift_sigma),
          "mean_shift_sigma must be >= 0");
  require(!reverb_tau || (*reverb_tau > 0.0 && std::isfinite(*reverb_tau)),
          "reverb_tau must be > 0");
  require(!noise_snr_db || std::isfinite(*noise_snr_db), "noise_snr_db must be finite");
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

std::uint32_t SplitCounts::of(Split split) const {
  switch (split) {
    case Split::kTrain: return train;
    case Split::kDev: return dev;
    case Split::kTest: return test;
  }
  return 0;
}

const DomainConfig &CorpusManifest::domain(std::uint32_t domain_id) const {
  for (const auto &d : domains)
    if (d.domain_id == domain_id) return d;
  Fail(ErrorCode::kInvalidArgument, "unknown domain id " + std::to_string(domain_id));
}

void CorpusManifest::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, "corpus manifest: " + what);
  };
  require(vocab_size >= 2, "vocab_size must be >= 2");
  require(feature_dim >= 1, "feature_dim must be >= 1");
  require(tokens_min >= 1 && tokens_max >= tokens_min, "token count range");
  require(!domains.empty(), "no domains");
  require(counts.size() == domains.size(), "split counts must match domains");
  for (std::size_t i = 0; i < domains.size(); ++i) {
    domains[i].Validate();
    for (std::size_t j = 0; j < i; ++j) {
      require(domains[j].domain_id != domains[i].domain_id, "duplicate domain id");
      require(domains[j].name != domains[i].name, "duplicate domain name");
    }
    for (Split s : kAllSplits)
      require(counts[i].of(s) >= 1,
              "domain " + domains[i].name + " has no " + std::string(SplitName(s)) + " utterances");
  }
  require(prototypes.rows() == vocab_size && prototypes.cols() == feature_dim,
          "prototype matrix shape");
}

void DrawPrototypes(CorpusManifest *manifest) {
  RngStream rng(manifest->master_seed, HashStreamId({0x70726f746fULL}));
  manifest->prototypes = Matrix(manifest->vocab_size, manifest->feature_dim);
  for (double &v : manifest->prototypes.values()) v = manifest->prototype_scale * rng.Gaussian();
}

std::vector<DomainConfig> StyleDomains() {
  DomainConfig read{0, "Read", 6, 10, 0.3, 0.0, std::nullopt, 0, std::nullopt};
  DomainConfig lect{1, "Lect", 4, 8, 0.4, 0.3, std::nullopt, 0, std::nullopt};
  DomainConfig spon{2, "Spon", 3, 6, 0.6, 0.6, std::nullopt, 0, std::nullopt};
  return {read, lect, spon};
}

std::vector<DomainConfig> EnvironmentDomains() {
  // Shared speaking style; only the acoustic environment differs.
  DomainConfig near{0, "Near", 4, 8, 0.4, 0.3, std::nullopt, 0, std::nullopt};
  DomainConfig far = near;
  far.domain_id = 1;
  far.name = "Far";
  far.reverb_tau = 3.0;
  far.reverb_taps = 6;
  DomainConfig far_noise = far;
  far_noise.domain_id = 2;
  far_noise.name = "FarNoise";
  far_noise.noise_snr_db = 5.0;
  return {near, far, far_noise};
}

std::uint64_t MakeUtteranceId(Split split, std::uint32_t domain_id, std::uint32_t index) {
  return (static_cast<std::uint64_t>(split) << 56) |
         (static_cast<std::uint64_t>(domain_id & 0xFFFFFFu) << 32) | index;
}

Matrix ApplyEnvironment(const Matrix &frames, const DomainConfig &domain, RngStream &rng) {
  if (!domain.HasEnvironment())
    Fail(ErrorCode::kInvalidArgument, "apply_environment: neither reverb nor noise configured");
  const std::size_t T = frames.rows(), D = frames.cols();
  Matrix out = frames;
  if (domain.reverb_tau && domain.reverb_taps > 0) {
    std::vector<double> kernel(domain.reverb_taps + 1);
    double norm = 0.0;
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      kernel[k] = std::exp(-static_cast<double>(k) / *domain.reverb_tau);
      norm += kernel[k];
    }
    for (std::size_t t = 0; t < T; ++t) {
      auto dst = out.row(t);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (std::size_t k = 0; k < kernel.size() && k <= t; ++k) {
        auto src = frames.row(t - k);
        for (std::size_t d = 0; d < D; ++d) dst[d] += kernel[k] * src[d];
      }
      for (double &v : dst) v /= norm;
    }
  }
  if (domain.noise_snr_db) {
    double power = 0.0;
    for (double v : out.values()) power += v * v;
    power /= static_cast<double>(std::max<std::size_t>(out.size(), 1));
    const double noise_sigma = std::sqrt(power / std::pow(10.0, *domain.noise_snr_db / 10.0));
    for (double &v : out.values()) v += noise_sigma * rng.Gaussian();
  }
  return out;
}

Utterance GenerateUtterance(const CorpusManifest &manifest, const DomainConfig &domain,
                            std::uint64_t utterance_id) {
  RngStream rng(manifest.master_seed, HashStreamId({domain.domain_id, utterance_id}));
  const std::uint32_t L = manifest.vocab_size, D = manifest.feature_dim;

  Utterance utt;
  utt.utterance_id = utterance_id;
  utt.domain_id = domain.domain_id;
  const auto K = rng.UniformInt(manifest.tokens_min, manifest.tokens_max);
  // Adjacent tokens always differ so frame labels collapse back to the
  // token sequence.
  for (std::uint64_t k = 0; k < K; ++k) {
    std::uint32_t tok;
    if (k == 0) {
      tok = static_cast<std::uint32_t>(rng.UniformInt(0, L - 1));
    } else {
      tok = static_cast<std::uint32_t>(rng.UniformInt(0, L - 2));
      if (tok >= utt.tokens.back()) ++tok;
    }
    utt.tokens.push_back(tok);
  }
  for (std::uint32_t tok : utt.tokens) {
    const auto dur = rng.UniformInt(domain.duration_min, domain.duration_max);
    utt.frame_labels.insert(utt.frame_labels.end(), dur, tok);
  }
  std::vector<double> offset(D);
  for (double &v : offset) v = domain.mean_shift_sigma * rng.Gaussian();

  const std::size_t T = utt.frame_labels.size();
  utt.frames = Matrix(T, D);
  for (std::size_t t = 0; t < T; ++t) {
    auto proto = manifest.prototypes.row(utt.frame_labels[t]);
    auto dst = utt.frames.row(t);
    for (std::size_t d = 0; d < D; ++d)
      dst[d] = proto[d] + offset[d] + domain.emission_noise_sigma * rng.Gaussian();
  }
  if (domain.HasEnvironment()) utt.frames = ApplyEnvironment(utt.frames, domain, rng);
  return utt;
}

const std::vector<Utterance> &Corpus::split(Split s) const {
  switch (s) {
    case Split::kTrain: return train;
    case Split::kDev: return dev;
    case Split::kTest: return test;
  }
  return train;
}

std::vector<Utterance> &Corpus::split(Split s) {
  return const_cast<std::vector<Utterance> &>(std::as_const(*this).split(s));
}

namespace {

struct Job {
  const DomainConfig *domain;
  std::uint64_t utterance_id;
};

std::vector<Job> SplitJobs(const CorpusManifest &manifest, Split split) {
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < manifest.domains.size(); ++d) {
    const auto &dom = manifest.domains[d];
    for (std::uint32_t i = 0; i < manifest.counts[d].of(split); ++i)
      jobs.push_back({&dom, MakeUtteranceId(split, dom.domain_id, i)});
  }
  return jobs;
}

}  // namespace

std::vector<Utterance> GenerateSplit(const CorpusManifest &manifest, Split split) {
  manifest.Validate();
  const auto jobs = SplitJobs(manifest, split);
  std::vector<Utterance> out(jobs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(jobs.size()); ++i)
    out[i] = GenerateUtterance(manifest, *jobs[i].domain, jobs[i].utterance_id);
  return out;
}

std::vector<Utterance> GenerateSplitSerial(const CorpusManifest &manifest, Split split) {
  manifest.Validate();
  std::vector<Utterance> out;
  for (const auto &job : SplitJobs(manifest, split))
    out.push_back(GenerateUtterance(manifest, *job.domain, job.utterance_id));
  return out;
}

Corpus GenerateCorpus(const CorpusManifest &manifest) {
  Corpus c;
  c.manifest = manifest;
  for (Split s : kAllSplits) c.split(s) = GenerateSplit(manifest, s);
  return c;
}

// ---------------------------------------------------------------------------
// Feature pipeline

namespace {

Matrix SymmetricDifference(const Matrix &x) {
  const std::size_t T = x.rows(), D = x.cols();
  Matrix d(T, D);
  for (std::size_t t = 0; t < T; ++t) {
    auto next = x.row(t + 1 < T ? t + 1 : T - 1);
    auto prev = x.row(t > 0 ? t - 1 : 0);
    auto dst = d.row(t);
    for (std::size_t k = 0; k < D; ++k) dst[k] = (next[k] - prev[k]) / 2.0;
  }
  return d;
}

}  // namespace

Matrix ComputeDeltas(const Matrix &frames) {
  if (frames.rows() == 0) Fail(ErrorCode::kInvalidArgument, "compute_deltas on empty sequence");
  const std::size_t T = frames.rows(), D = frames.cols();
  Matrix delta = SymmetricDifference(frames);
  Matrix delta2 = SymmetricDifference(delta);
  Matrix out(T, 3 * D);
  for (std::size_t t = 0; t < T; ++t) {
    auto dst = out.row(t);
    std::copy_n(frames.row(t).begin(), D, dst.begin());
    std::copy_n(delta.row(t).begin(), D, dst.begin() + D);
    std::copy_n(delta2.row(t).begin(), D, dst.begin() + 2 * D);
  }
  return out;
}

FeatureView StackSubsample(const Matrix &frames, std::span<const std::uint32_t> frame_labels) {
  const std::size_t T = frames.rows(), D = frames.cols();
  if (T == 0) Fail(ErrorCode::kInvalidArgument, "stack_subsample on empty sequence");
  if (frame_labels.size() != T)
    Fail(ErrorCode::kShapeMismatch, "stack_subsample: label count != frame count");
  const std::size_t out_frames = (T + kSubsampleRate - 1) / kSubsampleRate;
  FeatureView view;
  view.frames = Matrix(out_frames, kStackFrames * D);
  view.labels.resize(out_frames);
  for (std::size_t i = 0; i < out_frames; ++i) {
    const std::size_t anchor = i * kSubsampleRate;
    auto dst = view.frames.row(i);
    for (std::size_t j = 0; j < kStackFrames; ++j) {
      const std::size_t src = std::min(anchor + j, T - 1);
      std::copy_n(frames.row(src).begin(), D, dst.begin() + j * D);
    }
    view.labels[i] = frame_labels[anchor];
  }
  return view;
}

FeatureView ExtractFeatures(const Utterance &utt) {
  return StackSubsample(ComputeDeltas(utt.frames), utt.frame_labels);
}

MvnStats FitGlobalMvn(std::span<const FeatureView> training_views) {
  std::size_t n = 0;
  std::size_t dim = 0;
  for (const auto &v : training_views) {
    if (v.frames.rows() == 0) continue;
    if (dim == 0) dim = v.frames.cols();
    if (v.frames.cols() != dim) Fail(ErrorCode::kShapeMismatch, "mvn: inconsistent feature dims");
    n += v.frames.rows();
  }
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "mvn: empty training set");
  MvnStats stats;
  stats.mean.assign(dim, 0.0);
  stats.stddev.assign(dim, 0.0);
  for (const auto &v : training_views)
    for (std::size_t t = 0; t < v.frames.rows(); ++t) {
      auto row = v.frames.row(t);
      for (std::size_t d = 0; d < dim; ++d) stats.mean[d] += row[d];
    }
  for (double &m : stats.mean) m /= static_cast<double>(n);
  for (const auto &v : training_views)
    for (std::size_t t = 0; t < v.frames.rows(); ++t) {
      auto row = v.frames.row(t);
      for (std::size_t d = 0; d < dim; ++d) {
        const double c = row[d] - stats.mean[d];
        stats.stddev[d] += c * c;
      }
    }
  for (double &s : stats.stddev) s = std::max(std::sqrt(s / static_cast<double>(n)), kMvnStdFloor);
  return stats;
}

FeatureView ApplyMvn(FeatureView view, const MvnStats &stats) {
  if (view.frames.cols() != stats.mean.size())
    Fail(ErrorCode::kShapeMismatch, "mvn: feature dim differs from statistics");
  for (std::size_t t = 0; t < view.frames.rows(); ++t) {
    auto row = view.frames.row(t);
    for (std::size_t d = 0; d < row.size(); ++d)
      row[d] = stats.stddev[d] <= kMvnStdFloor ? 0.0 : (row[d] - stats.mean[d]) / stats.stddev[d];
  }
  return view;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr char kSplitMagic[4] = {'M', 'D', 'C', 'P'};

json DomainToJson(const DomainConfig &d) {
  json j;
  j["domain_id"] = d.domain_id;
  j["name"] = d.name;
  j["duration_min"] = d.duration_min;
  j["duration_max"] = d.duration_max;
  j["emission_noise_sigma"] = d.emission_noise_sigma;
  j["mean_shift_sigma"] = d.mean_shift_sigma;
  j["reverb_tau"] = d.reverb_tau ? json(*d.reverb_tau) : json(nullptr);
  j["reverb_taps"] = d.reverb_taps;
  j["noise_snr_db"] = d.noise_snr_db ? json(*d.noise_snr_db) : json(nullptr);
  return j;
}

DomainConfig DomainFromJson(const json &j) {
  DomainConfig d;
  d.domain_id = j.at("domain_id").get<std::uint32_t>();
  d.name = j.at("name").get<std::string>();
  d.duration_min = j.at("duration_min").get<std::uint32_t>();
  d.duration_max = j.at("duration_max").get<std::uint32_t>();
  d.emission_noise_sigma = j.at("emission_noise_sigma").get<double>();
  d.mean_shift_sigma = j.at("mean_shift_sigma").get<double>();
  if (!j.at("reverb_tau").is_null()) d.reverb_tau = j.at("reverb_tau").get<double>();
  d.reverb_taps = j.at("reverb_taps").get<std::uint32_t>();
  if (!j.at("noise_snr_db").is_null()) d.noise_snr_db = j.at("noise_snr_db").get<double>();
  return d;
}

json ManifestToJson(const CorpusManifest &m) {
  json j;
  j["format_version"] = kCorpusVersion;
  j["vocab_size"] = m.vocab_size;
  j["feature_dim"] = m.feature_dim;
  j["master_seed"] = m.master_seed;
  j["tokens_min"] = m.tokens_min;
  j["tokens_max"] = m.tokens_max;
  j["prototype_scale"] = m.prototype_scale;
  j["domains"] = json::array();
  for (const auto &d : m.domains) j["domains"].push_back(DomainToJson(d));
  json splits;
  for (Split s : kAllSplits) {
    json per_domain = json::object();
    for (std::size_t i = 0; i < m.domains.size(); ++i)
      per_domain[m.domains[i].name] = m.counts[i].of(s);
    splits[std::string(SplitName(s))] = per_domain;
  }
  j["splits"] = splits;
  json protos = json::array();
  for (std::size_t r = 0; r < m.prototypes.rows(); ++r) {
    auto row = m.prototypes.row(r);
    protos.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["prototype_means"] = protos;
  return j;
}

CorpusManifest ManifestFromJson(const json &j) {
  const auto version = j.at("format_version").get<std::uint32_t>();
  if (version != kCorpusVersion)
    Fail(ErrorCode::kVersionMismatch, "corpus manifest version " + std::to_string(version) +
                                          " is not supported");
  CorpusManifest m;
  m.vocab_size = j.at("vocab_size").get<std::uint32_t>();
  m.feature_dim = j.at("feature_dim").get<std::uint32_t>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.tokens_min = j.at("tokens_min").get<std::uint32_t>();
  m.tokens_max = j.at("tokens_max").get<std::uint32_t>();
  m.prototype_scale = j.at("prototype_scale").get<double>();
  for (const auto &d : j.at("domains")) m.domains.push_back(DomainFromJson(d));
  const json &splits = j.at("splits");
  for (const auto &d : m.domains) {
    SplitCounts c;
    c.train = splits.at("train").at(d.name).get<std::uint32_t>();
    c.dev = splits.at("dev").at(d.name).get<std::uint32_t>();
    c.test = splits.at("test").at(d.name).get<std::uint32_t>();
    m.counts.push_back(c);
  }
  for (Split s : kAllSplits)
    if (splits.at(std::string(SplitName(s))).size() != m.domains.size())
      Fail(ErrorCode::kCorpusInconsistent, "split table names domains absent from the manifest");
  const json &protos = j.at("prototype_means");
  m.prototypes = Matrix(protos.size(), m.feature_dim);
  for (std::size_t r = 0; r < protos.size(); ++r) {
    const auto row = protos[r].get<std::vector<double>>();
    if (row.size() != m.feature_dim)
      Fail(ErrorCode::kCorpusInconsistent, "prototype row has wrong dimension");
    std::copy(row.begin(), row.end(), m.prototypes.row(r).begin());
  }
  return m;
}

void WriteSplit(const std::vector<Utterance> &utts, const fs::path &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  binio::WriteBytes(os, kSplitMagic, 4);
  binio::WriteU32(os, kCorpusVersion);
  binio::WriteU32(os, static_cast<std::uint32_t>(utts.size()));
  for (const auto &u : utts) {
    binio::WriteU64(os, u.utterance_id);
    binio::WriteU32(os, u.domain_id);
    binio::WriteU32(os, static_cast<std::uint32_t>(u.frames.rows()));
    binio::WriteU32(os, static_cast<std::uint32_t>(u.tokens.size()));
    binio::WriteU32(os, static_cast<std::uint32_t>(u.frames.cols()));
    binio::WriteF64Array(os, u.frames.data(), u.frames.size());
    binio::WriteBytes(os, u.frame_labels.data(), u.frame_labels.size() * sizeof(std::uint32_t));
    binio::WriteBytes(os, u.tokens.data(), u.tokens.size() * sizeof(std::uint32_t));
  }
  if (!os) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<Utterance> ReadSplit(const fs::path &path, const CorpusManifest &m, Split split) {
  if (!fs::exists(path))
    Fail(ErrorCode::kCorpusInconsistent, "split file " + path.string() + " is missing");
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIo, "cannot open " + path.string());
  constexpr const char *kTrunc = "truncated corpus split file";
  char magic[4];
  binio::ReadBytes(is, magic, 4, kTrunc);
  if (!std::equal(magic, magic + 4, kSplitMagic))
    Fail(ErrorCode::kBadMagic, "bad magic in " + path.string());
  const std::uint32_t version = binio::ReadU32(is, kTrunc);
  if (version != kCorpusVersion)
    Fail(ErrorCode::kVersionMismatch, "split file version " + std::to_string(version));
  const std::uint32_t count = binio::ReadU32(is, kTrunc);

  std::map<std::uint32_t, std::uint32_t> per_domain;
  std::vector<Utterance> utts(count);
  for (auto &u : utts) {
    u.utterance_id = binio::ReadU64(is, kTrunc);
    u.domain_id = binio::ReadU32(is, kTrunc);
    const std::uint32_t T = binio::ReadU32(is, kTrunc);
    const std::uint32_t K = binio::ReadU32(is, kTrunc);
    const std::uint32_t D = binio::ReadU32(is, kTrunc);
    if (D != m.feature_dim || K == 0 || T < K || T > (1u << 24))
      Fail(ErrorCode::kCorpusInconsistent, "utterance header inconsistent with manifest");
    u.frames = Matrix(T, D);
    binio::ReadF64Array(is, u.frames.data(), u.frames.size(), kTrunc);
    u.frame_labels.resize(T);
    binio::ReadBytes(is, u.frame_labels.data(), T * sizeof(std::uint32_t), kTrunc);
    u.tokens.resize(K);
    binio::ReadBytes(is, u.tokens.data(), K * sizeof(std::uint32_t), kTrunc);
    for (std::uint32_t l : u.frame_labels)
      if (l >= m.vocab_size) Fail(ErrorCode::kCorpusInconsistent, "frame label outside vocabulary");
    if (Dedup(u.frame_labels) != u.tokens)
      Fail(ErrorCode::kCorpusInconsistent, "frame labels do not collapse to the token sequence");
    ++per_domain[u.domain_id];
  }
  if (!binio::AtEnd(is)) Fail(ErrorCode::kCorpusInconsistent, "trailing bytes in " + path.string());
  for (std::size_t i = 0; i < m.domains.size(); ++i) {
    auto it = per_domain.find(m.domains[i].domain_id);
    const std::uint32_t have = it == per_domain.end() ? 0 : it->second;
    if (have != m.counts[i].of(split))
      Fail(ErrorCode::kCorpusInconsistent,
           std::string(SplitName(split)) + " split holds " + std::to_string(have) +
               " utterances of domain " + m.domains[i].name + ", manifest says " +
               std::to_string(m.counts[i].of(split)));
    per_domain.erase(m.domains[i].domain_id);
  }
  if (!per_domain.empty())
    Fail(ErrorCode::kCorpusInconsistent, "split file contains a domain not in the manifest");
  return utts;
}

}  // namespace

void WriteCorpus(const Corpus &corpus, const fs::path &dir) {
  corpus.manifest.Validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream os(dir / "manifest.json", std::ios::trunc);
    if (!os) Fail(ErrorCode::kIo, "cannot write manifest in " + dir.string());
    os << ManifestToJson(corpus.manifest).dump(2) << "\n";
  }
  for (Split s : kAllSplits)
    WriteSplit(corpus.split(s), dir / (std::string(SplitName(s)) + ".bin"));
}

Corpus ReadCorpus(const fs::path &dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    Fail(ErrorCode::kMissingManifest, "missing manifest: " + manifest_path.string());
  Corpus c;
  try {
    std::ifstream is(manifest_path);
    c.manifest = ManifestFromJson(json::parse(is));
  } catch (const json::exception &e) {
    Fail(ErrorCode::kCorpusInconsistent, std::string("malformed manifest: ") + e.what());
  }
  try {
    c.manifest.Validate();
  } catch (const Error &e) {
    Fail(ErrorCode::kCorpusInconsistent, e.what());
  }
  for (Split s : kAllSplits)
    c.split(s) = ReadSplit(dir / (std::string(SplitName(s)) + ".bin"), c.manifest, s);
  return c;
}

}  // namespace mdistill
