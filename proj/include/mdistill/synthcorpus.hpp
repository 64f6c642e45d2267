// include/mdistill/synthcorpus.hpp

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

// Deterministic synthetic multi-domain corpora and the acoustic feature
// pipeline (delta append, frame stacking with subsampling, global MVN).

#ifndef MDISTILL_SYNTHCORPUS_HPP_
#define MDISTILL_SYNTHCORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdistill/losses.hpp"
#include "mdistill/numcore.hpp"

namespace mdistill {

struct Utterance {
  std::uint64_t utterance_id = 0;
  std::uint32_t domain_id = 0;
  Matrix frames;          // T x D raw features
  LabelSeq frame_labels;  // length T
  LabelSeq tokens;        // length K, no adjacent repeats

  bool operator==(const Utterance &) const = default;
};

struct DomainConfig {
  std::uint32_t domain_id = 0;
  std::string name;
  std::uint32_t duration_min = 6;  // frames per token
  std::uint32_t duration_max = 10;
  double emission_noise_sigma = 0.3;
  double mean_shift_sigma = 0.0;
  std::optional<double> reverb_tau;  // decay constant in frames
  std::uint32_t reverb_taps = 0;
  std::optional<double> noise_snr_db;

  bool HasEnvironment() const { return reverb_tau.has_value() || noise_snr_db.has_value(); }
  void Validate() const;
  bool operator==(const DomainConfig &) const = default;
};

enum class Split { kTrain = 0, kDev = 1, kTest = 2 };
inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kDev, Split::kTest};
std::string_view SplitName(Split split);

struct SplitCounts {
  std::uint32_t train = 600;
  std::uint32_t dev = 60;
  std::uint32_t test = 100;

  std::uint32_t of(Split split) const;
  bool operator==(const SplitCounts &) const = default;
};

struct CorpusManifest {
  std::uint32_t vocab_size = 20;
  std::uint32_t feature_dim = 8;
  std::uint64_t master_seed = 1;
  std::uint32_t tokens_min = 4;
  std::uint32_t tokens_max = 12;
  double prototype_scale = 1.0;
  std::vector<DomainConfig> domains;
  std::vector<SplitCounts> counts;  // aligned with `domains`
  Matrix prototypes;                // vocab_size x feature_dim

  const DomainConfig &domain(std::uint32_t domain_id) const;
  void Validate() const;
  bool operator==(const CorpusManifest &) const = default;
};

/// Fills in the token prototype means from the master seed.
void DrawPrototypes(CorpusManifest *manifest);

/// Speaking-style domains Read / Lect / Spon.
std::vector<DomainConfig> StyleDomains();
/// Environment domains Near / Far / FarNoise.
std::vector<DomainConfig> EnvironmentDomains();

/// Utterance ids encode (split, domain, index) so splits are disjoint.
std::uint64_t MakeUtteranceId(Split split, std::uint32_t domain_id, std::uint32_t index);

/// Deterministic in (master_seed, domain_id, utterance_id).
Utterance GenerateUtterance(const CorpusManifest &manifest, const DomainConfig &domain,
                            std::uint64_t utterance_id);

/// Feature-space reverberation (normalized exponential smearing over
/// reverb_taps past frames) followed by additive noise at noise_snr_db.
Matrix ApplyEnvironment(const Matrix &frames, const DomainConfig &domain, RngStream &rng);

struct Corpus {
  CorpusManifest manifest;
  std::vector<Utterance> train;
  std::vector<Utterance> dev;
  std::vector<Utterance> test;

  const std::vector<Utterance> &split(Split s) const;
  std::vector<Utterance> &split(Split s);
  bool operator==(const Corpus &) const = default;
};

/// All utterances of one split, ordered by domain then index.  Parallel over
/// utterances; GenerateSplitSerial is the single-threaded reference.
std::vector<Utterance> GenerateSplit(const CorpusManifest &manifest, Split split);
std::vector<Utterance> GenerateSplitSerial(const CorpusManifest &manifest, Split split);
Corpus GenerateCorpus(const CorpusManifest &manifest);

// ---------------------------------------------------------------------------
// Feature pipeline

inline constexpr std::size_t kStackFrames = 8;
inline constexpr std::size_t kSubsampleRate = 3;

struct FeatureView {
  Matrix frames;
  LabelSeq labels;
};

/// [x | delta | delta-delta] with delta_t = (x_{t+1} - x_{t-1}) / 2 and
/// edge clamping.
Matrix ComputeDeltas(const Matrix &frames);

/// Anchors t = 0, 3, 6, ...; each output row concatenates frames
/// t .. t+7 (right edge repeated).  Labels are taken at the anchors.
FeatureView StackSubsample(const Matrix &frames, std::span<const std::uint32_t> frame_labels);

/// ComputeDeltas followed by StackSubsample.
FeatureView ExtractFeatures(const Utterance &utt);

struct MvnStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at kMvnStdFloor
};
inline constexpr double kMvnStdFloor = 1e-8;

MvnStats FitGlobalMvn(std::span<const FeatureView> training_views);
/// Degenerate (floored) dimensions map to exactly zero.
FeatureView ApplyMvn(FeatureView view, const MvnStats &stats);

// ---------------------------------------------------------------------------
// Persistence: <dir>/manifest.json plus <dir>/{train,dev,test}.bin.
// Split files: "MDCP", u32 version, u32 utterance count, then per utterance
// u64 id, u32 domain, u32 T, u32 K, u32 D, f64[T*D], u32[T], u32[K].

inline constexpr std::uint32_t kCorpusVersion = 1;

void WriteCorpus(const Corpus &corpus, const std::filesystem::path &dir);
Corpus ReadCorpus(const std::filesystem::path &dir);

}  // namespace mdistill

#endif  // MDISTILL_SYNTHCORPUS_HPP_
