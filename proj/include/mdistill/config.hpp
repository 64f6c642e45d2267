// include/mdistill/config.hpp

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

// Declarative experiment description: corpus, domains, network, training
// and evaluation settings, read from flat "section.key = value" text.
//
//   # comment
//   corpus.preset = style3
//   corpus.master_seed = 7
//   domain.Spon.emission_noise_sigma = 0.7
//   network.hidden_dim = 64
//   train.learning_rate = 0.05
//   eval.baseline = baseline
//
// Parsing is strict: unknown keys, repeated keys and malformed values are
// errors (ErrorCode::kConfig) whose message names the offending key.

#ifndef MDISTILL_CONFIG_HPP_
#define MDISTILL_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mdistill/synthcorpus.hpp"
#include "mdistill/trainer.hpp"

namespace mdistill {

struct EvalSettings {
  Split split = Split::kTest;
  std::string baseline = "baseline";
  std::string report_csv = "report.csv";
  std::string curves_csv = "curves.csv";

  bool operator==(const EvalSettings &) const = default;
};

struct ExperimentConfig {
  std::string preset;       // style3 | env3 | empty
  CorpusManifest manifest;  // prototypes are drawn by BuildManifest()
  PipelineConfig pipeline;
  EvalSettings eval;

  /// Cross-section checks: domains present, ids unique, counts aligned.
  void Validate() const;
};

/// Built-in setups: "style3" (Read / Lect / Spon) and "env3"
/// (Near / Far / FarNoise).  Throws kConfig for other names.
ExperimentConfig PresetConfig(std::string_view name);

/// `preset` (when given) is applied before the text; a corpus.preset line in
/// the text takes effect before any other line regardless of position.
ExperimentConfig ParseConfig(std::string_view text,
                             const std::optional<std::string> &preset = std::nullopt);
ExperimentConfig LoadConfigFile(const std::filesystem::path &path,
                                const std::optional<std::string> &preset = std::nullopt);

/// Every key with its resolved value; ParseConfig(RenderConfig(c)) == c.
std::string RenderConfig(const ExperimentConfig &config);

/// Manifest with the token prototypes drawn from the master seed.
CorpusManifest BuildManifest(const ExperimentConfig &config);

}  // namespace mdistill

#endif  // MDISTILL_CONFIG_HPP_
