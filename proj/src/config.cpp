// src/config.cpp

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

#include "mdistill/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "mdistill/error.hpp"

namespace mdistill {

namespace {

[[noreturn]] void ConfigFail(const std::string &key, const std::string &what) {
  Fail(ErrorCode::kConfig, "config key '" + key + "': " + what);
}

std::string_view Trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseInteger(const std::string &key, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    ConfigFail(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

double ParseDouble(const std::string &key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    ConfigFail(key, "expected a number, got '" + std::string(v) + "'");
  return out;
}

bool ParseBool(const std::string &key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  ConfigFail(key, "expected true or false, got '" + std::string(v) + "'");
}

std::string FormatDouble(double v) {
  // Shortest text that parses back to the same double.
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

struct Field {
  std::function<void(ExperimentConfig *, const std::string &key, std::string_view)> set;
  std::function<std::string(const ExperimentConfig &)> get;
};

template <typename T, typename Access>
Field UintField(Access access) {
  return {[access](ExperimentConfig *c, const std::string &k, std::string_view v) {
            access(*c) = ParseInteger<T>(k, v);
          },
          [access](const ExperimentConfig &c) {
            return std::to_string(access(const_cast<ExperimentConfig &>(c)));
          }};
}

template <typename Access>
Field DoubleField(Access access) {
  return {[access](ExperimentConfig *c, const std::string &k, std::string_view v) {
            access(*c) = ParseDouble(k, v);
          },
          [access](const ExperimentConfig &c) {
            return FormatDouble(access(const_cast<ExperimentConfig &>(c)));
          }};
}

template <typename Access>
Field StringField(Access access) {
  return {[access](ExperimentConfig *c, const std::string &k, std::string_view v) {
            if (v.empty()) ConfigFail(k, "empty value");
            access(*c) = std::string(v);
          },
          [access](const ExperimentConfig &c) {
            return access(const_cast<ExperimentConfig &>(c));
          }};
}

// Global (non-domain) keys in rendering order.
const std::vector<std::pair<std::string, Field>> &GlobalFields() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"corpus.vocab_size",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.manifest.vocab_size; })},
      {"corpus.feature_dim",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.manifest.feature_dim; })},
      {"corpus.master_seed",
       UintField<std::uint64_t>([](C &c) -> auto & { return c.manifest.master_seed; })},
      {"corpus.tokens_min",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.manifest.tokens_min; })},
      {"corpus.tokens_max",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.manifest.tokens_max; })},
      {"corpus.prototype_scale",
       DoubleField([](C &c) -> auto & { return c.manifest.prototype_scale; })},
      {"network.architecture",
       {[](C *c, const std::string &k, std::string_view v) {
          try {
            c->pipeline.spec.architecture = ParseArchitecture(v);
          } catch (const Error &e) {
            ConfigFail(k, e.what());
          }
        },
        [](const C &c) { return std::string(ArchitectureName(c.pipeline.spec.architecture)); }}},
      {"network.hidden_dim",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.hidden_dim; })},
      {"network.fsmn_blocks",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.fsmn_blocks; })},
      {"network.lookback_order",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.lookback_order; })},
      {"network.lookahead_order",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.lookahead_order; })},
      {"network.stride_back",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.stride_back; })},
      {"network.stride_ahead",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.stride_ahead; })},
      {"network.lstm_layers",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.lstm_layers; })},
      {"network.lstm_proj_dim",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.spec.lstm_proj_dim; })},
      {"train.task_mode",
       {[](C *c, const std::string &k, std::string_view v) {
          try {
            c->pipeline.train.task_mode = ParseTaskMode(v);
          } catch (const Error &e) {
            ConfigFail(k, e.what());
          }
        },
        [](const C &c) { return std::string(TaskModeName(c.pipeline.train.task_mode)); }}},
      {"train.learning_rate",
       DoubleField([](C &c) -> auto & { return c.pipeline.train.learning_rate; })},
      {"train.lr_halving_threshold",
       DoubleField([](C &c) -> auto & { return c.pipeline.train.lr_halving_threshold; })},
      {"train.max_epochs",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.train.max_epochs; })},
      {"train.batch_size",
       UintField<std::uint32_t>([](C &c) -> auto & { return c.pipeline.train.batch_size; })},
      {"train.clip_bound", DoubleField([](C &c) -> auto & { return c.pipeline.train.clip_bound; })},
      {"train.w_hard", DoubleField([](C &c) -> auto & { return c.pipeline.train.w_hard; })},
      {"train.shuffle_seed",
       UintField<std::uint64_t>([](C &c) -> auto & { return c.pipeline.train.shuffle_seed; })},
      {"train.init_seed",
       UintField<std::uint64_t>([](C &c) -> auto & { return c.pipeline.init_seed; })},
      {"train.finetune_lr_scale",
       DoubleField([](C &c) -> auto & { return c.pipeline.finetune_lr_scale; })},
      {"train.student_lr_scale",
       DoubleField([](C &c) -> auto & { return c.pipeline.student_lr_scale; })},
      {"train.finetune_max_epochs",
       {[](C *c, const std::string &k, std::string_view v) {
          if (v == "none")
            c->pipeline.finetune_max_epochs.reset();
          else
            c->pipeline.finetune_max_epochs = ParseInteger<std::uint32_t>(k, v);
        },
        [](const C &c) {
          return c.pipeline.finetune_max_epochs ? std::to_string(*c.pipeline.finetune_max_epochs)
                                                : std::string("none");
        }}},
      {"train.student_from_scratch",
       {[](C *c, const std::string &k, std::string_view v) {
          c->pipeline.student_from_scratch = ParseBool(k, v);
        },
        [](const C &c) { return std::string(c.pipeline.student_from_scratch ? "true" : "false"); }}},
      {"eval.split",
       {[](C *c, const std::string &k, std::string_view v) {
          for (Split s : kAllSplits)
            if (SplitName(s) == v) {
              c->eval.split = s;
              return;
            }
          ConfigFail(k, "expected train, dev or test, got '" + std::string(v) + "'");
        },
        [](const C &c) { return std::string(SplitName(c.eval.split)); }}},
      {"eval.baseline", StringField([](C &c) -> auto & { return c.eval.baseline; })},
      {"eval.report_csv", StringField([](C &c) -> auto & { return c.eval.report_csv; })},
      {"eval.curves_csv", StringField([](C &c) -> auto & { return c.eval.curves_csv; })},
  };
  return fields;
}

const Field *FindGlobal(const std::string &key) {
  for (const auto &[name, field] : GlobalFields())
    if (name == key) return &field;
  return nullptr;
}

std::size_t DomainIndex(const ExperimentConfig &c, const std::string &name) {
  for (std::size_t i = 0; i < c.manifest.domains.size(); ++i)
    if (c.manifest.domains[i].name == name) return i;
  return c.manifest.domains.size();
}

bool ValidDomainName(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
  });
}

// Keeps (and orders) the listed domains; unknown names become new domains
// with the next free id and default settings.
void SetDomainList(ExperimentConfig *c, const std::string &key, std::string_view value) {
  std::vector<DomainConfig> domains;
  std::vector<SplitCounts> counts;
  std::uint32_t next_id = 0;
  for (const auto &d : c->manifest.domains) next_id = std::max(next_id, d.domain_id + 1);
  std::set<std::string> seen;
  std::stringstream ss{std::string(value)};
  for (std::string item; std::getline(ss, item, ',');) {
    const std::string name(Trim(item));
    if (!ValidDomainName(name)) ConfigFail(key, "invalid domain name '" + name + "'");
    if (!seen.insert(name).second) ConfigFail(key, "domain '" + name + "' listed twice");
    const std::size_t i = DomainIndex(*c, name);
    if (i < c->manifest.domains.size()) {
      domains.push_back(c->manifest.domains[i]);
      counts.push_back(c->manifest.counts[i]);
    } else {
      DomainConfig d;
      d.domain_id = next_id++;
      d.name = name;
      domains.push_back(d);
      counts.push_back(SplitCounts{});
    }
  }
  if (domains.empty()) ConfigFail(key, "at least one domain is required");
  c->manifest.domains = std::move(domains);
  c->manifest.counts = std::move(counts);
}

void SetDomainKey(ExperimentConfig *c, const std::string &key, std::string_view value) {
  // domain.<Name>.<field>
  const std::size_t dot = key.find('.', 7);
  if (dot == std::string::npos) ConfigFail(key, "expected domain.<name>.<field>");
  const std::string name = key.substr(7, dot - 7);
  const std::string field = key.substr(dot + 1);
  const std::size_t i = DomainIndex(*c, name);
  if (i == c->manifest.domains.size())
    ConfigFail(key, "domain '" + name + "' is not defined (see corpus.domains)");
  DomainConfig &d = c->manifest.domains[i];
  SplitCounts &n = c->manifest.counts[i];
  if (field == "duration_min") d.duration_min = ParseInteger<std::uint32_t>(key, value);
  else if (field == "duration_max") d.duration_max = ParseInteger<std::uint32_t>(key, value);
  else if (field == "emission_noise_sigma") d.emission_noise_sigma = ParseDouble(key, value);
  else if (field == "mean_shift_sigma") d.mean_shift_sigma = ParseDouble(key, value);
  else if (field == "reverb_tau") {
    if (value == "none") d.reverb_tau.reset();
    else d.reverb_tau = ParseDouble(key, value);
  } else if (field == "reverb_taps") d.reverb_taps = ParseInteger<std::uint32_t>(key, value);
  else if (field == "noise_snr_db") {
    if (value == "none") d.noise_snr_db.reset();
    else d.noise_snr_db = ParseDouble(key, value);
  } else if (field == "train") n.train = ParseInteger<std::uint32_t>(key, value);
  else if (field == "dev") n.dev = ParseInteger<std::uint32_t>(key, value);
  else if (field == "test") n.test = ParseInteger<std::uint32_t>(key, value);
  else ConfigFail(key, "unknown key");
}

void SetAllCounts(ExperimentConfig *c, const std::string &key, std::string_view value) {
  const auto n = ParseInteger<std::uint32_t>(key, value);
  for (auto &cnt : c->manifest.counts) {
    if (key == "corpus.train_count") cnt.train = n;
    else if (key == "corpus.dev_count") cnt.dev = n;
    else cnt.test = n;
  }
}

struct Line {
  std::size_t number;
  std::string key;
  std::string value;
};

std::vector<Line> Tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::set<std::string> seen;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = Trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos)
      Fail(ErrorCode::kConfig, "config line " + std::to_string(number) + ": expected key = value, got '" +
                                   std::string(raw) + "'");
    std::string key(Trim(raw.substr(0, eq)));
    std::string value(Trim(raw.substr(eq + 1)));
    if (key.empty())
      Fail(ErrorCode::kConfig, "config line " + std::to_string(number) + ": empty key");
    if (!seen.insert(key).second) ConfigFail(key, "given more than once");
    lines.push_back({number, std::move(key), std::move(value)});
  }
  return lines;
}

}  // namespace

void ExperimentConfig::Validate() const {
  try {
    CorpusManifest m = manifest;
    DrawPrototypes(&m);
    m.Validate();
    pipeline.train.Validate();
    NetworkSpec probe = pipeline.spec;
    probe.input_dim = 3 * kStackFrames * manifest.feature_dim;
    probe.output_dim = OutputDim(manifest.vocab_size, pipeline.train.task_mode);
    probe.Validate();
  } catch (const Error &e) {
    Fail(ErrorCode::kConfig, std::string("invalid configuration: ") + e.what());
  }
  if (!(pipeline.finetune_lr_scale > 0.0))
    ConfigFail("train.finetune_lr_scale", "must be > 0");
  if (!(pipeline.student_lr_scale > 0.0))
    ConfigFail("train.student_lr_scale", "must be > 0");
}

ExperimentConfig PresetConfig(std::string_view name) {
  ExperimentConfig c;
  if (name == "style3") {
    c.manifest.domains = StyleDomains();
  } else if (name == "env3") {
    c.manifest.domains = EnvironmentDomains();
  } else {
    Fail(ErrorCode::kConfig,
         "config key 'corpus.preset': unknown preset '" + std::string(name) + "' (style3, env3)");
  }
  c.preset = std::string(name);
  c.manifest.counts.assign(c.manifest.domains.size(), SplitCounts{});
  // Calibrated for the frame-mean losses and the default corpus sizes.
  c.manifest.prototype_scale = 0.85;
  c.pipeline.spec.hidden_dim = 24;
  c.pipeline.train.learning_rate = 0.2;
  c.pipeline.finetune_lr_scale = 0.5;
  return c;
}

ExperimentConfig ParseConfig(std::string_view text, const std::optional<std::string> &preset) {
  const std::vector<Line> lines = Tokenize(text);
  std::string preset_name = preset.value_or("style3");
  for (const auto &l : lines)
    if (l.key == "corpus.preset") preset_name = l.value;
  ExperimentConfig c = PresetConfig(preset_name);

  // Domain list first, then bulk counts, then everything else, so that the
  // result does not depend on line order.
  for (const auto &l : lines)
    if (l.key == "corpus.domains") SetDomainList(&c, l.key, l.value);
  for (const auto &l : lines)
    if (l.key == "corpus.train_count" || l.key == "corpus.dev_count" ||
        l.key == "corpus.test_count")
      SetAllCounts(&c, l.key, l.value);
  for (const auto &l : lines) {
    if (l.key == "corpus.preset" || l.key == "corpus.domains" || l.key == "corpus.train_count" ||
        l.key == "corpus.dev_count" || l.key == "corpus.test_count")
      continue;
    if (l.key.rfind("domain.", 0) == 0) {
      SetDomainKey(&c, l.key, l.value);
    } else if (const Field *f = FindGlobal(l.key)) {
      f->set(&c, l.key, l.value);
    } else {
      ConfigFail(l.key, "unknown key (line " + std::to_string(l.number) + ")");
    }
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadConfigFile(const std::filesystem::path &path,
                                const std::optional<std::string> &preset) {
  std::ifstream is(path);
  if (!is) Fail(ErrorCode::kIo, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ParseConfig(ss.str(), preset);
}

std::string RenderConfig(const ExperimentConfig &config) {
  std::ostringstream os;
  os << "corpus.preset = " << config.preset << "\n";
  os << "corpus.domains = ";
  for (std::size_t i = 0; i < config.manifest.domains.size(); ++i)
    os << (i ? "," : "") << config.manifest.domains[i].name;
  os << "\n";
  for (const auto &[name, field] : GlobalFields())
    if (name.rfind("corpus.", 0) == 0) os << name << " = " << field.get(config) << "\n";
  for (std::size_t i = 0; i < config.manifest.domains.size(); ++i) {
    const DomainConfig &d = config.manifest.domains[i];
    const SplitCounts &n = config.manifest.counts[i];
    const std::string p = "domain." + d.name + ".";
    os << p << "duration_min = " << d.duration_min << "\n";
    os << p << "duration_max = " << d.duration_max << "\n";
    os << p << "emission_noise_sigma = " << FormatDouble(d.emission_noise_sigma) << "\n";
    os << p << "mean_shift_sigma = " << FormatDouble(d.mean_shift_sigma) << "\n";
    os << p << "reverb_tau = " << (d.reverb_tau ? FormatDouble(*d.reverb_tau) : "none") << "\n";
    os << p << "reverb_taps = " << d.reverb_taps << "\n";
    os << p << "noise_snr_db = " << (d.noise_snr_db ? FormatDouble(*d.noise_snr_db) : "none")
       << "\n";
    os << p << "train = " << n.train << "\n";
    os << p << "dev = " << n.dev << "\n";
    os << p << "test = " << n.test << "\n";
  }
  for (const auto &[name, field] : GlobalFields())
    if (name.rfind("corpus.", 0) != 0) os << name << " = " << field.get(config) << "\n";
  return os.str();
}

CorpusManifest BuildManifest(const ExperimentConfig &config) {
  config.Validate();
  CorpusManifest m = config.manifest;
  DrawPrototypes(&m);
  return m;
}

}  // namespace mdistill
