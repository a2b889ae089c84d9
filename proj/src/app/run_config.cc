// Copyright 2026 The PDPCRN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pdpcrn/app/run_config.h"

#include <charconv>
#include <sstream>

#include "pdpcrn/io/errors.h"
#include "pdpcrn/tensor/random.h"

namespace pdpcrn {
namespace {

std::string Num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string List(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += Num(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

std::string ExtentText(const Extent2& e) { return std::to_string(e.time) + "x" + std::to_string(e.freq); }

std::string ExtentsText(const std::vector<Extent2>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + ExtentText(v[i]);
  return out;
}

Extent2 ParseExtent(const std::string& key, const std::string& text) {
  Extent2 e;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> e.time >> x >> e.freq) || x != 'x' || !(in >> std::ws).eof()) {
    throw ConfigError("config: '" + key + "' expects TxF extents, got '" + text + "'");
  }
  return e;
}

std::vector<Extent2> ParseExtents(const std::string& key, const std::string& text) {
  std::vector<Extent2> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseExtent(key, item));
  return out;
}

ModelConfig Preset(const std::string& name) {
  if (name == "full") return ModelConfig::Full();
  if (name == "tiny") return ModelConfig::Tiny();
  throw ConfigError("config: 'model.preset' must be full or tiny, got '" + name + "'");
}

WavEncoding ParseEncoding(const std::string& text) {
  if (text == "float32") return WavEncoding::kFloat32;
  if (text == "pcm16") return WavEncoding::kPcm16;
  throw ConfigError("config: 'scene.encoding' must be float32 or pcm16, got '" + text + "'");
}

}  // namespace

uint64_t RunConfig::dataset_seed() const { return MixSeed(seed, kDatasetStream); }
uint64_t RunConfig::train_seed() const { return MixSeed(seed, kTrainStream); }

DatasetConfig RunConfig::DatasetForRun() const {
  DatasetConfig d = scene;
  d.seed = dataset_seed();
  d.num_mics = static_cast<int>(model.mics);
  return d;
}

TrainConfig RunConfig::TrainForRun() const {
  TrainConfig t = train;
  t.seed = train_seed();
  return t;
}

void RunConfig::Validate() const {
  model.Validate();
  train.Validate();
  if (scene.count < 1) throw ConfigError("config: 'scene.count' must be positive");
  if (!(scene.utterance_seconds > 0)) throw ConfigError("config: 'scene.utterance_seconds' must be positive");
  if (scene.snrs_db.empty() || scene.rt60s.empty()) {
    throw ConfigError("config: 'scene.snrs_db' and 'scene.rt60s' must be non-empty");
  }
  if (split_period < 0) throw ConfigError("config: 'split.period' must be non-negative");
  if (!(profile.seconds > 0)) throw ConfigError("config: 'profile.seconds' must be positive");
}

RunConfig RunConfigFromIni(IniConfig& ini) {
  RunConfig c;
  c.seed = ini.GetUint("run.seed", c.seed);

  c.preset = ini.GetString("model.preset", c.preset);
  ModelConfig& m = c.model;
  m = Preset(c.preset);
  m.variant = ParseVariant(ini.GetString("model.variant", VariantName(m.variant)));
  m.bi_interaction = ini.GetBool("model.bi_interaction", m.bi_interaction);
  m.mics = ini.GetInt("model.mics", m.mics);
  m.encoder_channels = ini.GetIntList("model.encoder_channels", m.encoder_channels);
  m.kernels = ParseExtents("model.kernels", ini.GetString("model.kernels", ExtentsText(m.kernels)));
  m.strides = ParseExtents("model.strides", ini.GetString("model.strides", ExtentsText(m.strides)));
  m.mixing_blocks = ini.GetInt("model.mixing_blocks", m.mixing_blocks);
  m.dprnn_hidden = ini.GetInt("model.dprnn_hidden", m.dprnn_hidden);
  m.baseline_dprnn_hidden = ini.GetInt("model.baseline_dprnn_hidden", m.baseline_dprnn_hidden);
  m.attention_heads = ini.GetInt("model.attention_heads", m.attention_heads);
  m.attention_head_dim = ini.GetInt("model.attention_head_dim", m.attention_head_dim);
  m.depthwise_kernel =
      ParseExtent("model.depthwise_kernel", ini.GetString("model.depthwise_kernel", ExtentText(m.depthwise_kernel)));
  m.interaction_channels = ini.GetInt("model.interaction_channels", m.interaction_channels);

  TrainConfig& t = c.train;
  t.lr = ini.GetDouble("train.lr", t.lr);
  t.plateau_patience = static_cast<int>(ini.GetInt("train.plateau_patience", t.plateau_patience));
  t.lr_factor = ini.GetDouble("train.lr_factor", t.lr_factor);
  t.epochs = static_cast<int>(ini.GetInt("train.epochs", t.epochs));
  t.batch_size = static_cast<int>(ini.GetInt("train.batch_size", t.batch_size));
  t.segment_seconds = ini.GetDouble("train.segment_seconds", t.segment_seconds);
  t.steps_per_epoch = static_cast<int>(ini.GetInt("train.steps_per_epoch", t.steps_per_epoch));
  t.loss_kind = ParseLossKind(ini.GetString("train.loss", LossKindName(t.loss_kind)));

  DatasetConfig& s = c.scene;
  s.count = static_cast<int>(ini.GetInt("scene.count", s.count));
  s.utterance_seconds = ini.GetDouble("scene.utterance_seconds", s.utterance_seconds);
  s.grid = ini.GetBool("scene.grid", s.grid);
  s.snrs_db = ini.GetDoubleList("scene.snrs_db", s.snrs_db);
  s.rt60s = ini.GetDoubleList("scene.rt60s", s.rt60s);
  s.corpus_dir = ini.GetString("scene.corpus_dir", s.corpus_dir);
  s.noise_dir = ini.GetString("scene.noise_dir", s.noise_dir);
  s.peak_normalize = ini.GetBool("scene.peak_normalize", s.peak_normalize);
  s.encoding = ParseEncoding(ini.GetString("scene.encoding", "float32"));

  c.split_period = static_cast<int>(ini.GetInt("split.period", c.split_period));
  c.eval_unprocessed = ini.GetBool("eval.unprocessed", c.eval_unprocessed);
  c.profile.seconds = ini.GetDouble("profile.seconds", c.profile.seconds);

  ini.RejectUnknown();
  c.Validate();
  return c;
}

std::map<std::string, std::string> RunConfigToFlat(const RunConfig& c) {
  const ModelConfig& m = c.model;
  const TrainConfig& t = c.train;
  const DatasetConfig& s = c.scene;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"run.seed", std::to_string(c.seed)},
      {"model.preset", c.preset},
      {"model.variant", VariantName(m.variant)},
      {"model.bi_interaction", b(m.bi_interaction)},
      {"model.mics", std::to_string(m.mics)},
      {"model.encoder_channels", List(m.encoder_channels)},
      {"model.kernels", ExtentsText(m.kernels)},
      {"model.strides", ExtentsText(m.strides)},
      {"model.mixing_blocks", std::to_string(m.mixing_blocks)},
      {"model.dprnn_hidden", std::to_string(m.dprnn_hidden)},
      {"model.baseline_dprnn_hidden", std::to_string(m.baseline_dprnn_hidden)},
      {"model.attention_heads", std::to_string(m.attention_heads)},
      {"model.attention_head_dim", std::to_string(m.attention_head_dim)},
      {"model.depthwise_kernel", ExtentText(m.depthwise_kernel)},
      {"model.interaction_channels", std::to_string(m.interaction_channels)},
      {"train.lr", Num(t.lr)},
      {"train.plateau_patience", std::to_string(t.plateau_patience)},
      {"train.lr_factor", Num(t.lr_factor)},
      {"train.epochs", std::to_string(t.epochs)},
      {"train.batch_size", std::to_string(t.batch_size)},
      {"train.segment_seconds", Num(t.segment_seconds)},
      {"train.steps_per_epoch", std::to_string(t.steps_per_epoch)},
      {"train.loss", LossKindName(t.loss_kind)},
      {"scene.count", std::to_string(s.count)},
      {"scene.utterance_seconds", Num(s.utterance_seconds)},
      {"scene.grid", b(s.grid)},
      {"scene.snrs_db", List(s.snrs_db)},
      {"scene.rt60s", List(s.rt60s)},
      {"scene.corpus_dir", s.corpus_dir},
      {"scene.noise_dir", s.noise_dir},
      {"scene.peak_normalize", b(s.peak_normalize)},
      {"scene.encoding", s.encoding == WavEncoding::kPcm16 ? "pcm16" : "float32"},
      {"split.period", std::to_string(c.split_period)},
      {"eval.unprocessed", b(c.eval_unprocessed)},
      {"profile.seconds", Num(c.profile.seconds)},
  };
}

std::string RunConfigToIni(const RunConfig& config) { return FormatIni(RunConfigToFlat(config)); }

}  // namespace pdpcrn
