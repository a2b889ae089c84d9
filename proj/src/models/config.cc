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

#include "pdpcrn/models/config.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "pdpcrn/io/errors.h"
#include "pdpcrn/nn/conv.h"

namespace pdpcrn {

std::string VariantName(Variant v) { return v == Variant::kPdpcrn ? "pdpcrn" : "dpcrn"; }

Variant ParseVariant(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "pdpcrn") return Variant::kPdpcrn;
  if (lower == "dpcrn") return Variant::kDpcrn;
  throw ConfigError("unknown model variant '" + name + "' (expected pdpcrn or dpcrn)");
}

ModelConfig ModelConfig::Full() { return ModelConfig{}; }

ModelConfig ModelConfig::Tiny() {
  ModelConfig c;
  c.mics = 2;
  c.encoder_channels = {8, 8, 8, 8, 16};
  c.dprnn_hidden = 16;
  c.baseline_dprnn_hidden = 32;
  c.attention_heads = 4;
  c.attention_head_dim = 4;
  c.interaction_channels = 4;
  return c;
}

std::vector<int64_t> ModelConfig::EncoderFreqs() const {
  std::vector<int64_t> f{freq_bins};
  for (size_t i = 0; i < encoder_channels.size(); ++i) {
    const Conv2dSpec s = Conv2dSpec::Make(1, 1, kernels[i].time, kernels[i].freq, strides[i].time,
                                          strides[i].freq);
    f.push_back(s.OutputFreq(f.back()));
  }
  return f;
}

void ModelConfig::Validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("model config: " + what); };
  if (mics < 1) fail("mics must be >= 1");
  if (freq_bins < 1) fail("freq_bins must be >= 1");
  const size_t layers = encoder_channels.size();
  if (layers == 0) fail("encoder_channels must not be empty");
  if (kernels.size() != layers || strides.size() != layers) {
    fail("kernels and strides must list one entry per encoder layer (" + std::to_string(layers) + ")");
  }
  for (size_t i = 0; i < layers; ++i) {
    if (encoder_channels[i] < 1) fail("encoder_channels entries must be positive");
    if (kernels[i].time < 1 || kernels[i].freq < 1) fail("kernel sizes must be positive");
    if (strides[i].time != 1) fail("time strides must be 1 (frame-synchronous causal model)");
    if (strides[i].freq < 1) fail("frequency strides must be positive");
  }
  if (mixing_blocks < 1) fail("mixing_blocks must be >= 1");
  if (dprnn_hidden < 2 || dprnn_hidden % 2 != 0) fail("dprnn_hidden must be even and >= 2");
  if (baseline_dprnn_hidden < 2 || baseline_dprnn_hidden % 2 != 0) {
    fail("baseline_dprnn_hidden must be even and >= 2");
  }
  if (attention_heads < 1 || attention_head_dim < 1) fail("attention geometry must be positive");
  if (depthwise_kernel.time < 1 || depthwise_kernel.freq < 1) fail("depthwise_kernel must be positive");
  if (interaction_channels < 1) fail("interaction_channels must be >= 1");
  try {
    EncoderFreqs();
  } catch (const std::exception& e) {
    fail(std::string("encoder geometry: ") + e.what());
  }
}

namespace {

nlohmann::json ExtentsJson(const std::vector<Extent2>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : v) j.push_back({e.time, e.freq});
  return j;
}

Extent2 JsonExtent(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("model config: extents are [time, freq] pairs");
  return {j[0].get<int64_t>(), j[1].get<int64_t>()};
}

}  // namespace

std::string MethodName(const ModelConfig& c) {
  if (c.variant == Variant::kDpcrn) return "DPCRN";
  return c.bi_interaction ? "PDPCRN" : "PDPCRN (w/o BI)";
}

nlohmann::json ModelConfigToJson(const ModelConfig& c) {
  return {{"variant", VariantName(c.variant)},
          {"mics", c.mics},
          {"freq_bins", c.freq_bins},
          {"encoder_channels", c.encoder_channels},
          {"kernels", ExtentsJson(c.kernels)},
          {"strides", ExtentsJson(c.strides)},
          {"mixing_blocks", c.mixing_blocks},
          {"dprnn_hidden", c.dprnn_hidden},
          {"baseline_dprnn_hidden", c.baseline_dprnn_hidden},
          {"attention_heads", c.attention_heads},
          {"attention_head_dim", c.attention_head_dim},
          {"depthwise_kernel", {c.depthwise_kernel.time, c.depthwise_kernel.freq}},
          {"interaction_channels", c.interaction_channels},
          {"bi_interaction", c.bi_interaction}};
}

ModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "variant",      "mics",           "freq_bins",          "encoder_channels",
      "kernels",      "strides",        "mixing_blocks",      "dprnn_hidden",
      "baseline_dprnn_hidden", "attention_heads", "attention_head_dim", "depthwise_kernel",
      "interaction_channels", "bi_interaction"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("model config: unknown key '" + key + "'");
  }
  ModelConfig c;
  try {
    if (j.contains("variant")) c.variant = ParseVariant(j["variant"].get<std::string>());
    if (j.contains("mics")) c.mics = j["mics"].get<int64_t>();
    if (j.contains("freq_bins")) c.freq_bins = j["freq_bins"].get<int64_t>();
    if (j.contains("encoder_channels")) c.encoder_channels = j["encoder_channels"].get<std::vector<int64_t>>();
    if (j.contains("kernels")) {
      c.kernels.clear();
      for (const auto& e : j["kernels"]) c.kernels.push_back(JsonExtent(e));
    }
    if (j.contains("strides")) {
      c.strides.clear();
      for (const auto& e : j["strides"]) c.strides.push_back(JsonExtent(e));
    }
    if (j.contains("mixing_blocks")) c.mixing_blocks = j["mixing_blocks"].get<int64_t>();
    if (j.contains("dprnn_hidden")) c.dprnn_hidden = j["dprnn_hidden"].get<int64_t>();
    if (j.contains("baseline_dprnn_hidden")) c.baseline_dprnn_hidden = j["baseline_dprnn_hidden"].get<int64_t>();
    if (j.contains("attention_heads")) c.attention_heads = j["attention_heads"].get<int64_t>();
    if (j.contains("attention_head_dim")) c.attention_head_dim = j["attention_head_dim"].get<int64_t>();
    if (j.contains("depthwise_kernel")) c.depthwise_kernel = JsonExtent(j["depthwise_kernel"]);
    if (j.contains("interaction_channels")) c.interaction_channels = j["interaction_channels"].get<int64_t>();
    if (j.contains("bi_interaction")) c.bi_interaction = j["bi_interaction"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  c.Validate();
  return c;
}

}  // namespace pdpcrn
