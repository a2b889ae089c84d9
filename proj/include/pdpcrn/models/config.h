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

#ifndef PDPCRN_MODELS_CONFIG_H_
#define PDPCRN_MODELS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace pdpcrn {

enum class Variant { kPdpcrn, kDpcrn };

std::string VariantName(Variant v);
// Accepts "pdpcrn" or "dpcrn" in any case; throws ConfigError otherwise.
Variant ParseVariant(const std::string& name);

// (time, freq) pair used for kernels and strides.
struct Extent2 {
  int64_t time = 1;
  int64_t freq = 1;
  bool operator==(const Extent2&) const = default;
};

struct ModelConfig {
  Variant variant = Variant::kPdpcrn;
  int64_t mics = 16;
  int64_t freq_bins = 201;
  std::vector<int64_t> encoder_channels{32, 32, 32, 64, 80};
  std::vector<Extent2> kernels{{2, 5}, {2, 3}, {2, 3}, {2, 3}, {2, 3}};
  std::vector<Extent2> strides{{1, 2}, {1, 2}, {1, 1}, {1, 1}, {1, 1}};
  int64_t mixing_blocks = 2;
  int64_t dprnn_hidden = 80;
  // Hidden width of the two plain DPRNNs in the DPCRN bottleneck.
  int64_t baseline_dprnn_hidden = 160;
  int64_t attention_heads = 50;
  int64_t attention_head_dim = 2;
  Extent2 depthwise_kernel{1, 3};
  // Width of the hidden layer between the two 2x2 convs of a gate.
  int64_t interaction_channels = 16;
  bool bi_interaction = true;

  // Full size: M = 16, channels {32, 32, 32, 64, 80}, hidden 80, two blocks.
  static ModelConfig Full();
  // M = 2, channels {8, 8, 8, 8, 16}, hidden 16, 4 heads of width 4.
  static ModelConfig Tiny();

  int64_t input_channels() const { return 2 * mics; }
  int64_t latent_channels() const { return encoder_channels.back(); }
  // Frequency size entering each encoder layer plus the final latent size.
  std::vector<int64_t> EncoderFreqs() const;
  // Throws ConfigError naming the offending field.
  void Validate() const;
};

// Display name: "PDPCRN", "PDPCRN (w/o BI)" or "DPCRN".
std::string MethodName(const ModelConfig& c);

nlohmann::json ModelConfigToJson(const ModelConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

}  // namespace pdpcrn

#endif  // PDPCRN_MODELS_CONFIG_H_
