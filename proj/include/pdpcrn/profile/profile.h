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

// Exact parameter counts and analytic FLOP counts per layer.
//
// FLOP convention: one multiply-accumulate is 2 FLOPs and biases are folded
// into it; every other elementwise operation is 1 FLOP, with batch norm at
// 2, layer norm at 7 and softmax at 5 per element. An LSTM step of width H
// over input I costs 8 H (I + H) + 9 H. Attention scores and weighted sums
// are counted over the causal triangle only. A transposed convolution is
// counted over its input positions.

#ifndef PDPCRN_PROFILE_PROFILE_H_
#define PDPCRN_PROFILE_PROFILE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdpcrn/models/config.h"

namespace pdpcrn {

struct ProfileGeometry {
  double seconds = 1.0;
  int sample_rate = 16000;
  int hop = 200;
  // Frames of the analysed excerpt: seconds * sample_rate / hop.
  int64_t frames() const;
};

struct LayerProfile {
  std::string name;  // parameter prefix, e.g. "block0.left_dprnn.inter_rnn"
  std::string kind;
  int64_t params = 0;
  int64_t flops = 0;
};

struct ProfileReport {
  std::string method;
  ModelConfig config;
  ProfileGeometry geometry;
  std::vector<LayerProfile> layers;

  int64_t total_params() const;
  int64_t total_flops() const;
};

// Throws ConfigError for invalid configs and std::logic_error if a model
// parameter is not attributed to exactly one layer.
ProfileReport ProfileModel(const ModelConfig& config, const ProfileGeometry& geometry = {});

// Per-step cost of one LSTM direction.
int64_t LstmStepFlops(int64_t input, int64_t hidden);

// Summary table (method, params in K, GFLOPs), pairwise deltas against the
// first report, then one per-layer table per report.
std::string ProfileMarkdown(const std::vector<ProfileReport>& reports);
// Columns method,layer,kind,params,flops; one TOTAL row per method.
std::string ProfileCsv(const std::vector<ProfileReport>& reports);
nlohmann::json ProfileJson(const std::vector<ProfileReport>& reports);

}  // namespace pdpcrn

#endif  // PDPCRN_PROFILE_PROFILE_H_
