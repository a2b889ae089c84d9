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

#include "pdpcrn/profile/profile.h"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "pdpcrn/models/network.h"

namespace pdpcrn {

namespace {

constexpr int64_t kBatchNormFlops = 2;
constexpr int64_t kLayerNormFlops = 7;
constexpr int64_t kSoftmaxFlops = 5;

class LayerList {
 public:
  void Add(std::string name, std::string kind, int64_t flops) {
    layers_.push_back({std::move(name), std::move(kind), 0, flops});
  }
  std::vector<LayerProfile> Take() { return std::move(layers_); }

 private:
  std::vector<LayerProfile> layers_;
};

// Output positions times the multiply-accumulates of each.
int64_t ConvFlops(int64_t frames, int64_t out_freq, int64_t out_ch, int64_t in_ch_per_group, const Extent2& k) {
  return 2 * frames * out_freq * out_ch * in_ch_per_group * k.time * k.freq;
}

void AddDprnn(LayerList& list, const std::string& prefix, int64_t c, int64_t h, int64_t t, int64_t f) {
  const int64_t positions = t * f;
  list.Add(prefix + ".intra_rnn", "bilstm", 2 * positions * LstmStepFlops(c, h / 2));
  list.Add(prefix + ".intra_fc", "linear", 2 * positions * h * c);
  list.Add(prefix + ".intra_norm", "layernorm+residual", positions * c * (kLayerNormFlops + 1));
  list.Add(prefix + ".inter_rnn", "lstm", positions * LstmStepFlops(c, h));
  list.Add(prefix + ".inter_fc", "linear", 2 * positions * h * c);
  list.Add(prefix + ".inter_norm", "layernorm+residual", positions * c * (kLayerNormFlops + 1));
}

void AddGate(LayerList& list, const std::string& prefix, int64_t c, int64_t g, int64_t t, int64_t f) {
  const Extent2 k{2, 2};
  list.Add(prefix + ".conv1", "conv", ConvFlops(t, f, g, c, k));
  list.Add(prefix + ".norm1", "batchnorm+gelu", t * f * g * (kBatchNormFlops + 1));
  list.Add(prefix + ".conv2", "conv", ConvFlops(t, f, c, g, k));
  list.Add(prefix + ".norm2", "batchnorm+gelu+sigmoid", t * f * c * (kBatchNormFlops + 2));
}

}  // namespace

int64_t ProfileGeometry::frames() const {
  return static_cast<int64_t>(std::llround(seconds * sample_rate / hop));
}

int64_t LstmStepFlops(int64_t input, int64_t hidden) { return 8 * hidden * (input + hidden) + 9 * hidden; }

int64_t ProfileReport::total_params() const {
  int64_t n = 0;
  for (const auto& l : layers) n += l.params;
  return n;
}

int64_t ProfileReport::total_flops() const {
  int64_t n = 0;
  for (const auto& l : layers) n += l.flops;
  return n;
}

ProfileReport ProfileModel(const ModelConfig& config, const ProfileGeometry& geometry) {
  config.Validate();
  const int64_t t = geometry.frames();
  const std::vector<int64_t> freqs = config.EncoderFreqs();
  const std::vector<int64_t>& ch = config.encoder_channels;
  const size_t n = ch.size();
  LayerList list;

  for (size_t i = 0; i < n; ++i) {
    const std::string layer = "encoder." + std::to_string(i);
    const int64_t in = i == 0 ? config.input_channels() : ch[i - 1];
    list.Add(layer + ".conv", "conv", ConvFlops(t, freqs[i + 1], ch[i], in, config.kernels[i]));
    list.Add(layer + ".norm", "batchnorm+gelu", t * freqs[i + 1] * ch[i] * (kBatchNormFlops + 1));
  }

  const int64_t c = config.latent_channels(), f = freqs.back(), cells = t * f * c;
  if (config.variant == Variant::kPdpcrn) {
    for (int64_t b = 0; b < config.mixing_blocks; ++b) {
      const std::string block = "block" + std::to_string(b);
      AddDprnn(list, block + ".left_dprnn", c, config.dprnn_hidden, t, f);
      const int64_t inner = config.attention_heads * config.attention_head_dim;
      const int64_t pairs = t * (t + 1) / 2;
      list.Add(block + ".attention", "attention",
               f * t * 8 * c * inner +
                   f * config.attention_heads * pairs * (4 * config.attention_head_dim + 1 + kSoftmaxFlops));
      list.Add(block + ".depthwise", "depthwise_conv", ConvFlops(t, f, c, 1, config.depthwise_kernel));
      AddDprnn(list, block + ".right_dprnn", c, config.dprnn_hidden, t, f);
      if (config.bi_interaction) {
        AddGate(list, block + ".channel_gate", c, config.interaction_channels, t, f);
        AddGate(list, block + ".spatial_gate", c, config.interaction_channels, t, f);
      }
      // Gate products and residual sums.
      list.Add(block + ".combine", "elementwise", (config.bi_interaction ? 4 : 2) * cells);
    }
  } else {
    for (int64_t i = 0; i < config.mixing_blocks; ++i) {
      AddDprnn(list, "dprnn" + std::to_string(i), c, config.baseline_dprnn_hidden, t, f);
    }
  }

  for (size_t i = 0; i < n; ++i) {
    const size_t j = n - 1 - i;
    const std::string layer = "decoder." + std::to_string(i);
    const int64_t in = 2 * ch[j];
    const int64_t out = j > 0 ? ch[j - 1] : config.input_channels();
    list.Add(layer + ".conv", "conv_transpose",
             2 * t * freqs[j + 1] * in * out * config.kernels[j].time * config.kernels[j].freq);
    if (j > 0) list.Add(layer + ".norm", "batchnorm+gelu", t * freqs[j] * out * (kBatchNormFlops + 1));
  }

  ProfileReport report;
  report.method = MethodName(config);
  report.config = config;
  report.geometry = geometry;
  report.layers = list.Take();

  const Network<float> net(config);
  for (const auto& p : net.Parameters()) {
    LayerProfile* owner = nullptr;
    for (auto& l : report.layers) {
      if (p.name.rfind(l.name + ".", 0) != 0) continue;
      if (owner) throw std::logic_error("profile: parameter '" + p.name + "' matches two layers");
      owner = &l;
    }
    if (!owner) throw std::logic_error("profile: parameter '" + p.name + "' belongs to no layer");
    owner->params += p.tensor.numel();
  }
  return report;
}

std::string ProfileMarkdown(const std::vector<ProfileReport>& reports) {
  std::ostringstream os;
  if (!reports.empty()) {
    const ProfileGeometry& g = reports.front().geometry;
    os << "FLOPs for " << g.seconds << " s of audio (" << g.frames() << " frames); 1 MAC = 2 FLOPs, "
       << "elementwise = 1, batch norm = 2, layer norm = 7, softmax = 5 per element; causal attention.\n\n";
  }
  os << std::fixed;
  os << "| Method | #Params(K) | FLOPs(G) |\n|---|---:|---:|\n";
  for (const auto& r : reports) {
    os << "| " << r.method << " | " << std::setprecision(2) << r.total_params() / 1e3 << " | "
       << std::setprecision(3) << r.total_flops() / 1e9 << " |\n";
  }
  if (reports.size() > 1) {
    os << "\n| Delta vs " << reports.front().method << " | Params | FLOPs |\n|---|---:|---:|\n";
    for (size_t i = 1; i < reports.size(); ++i) {
      os << "| " << reports[i].method << " | " << std::showpos
         << reports[i].total_params() - reports.front().total_params() << " | "
         << reports[i].total_flops() - reports.front().total_flops() << std::noshowpos << " |\n";
    }
  }
  for (const auto& r : reports) {
    os << "\n### " << r.method << "\n\n| Layer | Kind | Params | MFLOPs |\n|---|---|---:|---:|\n";
    for (const auto& l : r.layers) {
      os << "| " << l.name << " | " << l.kind << " | " << l.params << " | " << std::setprecision(3)
         << l.flops / 1e6 << " |\n";
    }
    os << "| **total** | | " << r.total_params() << " | " << std::setprecision(3) << r.total_flops() / 1e6
       << " |\n";
  }
  return os.str();
}

std::string ProfileCsv(const std::vector<ProfileReport>& reports) {
  std::ostringstream os;
  os << "method,layer,kind,params,flops\n";
  for (const auto& r : reports) {
    for (const auto& l : r.layers) {
      os << '"' << r.method << "\"," << l.name << ',' << l.kind << ',' << l.params << ',' << l.flops << '\n';
    }
    os << '"' << r.method << "\",TOTAL,," << r.total_params() << ',' << r.total_flops() << '\n';
  }
  return os.str();
}

nlohmann::json ProfileJson(const std::vector<ProfileReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : r.layers) {
      layers.push_back({{"name", l.name}, {"kind", l.kind}, {"params", l.params}, {"flops", l.flops}});
    }
    out.push_back({{"method", r.method},
                   {"model", ModelConfigToJson(r.config)},
                   {"seconds", r.geometry.seconds},
                   {"frames", r.geometry.frames()},
                   {"params", r.total_params()},
                   {"flops", r.total_flops()},
                   {"layers", layers}});
  }
  return out;
}

}  // namespace pdpcrn
