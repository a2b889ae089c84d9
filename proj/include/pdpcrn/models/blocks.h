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

// Building blocks of the encoder, bottleneck and decoder. Feature maps are
// [B, C, T, F] throughout.

#ifndef PDPCRN_MODELS_BLOCKS_H_
#define PDPCRN_MODELS_BLOCKS_H_

#include <string_view>
#include <vector>

#include "pdpcrn/models/config.h"
#include "pdpcrn/nn/attention.h"
#include "pdpcrn/nn/conv.h"
#include "pdpcrn/nn/linear.h"
#include "pdpcrn/nn/lstm.h"
#include "pdpcrn/nn/module.h"
#include "pdpcrn/nn/norm.h"
#include "pdpcrn/tensor/random.h"

namespace pdpcrn {

// [B, C, T, F] -> [B * F, T, C]: one time sequence per frequency bin.
template <Real T>
Tensor<T> TimeSequences(const Tensor<T>& x);
// Inverse of TimeSequences for a batch of `batch` and `freq` bins.
template <Real T>
Tensor<T> FromTimeSequences(const Tensor<T>& s, int64_t batch, int64_t freq);

// Dual-path RNN. The intra path runs a bidirectional LSTM (hidden / 2 per
// direction) across frequency within each frame; the inter path runs a
// causal LSTM across time within each bin. Each path projects back to C
// channels, layer-normalizes over C and adds its input.
template <Real T>
class Dprnn {
 public:
  Dprnn() = default;
  Dprnn(int64_t channels, int64_t hidden, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x) const;
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;

  Lstm<T>& intra_rnn() { return intra_rnn_; }
  Linear<T>& intra_fc() { return intra_fc_; }
  Lstm<T>& inter_rnn() { return inter_rnn_; }
  Linear<T>& inter_fc() { return inter_fc_; }

 private:
  Lstm<T> intra_rnn_, inter_rnn_;
  Linear<T> intra_fc_, inter_fc_;
  LayerNorm<T> intra_norm_, inter_norm_;
};

// Interaction map: two causal 2x2 convs (C -> hidden -> C), each followed by
// batch norm and GELU, then a sigmoid. Output lies in (0, 1) with x's shape.
template <Real T>
class InteractionGate {
 public:
  InteractionGate() = default;
  InteractionGate(int64_t channels, int64_t hidden, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, bool training);
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;
  void AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const;

  Conv2dLayer<T>& conv1() { return conv1_; }
  Conv2dLayer<T>& conv2() { return conv2_; }
  BatchNorm2d<T>& norm1() { return norm1_; }
  BatchNorm2d<T>& norm2() { return norm2_; }

 private:
  Conv2dLayer<T> conv1_, conv2_;
  BatchNorm2d<T> norm1_, norm2_;
};

// Parallel block. Left: DPRNN, then causal time-axis self-attention with a
// residual connection. Right: depthwise conv, then DPRNN. The channel gate
// (from the right DPRNN output) scales the attention value input; the
// spatial gate (from the left output) scales the right output. The block
// returns left + right. Without interactions both gates are skipped.
template <Real T>
class MixingBlock {
 public:
  MixingBlock() = default;
  MixingBlock(const ModelConfig& config, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, bool training);
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;
  void AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const;

  bool bi_interaction() const { return bi_interaction_; }
  Dprnn<T>& left_dprnn() { return left_dprnn_; }
  Dprnn<T>& right_dprnn() { return right_dprnn_; }
  MultiHeadAttention<T>& attention() { return attention_; }
  Conv2dLayer<T>& depthwise() { return depthwise_; }
  InteractionGate<T>& channel_gate() { return channel_gate_; }
  InteractionGate<T>& spatial_gate() { return spatial_gate_; }

 private:
  bool bi_interaction_ = true;
  Dprnn<T> left_dprnn_, right_dprnn_;
  MultiHeadAttention<T> attention_;
  Conv2dLayer<T> depthwise_;
  InteractionGate<T> channel_gate_, spatial_gate_;
};

// Causal conv -> BN -> GELU per layer; returns every layer output.
template <Real T>
class Encoder {
 public:
  Encoder() = default;
  Encoder(const ModelConfig& config, Rng& rng);

  std::vector<Tensor<T>> Forward(const Tensor<T>& x, bool training);
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;
  void AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const;

  size_t layers() const { return convs_.size(); }
  Conv2dLayer<T>& conv(size_t i) { return convs_[i]; }
  BatchNorm2d<T>& norm(size_t i) { return norms_[i]; }

 private:
  int64_t input_channels_ = 0;
  std::vector<Conv2dLayer<T>> convs_;
  std::vector<BatchNorm2d<T>> norms_;
};

// Mirror of the encoder. Layer i (deepest first) consumes the concatenation
// of the previous output and encoder output i. All but the last layer use
// BN -> GELU; the last emits the 2M output planes linearly.
template <Real T>
class Decoder {
 public:
  Decoder() = default;
  Decoder(const ModelConfig& config, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& latent, const std::vector<Tensor<T>>& skips, bool training);
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;
  void AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const;

  size_t layers() const { return convs_.size(); }
  // Index 0 is the deepest layer.
  ConvTranspose2dLayer<T>& conv(size_t i) { return convs_[i]; }

 private:
  std::vector<int64_t> freqs_;
  std::vector<ConvTranspose2dLayer<T>> convs_;
  std::vector<BatchNorm2d<T>> norms_;
};

}  // namespace pdpcrn

#endif  // PDPCRN_MODELS_BLOCKS_H_
