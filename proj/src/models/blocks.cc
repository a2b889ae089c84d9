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

#include "pdpcrn/models/blocks.h"

#include <string>

#include "pdpcrn/tensor/ops.h"

namespace pdpcrn {

template <Real T>
Tensor<T> TimeSequences(const Tensor<T>& x) {
  if (x.rank() != 4) throw ShapeError("TimeSequences: expected [B,C,T,F], got " + ShapeToString(x.shape()));
  return Reshape(Permute(x, {0, 3, 2, 1}), {x.dim(0) * x.dim(3), x.dim(2), x.dim(1)});
}

template <Real T>
Tensor<T> FromTimeSequences(const Tensor<T>& s, int64_t batch, int64_t freq) {
  return Permute(Reshape(s, {batch, freq, s.dim(1), s.dim(2)}), {0, 3, 2, 1});
}

// ----------------------------------------------------------------- Dprnn

template <Real T>
Dprnn<T>::Dprnn(int64_t channels, int64_t hidden, Rng& rng)
    : intra_rnn_(LstmSpec{channels, hidden / 2, true}, rng),
      inter_rnn_(LstmSpec{channels, hidden, false}, rng),
      intra_fc_(hidden, channels, rng),
      inter_fc_(hidden, channels, rng),
      intra_norm_(channels),
      inter_norm_(channels) {}

template <Real T>
Tensor<T> Dprnn<T>::Forward(const Tensor<T>& x) const {
  if (x.rank() != 4) throw ShapeError("dprnn: expected [B,C,T,F], got " + ShapeToString(x.shape()));
  const int64_t b = x.dim(0), c = x.dim(1), t = x.dim(2), f = x.dim(3);
  // Intra path: sequences over frequency, one per (batch, frame).
  const Tensor<T> rows = Reshape(Permute(x, {0, 2, 3, 1}), {b * t, f, c});
  const Tensor<T> intra = rows + intra_norm_.Forward(intra_fc_.Forward(intra_rnn_.Forward(rows).output));
  // Inter path: sequences over time, one per (batch, bin).
  const Tensor<T> cols = Reshape(Permute(Reshape(intra, {b, t, f, c}), {0, 2, 1, 3}), {b * f, t, c});
  const Tensor<T> inter = cols + inter_norm_.Forward(inter_fc_.Forward(inter_rnn_.Forward(cols).output));
  return FromTimeSequences(inter, b, f);
}

template <Real T>
void Dprnn<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  intra_rnn_.AppendParameters(JoinName(prefix, "intra_rnn"), out);
  intra_fc_.AppendParameters(JoinName(prefix, "intra_fc"), out);
  intra_norm_.AppendParameters(JoinName(prefix, "intra_norm"), out);
  inter_rnn_.AppendParameters(JoinName(prefix, "inter_rnn"), out);
  inter_fc_.AppendParameters(JoinName(prefix, "inter_fc"), out);
  inter_norm_.AppendParameters(JoinName(prefix, "inter_norm"), out);
}

// ------------------------------------------------------- InteractionGate

template <Real T>
InteractionGate<T>::InteractionGate(int64_t channels, int64_t hidden, Rng& rng)
    : conv1_(Conv2dSpec::Same(channels, hidden, 2, 2), rng),
      conv2_(Conv2dSpec::Same(hidden, channels, 2, 2), rng),
      norm1_(hidden),
      norm2_(channels) {}

template <Real T>
Tensor<T> InteractionGate<T>::Forward(const Tensor<T>& x, bool training) {
  const Tensor<T> h = Gelu(norm1_.Forward(conv1_.Forward(x), training));
  return Sigmoid(Gelu(norm2_.Forward(conv2_.Forward(h), training)));
}

template <Real T>
void InteractionGate<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  conv1_.AppendParameters(JoinName(prefix, "conv1"), out);
  norm1_.AppendParameters(JoinName(prefix, "norm1"), out);
  conv2_.AppendParameters(JoinName(prefix, "conv2"), out);
  norm2_.AppendParameters(JoinName(prefix, "norm2"), out);
}

template <Real T>
void InteractionGate<T>::AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const {
  norm1_.AppendBuffers(JoinName(prefix, "norm1"), out);
  norm2_.AppendBuffers(JoinName(prefix, "norm2"), out);
}

// ----------------------------------------------------------- MixingBlock

namespace {

Conv2dSpec DepthwiseSpec(const ModelConfig& c) {
  Conv2dSpec s = Conv2dSpec::Same(c.latent_channels(), c.latent_channels(), c.depthwise_kernel.time,
                                  c.depthwise_kernel.freq);
  s.groups = c.latent_channels();
  return s;
}

}  // namespace

template <Real T>
MixingBlock<T>::MixingBlock(const ModelConfig& config, Rng& rng)
    : bi_interaction_(config.bi_interaction),
      left_dprnn_(config.latent_channels(), config.dprnn_hidden, rng),
      right_dprnn_(config.latent_channels(), config.dprnn_hidden, rng),
      attention_(AttentionSpec{config.latent_channels(), config.attention_heads,
                               config.attention_head_dim, true},
                 rng),
      depthwise_(DepthwiseSpec(config), rng) {
  if (bi_interaction_) {
    channel_gate_ = InteractionGate<T>(config.latent_channels(), config.interaction_channels, rng);
    spatial_gate_ = InteractionGate<T>(config.latent_channels(), config.interaction_channels, rng);
  }
}

template <Real T>
Tensor<T> MixingBlock<T>::Forward(const Tensor<T>& x, bool training) {
  const int64_t b = x.dim(0), f = x.dim(3);
  const Tensor<T> left = left_dprnn_.Forward(x);
  const Tensor<T> right = right_dprnn_.Forward(depthwise_.Forward(x));
  Tensor<T> value_source;
  if (bi_interaction_) value_source = TimeSequences(left * channel_gate_.Forward(right, training));
  const Tensor<T> attended = attention_.Forward(TimeSequences(left), value_source);
  const Tensor<T> left_out = left + FromTimeSequences(attended, b, f);
  const Tensor<T> right_out = bi_interaction_ ? right * spatial_gate_.Forward(left_out, training) : right;
  return left_out + right_out;
}

template <Real T>
void MixingBlock<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  left_dprnn_.AppendParameters(JoinName(prefix, "left_dprnn"), out);
  attention_.AppendParameters(JoinName(prefix, "attention"), out);
  depthwise_.AppendParameters(JoinName(prefix, "depthwise"), out);
  right_dprnn_.AppendParameters(JoinName(prefix, "right_dprnn"), out);
  if (bi_interaction_) {
    channel_gate_.AppendParameters(JoinName(prefix, "channel_gate"), out);
    spatial_gate_.AppendParameters(JoinName(prefix, "spatial_gate"), out);
  }
}

template <Real T>
void MixingBlock<T>::AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const {
  if (!bi_interaction_) return;
  channel_gate_.AppendBuffers(JoinName(prefix, "channel_gate"), out);
  spatial_gate_.AppendBuffers(JoinName(prefix, "spatial_gate"), out);
}

// --------------------------------------------------------------- Encoder

template <Real T>
Encoder<T>::Encoder(const ModelConfig& config, Rng& rng) : input_channels_(config.input_channels()) {
  int64_t in = input_channels_;
  for (size_t i = 0; i < config.encoder_channels.size(); ++i) {
    const int64_t out = config.encoder_channels[i];
    convs_.emplace_back(Conv2dSpec::Make(in, out, config.kernels[i].time, config.kernels[i].freq, 1,
                                         config.strides[i].freq),
                        rng);
    norms_.emplace_back(out);
    in = out;
  }
}

template <Real T>
std::vector<Tensor<T>> Encoder<T>::Forward(const Tensor<T>& x, bool training) {
  if (x.rank() != 4 || x.dim(1) != input_channels_) {
    throw ShapeError("encoder: expected [B," + std::to_string(input_channels_) +
                     ",T,F] (real planes then imaginary planes), got " + ShapeToString(x.shape()));
  }
  std::vector<Tensor<T>> outputs;
  Tensor<T> h = x;
  for (size_t i = 0; i < convs_.size(); ++i) {
    h = Gelu(norms_[i].Forward(convs_[i].Forward(h), training));
    outputs.push_back(h);
  }
  return outputs;
}

template <Real T>
void Encoder<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  for (size_t i = 0; i < convs_.size(); ++i) {
    const std::string layer = JoinName(prefix, std::to_string(i));
    convs_[i].AppendParameters(JoinName(layer, "conv"), out);
    norms_[i].AppendParameters(JoinName(layer, "norm"), out);
  }
}

template <Real T>
void Encoder<T>::AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const {
  for (size_t i = 0; i < norms_.size(); ++i) {
    norms_[i].AppendBuffers(JoinName(JoinName(prefix, std::to_string(i)), "norm"), out);
  }
}

// --------------------------------------------------------------- Decoder

template <Real T>
Decoder<T>::Decoder(const ModelConfig& config, Rng& rng) {
  const std::vector<int64_t> freqs = config.EncoderFreqs();
  const size_t n = config.encoder_channels.size();
  for (size_t i = 0; i < n; ++i) {
    const size_t j = n - 1 - i;  // mirrored encoder layer
    const int64_t in = 2 * config.encoder_channels[j];
    const int64_t out = j > 0 ? config.encoder_channels[j - 1] : config.input_channels();
    convs_.emplace_back(Conv2dSpec::Make(in, out, config.kernels[j].time, config.kernels[j].freq, 1,
                                         config.strides[j].freq),
                        rng);
    freqs_.push_back(freqs[j]);
    if (j > 0) norms_.emplace_back(out);
  }
}

template <Real T>
Tensor<T> Decoder<T>::Forward(const Tensor<T>& latent, const std::vector<Tensor<T>>& skips,
                              bool training) {
  if (skips.size() != convs_.size()) {
    throw ShapeError("decoder: expected " + std::to_string(convs_.size()) + " skips, got " +
                     std::to_string(skips.size()));
  }
  Tensor<T> h = latent;
  for (size_t i = 0; i < convs_.size(); ++i) {
    const Tensor<T>& skip = skips[skips.size() - 1 - i];
    if (skip.shape() != h.shape()) {
      throw ShapeError("decoder layer " + std::to_string(i) + ": skip shape " + ShapeToString(skip.shape()) +
                       " does not match " + ShapeToString(h.shape()));
    }
    h = convs_[i].Forward(Concat<T>({h, skip}, 1), freqs_[i]);
    if (i < norms_.size()) h = Gelu(norms_[i].Forward(h, training));
  }
  return h;
}

template <Real T>
void Decoder<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  for (size_t i = 0; i < convs_.size(); ++i) {
    const std::string layer = JoinName(prefix, std::to_string(i));
    convs_[i].AppendParameters(JoinName(layer, "conv"), out);
    if (i < norms_.size()) norms_[i].AppendParameters(JoinName(layer, "norm"), out);
  }
}

template <Real T>
void Decoder<T>::AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const {
  for (size_t i = 0; i < norms_.size(); ++i) {
    norms_[i].AppendBuffers(JoinName(JoinName(prefix, std::to_string(i)), "norm"), out);
  }
}

#define PDPCRN_INSTANTIATE(T)                                                     \
  template Tensor<T> TimeSequences<T>(const Tensor<T>&);                          \
  template Tensor<T> FromTimeSequences<T>(const Tensor<T>&, int64_t, int64_t);    \
  template class Dprnn<T>;                                                        \
  template class InteractionGate<T>;                                              \
  template class MixingBlock<T>;                                                  \
  template class Encoder<T>;                                                      \
  template class Decoder<T>;

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
