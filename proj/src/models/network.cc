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

#include "pdpcrn/models/network.h"

#include "pdpcrn/io/errors.h"
#include "pdpcrn/tensor/ops.h"

namespace pdpcrn {

uint64_t Fnv1a64(std::string_view bytes, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

ModelConfig Validated(const ModelConfig& c) {
  c.Validate();
  return c;
}

}  // namespace

template <Real T>
Network<T>::Network(const ModelConfig& config, uint64_t seed) : config_(Validated(config)) {
  Rng rng(MixSeed(seed, 0x6e6574));
  encoder_ = Encoder<T>(config_, rng);
  if (config_.variant == Variant::kPdpcrn) {
    for (int64_t i = 0; i < config_.mixing_blocks; ++i) blocks_.emplace_back(config_, rng);
  } else {
    for (int64_t i = 0; i < config_.mixing_blocks; ++i) {
      dprnns_.emplace_back(config_.latent_channels(), config_.baseline_dprnn_hidden, rng);
    }
  }
  decoder_ = Decoder<T>(config_, rng);
}

template <Real T>
Tensor<T> Network<T>::Forward(const Tensor<T>& x, bool training) {
  if (x.rank() != 4 || x.dim(1) != config_.input_channels() || x.dim(3) != config_.freq_bins) {
    throw ShapeError("network: expected [B," + std::to_string(config_.input_channels()) + ",T," +
                     std::to_string(config_.freq_bins) + "], got " + ShapeToString(x.shape()));
  }
  const std::vector<Tensor<T>> skips = encoder_.Forward(x, training);
  Tensor<T> h = skips.back();
  for (auto& block : blocks_) h = block.Forward(h, training);
  for (const auto& dprnn : dprnns_) h = dprnn.Forward(h);
  return decoder_.Forward(h, skips, training);
}

template <Real T>
NamedTensors<T> Network<T>::Parameters() const {
  NamedTensors<T> out;
  encoder_.AppendParameters("encoder", out);
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i].AppendParameters("block" + std::to_string(i), out);
  for (size_t i = 0; i < dprnns_.size(); ++i) dprnns_[i].AppendParameters("dprnn" + std::to_string(i), out);
  decoder_.AppendParameters("decoder", out);
  return out;
}

template <Real T>
NamedTensors<T> Network<T>::Buffers() const {
  NamedTensors<T> out;
  encoder_.AppendBuffers("encoder", out);
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i].AppendBuffers("block" + std::to_string(i), out);
  decoder_.AppendBuffers("decoder", out);
  return out;
}

template <Real T>
uint64_t Network<T>::StructuralHash() const {
  std::string desc = ModelConfigToJson(config_).dump();
  auto add = [&desc](const NamedTensors<T>& tensors) {
    for (const auto& t : tensors) desc += ";" + t.name + ShapeToString(t.tensor.shape());
  };
  add(Parameters());
  desc += "|";
  add(Buffers());
  return Fnv1a64(desc);
}

template <Real T>
Spectrogram Enhance(Network<T>& net, const Spectrogram& mixture) {
  if (mixture.channels != net.config().mics || mixture.bins != net.config().freq_bins) {
    throw ConfigError("enhance: model expects " + std::to_string(net.config().mics) + " channels and " +
                      std::to_string(net.config().freq_bins) + " bins, input has " +
                      std::to_string(mixture.channels) + " and " + std::to_string(mixture.bins));
  }
  const Tensor<T> out = net.Forward(SpectrogramToTensor<T>(mixture), false);
  return TensorToSpectrogram(out, mixture);
}

template class Network<float>;
template class Network<double>;
template Spectrogram Enhance<float>(Network<float>&, const Spectrogram&);
template Spectrogram Enhance<double>(Network<double>&, const Spectrogram&);

}  // namespace pdpcrn
