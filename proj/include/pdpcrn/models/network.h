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

// Complete MIMO complex-spectral-mapping networks: PDPCRN (mixing blocks)
// and the DPCRN baseline (plain DPRNN bottleneck).

#ifndef PDPCRN_MODELS_NETWORK_H_
#define PDPCRN_MODELS_NETWORK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pdpcrn/models/blocks.h"
#include "pdpcrn/models/config.h"
#include "pdpcrn/signal/stft.h"

namespace pdpcrn {

// FNV-1a 64 over bytes.
uint64_t Fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL);

template <Real T>
class Network {
 public:
  // Parameters are drawn from a stream derived from `seed`.
  explicit Network(const ModelConfig& config, uint64_t seed = 0);

  // x: [B, 2M, T, F] with real planes first; returns the same shape. In
  // training mode batch norms use batch statistics and update their buffers.
  Tensor<T> Forward(const Tensor<T>& x, bool training);

  // Handles alias the live tensors, so optimizers can update them in place.
  NamedTensors<T> Parameters() const;
  NamedTensors<T> Buffers() const;
  int64_t ParamCount() const { return CountElements(Parameters()); }
  // Hash of the config and every parameter and buffer name and shape.
  uint64_t StructuralHash() const;

  const ModelConfig& config() const { return config_; }
  Encoder<T>& encoder() { return encoder_; }
  Decoder<T>& decoder() { return decoder_; }
  // PDPCRN only.
  MixingBlock<T>& block(size_t i) { return blocks_.at(i); }
  // DPCRN only.
  Dprnn<T>& baseline_dprnn(size_t i) { return dprnns_.at(i); }

 private:
  ModelConfig config_;
  Encoder<T> encoder_;
  std::vector<MixingBlock<T>> blocks_;
  std::vector<Dprnn<T>> dprnns_;
  Decoder<T> decoder_;
};

// Eval-mode pass over a mixture spectrogram with config().mics channels.
template <Real T>
Spectrogram Enhance(Network<T>& net, const Spectrogram& mixture);

}  // namespace pdpcrn

#endif  // PDPCRN_MODELS_NETWORK_H_
