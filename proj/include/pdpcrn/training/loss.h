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

#ifndef PDPCRN_TRAINING_LOSS_H_
#define PDPCRN_TRAINING_LOSS_H_

#include <string>

#include "pdpcrn/tensor/tensor.h"

namespace pdpcrn {

enum class LossKind {
  // Negative SI-SDR of the inverse-STFT waveforms, averaged over channels.
  kSiSdr,
  // Mean squared complex error plus mean squared magnitude error.
  kSpectralMse,
};

std::string LossKindName(LossKind kind);
// Accepts "si_sdr" or "spectral_mse"; throws ConfigError otherwise.
LossKind ParseLossKind(const std::string& name);

// predicted, target: [B, 2M, T, F] in the network layout (real planes
// first). Throws ShapeError on mismatched or odd-channel shapes and
// std::invalid_argument when a target channel has zero power.
template <Real T>
Tensor<T> SpectralLoss(const Tensor<T>& predicted, const Tensor<T>& target, LossKind kind, int hop,
                       int fft_size);

}  // namespace pdpcrn

#endif  // PDPCRN_TRAINING_LOSS_H_
