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

#ifndef PDPCRN_METRICS_SI_SDR_H_
#define PDPCRN_METRICS_SI_SDR_H_

#include <vector>

#include "pdpcrn/tensor/tensor.h"

namespace pdpcrn {

// Bound on |SI-SDR| in dB.
inline constexpr double kSiSdrBoundDb = 60.0;

// Scale-invariant SDR in dB: with s the projection of the estimate onto the
// reference and e the residual, 10 log10(|s|^2 / |e|^2) clamped to
// +-kSiSdrBoundDb. Throws std::invalid_argument on length mismatch or a
// zero reference.
double SiSdr(const std::vector<double>& reference, const std::vector<double>& estimate);

// Differentiable batch form over the last axis of [..., N] tensors, one
// value per leading index. The bound is applied smoothly as
// 10 log10((|s|^2 + d |e|^2) / (|e|^2 + d |s|^2)) with d = 10^(-bound / 10),
// which stays within 0.005 dB of the plain ratio inside +-30 dB.
template <Real T>
Tensor<T> SiSdrTensor(const Tensor<T>& reference, const Tensor<T>& estimate);

}  // namespace pdpcrn

#endif  // PDPCRN_METRICS_SI_SDR_H_
