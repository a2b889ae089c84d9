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

#include "pdpcrn/training/loss.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "pdpcrn/io/errors.h"
#include "pdpcrn/metrics/si_sdr.h"
#include "pdpcrn/signal/stft.h"
#include "pdpcrn/tensor/ops.h"

namespace pdpcrn {

std::string LossKindName(LossKind kind) {
  return kind == LossKind::kSiSdr ? "si_sdr" : "spectral_mse";
}

LossKind ParseLossKind(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "si_sdr") return LossKind::kSiSdr;
  if (lower == "spectral_mse") return LossKind::kSpectralMse;
  throw ConfigError("unknown loss kind '" + name + "' (expected si_sdr or spectral_mse)");
}

template <Real T>
Tensor<T> SpectralLoss(const Tensor<T>& predicted, const Tensor<T>& target, LossKind kind, int hop,
                       int fft_size) {
  if (predicted.shape() != target.shape() || predicted.rank() != 4 || predicted.dim(1) % 2 != 0) {
    throw ShapeError("loss: predicted " + ShapeToString(predicted.shape()) + " and target " +
                     ShapeToString(target.shape()) + " must be equal [B, 2M, T, F] shapes");
  }
  const int64_t b = target.dim(0), m = target.dim(1) / 2;
  const int64_t plane = target.dim(2) * target.dim(3);
  const auto t = target.data();
  for (int64_t i = 0; i < b; ++i) {
    for (int64_t c = 0; c < m; ++c) {
      double power = 0.0;
      for (int64_t part = 0; part < 2; ++part) {
        const T* p = t.data() + ((i * 2 * m) + part * m + c) * plane;
        for (int64_t k = 0; k < plane; ++k) power += static_cast<double>(p[k]) * p[k];
      }
      if (power == 0.0) {
        throw std::invalid_argument("loss: target channel " + std::to_string(c) + " of batch item " +
                                    std::to_string(i) + " has zero power");
      }
    }
  }
  const Tensor<T> pr = Slice(predicted, 1, 0, m), pi = Slice(predicted, 1, m, 2 * m);
  const Tensor<T> tr = Slice(target, 1, 0, m), ti = Slice(target, 1, m, 2 * m);
  if (kind == LossKind::kSiSdr) {
    const Tensor<T> estimate = IstftTensor(pr, pi, hop, fft_size);
    const Tensor<T> reference = IstftTensor(tr, ti, hop, fft_size);
    return Neg(Mean(SiSdrTensor(reference, estimate)));
  }
  const T eps = static_cast<T>(1e-8);
  const Tensor<T> complex_mse = Affine(Mean(Square(predicted - target)), T(2));
  const Tensor<T> pm = Sqrt(Affine(Square(pr) + Square(pi), T(1), eps));
  const Tensor<T> tm = Sqrt(Affine(Square(tr) + Square(ti), T(1), eps));
  return complex_mse + Mean(Square(pm - tm));
}

template Tensor<float> SpectralLoss<float>(const Tensor<float>&, const Tensor<float>&, LossKind, int, int);
template Tensor<double> SpectralLoss<double>(const Tensor<double>&, const Tensor<double>&, LossKind, int, int);

}  // namespace pdpcrn
