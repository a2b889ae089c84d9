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

#ifndef PDPCRN_NN_CONV_H_
#define PDPCRN_NN_CONV_H_

#include "pdpcrn/nn/module.h"

namespace pdpcrn {

// Geometry of a 2-D convolution over [batch, channel, time, freq] tensors.
// Time stride is always 1. A causal conv pads (kernel_time - 1) frames on the
// past side only; otherwise time padding is split, the extra frame going to
// the future side. Frequency padding is explicit.
struct Conv2dSpec {
  int64_t in_channels = 1;
  int64_t out_channels = 1;
  int64_t kernel_time = 1;
  int64_t kernel_freq = 1;
  int64_t stride_time = 1;
  int64_t stride_freq = 1;
  bool causal = true;
  int64_t groups = 1;
  int64_t pad_freq_low = 0;
  int64_t pad_freq_high = 0;

  // Symmetric frequency padding of floor((kernel_freq - 1) / 2) per side.
  static Conv2dSpec Make(int64_t in, int64_t out, int64_t kt, int64_t kf, int64_t st, int64_t sf);
  // Pads kernel_freq - 1 bins in total so that stride-1 convs keep the
  // frequency size.
  static Conv2dSpec Same(int64_t in, int64_t out, int64_t kt, int64_t kf);
  static Conv2dSpec Depthwise(int64_t channels, int64_t kernel_time);

  void Validate() const;
  int64_t TimePadPast() const { return causal ? kernel_time - 1 : (kernel_time - 1) / 2; }
  // Output frequency size of the forward conv; throws when non-positive.
  int64_t OutputFreq(int64_t in_freq) const;
  int64_t WeightCount() const { return out_channels * (in_channels / groups) * kernel_time * kernel_freq; }
  int64_t ParamCount(bool bias = true) const { return WeightCount() + (bias ? out_channels : 0); }
};

// x: [B, in, T, F]; weight: [out, in / groups, kt, kf]; bias: [out] or
// undefined. Output: [B, out, T, spec.OutputFreq(F)].
template <Real T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                 const Conv2dSpec& spec);

// Mirror of Conv2d: maps [B, in, T, F_small] back to [B, out, T, out_freq]
// where spec.OutputFreq(out_freq) == F_small. weight: [in, out / groups, kt,
// kf]. Along channels and frequency this is the adjoint of Conv2d with the
// same weights; along time each tap keeps the forward conv's lag, so the
// result is causal whenever the spec is. Equivalently
// ConvTranspose2d(y) == flip_t(adjoint(flip_t(y))).
template <Real T>
Tensor<T> ConvTranspose2d(const Tensor<T>& y, const Tensor<T>& weight, const Tensor<T>& bias,
                          const Conv2dSpec& spec, int64_t out_freq);

template <Real T>
class Conv2dLayer {
 public:
  Conv2dLayer() = default;
  Conv2dLayer(const Conv2dSpec& spec, Rng& rng, bool bias = true);

  Tensor<T> Forward(const Tensor<T>& x) const { return Conv2d(x, weight_, bias_, spec_); }
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;
  const Conv2dSpec& spec() const { return spec_; }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Conv2dSpec spec_;
  Tensor<T> weight_;
  Tensor<T> bias_;
};

// The spec describes the transposed layer itself: in_channels is its input
// width and out_channels its output width.
template <Real T>
class ConvTranspose2dLayer {
 public:
  ConvTranspose2dLayer() = default;
  ConvTranspose2dLayer(const Conv2dSpec& spec, Rng& rng, bool bias = true);

  Tensor<T> Forward(const Tensor<T>& y, int64_t out_freq) const {
    return ConvTranspose2d(y, weight_, bias_, spec_, out_freq);
  }
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;
  const Conv2dSpec& spec() const { return spec_; }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Conv2dSpec spec_;
  Tensor<T> weight_;
  Tensor<T> bias_;
};

}  // namespace pdpcrn

#endif  // PDPCRN_NN_CONV_H_
