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

#ifndef PDPCRN_NN_NORM_H_
#define PDPCRN_NN_NORM_H_

#include "pdpcrn/nn/module.h"

namespace pdpcrn {

inline constexpr double kNormEpsilon = 1e-5;

// Per-channel normalization of x: [B, C, ...]. In training mode the batch
// statistics (biased variance) normalize the input and running_mean /
// running_var are updated in place as 0.9 * running + 0.1 * batch, with the
// unbiased batch variance. In eval mode the running statistics are used.
template <Real T>
Tensor<T> BatchNormForward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                           Tensor<T>& running_mean, Tensor<T>& running_var, bool training);

// Normalizes over the last axis; gamma, beta: [D].
template <Real T>
Tensor<T> LayerNormForward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta);

template <Real T>
class BatchNorm2d {
 public:
  static constexpr double kMomentum = 0.9;

  BatchNorm2d() = default;
  explicit BatchNorm2d(int64_t channels);

  // Updates the running statistics when training; hence not const.
  Tensor<T> Forward(const Tensor<T>& x, bool training) {
    return BatchNormForward(x, gamma_, beta_, running_mean_, running_var_, training);
  }
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;
  void AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const;

  int64_t channels() const { return gamma_.numel(); }
  Tensor<T>& gamma() { return gamma_; }
  Tensor<T>& beta() { return beta_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }

 private:
  Tensor<T> gamma_, beta_;
  Tensor<T> running_mean_, running_var_;
};

template <Real T>
class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(int64_t dim);

  Tensor<T> Forward(const Tensor<T>& x) const { return LayerNormForward(x, gamma_, beta_); }
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;

  Tensor<T>& gamma() { return gamma_; }
  Tensor<T>& beta() { return beta_; }

 private:
  Tensor<T> gamma_, beta_;
};

}  // namespace pdpcrn

#endif  // PDPCRN_NN_NORM_H_
