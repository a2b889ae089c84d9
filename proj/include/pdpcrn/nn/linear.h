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

#ifndef PDPCRN_NN_LINEAR_H_
#define PDPCRN_NN_LINEAR_H_

#include "pdpcrn/nn/module.h"

namespace pdpcrn {

// y = x W^T + b over the last axis of x. weight: [out, in]; bias: [out] or
// undefined.
template <Real T>
Tensor<T> LinearForward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

template <Real T>
class Linear {
 public:
  Linear() = default;
  Linear(int64_t in_features, int64_t out_features, Rng& rng, bool bias = true);

  Tensor<T> Forward(const Tensor<T>& x) const { return LinearForward(x, weight_, bias_); }
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;

  int64_t in_features() const { return weight_.dim(1); }
  int64_t out_features() const { return weight_.dim(0); }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Tensor<T> weight_;
  Tensor<T> bias_;
};

}  // namespace pdpcrn

#endif  // PDPCRN_NN_LINEAR_H_
