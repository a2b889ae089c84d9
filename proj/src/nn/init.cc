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

#include "pdpcrn/nn/module.h"

namespace pdpcrn {

template <Real T>
Tensor<T> UniformParameter(Shape shape, double bound, Rng& rng) {
  Tensor<T> t(std::move(shape));
  for (T& v : t.mutable_data()) v = static_cast<T>(rng.Uniform(-bound, bound));
  t.set_requires_grad(true);
  return t;
}

template <Real T>
Tensor<T> ConstantParameter(Shape shape, T value) {
  Tensor<T> t(std::move(shape), value);
  t.set_requires_grad(true);
  return t;
}

template Tensor<float> UniformParameter<float>(Shape, double, Rng&);
template Tensor<double> UniformParameter<double>(Shape, double, Rng&);
template Tensor<float> ConstantParameter<float>(Shape, float);
template Tensor<double> ConstantParameter<double>(Shape, double);

}  // namespace pdpcrn
