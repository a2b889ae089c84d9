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

#ifndef PDPCRN_NN_MODULE_H_
#define PDPCRN_NN_MODULE_H_

#include <string>
#include <string_view>
#include <vector>

#include "pdpcrn/tensor/random.h"
#include "pdpcrn/tensor/tensor.h"

namespace pdpcrn {

template <Real T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

template <Real T>
using NamedTensors = std::vector<NamedTensor<T>>;

inline std::string JoinName(std::string_view prefix, std::string_view name) {
  if (prefix.empty()) return std::string(name);
  return std::string(prefix) + "." + std::string(name);
}

template <Real T>
int64_t CountElements(const NamedTensors<T>& tensors) {
  int64_t n = 0;
  for (const auto& t : tensors) n += t.tensor.numel();
  return n;
}

// Leaf parameter drawn from U(-bound, bound).
template <Real T>
Tensor<T> UniformParameter(Shape shape, double bound, Rng& rng);

template <Real T>
Tensor<T> ConstantParameter(Shape shape, T value);

}  // namespace pdpcrn

#endif  // PDPCRN_NN_MODULE_H_
