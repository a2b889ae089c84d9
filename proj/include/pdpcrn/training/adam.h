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

#ifndef PDPCRN_TRAINING_ADAM_H_
#define PDPCRN_TRAINING_ADAM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pdpcrn/nn/module.h"

namespace pdpcrn {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moments are kept per parameter in the
// parameter precision; the update itself is evaluated in double.
template <Real T>
class Adam {
 public:
  explicit Adam(NamedTensors<T> params, AdamOptions options = {});

  // Applies one update from the accumulated gradients. Parameters without a
  // gradient are treated as having a zero gradient. Throws NumericError
  // naming the first parameter whose gradient is not finite; no parameter is
  // modified in that case.
  void Step(double lr);
  void ZeroGrad();

  int64_t steps() const { return steps_; }
  const NamedTensors<T>& params() const { return params_; }

  // Moments as "adam.m.<param>" and "adam.v.<param>".
  NamedTensors<float> ExportMoments() const;
  // Throws ConfigError when a moment is missing or misshapen.
  void ImportMoments(const NamedTensors<float>& moments, int64_t steps);

 private:
  NamedTensors<T> params_;
  AdamOptions options_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  int64_t steps_ = 0;
};

}  // namespace pdpcrn

#endif  // PDPCRN_TRAINING_ADAM_H_
