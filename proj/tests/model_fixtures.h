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

// Shared model fixtures for the unit tests and the acceptance binary.

#ifndef PDPCRN_TESTS_MODEL_FIXTURES_H_
#define PDPCRN_TESTS_MODEL_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <functional>

#include "grad_check.h"
#include "pdpcrn/models/config.h"

namespace pdpcrn::testing {

// Tiny network over 17 frequency bins so full-model checks stay fast.
inline ModelConfig SmallConfig(Variant variant = Variant::kPdpcrn) {
  ModelConfig c = ModelConfig::Tiny();
  c.variant = variant;
  c.freq_bins = 17;
  return c;
}

struct CausalityResult {
  // Largest change at frames before the perturbation.
  double past_change = 0.0;
  // Smallest largest-change at perturbed frames; positive means the
  // perturbation was visible, so the check is not vacuous.
  double future_change = 1e300;
};

// Perturbs frames t0.. of a random [B, C, T, F] input (time on axis 2) and
// compares outputs, over `trials` random draws of input and t0.
inline CausalityResult CheckCausality(const std::function<Tensor<double>(const Tensor<double>&)>& f,
                                      const Shape& shape, int trials, uint64_t seed) {
  Rng rng(seed);
  CausalityResult r;
  const int64_t frames = shape[2];
  for (int trial = 0; trial < trials; ++trial) {
    const Tensor<double> x = RandomTensor(shape, rng);
    const int64_t t0 = 1 + static_cast<int64_t>(rng.Below(frames - 1));
    Tensor<double> x2 = x.Detach();
    auto d = x2.mutable_data();
    const int64_t inner = shape[3];
    for (int64_t i = 0; i < x2.numel(); ++i) {
      if ((i / inner) % frames >= t0) d[i] += rng.Normal();
    }
    const Tensor<double> y1 = f(x), y2 = f(x2);
    const int64_t out_frames = y1.dim(2), out_inner = y1.dim(3);
    double future = 0.0;
    for (int64_t i = 0; i < y1.numel(); ++i) {
      const double delta = std::abs(y1.data()[i] - y2.data()[i]);
      if ((i / out_inner) % out_frames < t0) r.past_change = std::max(r.past_change, delta);
      else future = std::max(future, delta);
    }
    r.future_change = std::min(r.future_change, future);
  }
  return r;
}

}  // namespace pdpcrn::testing

#endif  // PDPCRN_TESTS_MODEL_FIXTURES_H_
