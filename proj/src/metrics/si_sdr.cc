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

#include "pdpcrn/metrics/si_sdr.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pdpcrn/tensor/ops.h"

namespace pdpcrn {

double SiSdr(const std::vector<double>& reference, const std::vector<double>& estimate) {
  if (reference.size() != estimate.size()) {
    throw std::invalid_argument("si_sdr: reference and estimate lengths differ (" +
                                std::to_string(reference.size()) + " vs " + std::to_string(estimate.size()) +
                                ")");
  }
  double dot = 0.0, rr = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    dot += reference[i] * estimate[i];
    rr += reference[i] * reference[i];
  }
  if (rr == 0.0) throw std::invalid_argument("si_sdr: reference is all zeros");
  const double alpha = dot / rr;
  double target = 0.0, residual = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    const double s = alpha * reference[i];
    target += s * s;
    residual += (estimate[i] - s) * (estimate[i] - s);
  }
  if (residual == 0.0) return kSiSdrBoundDb;
  if (target == 0.0) return -kSiSdrBoundDb;
  return std::clamp(10.0 * std::log10(target / residual), -kSiSdrBoundDb, kSiSdrBoundDb);
}

template <Real T>
Tensor<T> SiSdrTensor(const Tensor<T>& reference, const Tensor<T>& estimate) {
  if (reference.shape() != estimate.shape()) {
    throw ShapeError("si_sdr: reference " + ShapeToString(reference.shape()) + " and estimate " +
                     ShapeToString(estimate.shape()) + " differ");
  }
  const Tensor<T> rr = Sum(Square(reference), -1, true);
  for (T v : rr.data()) {
    if (v == T(0)) throw std::invalid_argument("si_sdr: reference is all zeros");
  }
  const Tensor<T> alpha = Sum(reference * estimate, -1, true) / rr;
  const Tensor<T> projected = alpha * reference;
  const Tensor<T> target = Sum(Square(projected), -1);
  const Tensor<T> residual = Sum(Square(estimate - projected), -1);
  const T d = static_cast<T>(std::pow(10.0, -kSiSdrBoundDb / 10.0));
  const Tensor<T> num = target + Affine(residual, d);
  const Tensor<T> den = residual + Affine(target, d);
  return Affine(Log(num) - Log(den), static_cast<T>(10.0 / std::log(10.0)));
}

template Tensor<float> SiSdrTensor<float>(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> SiSdrTensor<double>(const Tensor<double>&, const Tensor<double>&);

}  // namespace pdpcrn
