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

// Central finite-difference gradient checking shared by the unit tests.

#ifndef PDPCRN_TESTS_GRAD_CHECK_H_
#define PDPCRN_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pdpcrn/tensor/ops.h"
#include "pdpcrn/tensor/random.h"
#include "pdpcrn/tensor/tensor.h"

namespace pdpcrn::testing {

inline Tensor<double> RandomTensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (double& v : t.mutable_data()) v = scale * rng.Normal();
  return t;
}

inline Tensor<double> RandomLeaf(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t = RandomTensor(std::move(shape), rng, scale);
  t.set_requires_grad(true);
  return t;
}

// Projects an arbitrary output to a scalar with fixed random weights so that
// every output element contributes a distinct gradient.
inline Tensor<double> Project(const Tensor<double>& y, uint64_t seed = 99) {
  Rng rng(seed);
  Tensor<double> w = RandomTensor(y.shape(), rng);
  return Sum(Mul(y, w));
}

// Analytic and central-difference gradients at the checked coordinates.
struct GradientPair {
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// The loss callback rebuilds the graph from the current values of the
// inputs each time it is called. With max_elements > 0 only that many
// randomly chosen coordinates per input are compared.
inline std::vector<GradientPair> CompareGradients(const std::function<Tensor<double>()>& loss,
                                                  std::vector<Tensor<double>> inputs, double eps,
                                                  size_t max_elements) {
  for (auto& t : inputs) t.ZeroGrad();
  {
    GradSession<double> session;
    session.Backward(loss());
  }
  std::vector<GradientPair> pairs;
  Rng pick(1234);
  for (auto& t : inputs) {
    const std::vector<double> analytic = t.grad();
    auto data = t.mutable_data();
    std::vector<size_t> coords;
    if (max_elements == 0 || max_elements >= data.size()) {
      for (size_t i = 0; i < data.size(); ++i) coords.push_back(i);
    } else {
      for (size_t k = 0; k < max_elements; ++k) coords.push_back(pick.Below(data.size()));
    }
    GradientPair pair;
    for (size_t i : coords) {
      const double saved = data[i];
      data[i] = saved + eps;
      const double up = loss().item();
      data[i] = saved - eps;
      const double down = loss().item();
      data[i] = saved;
      pair.analytic.push_back(analytic[i]);
      pair.numeric.push_back((up - down) / (2 * eps));
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

inline double RelativeError(const std::vector<double>& a, const std::vector<double>& n) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - n[i]) * (a[i] - n[i]);
    na += a[i] * a[i];
    nn += n[i] * n[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-6});
}

// Largest relative L2 error ||analytic - numeric|| / max(||analytic||,
// ||numeric||, 1e-6) over the given inputs. The floor keeps inputs whose
// true gradient is zero (e.g. a key bias under softmax) from dividing
// finite-difference noise by itself.
inline double GradCheck(const std::function<Tensor<double>()>& loss,
                        std::vector<Tensor<double>> inputs, double eps = 1e-5,
                        size_t max_elements = 0) {
  double worst = 0.0;
  for (const auto& p : CompareGradients(loss, std::move(inputs), eps, max_elements)) {
    worst = std::max(worst, RelativeError(p.analytic, p.numeric));
  }
  return worst;
}

// Relative L2 error over all checked coordinates pooled into one vector.
// Suited to whole networks, where some parameters (a conv bias feeding a
// training-mode batch norm) have an exactly zero gradient.
inline double PooledGradCheck(const std::function<Tensor<double>()>& loss,
                              std::vector<Tensor<double>> inputs, double eps = 1e-5,
                              size_t max_elements = 0) {
  std::vector<double> a, n;
  for (const auto& p : CompareGradients(loss, std::move(inputs), eps, max_elements)) {
    a.insert(a.end(), p.analytic.begin(), p.analytic.end());
    n.insert(n.end(), p.numeric.begin(), p.numeric.end());
  }
  return RelativeError(a, n);
}

inline double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace pdpcrn::testing

#endif  // PDPCRN_TESTS_GRAD_CHECK_H_
