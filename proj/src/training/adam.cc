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

#include "pdpcrn/training/adam.h"

#include <cmath>

#include "pdpcrn/io/errors.h"

namespace pdpcrn {

template <Real T>
Adam<T>::Adam(NamedTensors<T> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor.numel(), T(0));
    v_.emplace_back(p.tensor.numel(), T(0));
  }
}

template <Real T>
void Adam<T>::Step(double lr) {
  for (const auto& p : params_) {
    if (!p.tensor.has_grad()) continue;
    for (T g : p.tensor.storage()->grad) {
      if (!std::isfinite(g)) throw NumericError("adam: non-finite gradient in parameter '" + p.name + "'");
    }
  }
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor<T> p = params_[i].tensor;
    const bool has_grad = p.has_grad();
    const T* g = has_grad ? p.storage()->grad.data() : nullptr;
    T* w = p.mutable_raw();
    for (int64_t k = 0; k < p.numel(); ++k) {
      const double gk = has_grad ? static_cast<double>(g[k]) : 0.0;
      const double m = b1 * m_[i][k] + (1.0 - b1) * gk;
      const double v = b2 * v_[i][k] + (1.0 - b2) * gk * gk;
      m_[i][k] = static_cast<T>(m);
      v_[i][k] = static_cast<T>(v);
      w[k] = static_cast<T>(w[k] - lr * (m / c1) / (std::sqrt(v / c2) + options_.eps));
    }
  }
}

template <Real T>
void Adam<T>::ZeroGrad() {
  for (auto& p : params_) p.tensor.storage()->grad.clear();
}

template <Real T>
NamedTensors<float> Adam<T>::ExportMoments() const {
  NamedTensors<float> out;
  for (size_t i = 0; i < params_.size(); ++i) {
    const Shape& shape = params_[i].tensor.shape();
    out.push_back({"adam.m." + params_[i].name, Tensor<float>(shape, std::vector<float>(m_[i].begin(), m_[i].end()))});
    out.push_back({"adam.v." + params_[i].name, Tensor<float>(shape, std::vector<float>(v_[i].begin(), v_[i].end()))});
  }
  return out;
}

template <Real T>
void Adam<T>::ImportMoments(const NamedTensors<float>& moments, int64_t steps) {
  auto find = [&moments](const std::string& name, const Shape& shape) -> const Tensor<float>& {
    for (const auto& t : moments) {
      if (t.name != name) continue;
      if (t.tensor.shape() != shape) throw ConfigError("adam: moment '" + name + "' is misshapen");
      return t.tensor;
    }
    throw ConfigError("adam: missing moment '" + name + "'");
  };
  for (size_t i = 0; i < params_.size(); ++i) {
    const Shape& shape = params_[i].tensor.shape();
    const auto m = find("adam.m." + params_[i].name, shape).data();
    const auto v = find("adam.v." + params_[i].name, shape).data();
    m_[i].assign(m.begin(), m.end());
    v_[i].assign(v.begin(), v.end());
  }
  steps_ = steps;
}

template class Adam<float>;
template class Adam<double>;

}  // namespace pdpcrn
