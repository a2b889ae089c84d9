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

#include "pdpcrn/nn/norm.h"

#include <cmath>

namespace pdpcrn {

template <Real T>
Tensor<T> BatchNormForward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                           Tensor<T>& running_mean, Tensor<T>& running_var, bool training) {
  if (x.rank() < 2) throw ShapeError("batch_norm: expected [B, C, ...], got " + ShapeToString(x.shape()));
  const int64_t batch = x.dim(0), channels = x.dim(1);
  const int64_t plane = batch == 0 || channels == 0 ? 0 : x.numel() / (batch * channels);
  if (batch == 0 || plane == 0) throw ShapeError("batch_norm: zero-size batch");
  const Shape cshape{channels};
  if (gamma.shape() != cshape || beta.shape() != cshape || running_mean.shape() != cshape ||
      running_var.shape() != cshape) {
    throw ShapeError("batch_norm: parameters do not match " + std::to_string(channels) + " channels");
  }
  const int64_t count = batch * plane;
  auto mean = std::make_shared<std::vector<T>>(static_cast<size_t>(channels));
  auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(channels));
  const T* xd = x.raw();
  for (int64_t c = 0; c < channels; ++c) {
    if (training) {
      double s = 0.0;
      for (int64_t b = 0; b < batch; ++b) {
        const T* p = xd + (b * channels + c) * plane;
        for (int64_t i = 0; i < plane; ++i) s += p[i];
      }
      const double m = s / count;
      double ss = 0.0;
      for (int64_t b = 0; b < batch; ++b) {
        const T* p = xd + (b * channels + c) * plane;
        for (int64_t i = 0; i < plane; ++i) ss += (p[i] - m) * (p[i] - m);
      }
      const double var = ss / count;
      (*mean)[c] = static_cast<T>(m);
      (*inv_std)[c] = static_cast<T>(1.0 / std::sqrt(var + kNormEpsilon));
      const double unbiased = count > 1 ? ss / (count - 1) : var;
      T& rm = running_mean.mutable_raw()[c];
      T& rv = running_var.mutable_raw()[c];
      rm = static_cast<T>(BatchNorm2d<T>::kMomentum * rm + (1.0 - BatchNorm2d<T>::kMomentum) * m);
      rv = static_cast<T>(BatchNorm2d<T>::kMomentum * rv +
                          (1.0 - BatchNorm2d<T>::kMomentum) * unbiased);
    } else {
      (*mean)[c] = running_mean.raw()[c];
      (*inv_std)[c] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var.raw()[c]) +
                                                     kNormEpsilon));
    }
  }
  Tensor<T> out(x.shape());
  T* od = out.mutable_raw();
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t c = 0; c < channels; ++c) {
      const T* p = xd + (b * channels + c) * plane;
      T* o = od + (b * channels + c) * plane;
      const T m = (*mean)[c], is = (*inv_std)[c], g = gamma.raw()[c], bt = beta.raw()[c];
      for (int64_t i = 0; i < plane; ++i) o[i] = (p[i] - m) * is * g + bt;
    }
  }

  if (Tape<T>* tape = internal::RecordingTape<T>({&x, &gamma, &beta})) {
    auto sx = x.storage();
    auto sg = gamma.storage();
    auto sb = beta.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "batch_norm", {&out}, [=]() {
      const T* go = so->grad.data();
      const T* xd = sx->data.data();
      for (int64_t c = 0; c < channels; ++c) {
        const T m = (*mean)[c], is = (*inv_std)[c];
        double sum_g = 0.0, sum_gx = 0.0;
        for (int64_t b = 0; b < batch; ++b) {
          const T* p = xd + (b * channels + c) * plane;
          const T* g = go + (b * channels + c) * plane;
          for (int64_t i = 0; i < plane; ++i) {
            sum_g += g[i];
            sum_gx += g[i] * (p[i] - m) * is;
          }
        }
        if (sg->requires_grad) sg->MutableGrad()[c] += static_cast<T>(sum_gx);
        if (sb->requires_grad) sb->MutableGrad()[c] += static_cast<T>(sum_g);
        if (!sx->requires_grad) continue;
        T* gx = sx->MutableGrad();
        const T gam = sg->data[c];
        const T mg = static_cast<T>(sum_g / count), mgx = static_cast<T>(sum_gx / count);
        for (int64_t b = 0; b < batch; ++b) {
          const T* p = xd + (b * channels + c) * plane;
          const T* g = go + (b * channels + c) * plane;
          T* dx = gx + (b * channels + c) * plane;
          for (int64_t i = 0; i < plane; ++i) {
            if (training) {
              const T xh = (p[i] - m) * is;
              dx[i] += gam * is * (g[i] - mg - xh * mgx);
            } else {
              dx[i] += gam * is * g[i];
            }
          }
        }
      }
    });
  }
  return out;
}

template <Real T>
Tensor<T> LayerNormForward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta) {
  if (x.rank() < 1) throw ShapeError("layer_norm: scalar input");
  const int64_t dim = x.dim(-1);
  if (gamma.shape() != Shape{dim} || beta.shape() != Shape{dim}) {
    throw ShapeError("layer_norm: parameters do not match feature size " + std::to_string(dim));
  }
  const int64_t rows = dim == 0 ? 0 : x.numel() / dim;
  auto xhat = std::make_shared<std::vector<T>>(static_cast<size_t>(x.numel()));
  auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(rows));
  Tensor<T> out(x.shape());
  const T* g = gamma.raw();
  const T* bt = beta.raw();
  for (int64_t r = 0; r < rows; ++r) {
    const T* p = x.raw() + r * dim;
    T acc = T(0);
    for (int64_t i = 0; i < dim; ++i) acc += p[i];
    const T m = acc / static_cast<T>(dim);
    T ss = T(0);
    for (int64_t i = 0; i < dim; ++i) ss += (p[i] - m) * (p[i] - m);
    const T is = T(1) / std::sqrt(ss / static_cast<T>(dim) + static_cast<T>(kNormEpsilon));
    (*inv_std)[r] = is;
    T* xh = xhat->data() + r * dim;
    T* o = out.mutable_raw() + r * dim;
    for (int64_t i = 0; i < dim; ++i) {
      xh[i] = (p[i] - m) * is;
      o[i] = xh[i] * g[i] + bt[i];
    }
  }

  if (Tape<T>* tape = internal::RecordingTape<T>({&x, &gamma, &beta})) {
    auto sx = x.storage();
    auto sg = gamma.storage();
    auto sb = beta.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "layer_norm", {&out}, [=]() {
      const T* go = so->grad.data();
      T* gg = sg->requires_grad ? sg->MutableGrad() : nullptr;
      T* gb = sb->requires_grad ? sb->MutableGrad() : nullptr;
      T* gx = sx->requires_grad ? sx->MutableGrad() : nullptr;
      const T* gam = sg->data.data();
      std::vector<T> dxh(static_cast<size_t>(dim));
      for (int64_t r = 0; r < rows; ++r) {
        const T* gr = go + r * dim;
        const T* xh = xhat->data() + r * dim;
        T mean_d = T(0), mean_dx = T(0);
        for (int64_t i = 0; i < dim; ++i) {
          if (gg) gg[i] += gr[i] * xh[i];
          if (gb) gb[i] += gr[i];
          dxh[i] = gr[i] * gam[i];
          mean_d += dxh[i];
          mean_dx += dxh[i] * xh[i];
        }
        if (!gx) continue;
        mean_d /= static_cast<T>(dim);
        mean_dx /= static_cast<T>(dim);
        const T is = (*inv_std)[r];
        T* dx = gx + r * dim;
        for (int64_t i = 0; i < dim; ++i) dx[i] += is * (dxh[i] - mean_d - xh[i] * mean_dx);
      }
    });
  }
  return out;
}

template <Real T>
BatchNorm2d<T>::BatchNorm2d(int64_t channels)
    : gamma_(ConstantParameter<T>({channels}, T(1))),
      beta_(ConstantParameter<T>({channels}, T(0))),
      running_mean_(Shape{channels}, T(0)),
      running_var_(Shape{channels}, T(1)) {}

template <Real T>
void BatchNorm2d<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  out.push_back({JoinName(prefix, "weight"), gamma_});
  out.push_back({JoinName(prefix, "bias"), beta_});
}

template <Real T>
void BatchNorm2d<T>::AppendBuffers(std::string_view prefix, NamedTensors<T>& out) const {
  out.push_back({JoinName(prefix, "running_mean"), running_mean_});
  out.push_back({JoinName(prefix, "running_var"), running_var_});
}

template <Real T>
LayerNorm<T>::LayerNorm(int64_t dim)
    : gamma_(ConstantParameter<T>({dim}, T(1))), beta_(ConstantParameter<T>({dim}, T(0))) {}

template <Real T>
void LayerNorm<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  out.push_back({JoinName(prefix, "weight"), gamma_});
  out.push_back({JoinName(prefix, "bias"), beta_});
}

#define PDPCRN_INSTANTIATE(T)                                                                 \
  template Tensor<T> BatchNormForward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                         Tensor<T>&, Tensor<T>&, bool);                       \
  template Tensor<T> LayerNormForward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&); \
  template class BatchNorm2d<T>;                                                              \
  template class LayerNorm<T>;

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
