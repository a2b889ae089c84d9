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

#include "pdpcrn/nn/linear.h"

#include <Eigen/Core>
#include <cmath>

namespace pdpcrn {

namespace {
template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}  // namespace

template <Real T>
Tensor<T> LinearForward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (weight.rank() != 2 || x.rank() < 1 || x.dim(-1) != weight.dim(1)) {
    throw ShapeError("linear: input " + ShapeToString(x.shape()) + " does not match weight " +
                     ShapeToString(weight.shape()));
  }
  const int64_t in = weight.dim(1), out_f = weight.dim(0);
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != out_f)) {
    throw ShapeError("linear: bias shape " + ShapeToString(bias.shape()));
  }
  const int64_t rows = x.numel() / in;
  Shape out_shape = x.shape();
  out_shape.back() = out_f;
  Tensor<T> out(out_shape);
  Eigen::Map<const RowMat<T>> mx(x.raw(), rows, in);
  Eigen::Map<const RowMat<T>> mw(weight.raw(), out_f, in);
  Eigen::Map<RowMat<T>> my(out.mutable_raw(), rows, out_f);
  my.noalias() = mx * mw.transpose();
  if (bias.defined()) {
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> mb(bias.raw(), out_f);
    my.rowwise() += mb;
  }
  if (Tape<T>* tape = internal::RecordingTape<T>({&x, &weight, &bias})) {
    auto sx = x.storage();
    auto sw = weight.storage();
    auto sb = bias.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "linear", {&out}, [=]() {
      Eigen::Map<const RowMat<T>> g(so->grad.data(), rows, out_f);
      if (sx->requires_grad) {
        Eigen::Map<RowMat<T>> gx(sx->MutableGrad(), rows, in);
        Eigen::Map<const RowMat<T>> w(sw->data.data(), out_f, in);
        gx.noalias() += g * w;
      }
      if (sw->requires_grad) {
        Eigen::Map<RowMat<T>> gw(sw->MutableGrad(), out_f, in);
        Eigen::Map<const RowMat<T>> xin(sx->data.data(), rows, in);
        gw.noalias() += g.transpose() * xin;
      }
      if (sb && sb->requires_grad) {
        // Plain loops keep the summation order independent of buffer alignment.
        T* gb = sb->MutableGrad();
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t c = 0; c < out_f; ++c) gb[c] += g(r, c);
        }
      }
    });
  }
  return out;
}

template <Real T>
Linear<T>::Linear(int64_t in_features, int64_t out_features, Rng& rng, bool bias) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  weight_ = UniformParameter<T>({out_features, in_features}, bound, rng);
  if (bias) bias_ = UniformParameter<T>({out_features}, bound, rng);
}

template <Real T>
void Linear<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  out.push_back({JoinName(prefix, "weight"), weight_});
  if (bias_.defined()) out.push_back({JoinName(prefix, "bias"), bias_});
}

template Tensor<float> LinearForward<float>(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&);
template Tensor<double> LinearForward<double>(const Tensor<double>&, const Tensor<double>&, const Tensor<double>&);
template class Linear<float>;
template class Linear<double>;

}  // namespace pdpcrn
