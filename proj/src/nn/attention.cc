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

#include "pdpcrn/nn/attention.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "pdpcrn/tensor/ops.h"

namespace pdpcrn {

void AttentionSpec::Validate() const {
  if (model_dim <= 0 || heads <= 0 || head_dim <= 0) {
    throw ShapeError("attention: model_dim, heads and head_dim must be positive (got " +
                     std::to_string(model_dim) + ", " + std::to_string(heads) + ", " +
                     std::to_string(head_dim) + ")");
  }
}

namespace {

template <Real T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <Real T>
using ConstMap = Eigen::Map<const RowMat<T>>;

// Softmax weights of one sequence; masked entries are exactly zero.
template <Real T>
void AttentionWeights(const ConstMap<T>& q, const ConstMap<T>& k, T scale, bool causal, RowMat<T>& p) {
  const int64_t len = q.rows();
  p.noalias() = q * k.transpose();
  p *= scale;
  for (int64_t t = 0; t < len; ++t) {
    const int64_t stop = causal ? t + 1 : len;
    auto row = p.row(t).head(stop).array();
    row = (row - row.maxCoeff()).exp();
    // Sequential sum; Eigen's vectorized reduction order depends on alignment.
    T sum = T(0);
    for (int64_t j = 0; j < stop; ++j) sum += p(t, j);
    row /= sum;
    p.row(t).tail(len - stop).setZero();
  }
}

}  // namespace

template <Real T>
Tensor<T> ScaledDotProductAttention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                                    bool causal) {
  if (q.rank() != 3 || q.shape() != k.shape() || q.shape() != v.shape()) {
    throw ShapeError("attention: q, k, v must share one [N, L, d] shape, got " +
                     ShapeToString(q.shape()) + ", " + ShapeToString(k.shape()) + ", " +
                     ShapeToString(v.shape()));
  }
  const int64_t n = q.dim(0), len = q.dim(1), d = q.dim(2);
  const T scale = T(1) / std::sqrt(static_cast<T>(d));
  Tensor<T> out(q.shape());
  RowMat<T> p(len, len);
  for (int64_t s = 0; s < n; ++s) {
    const int64_t base = s * len * d;
    AttentionWeights<T>(ConstMap<T>(q.raw() + base, len, d), ConstMap<T>(k.raw() + base, len, d), scale,
                        causal, p);
    Eigen::Map<RowMat<T>>(out.mutable_raw() + base, len, d).noalias() = p * ConstMap<T>(v.raw() + base, len, d);
  }

  if (Tape<T>* tape = internal::RecordingTape<T>({&q, &k, &v})) {
    auto sq = q.storage();
    auto sk = k.storage();
    auto sv = v.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "attention", {&out}, [=]() {
      T* gq = sq->requires_grad ? sq->MutableGrad() : nullptr;
      T* gk = sk->requires_grad ? sk->MutableGrad() : nullptr;
      T* gv = sv->requires_grad ? sv->MutableGrad() : nullptr;
      RowMat<T> p(len, len), dp(len, len);
      for (int64_t s = 0; s < n; ++s) {
        const int64_t base = s * len * d;
        const ConstMap<T> qs(sq->data.data() + base, len, d);
        const ConstMap<T> ks(sk->data.data() + base, len, d);
        const ConstMap<T> vs(sv->data.data() + base, len, d);
        const ConstMap<T> os(so->data.data() + base, len, d);
        const ConstMap<T> gos(so->grad.data() + base, len, d);
        AttentionWeights<T>(qs, ks, scale, causal, p);
        if (gv) Eigen::Map<RowMat<T>>(gv + base, len, d).noalias() += p.transpose() * gos;
        if (!gq && !gk) continue;
        dp.noalias() = gos * vs.transpose();
        for (int64_t t = 0; t < len; ++t) {
          T dot_o = T(0);
          for (int64_t e = 0; e < d; ++e) dot_o += gos(t, e) * os(t, e);
          dp.row(t).array() = p.row(t).array() * (dp.row(t).array() - dot_o) * scale;
        }
        if (gq) Eigen::Map<RowMat<T>>(gq + base, len, d).noalias() += dp * ks;
        if (gk) Eigen::Map<RowMat<T>>(gk + base, len, d).noalias() += dp.transpose() * qs;
      }
    });
  }
  return out;
}

template <Real T>
MultiHeadAttention<T>::MultiHeadAttention(const AttentionSpec& spec, Rng& rng) : spec_(spec) {
  spec_.Validate();
  q_ = Linear<T>(spec.model_dim, spec.inner_dim(), rng);
  k_ = Linear<T>(spec.model_dim, spec.inner_dim(), rng);
  v_ = Linear<T>(spec.model_dim, spec.inner_dim(), rng);
  o_ = Linear<T>(spec.inner_dim(), spec.model_dim, rng);
}

template <Real T>
Tensor<T> MultiHeadAttention<T>::Forward(const Tensor<T>& x, const Tensor<T>& value_source) const {
  if (x.rank() != 3 || x.dim(2) != spec_.model_dim) {
    throw ShapeError("attention: input " + ShapeToString(x.shape()) + " expects model_dim " +
                     std::to_string(spec_.model_dim));
  }
  if (value_source.defined() && value_source.shape() != x.shape()) {
    throw ShapeError("attention: value source " + ShapeToString(value_source.shape()) +
                     " differs from input " + ShapeToString(x.shape()));
  }
  const int64_t batch = x.dim(0), len = x.dim(1), h = spec_.heads, d = spec_.head_dim;
  auto split = [&](const Tensor<T>& t) {
    return Reshape(Permute(Reshape(t, {batch, len, h, d}), {0, 2, 1, 3}), {batch * h, len, d});
  };
  const Tensor<T> q = split(q_.Forward(x));
  const Tensor<T> k = split(k_.Forward(x));
  const Tensor<T> v = split(v_.Forward(value_source.defined() ? value_source : x));
  Tensor<T> ctx = ScaledDotProductAttention(q, k, v, spec_.causal);
  ctx = Reshape(Permute(Reshape(ctx, {batch, h, len, d}), {0, 2, 1, 3}), {batch, len, h * d});
  return o_.Forward(ctx);
}

template <Real T>
void MultiHeadAttention<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  q_.AppendParameters(JoinName(prefix, "query"), out);
  k_.AppendParameters(JoinName(prefix, "key"), out);
  v_.AppendParameters(JoinName(prefix, "value"), out);
  o_.AppendParameters(JoinName(prefix, "output"), out);
}

#define PDPCRN_INSTANTIATE(T)                                                                  \
  template Tensor<T> ScaledDotProductAttention<T>(const Tensor<T>&, const Tensor<T>&,          \
                                                  const Tensor<T>&, bool);                     \
  template class MultiHeadAttention<T>;

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
