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

#include "pdpcrn/nn/lstm.h"

#include <Eigen/Core>
#include <cmath>

#include "pdpcrn/tensor/ops.h"

namespace pdpcrn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using StridedMap = Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using ConstStridedMap = Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>>;

template <typename T>
T Sigm(T v) {
  return T(1) / (T(1) + std::exp(-v));
}

}  // namespace

template <Real T>
LstmResult<T> LstmDirection(const Tensor<T>& x, const Tensor<T>& w_ih, const Tensor<T>& w_hh,
                            const Tensor<T>& bias, const Tensor<T>& h0, const Tensor<T>& c0,
                            bool reverse) {
  if (x.rank() != 3) throw ShapeError("lstm: expected [B, L, D], got " + ShapeToString(x.shape()));
  const int64_t batch = x.dim(0), len = x.dim(1), in = x.dim(2);
  if (w_hh.rank() != 2 || w_hh.dim(0) % 4 != 0) throw ShapeError("lstm: bad w_hh shape");
  const int64_t hid = w_hh.dim(1), g4 = 4 * hid;
  if (w_hh.dim(0) != g4 || w_ih.shape() != Shape{g4, in}) {
    throw ShapeError("lstm: input " + ShapeToString(x.shape()) + " does not match w_ih " +
                     ShapeToString(w_ih.shape()));
  }
  if (bias.defined() && bias.shape() != Shape{g4}) throw ShapeError("lstm: bad bias shape");
  const Shape state_shape{batch, hid};
  if ((h0.defined() && h0.shape() != state_shape) || (c0.defined() && c0.shape() != state_shape)) {
    throw ShapeError("lstm: initial state must be " + ShapeToString(state_shape));
  }

  // Activated gates and cell states for every step, kept for the backward pass.
  auto acts = std::make_shared<std::vector<T>>(static_cast<size_t>(batch * len * g4));
  auto cells = std::make_shared<std::vector<T>>(static_cast<size_t>(batch * len * hid));
  Tensor<T> out({batch, len, hid});
  Tensor<T> h_n(state_shape), c_n(state_shape);

  {
    Eigen::Map<const RowMat<T>> mx(x.raw(), batch * len, in);
    Eigen::Map<const RowMat<T>> mw(w_ih.raw(), g4, in);
    Eigen::Map<RowMat<T>> ma(acts->data(), batch * len, g4);
    ma.noalias() = mx * mw.transpose();
    if (bias.defined()) {
      Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> mb(bias.raw(), g4);
      ma.rowwise() += mb;
    }
  }
  Eigen::Map<const RowMat<T>> whh(w_hh.raw(), g4, hid);
  RowMat<T> h_prev = RowMat<T>::Zero(batch, hid);
  RowMat<T> c_prev = RowMat<T>::Zero(batch, hid);
  if (h0.defined()) h_prev = Eigen::Map<const RowMat<T>>(h0.raw(), batch, hid);
  if (c0.defined()) c_prev = Eigen::Map<const RowMat<T>>(c0.raw(), batch, hid);
  for (int64_t s = 0; s < len; ++s) {
    const int64_t t = reverse ? len - 1 - s : s;
    StridedMap<T> a(acts->data() + t * g4, batch, g4, Eigen::OuterStride<>(len * g4));
    a.noalias() += h_prev * whh.transpose();
    StridedMap<T> h(out.mutable_raw() + t * hid, batch, hid, Eigen::OuterStride<>(len * hid));
    StridedMap<T> c(cells->data() + t * hid, batch, hid, Eigen::OuterStride<>(len * hid));
    for (int64_t b = 0; b < batch; ++b) {
      T* ab = &a(b, 0);
      for (int64_t j = 0; j < hid; ++j) {
        const T ig = Sigm(ab[j]);
        const T fg = Sigm(ab[hid + j]);
        const T gg = std::tanh(ab[2 * hid + j]);
        const T og = Sigm(ab[3 * hid + j]);
        ab[j] = ig;
        ab[hid + j] = fg;
        ab[2 * hid + j] = gg;
        ab[3 * hid + j] = og;
        const T cv = fg * c_prev(b, j) + ig * gg;
        c(b, j) = cv;
        h(b, j) = og * std::tanh(cv);
      }
    }
    h_prev = h;
    c_prev = c;
  }
  Eigen::Map<RowMat<T>>(h_n.mutable_raw(), batch, hid) = h_prev;
  Eigen::Map<RowMat<T>>(c_n.mutable_raw(), batch, hid) = c_prev;

  if (Tape<T>* tape = internal::RecordingTape<T>({&x, &w_ih, &w_hh, &bias, &h0, &c0})) {
    auto sx = x.storage();
    auto swi = w_ih.storage();
    auto swh = w_hh.storage();
    auto sb = bias.storage();
    auto sh0 = h0.storage();
    auto sc0 = c0.storage();
    auto so = out.storage();
    auto shn = h_n.storage();
    auto scn = c_n.storage();
    internal::RecordOp<T>(tape, "lstm", {&out, &h_n, &c_n}, [=]() {
      Eigen::Map<const RowMat<T>> whh(swh->data.data(), g4, hid);
      RowMat<T> dh_next = RowMat<T>::Zero(batch, hid);
      RowMat<T> dc_next = RowMat<T>::Zero(batch, hid);
      if (!shn->grad.empty()) dh_next = Eigen::Map<const RowMat<T>>(shn->grad.data(), batch, hid);
      if (!scn->grad.empty()) dc_next = Eigen::Map<const RowMat<T>>(scn->grad.data(), batch, hid);
      const bool has_dout = !so->grad.empty();
      // Gradients w.r.t. gate pre-activations for every step.
      std::vector<T> dpre(static_cast<size_t>(batch * len * g4));
      RowMat<T> h_prev(batch, hid), c_prev(batch, hid);
      RowMat<T> dwhh = RowMat<T>::Zero(g4, hid);
      for (int64_t s = len - 1; s >= 0; --s) {
        const int64_t t = reverse ? len - 1 - s : s;
        const int64_t tp = reverse ? t + 1 : t - 1;  // previous step in processing order
        const bool first = s == 0;
        for (int64_t b = 0; b < batch; ++b) {
          for (int64_t j = 0; j < hid; ++j) {
            if (first) {
              h_prev(b, j) = sh0 ? sh0->data[b * hid + j] : T(0);
              c_prev(b, j) = sc0 ? sc0->data[b * hid + j] : T(0);
            } else {
              h_prev(b, j) = so->data[(b * len + tp) * hid + j];
              c_prev(b, j) = (*cells)[(b * len + tp) * hid + j];
            }
          }
        }
        for (int64_t b = 0; b < batch; ++b) {
          const T* ab = acts->data() + (b * len + t) * g4;
          T* db = dpre.data() + (b * len + t) * g4;
          for (int64_t j = 0; j < hid; ++j) {
            const T ig = ab[j], fg = ab[hid + j], gg = ab[2 * hid + j], og = ab[3 * hid + j];
            const T cv = (*cells)[(b * len + t) * hid + j];
            const T tc = std::tanh(cv);
            T dh = dh_next(b, j);
            if (has_dout) dh += so->grad[(b * len + t) * hid + j];
            const T dc = dc_next(b, j) + dh * og * (T(1) - tc * tc);
            db[j] = dc * gg * ig * (T(1) - ig);
            db[hid + j] = dc * c_prev(b, j) * fg * (T(1) - fg);
            db[2 * hid + j] = dc * ig * (T(1) - gg * gg);
            db[3 * hid + j] = dh * tc * og * (T(1) - og);
            dc_next(b, j) = dc * fg;
          }
        }
        ConstStridedMap<T> da(dpre.data() + t * g4, batch, g4, Eigen::OuterStride<>(len * g4));
        dh_next.noalias() = da * whh;
        if (swh->requires_grad) dwhh.noalias() += da.transpose() * h_prev;
      }
      if (swh->requires_grad) Eigen::Map<RowMat<T>>(swh->MutableGrad(), g4, hid) += dwhh;
      if (sh0 && sh0->requires_grad) Eigen::Map<RowMat<T>>(sh0->MutableGrad(), batch, hid) += dh_next;
      if (sc0 && sc0->requires_grad) Eigen::Map<RowMat<T>>(sc0->MutableGrad(), batch, hid) += dc_next;
      Eigen::Map<const RowMat<T>> mda(dpre.data(), batch * len, g4);
      if (swi->requires_grad) {
        Eigen::Map<const RowMat<T>> mx(sx->data.data(), batch * len, in);
        Eigen::Map<RowMat<T>>(swi->MutableGrad(), g4, in).noalias() += mda.transpose() * mx;
      }
      if (sb && sb->requires_grad) {
        // Plain loops keep the summation order independent of buffer alignment.
        T* gb = sb->MutableGrad();
        for (int64_t r = 0; r < batch * len; ++r) {
          for (int64_t c = 0; c < g4; ++c) gb[c] += mda(r, c);
        }
      }
      if (sx->requires_grad) {
        Eigen::Map<const RowMat<T>> mw(swi->data.data(), g4, in);
        Eigen::Map<RowMat<T>>(sx->MutableGrad(), batch * len, in).noalias() += mda * mw;
      }
    });
  }
  return {out, h_n, c_n};
}

template <Real T>
Lstm<T>::Lstm(const LstmSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.input_dim <= 0 || spec.hidden_dim <= 0) throw ShapeError("lstm: sizes must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dim));
  const int64_t g4 = 4 * spec.hidden_dim;
  for (int d = 0; d < spec.directions(); ++d) {
    w_ih_[d] = UniformParameter<T>({g4, spec.input_dim}, bound, rng);
    w_hh_[d] = UniformParameter<T>({g4, spec.hidden_dim}, bound, rng);
    bias_[d] = UniformParameter<T>({g4}, bound, rng);
  }
}

template <Real T>
LstmResult<T> Lstm<T>::Forward(const Tensor<T>& x, const Tensor<T>& h0, const Tensor<T>& c0) const {
  if (x.rank() != 3 || x.dim(2) != spec_.input_dim) {
    throw ShapeError("lstm: input " + ShapeToString(x.shape()) + " expects feature size " +
                     std::to_string(spec_.input_dim));
  }
  const int64_t dirs = spec_.directions(), batch = x.dim(0), hid = spec_.hidden_dim;
  const Shape state_shape{dirs, batch, hid};
  if ((h0.defined() && h0.shape() != state_shape) || (c0.defined() && c0.shape() != state_shape)) {
    throw ShapeError("lstm: initial state must be " + ShapeToString(state_shape));
  }
  auto state_of = [&](const Tensor<T>& s, int d) -> Tensor<T> {
    if (!s.defined()) return {};
    if (dirs == 1) return Reshape(s, {batch, hid});
    return Reshape(Slice(s, 0, d, d + 1), {batch, hid});
  };
  LstmResult<T> fwd =
      LstmDirection(x, w_ih_[0], w_hh_[0], bias_[0], state_of(h0, 0), state_of(c0, 0), false);
  if (dirs == 1) {
    return {fwd.output, Reshape(fwd.h_n, state_shape), Reshape(fwd.c_n, state_shape)};
  }
  LstmResult<T> bwd =
      LstmDirection(x, w_ih_[1], w_hh_[1], bias_[1], state_of(h0, 1), state_of(c0, 1), true);
  const Shape one{1, batch, hid};
  return {Concat<T>({fwd.output, bwd.output}, 2),
          Concat<T>({Reshape(fwd.h_n, one), Reshape(bwd.h_n, one)}, 0),
          Concat<T>({Reshape(fwd.c_n, one), Reshape(bwd.c_n, one)}, 0)};
}

template <Real T>
void Lstm<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  for (int d = 0; d < spec_.directions(); ++d) {
    const std::string suffix = d == 0 ? "" : "_reverse";
    out.push_back({JoinName(prefix, "weight_ih" + suffix), w_ih_[d]});
    out.push_back({JoinName(prefix, "weight_hh" + suffix), w_hh_[d]});
    out.push_back({JoinName(prefix, "bias" + suffix), bias_[d]});
  }
}

#define PDPCRN_INSTANTIATE(T)                                                                 \
  template LstmResult<T> LstmDirection<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                          const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                          bool);                                              \
  template class Lstm<T>;

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
