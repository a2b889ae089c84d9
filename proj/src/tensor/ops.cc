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

#include "pdpcrn/tensor/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdpcrn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-dimension element strides of `in` seen through the broadcast `out`
// shape; 0 along broadcast dimensions.
std::vector<int64_t> BroadcastStrides(const Shape& in, const Shape& out) {
  const size_t r = out.size();
  std::vector<int64_t> strides(r, 0);
  int64_t s = 1;
  for (size_t k = 0; k < in.size(); ++k) {
    const size_t di = in.size() - 1 - k;
    const size_t dout = r - 1 - k;
    strides[dout] = in[di] == 1 ? 0 : s;
    s *= in[di];
  }
  return strides;
}

// Calls f(out_index, a_index, b_index) for every element of `out`.
template <typename F>
void ForEachBroadcast(const Shape& out, const std::vector<int64_t>& sa,
                      const std::vector<int64_t>& sb, F&& f) {
  const size_t r = out.size();
  if (r == 0) {
    f(int64_t{0}, int64_t{0}, int64_t{0});
    return;
  }
  const int64_t inner = out[r - 1];
  const int64_t total = NumElements(out);
  if (total == 0) return;
  const int64_t sa_last = sa[r - 1];
  const int64_t sb_last = sb[r - 1];
  std::vector<int64_t> idx(r, 0);
  int64_t oa = 0, ob = 0;
  for (int64_t o = 0; o < total; o += inner) {
    for (int64_t j = 0; j < inner; ++j) f(o + j, oa + j * sa_last, ob + j * sb_last);
    for (int d = static_cast<int>(r) - 2; d >= 0; --d) {
      if (++idx[d] < out[d]) {
        oa += sa[d];
        ob += sb[d];
        break;
      }
      oa -= sa[d] * (out[d] - 1);
      ob -= sb[d] * (out[d] - 1);
      idx[d] = 0;
    }
  }
}

int NormalizeAxis(int axis, int rank) {
  const int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for rank " +
                     std::to_string(rank));
  }
  return a;
}

template <typename T>
T NormalCdf(T x) {
  return T(0.5) * std::erfc(-x / std::sqrt(T(2)));
}

template <typename T>
T NormalPdf(T x) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return static_cast<T>(kInvSqrt2Pi) * std::exp(T(-0.5) * x * x);
}

template <typename T>
T UnaryValue(UnaryKind kind, T x) {
  switch (kind) {
    case UnaryKind::kNeg: return -x;
    case UnaryKind::kExp: return std::exp(x);
    case UnaryKind::kLog: return std::log(x);
    case UnaryKind::kTanh: return std::tanh(x);
    case UnaryKind::kSigmoid: return T(1) / (T(1) + std::exp(-x));
    case UnaryKind::kGelu: return x * NormalCdf(x);
    case UnaryKind::kSqrt: return std::sqrt(x);
    case UnaryKind::kSquare: return x * x;
    case UnaryKind::kAbs: return std::abs(x);
  }
  return x;
}

// d y / d x given input x and output y.
template <typename T>
T UnaryDerivative(UnaryKind kind, T x, T y) {
  switch (kind) {
    case UnaryKind::kNeg: return T(-1);
    case UnaryKind::kExp: return y;
    case UnaryKind::kLog: return T(1) / x;
    case UnaryKind::kTanh: return T(1) - y * y;
    case UnaryKind::kSigmoid: return y * (T(1) - y);
    case UnaryKind::kGelu: return NormalCdf(x) + x * NormalPdf(x);
    case UnaryKind::kSqrt: return T(0.5) / y;
    case UnaryKind::kSquare: return T(2) * x;
    case UnaryKind::kAbs: return x > T(0) ? T(1) : (x < T(0) ? T(-1) : T(0));
  }
  return T(0);
}

}  // namespace

Shape BroadcastShapes(const Shape& a, const Shape& b) {
  const size_t r = std::max(a.size(), b.size());
  Shape out(r, 1);
  for (size_t k = 0; k < r; ++k) {
    const int64_t da = k < a.size() ? a[a.size() - 1 - k] : 1;
    const int64_t db = k < b.size() ? b[b.size() - 1 - k] : 1;
    if (da != db && da != 1 && db != 1) {
      throw ShapeError("shapes " + ShapeToString(a) + " and " + ShapeToString(b) +
                       " are not broadcastable");
    }
    out[r - 1 - k] = da == 1 ? db : da;
  }
  return out;
}

template <Real T>
Tensor<T> Elementwise(UnaryKind kind, const Tensor<T>& a) {
  Tensor<T> out(a.shape());
  const T* x = a.raw();
  T* y = out.mutable_raw();
  const int64_t n = a.numel();
  for (int64_t i = 0; i < n; ++i) y[i] = UnaryValue(kind, x[i]);
  if (Tape<T>* tape = internal::RecordingTape<T>({&a})) {
    auto sa = a.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "unary", {&out}, [kind, sa, so]() {
      const T* g = so->grad.data();
      T* ga = sa->MutableGrad();
      const size_t n = sa->data.size();
      for (size_t i = 0; i < n; ++i) {
        ga[i] += g[i] * UnaryDerivative(kind, sa->data[i], so->data[i]);
      }
    });
  }
  return out;
}

template <Real T>
Tensor<T> Elementwise(BinaryKind kind, const Tensor<T>& a, const Tensor<T>& b) {
  const Shape out_shape = BroadcastShapes(a.shape(), b.shape());
  Tensor<T> out(out_shape);
  const auto sa = BroadcastStrides(a.shape(), out_shape);
  const auto sb = BroadcastStrides(b.shape(), out_shape);
  const T* x = a.raw();
  const T* z = b.raw();
  T* y = out.mutable_raw();
  const bool same = a.shape() == b.shape();
  auto apply = [&](auto op) {
    if (same) {
      const int64_t n = out.numel();
      for (int64_t i = 0; i < n; ++i) y[i] = op(x[i], z[i]);
    } else {
      ForEachBroadcast(out_shape, sa, sb,
                       [&](int64_t o, int64_t ia, int64_t ib) { y[o] = op(x[ia], z[ib]); });
    }
  };
  switch (kind) {
    case BinaryKind::kAdd: apply([](T p, T q) { return p + q; }); break;
    case BinaryKind::kSub: apply([](T p, T q) { return p - q; }); break;
    case BinaryKind::kMul: apply([](T p, T q) { return p * q; }); break;
    case BinaryKind::kDiv: apply([](T p, T q) { return p / q; }); break;
  }
  if (Tape<T>* tape = internal::RecordingTape<T>({&a, &b})) {
    auto pa = a.storage();
    auto pb = b.storage();
    auto po = out.storage();
    internal::RecordOp<T>(tape, "binary", {&out}, [kind, pa, pb, po, sa, sb, out_shape]() {
      const T* g = po->grad.data();
      T* ga = pa->requires_grad ? pa->MutableGrad() : nullptr;
      T* gb = pb->requires_grad ? pb->MutableGrad() : nullptr;
      const T* x = pa->data.data();
      const T* z = pb->data.data();
      ForEachBroadcast(out_shape, sa, sb, [&](int64_t o, int64_t ia, int64_t ib) {
        const T go = g[o];
        switch (kind) {
          case BinaryKind::kAdd:
            if (ga) ga[ia] += go;
            if (gb) gb[ib] += go;
            break;
          case BinaryKind::kSub:
            if (ga) ga[ia] += go;
            if (gb) gb[ib] -= go;
            break;
          case BinaryKind::kMul:
            if (ga) ga[ia] += go * z[ib];
            if (gb) gb[ib] += go * x[ia];
            break;
          case BinaryKind::kDiv:
            if (ga) ga[ia] += go / z[ib];
            if (gb) gb[ib] -= go * x[ia] / (z[ib] * z[ib]);
            break;
        }
      });
    });
  }
  return out;
}

template <Real T>
Tensor<T> Affine(const Tensor<T>& a, T scale, T offset) {
  Tensor<T> out(a.shape());
  const T* x = a.raw();
  T* y = out.mutable_raw();
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = scale * x[i] + offset;
  if (Tape<T>* tape = internal::RecordingTape<T>({&a})) {
    auto pa = a.storage();
    auto po = out.storage();
    internal::RecordOp<T>(tape, "affine", {&out}, [pa, po, scale]() {
      T* ga = pa->MutableGrad();
      const T* g = po->grad.data();
      for (size_t i = 0; i < pa->data.size(); ++i) ga[i] += scale * g[i];
    });
  }
  return out;
}

template <Real T>
Tensor<T> Matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() < 2 || b.rank() < 2) {
    throw ShapeError("matmul needs rank >= 2 operands, got " + ShapeToString(a.shape()) + " and " +
                     ShapeToString(b.shape()));
  }
  const int64_t m = a.dim(-2), k = a.dim(-1), k2 = b.dim(-2), n = b.dim(-1);
  if (k != k2) {
    throw ShapeError("matmul inner dimensions differ: " + ShapeToString(a.shape()) + " x " +
                     ShapeToString(b.shape()));
  }
  const Shape batch_a(a.shape().begin(), a.shape().end() - 2);
  const Shape batch_b(b.shape().begin(), b.shape().end() - 2);
  Shape batch = BroadcastShapes(batch_a, batch_b);
  auto sa = BroadcastStrides(batch_a, batch);
  auto sb = BroadcastStrides(batch_b, batch);
  Shape out_shape = batch;
  out_shape.push_back(m);
  out_shape.push_back(n);
  Tensor<T> out(out_shape);
  const T* pa = a.raw();
  const T* pb = b.raw();
  T* po = out.mutable_raw();
  ForEachBroadcast(batch, sa, sb, [&](int64_t o, int64_t ia, int64_t ib) {
    Eigen::Map<const RowMat<T>> ma(pa + ia * m * k, m, k);
    Eigen::Map<const RowMat<T>> mb(pb + ib * k * n, k, n);
    Eigen::Map<RowMat<T>> mo(po + o * m * n, m, n);
    mo.noalias() = ma * mb;
  });
  if (Tape<T>* tape = internal::RecordingTape<T>({&a, &b})) {
    auto sta = a.storage();
    auto stb = b.storage();
    auto sto = out.storage();
    internal::RecordOp<T>(tape, "matmul", {&out}, [=]() {
      T* ga = sta->requires_grad ? sta->MutableGrad() : nullptr;
      T* gb = stb->requires_grad ? stb->MutableGrad() : nullptr;
      const T* g = sto->grad.data();
      ForEachBroadcast(batch, sa, sb, [&](int64_t o, int64_t ia, int64_t ib) {
        Eigen::Map<const RowMat<T>> mg(g + o * m * n, m, n);
        if (ga) {
          Eigen::Map<const RowMat<T>> mb(stb->data.data() + ib * k * n, k, n);
          Eigen::Map<RowMat<T>> mga(ga + ia * m * k, m, k);
          mga.noalias() += mg * mb.transpose();
        }
        if (gb) {
          Eigen::Map<const RowMat<T>> ma(sta->data.data() + ia * m * k, m, k);
          Eigen::Map<RowMat<T>> mgb(gb + ib * k * n, k, n);
          mgb.noalias() += ma.transpose() * mg;
        }
      });
    });
  }
  return out;
}

template <Real T>
Tensor<T> Sum(const Tensor<T>& a) {
  T acc = T(0);
  for (T v : a.data()) acc += v;
  Tensor<T> out = Tensor<T>::Scalar(acc);
  if (Tape<T>* tape = internal::RecordingTape<T>({&a})) {
    auto pa = a.storage();
    auto po = out.storage();
    internal::RecordOp<T>(tape, "sum", {&out}, [pa, po]() {
      T* ga = pa->MutableGrad();
      const T g = po->grad[0];
      for (size_t i = 0; i < pa->data.size(); ++i) ga[i] += g;
    });
  }
  return out;
}

template <Real T>
Tensor<T> Sum(const Tensor<T>& a, int axis, bool keepdim) {
  const int ax = NormalizeAxis(axis, a.rank());
  const Shape& s = a.shape();
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < ax; ++d) outer *= s[d];
  for (int d = ax + 1; d < a.rank(); ++d) inner *= s[d];
  const int64_t len = s[ax];
  Shape out_shape = s;
  if (keepdim) {
    out_shape[ax] = 1;
  } else {
    out_shape.erase(out_shape.begin() + ax);
  }
  Tensor<T> out(out_shape);
  const T* x = a.raw();
  T* y = out.mutable_raw();
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t l = 0; l < len; ++l) {
      const T* row = x + (o * len + l) * inner;
      T* dst = y + o * inner;
      for (int64_t i = 0; i < inner; ++i) dst[i] += row[i];
    }
  }
  if (Tape<T>* tape = internal::RecordingTape<T>({&a})) {
    auto pa = a.storage();
    auto po = out.storage();
    internal::RecordOp<T>(tape, "sum_axis", {&out}, [pa, po, outer, inner, len]() {
      T* ga = pa->MutableGrad();
      const T* g = po->grad.data();
      for (int64_t o = 0; o < outer; ++o) {
        for (int64_t l = 0; l < len; ++l) {
          T* row = ga + (o * len + l) * inner;
          const T* src = g + o * inner;
          for (int64_t i = 0; i < inner; ++i) row[i] += src[i];
        }
      }
    });
  }
  return out;
}

template <Real T>
Tensor<T> Mean(const Tensor<T>& a) {
  if (a.numel() == 0) throw ShapeError("mean of an empty tensor");
  return Affine(Sum(a), T(1) / static_cast<T>(a.numel()));
}

template <Real T>
Tensor<T> Reshape(const Tensor<T>& a, Shape shape) {
  int infer = -1;
  int64_t known = 1;
  for (size_t d = 0; d < shape.size(); ++d) {
    if (shape[d] == -1) {
      if (infer >= 0) throw ShapeError("reshape: more than one inferred dimension");
      infer = static_cast<int>(d);
    } else {
      known *= shape[d];
    }
  }
  if (infer >= 0) {
    if (known == 0 || a.numel() % known != 0) {
      throw ShapeError("reshape: cannot infer dimension of " + ShapeToString(shape) + " from " +
                       ShapeToString(a.shape()));
    }
    shape[infer] = a.numel() / known;
  }
  if (NumElements(shape) != a.numel()) {
    throw ShapeError("reshape: " + ShapeToString(a.shape()) + " -> " + ShapeToString(shape) +
                     " changes the element count");
  }
  Tensor<T> out(shape, std::vector<T>(a.data().begin(), a.data().end()));
  if (Tape<T>* tape = internal::RecordingTape<T>({&a})) {
    auto pa = a.storage();
    auto po = out.storage();
    internal::RecordOp<T>(tape, "reshape", {&out}, [pa, po]() {
      T* ga = pa->MutableGrad();
      const T* g = po->grad.data();
      for (size_t i = 0; i < pa->data.size(); ++i) ga[i] += g[i];
    });
  }
  return out;
}

template <Real T>
Tensor<T> Permute(const Tensor<T>& a, const std::vector<int>& perm) {
  const int r = a.rank();
  if (static_cast<int>(perm.size()) != r) throw ShapeError("permute: wrong permutation length");
  std::vector<int> seen(r, 0);
  for (int p : perm) {
    if (p < 0 || p >= r || seen[p]++) throw ShapeError("permute: invalid permutation");
  }
  const Shape& s = a.shape();
  std::vector<int64_t> in_strides(r, 1);
  for (int d = r - 2; d >= 0; --d) in_strides[d] = in_strides[d + 1] * s[d + 1];
  Shape out_shape(r);
  std::vector<int64_t> src_strides(r);
  for (int d = 0; d < r; ++d) {
    out_shape[d] = s[perm[d]];
    src_strides[d] = in_strides[perm[d]];
  }
  std::vector<int64_t> zero(r, 0);
  Tensor<T> out(out_shape);
  const T* x = a.raw();
  T* y = out.mutable_raw();
  if (r == 0) {
    y[0] = x[0];
  } else {
    ForEachBroadcast(out_shape, src_strides, zero,
                     [&](int64_t o, int64_t ia, int64_t) { y[o] = x[ia]; });
  }
  if (Tape<T>* tape = internal::RecordingTape<T>({&a})) {
    auto pa = a.storage();
    auto po = out.storage();
    internal::RecordOp<T>(tape, "permute", {&out}, [pa, po, out_shape, src_strides, zero]() {
      T* ga = pa->MutableGrad();
      const T* g = po->grad.data();
      if (out_shape.empty()) {
        ga[0] += g[0];
        return;
      }
      ForEachBroadcast(out_shape, src_strides, zero,
                       [&](int64_t o, int64_t ia, int64_t) { ga[ia] += g[o]; });
    });
  }
  return out;
}

template <Real T>
Tensor<T> Concat(const std::vector<Tensor<T>>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  const int r = parts[0].rank();
  const int ax = NormalizeAxis(axis, r);
  Shape out_shape = parts[0].shape();
  out_shape[ax] = 0;
  for (const auto& p : parts) {
    if (p.rank() != r) throw ShapeError("concat: rank mismatch");
    for (int d = 0; d < r; ++d) {
      if (d != ax && p.shape()[d] != parts[0].shape()[d]) {
        throw ShapeError("concat: shapes " + ShapeToString(parts[0].shape()) + " and " +
                         ShapeToString(p.shape()) + " differ off the concat axis");
      }
    }
    out_shape[ax] += p.shape()[ax];
  }
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < ax; ++d) outer *= out_shape[d];
  for (int d = ax + 1; d < r; ++d) inner *= out_shape[d];
  Tensor<T> out(out_shape);
  T* y = out.mutable_raw();
  const int64_t out_row = out_shape[ax] * inner;
  std::vector<int64_t> offsets;
  int64_t off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    const int64_t row = p.shape()[ax] * inner;
    const T* x = p.raw();
    for (int64_t o = 0; o < outer; ++o) {
      std::copy(x + o * row, x + (o + 1) * row, y + o * out_row + off);
    }
    off += row;
  }
  if (Tape<T>* tape = internal::RecordingTape<T>(std::span<const Tensor<T>>(parts))) {
    std::vector<std::shared_ptr<TensorStorage<T>>> ps;
    std::vector<int64_t> rows;
    for (const auto& p : parts) {
      ps.push_back(p.storage());
      rows.push_back(p.shape()[ax] * inner);
    }
    auto po = out.storage();
    internal::RecordOp<T>(tape, "concat", {&out}, [ps, rows, offsets, po, outer, out_row]() {
      const T* g = po->grad.data();
      for (size_t i = 0; i < ps.size(); ++i) {
        if (!ps[i]->requires_grad) continue;
        T* gp = ps[i]->MutableGrad();
        for (int64_t o = 0; o < outer; ++o) {
          const T* src = g + o * out_row + offsets[i];
          T* dst = gp + o * rows[i];
          for (int64_t j = 0; j < rows[i]; ++j) dst[j] += src[j];
        }
      }
    });
  }
  return out;
}

template <Real T>
Tensor<T> Slice(const Tensor<T>& a, int axis, int64_t start, int64_t stop) {
  const int ax = NormalizeAxis(axis, a.rank());
  const Shape& s = a.shape();
  if (start < 0 || stop > s[ax] || start > stop) {
    throw ShapeError("slice [" + std::to_string(start) + "," + std::to_string(stop) +
                     ") out of range for axis of size " + std::to_string(s[ax]));
  }
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < ax; ++d) outer *= s[d];
  for (int d = ax + 1; d < a.rank(); ++d) inner *= s[d];
  Shape out_shape = s;
  out_shape[ax] = stop - start;
  Tensor<T> out(out_shape);
  const int64_t in_row = s[ax] * inner;
  const int64_t out_row = (stop - start) * inner;
  const T* x = a.raw();
  T* y = out.mutable_raw();
  for (int64_t o = 0; o < outer; ++o) {
    std::copy(x + o * in_row + start * inner, x + o * in_row + stop * inner, y + o * out_row);
  }
  if (Tape<T>* tape = internal::RecordingTape<T>({&a})) {
    auto pa = a.storage();
    auto po = out.storage();
    internal::RecordOp<T>(tape, "slice", {&out}, [=]() {
      T* ga = pa->MutableGrad();
      const T* g = po->grad.data();
      for (int64_t o = 0; o < outer; ++o) {
        T* dst = ga + o * in_row + start * inner;
        const T* src = g + o * out_row;
        for (int64_t j = 0; j < out_row; ++j) dst[j] += src[j];
      }
    });
  }
  return out;
}

#define PDPCRN_INSTANTIATE(T)                                                         \
  template Tensor<T> Elementwise<T>(UnaryKind, const Tensor<T>&);                     \
  template Tensor<T> Elementwise<T>(BinaryKind, const Tensor<T>&, const Tensor<T>&);  \
  template Tensor<T> Affine<T>(const Tensor<T>&, T, T);                               \
  template Tensor<T> Matmul<T>(const Tensor<T>&, const Tensor<T>&);                   \
  template Tensor<T> Sum<T>(const Tensor<T>&);                                        \
  template Tensor<T> Sum<T>(const Tensor<T>&, int, bool);                             \
  template Tensor<T> Mean<T>(const Tensor<T>&);                                       \
  template Tensor<T> Reshape<T>(const Tensor<T>&, Shape);                             \
  template Tensor<T> Permute<T>(const Tensor<T>&, const std::vector<int>&);           \
  template Tensor<T> Concat<T>(const std::vector<Tensor<T>>&, int);                   \
  template Tensor<T> Slice<T>(const Tensor<T>&, int, int64_t, int64_t);

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
