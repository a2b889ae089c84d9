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

// Differentiable tensor operations. Every function records a backward rule on
// the active tape when one of its inputs requires a gradient.

#ifndef PDPCRN_TENSOR_OPS_H_
#define PDPCRN_TENSOR_OPS_H_

#include <vector>

#include "pdpcrn/tensor/tensor.h"

namespace pdpcrn {

enum class UnaryKind { kNeg, kExp, kLog, kTanh, kSigmoid, kGelu, kSqrt, kSquare, kAbs };
enum class BinaryKind { kAdd, kSub, kMul, kDiv };

// Right-aligned broadcasting: trailing dimensions must match or be 1.
Shape BroadcastShapes(const Shape& a, const Shape& b);

template <Real T>
Tensor<T> Elementwise(UnaryKind kind, const Tensor<T>& a);
template <Real T>
Tensor<T> Elementwise(BinaryKind kind, const Tensor<T>& a, const Tensor<T>& b);

template <Real T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b) { return Elementwise(BinaryKind::kAdd, a, b); }
template <Real T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b) { return Elementwise(BinaryKind::kSub, a, b); }
template <Real T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b) { return Elementwise(BinaryKind::kMul, a, b); }
template <Real T>
Tensor<T> Div(const Tensor<T>& a, const Tensor<T>& b) { return Elementwise(BinaryKind::kDiv, a, b); }

template <Real T>
Tensor<T> Neg(const Tensor<T>& a) { return Elementwise(UnaryKind::kNeg, a); }
template <Real T>
Tensor<T> Exp(const Tensor<T>& a) { return Elementwise(UnaryKind::kExp, a); }
template <Real T>
Tensor<T> Log(const Tensor<T>& a) { return Elementwise(UnaryKind::kLog, a); }
template <Real T>
Tensor<T> Tanh(const Tensor<T>& a) { return Elementwise(UnaryKind::kTanh, a); }
template <Real T>
Tensor<T> Sigmoid(const Tensor<T>& a) { return Elementwise(UnaryKind::kSigmoid, a); }
// Exact form x * Phi(x).
template <Real T>
Tensor<T> Gelu(const Tensor<T>& a) { return Elementwise(UnaryKind::kGelu, a); }
template <Real T>
Tensor<T> Sqrt(const Tensor<T>& a) { return Elementwise(UnaryKind::kSqrt, a); }
template <Real T>
Tensor<T> Square(const Tensor<T>& a) { return Elementwise(UnaryKind::kSquare, a); }
template <Real T>
Tensor<T> Abs(const Tensor<T>& a) { return Elementwise(UnaryKind::kAbs, a); }

// y = scale * a + offset.
template <Real T>
Tensor<T> Affine(const Tensor<T>& a, T scale, T offset = T(0));

template <Real T>
Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) { return Add(a, b); }
template <Real T>
Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) { return Sub(a, b); }
template <Real T>
Tensor<T> operator*(const Tensor<T>& a, const Tensor<T>& b) { return Mul(a, b); }
template <Real T>
Tensor<T> operator/(const Tensor<T>& a, const Tensor<T>& b) { return Div(a, b); }

// [..., m, k] x [..., k, n] -> [..., m, n]; batch dimensions broadcast.
template <Real T>
Tensor<T> Matmul(const Tensor<T>& a, const Tensor<T>& b);

template <Real T>
Tensor<T> Sum(const Tensor<T>& a);
template <Real T>
Tensor<T> Sum(const Tensor<T>& a, int axis, bool keepdim = false);
template <Real T>
Tensor<T> Mean(const Tensor<T>& a);

// One dimension may be -1 and is inferred.
template <Real T>
Tensor<T> Reshape(const Tensor<T>& a, Shape shape);
template <Real T>
Tensor<T> Permute(const Tensor<T>& a, const std::vector<int>& perm);
template <Real T>
Tensor<T> Concat(const std::vector<Tensor<T>>& parts, int axis);
// Half-open range [start, stop) along `axis`.
template <Real T>
Tensor<T> Slice(const Tensor<T>& a, int axis, int64_t start, int64_t stop);

}  // namespace pdpcrn

#endif  // PDPCRN_TENSOR_OPS_H_
