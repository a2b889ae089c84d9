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

#ifndef PDPCRN_NN_ATTENTION_H_
#define PDPCRN_NN_ATTENTION_H_

#include "pdpcrn/nn/linear.h"

namespace pdpcrn {

struct AttentionSpec {
  int64_t model_dim = 1;
  int64_t heads = 1;
  int64_t head_dim = 1;
  bool causal = true;

  int64_t inner_dim() const { return heads * head_dim; }
  void Validate() const;
  // Query, key, value and output projections, all with biases.
  int64_t ParamCount() const { return 4 * model_dim * inner_dim() + 3 * inner_dim() + model_dim; }
};

// softmax(q k^T / sqrt(d)) v for q, k, v: [N, L, d]. With causal set, row t
// only sees keys 0..t. The backward pass recomputes the probabilities from a
// stored log-sum-exp per row.
template <Real T>
Tensor<T> ScaledDotProductAttention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                                    bool causal);

template <Real T>
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(const AttentionSpec& spec, Rng& rng);

  // x: [B, L, D]. When value_source is defined (same shape as x) the value
  // projection reads it instead of x.
  Tensor<T> Forward(const Tensor<T>& x, const Tensor<T>& value_source = {}) const;
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;

  const AttentionSpec& spec() const { return spec_; }
  Linear<T>& query() { return q_; }
  Linear<T>& key() { return k_; }
  Linear<T>& value() { return v_; }
  Linear<T>& output() { return o_; }

 private:
  AttentionSpec spec_;
  Linear<T> q_, k_, v_, o_;
};

}  // namespace pdpcrn

#endif  // PDPCRN_NN_ATTENTION_H_
