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

#ifndef PDPCRN_NN_LSTM_H_
#define PDPCRN_NN_LSTM_H_

#include "pdpcrn/nn/module.h"

namespace pdpcrn {

struct LstmSpec {
  int64_t input_dim = 1;
  int64_t hidden_dim = 1;
  bool bidirectional = false;

  int64_t directions() const { return bidirectional ? 2 : 1; }
  // One bias vector per direction.
  int64_t ParamCount() const {
    return directions() * 4 * hidden_dim * (input_dim + hidden_dim + 1);
  }
};

template <Real T>
struct LstmResult {
  Tensor<T> output;  // [B, L, H * directions]
  Tensor<T> h_n;     // [directions, B, H]
  Tensor<T> c_n;     // [directions, B, H]
};

// One direction of an LSTM over x: [B, L, D] with gate order (i, f, g, o).
// w_ih: [4H, D], w_hh: [4H, H], bias: [4H]. h0 and c0 are [B, H] or
// undefined (zeros). With reverse set the sequence is consumed from the last
// step; output[:, t] is still aligned with x[:, t]. Returns output [B, L, H]
// and final states [B, H].
template <Real T>
LstmResult<T> LstmDirection(const Tensor<T>& x, const Tensor<T>& w_ih, const Tensor<T>& w_hh,
                            const Tensor<T>& bias, const Tensor<T>& h0, const Tensor<T>& c0,
                            bool reverse);

template <Real T>
class Lstm {
 public:
  Lstm() = default;
  Lstm(const LstmSpec& spec, Rng& rng);

  // h0, c0: [directions, B, H] or undefined.
  LstmResult<T> Forward(const Tensor<T>& x, const Tensor<T>& h0 = {},
                        const Tensor<T>& c0 = {}) const;
  void AppendParameters(std::string_view prefix, NamedTensors<T>& out) const;

  const LstmSpec& spec() const { return spec_; }
  Tensor<T>& w_ih(int dir) { return w_ih_[dir]; }
  Tensor<T>& w_hh(int dir) { return w_hh_[dir]; }
  Tensor<T>& bias(int dir) { return bias_[dir]; }

 private:
  LstmSpec spec_;
  Tensor<T> w_ih_[2];
  Tensor<T> w_hh_[2];
  Tensor<T> bias_[2];
};

}  // namespace pdpcrn

#endif  // PDPCRN_NN_LSTM_H_
