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

#include "pdpcrn/nn/conv.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace pdpcrn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Index bookkeeping shared by both directions. The "big" grid is the conv
// input (transposed-conv output); the "small" grid the conv output.
struct Geometry {
  int64_t channels;  // big-grid channels in one group
  int64_t kt, kf, sf, pf, pad_past;
  int64_t frames, f_big, f_small;

  int64_t rows() const { return channels * kt * kf; }
  int64_t cols() const { return frames * f_small; }
};

// col[(c, tau, kappa), (t, f)] = big[c, t + dir * lag(tau), f * sf - pf + kappa]
// with lag(tau) = pad_past - tau.
template <typename T>
void Im2Col(const T* big, T* col, const Geometry& g, int dir) {
  const int64_t cols = g.cols();
  for (int64_t c = 0; c < g.channels; ++c) {
    const T* plane = big + c * g.frames * g.f_big;
    for (int64_t tau = 0; tau < g.kt; ++tau) {
      const int64_t shift = dir * (g.pad_past - tau);
      for (int64_t kappa = 0; kappa < g.kf; ++kappa) {
        T* row = col + ((c * g.kt + tau) * g.kf + kappa) * cols;
        for (int64_t t = 0; t < g.frames; ++t) {
          T* dst = row + t * g.f_small;
          const int64_t st = t + shift;
          if (st < 0 || st >= g.frames) {
            std::fill(dst, dst + g.f_small, T(0));
            continue;
          }
          const T* src = plane + st * g.f_big;
          for (int64_t f = 0; f < g.f_small; ++f) {
            const int64_t sfi = f * g.sf - g.pf + kappa;
            dst[f] = (sfi >= 0 && sfi < g.f_big) ? src[sfi] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: accumulates col entries back into the big grid.
template <typename T>
void Col2Im(const T* col, T* big, const Geometry& g, int dir) {
  const int64_t cols = g.cols();
  for (int64_t c = 0; c < g.channels; ++c) {
    T* plane = big + c * g.frames * g.f_big;
    for (int64_t tau = 0; tau < g.kt; ++tau) {
      const int64_t shift = dir * (g.pad_past - tau);
      for (int64_t kappa = 0; kappa < g.kf; ++kappa) {
        const T* row = col + ((c * g.kt + tau) * g.kf + kappa) * cols;
        for (int64_t t = 0; t < g.frames; ++t) {
          const int64_t st = t + shift;
          if (st < 0 || st >= g.frames) continue;
          const T* src = row + t * g.f_small;
          T* dst = plane + st * g.f_big;
          for (int64_t f = 0; f < g.f_small; ++f) {
            const int64_t sfi = f * g.sf - g.pf + kappa;
            if (sfi >= 0 && sfi < g.f_big) dst[sfi] += src[f];
          }
        }
      }
    }
  }
}

template <typename T>
void AddChannelBias(T* out, const T* bias, int64_t batch, int64_t channels, int64_t plane) {
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t c = 0; c < channels; ++c) {
      T* p = out + (b * channels + c) * plane;
      const T v = bias[c];
      for (int64_t i = 0; i < plane; ++i) p[i] += v;
    }
  }
}

template <typename T>
void AccumulateBiasGrad(T* gb, const T* g, int64_t batch, int64_t channels, int64_t plane) {
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t c = 0; c < channels; ++c) {
      const T* p = g + (b * channels + c) * plane;
      T acc = T(0);
      for (int64_t i = 0; i < plane; ++i) acc += p[i];
      gb[c] += acc;
    }
  }
}

void CheckRank4(const Shape& s, const char* what) {
  if (s.size() != 4) {
    throw ShapeError(std::string(what) + ": expected [B, C, T, F], got " + ShapeToString(s));
  }
}

}  // namespace

Conv2dSpec Conv2dSpec::Make(int64_t in, int64_t out, int64_t kt, int64_t kf, int64_t st,
                            int64_t sf) {
  Conv2dSpec s;
  s.in_channels = in;
  s.out_channels = out;
  s.kernel_time = kt;
  s.kernel_freq = kf;
  s.stride_time = st;
  s.stride_freq = sf;
  s.pad_freq_low = s.pad_freq_high = (kf - 1) / 2;
  return s;
}

Conv2dSpec Conv2dSpec::Same(int64_t in, int64_t out, int64_t kt, int64_t kf) {
  Conv2dSpec s = Make(in, out, kt, kf, 1, 1);
  s.pad_freq_low = (kf - 1) / 2;
  s.pad_freq_high = kf - 1 - s.pad_freq_low;
  return s;
}

Conv2dSpec Conv2dSpec::Depthwise(int64_t channels, int64_t kernel_time) {
  Conv2dSpec s = Make(channels, channels, kernel_time, 1, 1, 1);
  s.groups = channels;
  return s;
}

void Conv2dSpec::Validate() const {
  if (in_channels <= 0 || out_channels <= 0 || groups <= 0) {
    throw ShapeError("conv spec: channel and group counts must be positive");
  }
  if (in_channels % groups != 0 || out_channels % groups != 0) {
    throw ShapeError("conv spec: channels (" + std::to_string(in_channels) + ", " +
                     std::to_string(out_channels) + ") not divisible by groups " +
                     std::to_string(groups));
  }
  if (kernel_time <= 0 || kernel_freq <= 0 || stride_freq <= 0) {
    throw ShapeError("conv spec: kernel and stride must be positive");
  }
  if (stride_time != 1) throw ShapeError("conv spec: only time stride 1 is supported");
  if (pad_freq_low < 0 || pad_freq_high < 0) throw ShapeError("conv spec: negative padding");
}

int64_t Conv2dSpec::OutputFreq(int64_t in_freq) const {
  const int64_t span = in_freq + pad_freq_low + pad_freq_high - kernel_freq;
  if (in_freq <= 0 || span < 0) {
    throw ShapeError("conv: frequency size " + std::to_string(in_freq) +
                     " gives a non-positive output size");
  }
  return span / stride_freq + 1;
}

template <Real T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                 const Conv2dSpec& spec) {
  spec.Validate();
  CheckRank4(x.shape(), "conv2d");
  if (x.dim(1) != spec.in_channels) {
    throw ShapeError("conv2d: input has " + std::to_string(x.dim(1)) + " channels, spec expects " +
                     std::to_string(spec.in_channels));
  }
  const Shape wshape{spec.out_channels, spec.in_channels / spec.groups, spec.kernel_time,
                     spec.kernel_freq};
  if (weight.shape() != wshape) {
    throw ShapeError("conv2d: weight " + ShapeToString(weight.shape()) + ", expected " +
                     ShapeToString(wshape));
  }
  const int64_t batch = x.dim(0), frames = x.dim(2), f_in = x.dim(3);
  const int64_t f_out = spec.OutputFreq(f_in);
  const int64_t groups = spec.groups;
  const int64_t cin_g = spec.in_channels / groups, cout_g = spec.out_channels / groups;
  const Geometry geo{cin_g, spec.kernel_time, spec.kernel_freq, spec.stride_freq,
                     spec.pad_freq_low, spec.TimePadPast(), frames, f_in, f_out};
  const int64_t k = geo.rows(), n = geo.cols();
  Tensor<T> out({batch, spec.out_channels, frames, f_out});
  std::vector<T> col(static_cast<size_t>(k * n));
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t g = 0; g < groups; ++g) {
      Im2Col(x.raw() + (b * spec.in_channels + g * cin_g) * frames * f_in, col.data(), geo, -1);
      Eigen::Map<const RowMat<T>> mw(weight.raw() + g * cout_g * k, cout_g, k);
      Eigen::Map<const RowMat<T>> mc(col.data(), k, n);
      Eigen::Map<RowMat<T>> mo(out.mutable_raw() + (b * spec.out_channels + g * cout_g) * n, cout_g, n);
      mo.noalias() = mw * mc;
    }
  }
  if (bias.defined()) AddChannelBias(out.mutable_raw(), bias.raw(), batch, spec.out_channels, n);

  if (Tape<T>* tape = internal::RecordingTape<T>({&x, &weight, &bias})) {
    auto sx = x.storage();
    auto sw = weight.storage();
    auto sb = bias.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "conv2d", {&out}, [=]() {
      const T* g_out = so->grad.data();
      std::vector<T> col(static_cast<size_t>(k * n));
      std::vector<T> dcol(sx->requires_grad ? static_cast<size_t>(k * n) : 0);
      T* gx = sx->requires_grad ? sx->MutableGrad() : nullptr;
      T* gw = sw->requires_grad ? sw->MutableGrad() : nullptr;
      for (int64_t b = 0; b < batch; ++b) {
        for (int64_t g = 0; g < groups; ++g) {
          Eigen::Map<const RowMat<T>> mg(g_out + (b * spec.out_channels + g * cout_g) * n, cout_g, n);
          Eigen::Map<const RowMat<T>> mw(sw->data.data() + g * cout_g * k, cout_g, k);
          const int64_t x_off = (b * spec.in_channels + g * cin_g) * frames * f_in;
          if (gw) {
            Im2Col(sx->data.data() + x_off, col.data(), geo, -1);
            Eigen::Map<const RowMat<T>> mc(col.data(), k, n);
            Eigen::Map<RowMat<T>> mgw(gw + g * cout_g * k, cout_g, k);
            mgw.noalias() += mg * mc.transpose();
          }
          if (gx) {
            Eigen::Map<RowMat<T>> md(dcol.data(), k, n);
            md.noalias() = mw.transpose() * mg;
            Col2Im(dcol.data(), gx + x_off, geo, -1);
          }
        }
      }
      if (sb && sb->requires_grad) {
        AccumulateBiasGrad(sb->MutableGrad(), g_out, batch, spec.out_channels, n);
      }
    });
  }
  return out;
}

template <Real T>
Tensor<T> ConvTranspose2d(const Tensor<T>& y, const Tensor<T>& weight, const Tensor<T>& bias,
                          const Conv2dSpec& spec, int64_t out_freq) {
  spec.Validate();
  CheckRank4(y.shape(), "conv_transpose2d");
  if (y.dim(1) != spec.in_channels) {
    throw ShapeError("conv_transpose2d: input has " + std::to_string(y.dim(1)) +
                     " channels, spec expects " + std::to_string(spec.in_channels));
  }
  const Shape wshape{spec.in_channels, spec.out_channels / spec.groups, spec.kernel_time,
                     spec.kernel_freq};
  if (weight.shape() != wshape) {
    throw ShapeError("conv_transpose2d: weight " + ShapeToString(weight.shape()) + ", expected " +
                     ShapeToString(wshape));
  }
  const int64_t batch = y.dim(0), frames = y.dim(2), f_small = y.dim(3);
  if (spec.OutputFreq(out_freq) != f_small) {
    throw ShapeError("conv_transpose2d: output frequency size " + std::to_string(out_freq) +
                     " is not the mirror of input size " + std::to_string(f_small));
  }
  const int64_t groups = spec.groups;
  const int64_t cy_g = spec.in_channels / groups, cz_g = spec.out_channels / groups;
  const Geometry geo{cz_g, spec.kernel_time, spec.kernel_freq, spec.stride_freq,
                     spec.pad_freq_low, spec.TimePadPast(), frames, out_freq, f_small};
  const int64_t k = geo.rows(), n = geo.cols();
  Tensor<T> out({batch, spec.out_channels, frames, out_freq});
  std::vector<T> col(static_cast<size_t>(k * n));
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t g = 0; g < groups; ++g) {
      Eigen::Map<const RowMat<T>> mw(weight.raw() + g * cy_g * k, cy_g, k);
      Eigen::Map<const RowMat<T>> my(y.raw() + (b * spec.in_channels + g * cy_g) * n, cy_g, n);
      Eigen::Map<RowMat<T>> mc(col.data(), k, n);
      mc.noalias() = mw.transpose() * my;
      Col2Im(col.data(), out.mutable_raw() + (b * spec.out_channels + g * cz_g) * frames * out_freq,
             geo, +1);
    }
  }
  if (bias.defined()) {
    AddChannelBias(out.mutable_raw(), bias.raw(), batch, spec.out_channels, frames * out_freq);
  }

  if (Tape<T>* tape = internal::RecordingTape<T>({&y, &weight, &bias})) {
    auto sy = y.storage();
    auto sw = weight.storage();
    auto sb = bias.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "conv_transpose2d", {&out}, [=]() {
      const T* g_out = so->grad.data();
      std::vector<T> gcol(static_cast<size_t>(k * n));
      T* gy = sy->requires_grad ? sy->MutableGrad() : nullptr;
      T* gw = sw->requires_grad ? sw->MutableGrad() : nullptr;
      for (int64_t b = 0; b < batch; ++b) {
        for (int64_t g = 0; g < groups; ++g) {
          Im2Col(g_out + (b * spec.out_channels + g * cz_g) * frames * out_freq, gcol.data(), geo, +1);
          Eigen::Map<const RowMat<T>> mc(gcol.data(), k, n);
          const int64_t y_off = (b * spec.in_channels + g * cy_g) * n;
          if (gy) {
            Eigen::Map<const RowMat<T>> mw(sw->data.data() + g * cy_g * k, cy_g, k);
            Eigen::Map<RowMat<T>> mgy(gy + y_off, cy_g, n);
            mgy.noalias() += mw * mc;
          }
          if (gw) {
            Eigen::Map<const RowMat<T>> my(sy->data.data() + y_off, cy_g, n);
            Eigen::Map<RowMat<T>> mgw(gw + g * cy_g * k, cy_g, k);
            mgw.noalias() += my * mc.transpose();
          }
        }
      }
      if (sb && sb->requires_grad) {
        AccumulateBiasGrad(sb->MutableGrad(), g_out, batch, spec.out_channels, frames * out_freq);
      }
    });
  }
  return out;
}

template <Real T>
Conv2dLayer<T>::Conv2dLayer(const Conv2dSpec& spec, Rng& rng, bool bias) : spec_(spec) {
  spec_.Validate();
  const double fan_in = static_cast<double>(spec.in_channels / spec.groups * spec.kernel_time *
                                            spec.kernel_freq);
  const double bound = 1.0 / std::sqrt(fan_in);
  weight_ = UniformParameter<T>(
      {spec.out_channels, spec.in_channels / spec.groups, spec.kernel_time, spec.kernel_freq}, bound,
      rng);
  if (bias) bias_ = UniformParameter<T>({spec.out_channels}, bound, rng);
}

template <Real T>
void Conv2dLayer<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  out.push_back({JoinName(prefix, "weight"), weight_});
  if (bias_.defined()) out.push_back({JoinName(prefix, "bias"), bias_});
}

template <Real T>
ConvTranspose2dLayer<T>::ConvTranspose2dLayer(const Conv2dSpec& spec, Rng& rng, bool bias)
    : spec_(spec) {
  spec_.Validate();
  const double fan_in = static_cast<double>(spec.out_channels / spec.groups * spec.kernel_time *
                                            spec.kernel_freq);
  const double bound = 1.0 / std::sqrt(fan_in);
  weight_ = UniformParameter<T>(
      {spec.in_channels, spec.out_channels / spec.groups, spec.kernel_time, spec.kernel_freq},
      bound, rng);
  if (bias) bias_ = UniformParameter<T>({spec.out_channels}, bound, rng);
}

template <Real T>
void ConvTranspose2dLayer<T>::AppendParameters(std::string_view prefix, NamedTensors<T>& out) const {
  out.push_back({JoinName(prefix, "weight"), weight_});
  if (bias_.defined()) out.push_back({JoinName(prefix, "bias"), bias_});
}

#define PDPCRN_INSTANTIATE(T)                                                                 \
  template Tensor<T> Conv2d<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,          \
                               const Conv2dSpec&);                                            \
  template Tensor<T> ConvTranspose2d<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                        const Conv2dSpec&, int64_t);                          \
  template class Conv2dLayer<T>;                                                              \
  template class ConvTranspose2dLayer<T>;

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
