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

#include "pdpcrn/signal/stft.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "pdpcrn/signal/fft.h"

namespace pdpcrn {

void StftConfig::Validate() const {
  if (window <= 0 || hop <= 0 || fft_size < window || fft_size % 2 != 0) {
    throw std::invalid_argument("stft: invalid window/hop/fft geometry");
  }
}

int64_t StftConfig::TailPadding(int64_t samples) const {
  if (!pad_edges) return 0;
  // Smallest right pad >= hop that makes the padded length frame-aligned.
  const int64_t base = samples + hop + hop - window;
  const int64_t rem = ((base % hop) + hop) % hop;
  int64_t pad = hop + (rem == 0 ? 0 : hop - rem);
  while (samples + hop + pad < window) pad += hop;
  return pad;
}

int64_t StftConfig::NumFrames(int64_t samples) const {
  const int64_t total = pad_edges ? samples + hop + TailPadding(samples) : samples;
  if (total < window) return 0;
  return 1 + (total - window) / hop;
}

std::vector<double> SineWindow(int n) {
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) w[k] = std::sin(std::numbers::pi * (k + 0.5) / n);
  return w;
}

void Spectrogram::Resize(int m, int64_t t, int f) {
  channels = m;
  frames = t;
  bins = f;
  real.assign(static_cast<size_t>(m) * t * f, 0.0);
  imag.assign(static_cast<size_t>(m) * t * f, 0.0);
}

Spectrogram Stft(const MultichannelWave& wave, const StftConfig& config) {
  config.Validate();
  wave.Validate();
  const int64_t n = wave.num_samples();
  if (config.NumFrames(n) == 0 || (!config.pad_edges && n < config.window)) {
    throw std::invalid_argument("stft: signal of " + std::to_string(n) +
                                " samples is shorter than one window");
  }
  const int64_t frames = config.NumFrames(n);
  const int64_t lead = config.pad_edges ? config.hop : 0;
  Spectrogram spec;
  spec.Resize(wave.num_channels(), frames, config.bins());
  spec.hop = config.hop;
  spec.fft_size = config.fft_size;
  spec.signal_length = n;
  spec.padded = config.pad_edges;
  const std::vector<double> win = SineWindow(config.window);
  RealFft fft(config.fft_size);
  std::vector<double> buf(config.fft_size);
  std::vector<std::complex<double>> bins(config.bins());
  for (int m = 0; m < wave.num_channels(); ++m) {
    const std::vector<double>& x = wave.channels[m];
    for (int64_t t = 0; t < frames; ++t) {
      std::fill(buf.begin(), buf.end(), 0.0);
      for (int k = 0; k < config.window; ++k) {
        const int64_t s = t * config.hop + k - lead;
        if (s >= 0 && s < n) buf[k] = win[k] * x[s];
      }
      fft.Forward(buf.data(), bins.data());
      for (int f = 0; f < config.bins(); ++f) {
        spec.real[spec.Index(m, t, f)] = bins[f].real();
        spec.imag[spec.Index(m, t, f)] = bins[f].imag();
      }
    }
  }
  return spec;
}

MultichannelWave Istft(const Spectrogram& spec, int sample_rate) {
  if (spec.bins != spec.fft_size / 2 + 1 || spec.hop <= 0 || spec.frames <= 0 ||
      spec.real.size() != static_cast<size_t>(spec.channels) * spec.frames * spec.bins ||
      spec.imag.size() != spec.real.size()) {
    throw std::invalid_argument("istft: inconsistent frame geometry");
  }
  const int n = spec.fft_size;
  const int64_t full = (spec.frames - 1) * spec.hop + n;
  const std::vector<double> win = SineWindow(n);
  RealFft fft(n);
  std::vector<double> buf(n);
  std::vector<std::complex<double>> bins(spec.bins);
  MultichannelWave out(spec.channels, full, sample_rate);
  for (int m = 0; m < spec.channels; ++m) {
    std::vector<double>& y = out.channels[m];
    for (int64_t t = 0; t < spec.frames; ++t) {
      for (int f = 0; f < spec.bins; ++f) {
        bins[f] = {spec.real[spec.Index(m, t, f)], spec.imag[spec.Index(m, t, f)]};
      }
      fft.Inverse(bins.data(), buf.data());
      for (int k = 0; k < n; ++k) y[t * spec.hop + k] += win[k] * buf[k];
    }
  }
  if (spec.padded) {
    if (full < spec.hop + spec.signal_length) throw std::invalid_argument("istft: padded geometry too short");
    for (auto& ch : out.channels) {
      ch.erase(ch.begin(), ch.begin() + spec.hop);
      ch.resize(static_cast<size_t>(spec.signal_length));
    }
  }
  return out;
}

template <Real T>
Tensor<T> IstftTensor(const Tensor<T>& real, const Tensor<T>& imag, int hop, int fft_size) {
  if (real.rank() != 4 || real.shape() != imag.shape() || real.dim(3) != fft_size / 2 + 1) {
    throw ShapeError("istft: real/imag planes " + ShapeToString(real.shape()) + " and " +
                     ShapeToString(imag.shape()) + " do not match fft size " +
                     std::to_string(fft_size));
  }
  const int64_t batch = real.dim(0), ch = real.dim(1), frames = real.dim(2), nb = real.dim(3);
  const int64_t len = (frames - 1) * hop + fft_size;
  const std::vector<double> win = SineWindow(fft_size);
  Tensor<T> out({batch, ch, len});
  RealFft fft(fft_size);
  std::vector<std::complex<double>> bins(nb);
  std::vector<double> buf(fft_size);
  for (int64_t s = 0; s < batch * ch; ++s) {
    T* y = out.mutable_raw() + s * len;
    for (int64_t t = 0; t < frames; ++t) {
      const int64_t off = (s * frames + t) * nb;
      for (int64_t f = 0; f < nb; ++f) bins[f] = {real.raw()[off + f], imag.raw()[off + f]};
      fft.Inverse(bins.data(), buf.data());
      for (int k = 0; k < fft_size; ++k) y[t * hop + k] += static_cast<T>(win[k] * buf[k]);
    }
  }
  if (Tape<T>* tape = internal::RecordingTape<T>({&real, &imag})) {
    auto sr = real.storage();
    auto si = imag.storage();
    auto so = out.storage();
    internal::RecordOp<T>(tape, "istft", {&out}, [=]() {
      RealFft fft(fft_size);
      std::vector<double> g(fft_size);
      std::vector<std::complex<double>> G(nb);
      T* gr = sr->requires_grad ? sr->MutableGrad() : nullptr;
      T* gi = si->requires_grad ? si->MutableGrad() : nullptr;
      const double inv_n = 1.0 / fft_size;
      for (int64_t s = 0; s < batch * ch; ++s) {
        const T* dy = so->grad.data() + s * len;
        for (int64_t t = 0; t < frames; ++t) {
          for (int k = 0; k < fft_size; ++k) g[k] = win[k] * dy[t * hop + k];
          fft.Forward(g.data(), G.data());
          const int64_t off = (s * frames + t) * nb;
          for (int64_t f = 0; f < nb; ++f) {
            const bool edge = f == 0 || f == nb - 1;
            const double c = edge ? inv_n : 2.0 * inv_n;
            if (gr) gr[off + f] += static_cast<T>(c * G[f].real());
            if (gi && !edge) gi[off + f] += static_cast<T>(c * G[f].imag());
          }
        }
      }
    });
  }
  return out;
}

template <Real T>
Tensor<T> SpectrogramToTensor(const Spectrogram& spec) {
  const int64_t plane = spec.frames * spec.bins;
  Tensor<T> t({1, 2 * spec.channels, spec.frames, spec.bins});
  T* d = t.mutable_raw();
  for (int m = 0; m < spec.channels; ++m) {
    for (int64_t i = 0; i < plane; ++i) {
      d[m * plane + i] = static_cast<T>(spec.real[m * plane + i]);
      d[(spec.channels + m) * plane + i] = static_cast<T>(spec.imag[m * plane + i]);
    }
  }
  return t;
}

template <Real T>
Spectrogram TensorToSpectrogram(const Tensor<T>& t, const Spectrogram& like, int64_t batch) {
  const Shape expect{t.dim(0), 2 * like.channels, like.frames, like.bins};
  if (t.shape() != expect || batch < 0 || batch >= t.dim(0)) {
    throw ShapeError("spectrogram: tensor " + ShapeToString(t.shape()) + " does not match " +
                     ShapeToString(expect));
  }
  Spectrogram spec = like;
  const int64_t plane = like.frames * like.bins;
  const T* d = t.raw() + batch * 2 * like.channels * plane;
  for (int m = 0; m < like.channels; ++m) {
    for (int64_t i = 0; i < plane; ++i) {
      spec.real[m * plane + i] = d[m * plane + i];
      spec.imag[m * plane + i] = d[(like.channels + m) * plane + i];
    }
  }
  return spec;
}

#define PDPCRN_INSTANTIATE(T)                                                          \
  template Tensor<T> IstftTensor<T>(const Tensor<T>&, const Tensor<T>&, int, int);     \
  template Tensor<T> SpectrogramToTensor<T>(const Spectrogram&);                       \
  template Spectrogram TensorToSpectrogram<T>(const Tensor<T>&, const Spectrogram&, int64_t);

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
