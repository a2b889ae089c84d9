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

#ifndef PDPCRN_SIGNAL_STFT_H_
#define PDPCRN_SIGNAL_STFT_H_

#include <cstdint>
#include <vector>

#include "pdpcrn/io/wav.h"
#include "pdpcrn/tensor/tensor.h"

namespace pdpcrn {

struct StftConfig {
  int window = 400;  // 25 ms at 16 kHz
  int hop = 200;
  int fft_size = 400;
  // Adds hop zeros before the signal and enough after it that every sample
  // lies under two frames; Istft then crops back to the original length.
  bool pad_edges = false;

  int bins() const { return fft_size / 2 + 1; }
  void Validate() const;
  // Frames produced for a signal of the given length.
  int64_t NumFrames(int64_t samples) const;
  // Right-side zeros added by pad_edges.
  int64_t TailPadding(int64_t samples) const;
};

// w[k] = sin(pi (k + 0.5) / n). Its square overlap-adds to one at 50% hop.
std::vector<double> SineWindow(int n);

// Complex T-F data stored as real and imaginary planes indexed [m][t][f].
struct Spectrogram {
  int channels = 0;
  int64_t frames = 0;
  int bins = 0;
  int hop = 200;
  int fft_size = 400;
  // Length of the analysed signal; lets Istft undo edge padding.
  int64_t signal_length = 0;
  bool padded = false;
  std::vector<double> real;
  std::vector<double> imag;

  size_t Index(int m, int64_t t, int f) const {
    return (static_cast<size_t>(m) * frames + t) * bins + f;
  }
  void Resize(int m, int64_t t, int f);
};

// Frame t covers samples [t * hop, t * hop + window) of the (padded) signal.
// Throws std::invalid_argument when the signal is shorter than one window.
Spectrogram Stft(const MultichannelWave& wave, const StftConfig& config = {});

// Weighted overlap-add with the sine synthesis window and no normalization.
// The result has (frames - 1) * hop + window samples, or the original length
// for padded spectrograms.
MultichannelWave Istft(const Spectrogram& spec, int sample_rate = kSampleRate);

// Differentiable inverse STFT. real, imag: [B, M, T, F]; returns the
// overlap-added waveform [B, M, (T - 1) * hop + fft_size] with the same window
// convention as Istft (window length equals fft_size).
template <Real T>
Tensor<T> IstftTensor(const Tensor<T>& real, const Tensor<T>& imag, int hop, int fft_size);

// Network layout: [1, 2M, T, F] with the M real planes first.
template <Real T>
Tensor<T> SpectrogramToTensor(const Spectrogram& spec);
// Inverse of SpectrogramToTensor; geometry is copied from like.
template <Real T>
Spectrogram TensorToSpectrogram(const Tensor<T>& t, const Spectrogram& like, int64_t batch = 0);

}  // namespace pdpcrn

#endif  // PDPCRN_SIGNAL_STFT_H_
