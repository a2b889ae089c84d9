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

#include "pdpcrn/signal/fft.h"

#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace pdpcrn {

struct RealFft::Impl {
  Eigen::FFT<double> fft;
  std::vector<double> time;
  std::vector<std::complex<double>> freq;
};

RealFft::RealFft(int size) : size_(size), impl_(std::make_unique<Impl>()) {
  if (size < 2 || size % 2 != 0) throw std::invalid_argument("fft: size must be even and >= 2");
  impl_->fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  impl_->time.resize(size);
  impl_->freq.resize(size / 2 + 1);
}

RealFft::~RealFft() = default;

void RealFft::Forward(const double* in, std::complex<double>* out) {
  impl_->time.assign(in, in + size_);
  impl_->fft.fwd(impl_->freq, impl_->time);
  std::copy(impl_->freq.begin(), impl_->freq.begin() + bins(), out);
}

void RealFft::Inverse(const std::complex<double>* in, double* out) {
  impl_->freq.assign(in, in + bins());
  impl_->freq[0].imag(0.0);
  impl_->freq[size_ / 2].imag(0.0);
  impl_->fft.inv(impl_->time, impl_->freq, size_);
  std::copy(impl_->time.begin(), impl_->time.end(), out);
}

std::vector<double> FftConvolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const size_t n = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 32) {
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  int size = 2;
  while (static_cast<size_t>(size) < n) size *= 2;
  RealFft fft(size);
  std::vector<double> pa(size, 0.0), pb(size, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.Forward(pa.data(), fa.data());
  fft.Forward(pb.data(), fb.data());
  for (int k = 0; k < fft.bins(); ++k) fa[k] *= fb[k];
  fft.Inverse(fa.data(), pa.data());
  pa.resize(n);
  return pa;
}

}  // namespace pdpcrn
