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

#ifndef PDPCRN_SIGNAL_FFT_H_
#define PDPCRN_SIGNAL_FFT_H_

#include <complex>
#include <memory>
#include <vector>

namespace pdpcrn {

// Real FFT of a fixed size; one instance per thread.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  int bins() const { return size_ / 2 + 1; }

  // out[k] = sum_n in[n] exp(-2 pi i k n / N) for k in [0, N/2].
  void Forward(const double* in, std::complex<double>* out);
  // Inverse of Forward including the 1/N factor. The imaginary parts of the
  // DC and Nyquist bins are ignored.
  void Inverse(const std::complex<double>* in, double* out);

 private:
  struct Impl;
  int size_;
  std::unique_ptr<Impl> impl_;
};

// Full linear convolution, length a.size() + b.size() - 1, via FFT.
std::vector<double> FftConvolve(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace pdpcrn

#endif  // PDPCRN_SIGNAL_FFT_H_
