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

#include "pdpcrn/metrics/resample.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pdpcrn {

std::vector<double> ResampleFilter(int up, int down) {
  if (up < 1 || down < 1) throw std::invalid_argument("resample: factors must be positive");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  const double rejection_db = 60.0;
  const double cutoff = 1.0 / (2.0 * std::max(up, down));
  const double roll_off = cutoff / 10.0;
  const int64_t half = static_cast<int64_t>(std::ceil((rejection_db - 8.0) / (28.714 * roll_off)));
  const double beta = 0.1102 * (rejection_db - 8.7);
  const int64_t n = 2 * half + 1;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  std::vector<double> h(n);
  double sum = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i - half);
    const double arg = 2.0 * cutoff * t;
    const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    const double r = 2.0 * i / (n - 1) - 1.0;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[i] = window * 2.0 * up * cutoff * sinc;
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> ResamplePoly(const std::vector<double>& x, int up, int down) {
  if (up < 1 || down < 1) throw std::invalid_argument("resample: factors must be positive");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  if (up == 1 && down == 1) return x;
  const std::vector<double> h = ResampleFilter(up, down);
  const int64_t half = (static_cast<int64_t>(h.size()) - 1) / 2;
  const int64_t n_in = static_cast<int64_t>(x.size());
  const int64_t n_out = (n_in * up + down - 1) / down;
  const int64_t taps = static_cast<int64_t>(h.size());
  std::vector<double> y(n_out);
  for (int64_t m = 0; m < n_out; ++m) {
    // y[m] = up * sum_n x[n] h[half + m * down - n * up].
    const int64_t centre = half + m * down;
    int64_t n_lo = (centre - (taps - 1) + up - 1) / up;
    if (centre - (taps - 1) < 0) n_lo = 0;
    const int64_t n_hi = std::min(n_in - 1, centre / up);
    double acc = 0.0;
    for (int64_t k = std::max<int64_t>(0, n_lo); k <= n_hi; ++k) acc += x[k] * h[centre - k * up];
    y[m] = up * acc;
  }
  return y;
}

}  // namespace pdpcrn
