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

#include "pdpcrn/metrics/stoi.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <tuple>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pdpcrn/metrics/resample.h"
#include "pdpcrn/signal/fft.h"

namespace pdpcrn {

namespace {

using K = StoiConstants;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Frame starts 0, hop, ... strictly below n - frame, as the reference does.
int64_t FrameCount(int64_t n, int frame, int hop) {
  return n > frame ? (n - frame + hop - 1) / hop : 0;
}

// Magnitude-squared spectra of windowed frames: [frames][bins].
std::vector<std::vector<double>> PowerFrames(const std::vector<double>& x) {
  const int hop = K::kFrame / 2;
  const auto window = StoiWindow(K::kFrame);
  const int64_t frames = FrameCount(static_cast<int64_t>(x.size()), K::kFrame, hop);
  RealFft fft(K::kFft);
  std::vector<double> buf(K::kFft);
  std::vector<std::complex<double>> spec(K::kFft / 2 + 1);
  std::vector<std::vector<double>> out(frames, std::vector<double>(K::kFft / 2 + 1));
  for (int64_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int k = 0; k < K::kFrame; ++k) buf[k] = window[k] * x[t * hop + k];
    fft.Forward(buf.data(), spec.data());
    for (int f = 0; f <= K::kFft / 2; ++f) out[t][f] = std::norm(spec[f]);
  }
  return out;
}

// [bands][frames] band envelopes sqrt(OBM * |X|^2).
std::vector<std::vector<double>> BandEnvelopes(const std::vector<std::vector<double>>& power,
                                               const std::vector<std::vector<double>>& obm) {
  std::vector<std::vector<double>> env(K::kBands, std::vector<double>(power.size()));
  for (int b = 0; b < K::kBands; ++b) {
    for (size_t t = 0; t < power.size(); ++t) {
      double acc = 0.0;
      for (size_t f = 0; f < power[t].size(); ++f) acc += obm[b][f] * power[t][f];
      env[b][t] = std::sqrt(acc);
    }
  }
  return env;
}

}  // namespace

std::vector<double> StoiWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (n + 1));
  return w;
}

std::vector<std::vector<double>> ThirdOctaveBands() {
  const int bins = K::kFft / 2 + 1;
  std::vector<double> freq(bins);
  for (int i = 0; i < bins; ++i) freq[i] = static_cast<double>(i) * K::kSampleRate / K::kFft;
  auto nearest = [&](double target) {
    int best = 0;
    for (int i = 1; i < bins; ++i) {
      if ((freq[i] - target) * (freq[i] - target) < (freq[best] - target) * (freq[best] - target)) best = i;
    }
    return best;
  };
  std::vector<std::vector<double>> obm(K::kBands, std::vector<double>(bins, 0.0));
  for (int k = 0; k < K::kBands; ++k) {
    const int lo = nearest(K::kMinFreq * std::pow(2.0, (2.0 * k - 1.0) / 6.0));
    const int hi = nearest(K::kMinFreq * std::pow(2.0, (2.0 * k + 1.0) / 6.0));
    for (int i = lo; i < hi; ++i) obm[k][i] = 1.0;
  }
  return obm;
}

std::pair<std::vector<double>, std::vector<double>> RemoveSilentFrames(const std::vector<double>& clean,
                                                                       const std::vector<double>& degraded) {
  const int frame = K::kFrame, hop = K::kFrame / 2;
  const auto window = StoiWindow(frame);
  const int64_t frames = FrameCount(static_cast<int64_t>(clean.size()), frame, hop);
  std::vector<double> energy(frames);
  for (int64_t t = 0; t < frames; ++t) {
    double acc = 0.0;
    for (int k = 0; k < frame; ++k) acc += std::pow(window[k] * clean[t * hop + k], 2);
    energy[t] = 20.0 * std::log10(std::sqrt(acc) + kEps);
  }
  const double peak = frames > 0 ? *std::max_element(energy.begin(), energy.end()) : 0.0;
  std::vector<int64_t> keep;
  for (int64_t t = 0; t < frames; ++t) {
    if (peak - K::kDynamicRange - energy[t] < 0) keep.push_back(t);
  }
  const int64_t n = keep.empty() ? 0 : (static_cast<int64_t>(keep.size()) - 1) * hop + frame;
  std::vector<double> x(n, 0.0), y(n, 0.0);
  for (size_t j = 0; j < keep.size(); ++j) {
    for (int k = 0; k < frame; ++k) {
      x[j * hop + k] += window[k] * clean[keep[j] * hop + k];
      y[j * hop + k] += window[k] * degraded[keep[j] * hop + k];
    }
  }
  return {std::move(x), std::move(y)};
}

double Stoi(const std::vector<double>& clean, const std::vector<double>& degraded, int sample_rate) {
  if (clean.size() != degraded.size()) {
    throw std::invalid_argument("stoi: clean and degraded lengths differ (" + std::to_string(clean.size()) +
                                " vs " + std::to_string(degraded.size()) + ")");
  }
  if (std::all_of(clean.begin(), clean.end(), [](double v) { return v == 0.0; })) {
    throw std::invalid_argument("stoi: clean signal is silent");
  }
  std::vector<double> x = clean, y = degraded;
  if (sample_rate != K::kSampleRate) {
    x = ResamplePoly(x, K::kSampleRate, sample_rate);
    y = ResamplePoly(y, K::kSampleRate, sample_rate);
  }
  std::tie(x, y) = RemoveSilentFrames(x, y);
  static const auto obm = ThirdOctaveBands();
  const auto x_env = BandEnvelopes(PowerFrames(x), obm);
  const auto y_env = BandEnvelopes(PowerFrames(y), obm);
  const int64_t frames = static_cast<int64_t>(x_env[0].size());
  if (frames < K::kSegment) {
    throw std::invalid_argument("stoi: only " + std::to_string(frames) + " frames after silence removal, need " +
                                std::to_string(K::kSegment));
  }
  const double clip = 1.0 + std::pow(10.0, -K::kBeta / 20.0);
  const int n = K::kSegment;
  double total = 0.0;
  int64_t count = 0;
  std::vector<double> xs(n), ys(n);
  for (int64_t m = n; m <= frames; ++m) {
    for (int b = 0; b < K::kBands; ++b) {
      double nx = 0.0, ny = 0.0;
      for (int i = 0; i < n; ++i) {
        xs[i] = x_env[b][m - n + i];
        ys[i] = y_env[b][m - n + i];
        nx += xs[i] * xs[i];
        ny += ys[i] * ys[i];
      }
      // Scale the degraded envelope to the clean segment energy and clip it.
      // The epsilon only guards an all-zero degraded segment.
      const double scale = std::sqrt(nx) / (ny > 0.0 ? std::sqrt(ny) : kEps);
      double mx = 0.0, my = 0.0;
      for (int i = 0; i < n; ++i) {
        ys[i] = std::min(ys[i] * scale, xs[i] * clip);
        mx += xs[i];
        my += ys[i];
      }
      mx /= n;
      my /= n;
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (int i = 0; i < n; ++i) {
        const double a = xs[i] - mx, c = ys[i] - my;
        sxy += a * c;
        sxx += a * a;
        syy += c * c;
      }
      const double denom = std::sqrt(sxx * syy);
      total += denom > 0.0 ? sxy / denom : 0.0;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace pdpcrn
