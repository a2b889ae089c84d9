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

// Short-time objective intelligibility, following the widely used reference
// implementation: 10 kHz analysis, 40 dB silent-frame removal, 256-sample
// Hann frames with 50% overlap and a 512-point FFT, 15 one-third octave
// bands from 150 Hz, 30-frame segments and clipping at -15 dB SDR.

#ifndef PDPCRN_METRICS_STOI_H_
#define PDPCRN_METRICS_STOI_H_

#include <vector>

namespace pdpcrn {

struct StoiConstants {
  static constexpr int kSampleRate = 10000;
  static constexpr int kFrame = 256;
  static constexpr int kFft = 512;
  static constexpr int kBands = 15;
  static constexpr double kMinFreq = 150.0;
  static constexpr int kSegment = 30;
  static constexpr double kBeta = -15.0;
  static constexpr double kDynamicRange = 40.0;
};

// [bands][fft / 2 + 1] 0/1 matrix of one-third octave band membership.
std::vector<std::vector<double>> ThirdOctaveBands();

// Hann window of length n without the zero end points.
std::vector<double> StoiWindow(int n);

// Drops frames of both signals whose clean-frame energy is more than
// kDynamicRange dB below the loudest one, then overlap-adds the remaining
// windowed frames. Returns {clean, degraded}.
std::pair<std::vector<double>, std::vector<double>> RemoveSilentFrames(const std::vector<double>& clean,
                                                                       const std::vector<double>& degraded);

// Score in [-1, 1]; 1 when degraded == clean. Throws std::invalid_argument
// on length mismatch, an all-zero clean signal, or fewer than kSegment
// frames left after silence removal.
double Stoi(const std::vector<double>& clean, const std::vector<double>& degraded, int sample_rate);

}  // namespace pdpcrn

#endif  // PDPCRN_METRICS_STOI_H_
