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

#ifndef PDPCRN_SIGNAL_RIR_H_
#define PDPCRN_SIGNAL_RIR_H_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "pdpcrn/io/wav.h"

namespace pdpcrn {

inline constexpr double kSoundSpeed = 343.0;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

double Distance(const Vec3& a, const Vec3& b);

// Shoebox room with one speech source, one point noise source and a uniform
// circular microphone array in the horizontal plane.
struct SceneConfig {
  Vec3 room_dims{6.0, 5.0, 4.0};
  Vec3 array_center{3.0, 2.5, 1.5};
  double array_radius = 0.035;
  int num_mics = 16;
  double source_distance = 1.0;
  double source_azimuth = 0.0;  // radians, in the array plane
  Vec3 noise_position{1.0, 1.0, 1.5};
  double rt60 = 0.5;
  double snr_db = 0.0;
  uint64_t seed = 0;

  Vec3 SourcePosition() const;
  std::vector<Vec3> MicPositions() const;
  // Throws std::invalid_argument for points outside the room, rt60 <= 0 or
  // num_mics < 1.
  void Validate() const;
};

nlohmann::json SceneToJson(const SceneConfig& scene);
SceneConfig SceneFromJson(const nlohmann::json& j);

// Uniform wall reflection coefficient sqrt(1 - alpha), with alpha from
// Eyring's formula alpha = 1 - exp(-0.161 V / (S rt60)). Throws
// std::invalid_argument when rt60 <= 0 or alpha rounds to 1.
double ReflectionCoefficient(const Vec3& room, double rt60);

struct RirOptions {
  // Highest reflection order per axis; negative means "all images that
  // arrive within the RIR length".
  int max_order = -1;
  // Samples; non-positive means rt60 * sample_rate.
  int64_t length = 0;
  int sample_rate = kSampleRate;
  // Cutoff of the causal two-pole high-pass applied after image summation
  // to remove the DC build-up of all-positive images; 0 disables it.
  double highpass_hz = 100.0;
};

// Image-source RIRs from `source` to every microphone. Each image adds
// beta^k / (4 pi d) at delay d / c seconds, placed with a 16-tap Hann-windowed
// sinc so that integer delays give a single exact tap. The summed response
// is then high-passed per RirOptions::highpass_hz.
MultichannelWave GenerateRir(const SceneConfig& scene, const Vec3& source,
                             const RirOptions& options = {});

// Schroeder backward integration fit between -5 and -25 dB, extrapolated to
// 60 dB. Returns seconds.
double EstimateT60(const std::vector<double>& rir, int sample_rate = kSampleRate);

}  // namespace pdpcrn

#endif  // PDPCRN_SIGNAL_RIR_H_
