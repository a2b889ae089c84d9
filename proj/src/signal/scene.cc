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

#include "pdpcrn/signal/scene.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdpcrn/signal/fft.h"

namespace pdpcrn {

std::vector<bool> SpeechActiveMask(const std::vector<double>& x, int sample_rate) {
  const size_t frame = static_cast<size_t>(sample_rate / 100);
  const size_t frames = (x.size() + frame - 1) / frame;
  std::vector<double> energy(frames, 0.0);
  for (size_t i = 0; i < x.size(); ++i) energy[i / frame] += x[i] * x[i];
  const double peak = frames ? *std::max_element(energy.begin(), energy.end()) : 0.0;
  std::vector<bool> mask(x.size(), false);
  if (peak <= 0.0) return mask;
  const double floor = peak * 1e-4;  // -40 dB
  for (size_t i = 0; i < x.size(); ++i) mask[i] = energy[i / frame] > floor;
  return mask;
}

double MaskedSnrDb(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<bool>& mask) {
  double ea = 0.0, eb = 0.0;
  for (size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ea += a[i] * a[i];
    eb += b[i] * b[i];
  }
  return 10.0 * std::log10(ea / eb);
}

MixResult MixScene(const std::vector<double>& speech, const std::vector<double>& noise,
                   const SceneConfig& scene) {
  scene.Validate();
  if (speech.empty() || noise.empty()) throw std::invalid_argument("mix: empty speech or noise");
  const int64_t n = static_cast<int64_t>(speech.size());
  std::vector<double> noise_seg(n);
  for (int64_t i = 0; i < n; ++i) noise_seg[i] = noise[i % noise.size()];

  const Vec3 src = scene.SourcePosition();
  const MultichannelWave speech_rir = GenerateRir(scene, src);
  RirOptions direct;
  direct.max_order = 0;
  direct.length = speech_rir.num_samples();
  const MultichannelWave direct_rir = GenerateRir(scene, src, direct);
  const MultichannelWave noise_rir = GenerateRir(scene, scene.noise_position);

  MixResult r;
  r.speech_image = MultichannelWave(scene.num_mics, n);
  r.target = MultichannelWave(scene.num_mics, n);
  r.noise_image = MultichannelWave(scene.num_mics, n);
  for (int m = 0; m < scene.num_mics; ++m) {
    auto crop = [n](std::vector<double> v) {
      v.resize(n);
      return v;
    };
    r.speech_image.channels[m] = crop(FftConvolve(speech, speech_rir.channels[m]));
    r.target.channels[m] = crop(FftConvolve(speech, direct_rir.channels[m]));
    r.noise_image.channels[m] = crop(FftConvolve(noise_seg, noise_rir.channels[m]));
  }

  const std::vector<bool> mask = SpeechActiveMask(r.speech_image.channels[0]);
  double es = 0.0, en = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    es += r.speech_image.channels[0][i] * r.speech_image.channels[0][i];
    en += r.noise_image.channels[0][i] * r.noise_image.channels[0][i];
  }
  if (es <= 0.0) throw std::invalid_argument("mix: speech has zero power, cannot set SNR");
  if (en <= 0.0) throw std::invalid_argument("mix: noise has zero power over speech-active samples");
  r.noise_gain = std::sqrt(es / (en * std::pow(10.0, scene.snr_db / 10.0)));
  r.mixture = MultichannelWave(scene.num_mics, n);
  for (int m = 0; m < scene.num_mics; ++m) {
    for (int64_t i = 0; i < n; ++i) {
      r.noise_image.channels[m][i] *= r.noise_gain;
      r.mixture.channels[m][i] = r.speech_image.channels[m][i] + r.noise_image.channels[m][i];
    }
  }
  return r;
}

SceneConfig RandomScene(Rng& rng, int num_mics, double rt60, double snr_db) {
  SceneConfig s;
  s.num_mics = num_mics;
  s.rt60 = rt60;
  s.snr_db = snr_db;
  s.array_center = {rng.Uniform(2.0, 4.0), rng.Uniform(1.8, 3.2), rng.Uniform(1.2, 1.8)};
  // The source must stay 0.3 m from the walls; try azimuths until it does.
  for (int attempt = 0; attempt < 100; ++attempt) {
    s.source_azimuth = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    const Vec3 p = s.SourcePosition();
    if (p.x > 0.3 && p.y > 0.3 && p.x < s.room_dims.x - 0.3 && p.y < s.room_dims.y - 0.3) break;
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vec3 p{rng.Uniform(0.3, s.room_dims.x - 0.3), rng.Uniform(0.3, s.room_dims.y - 0.3),
                 rng.Uniform(0.3, s.room_dims.z - 0.3)};
    if (Distance(p, s.array_center) >= 0.5 && Distance(p, s.SourcePosition()) >= 0.3) {
      s.noise_position = p;
      break;
    }
  }
  s.Validate();
  return s;
}

}  // namespace pdpcrn
