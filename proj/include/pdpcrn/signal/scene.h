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

#ifndef PDPCRN_SIGNAL_SCENE_H_
#define PDPCRN_SIGNAL_SCENE_H_

#include <vector>

#include "pdpcrn/io/wav.h"
#include "pdpcrn/signal/rir.h"
#include "pdpcrn/tensor/random.h"

namespace pdpcrn {

struct MixResult {
  MultichannelWave mixture;       // speech_image + noise_image
  MultichannelWave target;        // direct-path speech per microphone
  MultichannelWave speech_image;  // reverberant speech per microphone
  MultichannelWave noise_image;   // scaled reverberant noise per microphone
  double noise_gain = 1.0;        // applied to the unscaled noise image
};

// Speech-active mask over 10 ms frames: a frame is active when its energy
// is within 40 dB of the loudest frame.
std::vector<bool> SpeechActiveMask(const std::vector<double>& x, int sample_rate = kSampleRate);

// Ratio of a to b in dB over the samples selected by mask.
double MaskedSnrDb(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<bool>& mask);

// Convolves speech and noise with their RIRs and scales the noise so that
// the speech-active SNR at microphone 0 equals scene.snr_db. The noise is
// looped when shorter than the speech and cropped otherwise; all outputs
// have the speech length. Throws std::invalid_argument for silent speech.
MixResult MixScene(const std::vector<double>& speech, const std::vector<double>& noise,
                   const SceneConfig& scene);

// Random geometry inside the default room: source at scene.source_distance
// with a random azimuth, noise at least 0.5 m from the array centre and
// 0.3 m from every wall.
SceneConfig RandomScene(Rng& rng, int num_mics, double rt60, double snr_db);

}  // namespace pdpcrn

#endif  // PDPCRN_SIGNAL_SCENE_H_
