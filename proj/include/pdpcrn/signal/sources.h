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

#ifndef PDPCRN_SIGNAL_SOURCES_H_
#define PDPCRN_SIGNAL_SOURCES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pdpcrn/tensor/random.h"

namespace pdpcrn {

// Speech-like test signal: voiced syllables built from formant-weighted
// harmonics of a gliding pitch, unvoiced fricative bursts and short pauses.
// Peak amplitude 0.5.
std::vector<double> SyntheticSpeech(int64_t samples, Rng& rng, int sample_rate = 16000);

// 1/f noise from a seeded white Gaussian source (Kellet's filter), unit RMS.
std::vector<double> PinkNoise(int64_t samples, Rng& rng);

// Sorted list of *.wav files below dir (recursive). Throws IoError when dir
// is unreadable and std::invalid_argument when no WAV files are found.
std::vector<std::string> ListWavFiles(const std::string& dir);

// A segment of exactly `samples` samples taken from channel 0 of a WAV file:
// a random crop when longer, looped when shorter.
std::vector<double> LoadSegment(const std::string& path, int64_t samples, Rng& rng);

}  // namespace pdpcrn

#endif  // PDPCRN_SIGNAL_SOURCES_H_
