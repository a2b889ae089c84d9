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

#ifndef PDPCRN_IO_WAV_H_
#define PDPCRN_IO_WAV_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pdpcrn/io/errors.h"

namespace pdpcrn {

inline constexpr int kSampleRate = 16000;

// M equal-length channels of samples, nominally in [-1, 1].
struct MultichannelWave {
  int sample_rate = kSampleRate;
  std::vector<std::vector<double>> channels;

  MultichannelWave() = default;
  MultichannelWave(int channels_count, int64_t samples, int rate = kSampleRate)
      : sample_rate(rate), channels(channels_count, std::vector<double>(samples, 0.0)) {}

  int num_channels() const { return static_cast<int>(channels.size()); }
  int64_t num_samples() const { return channels.empty() ? 0 : channels[0].size(); }
  // Throws std::invalid_argument when channel lengths differ or the rate is
  // not positive.
  void Validate() const;
};

enum class WavEncoding { kPcm16, kFloat32 };

class WavError : public IoError {
 public:
  using IoError::IoError;
};

// Reads RIFF/WAVE PCM 16-bit or IEEE float 32-bit, plain or extensible.
// PCM samples are scaled by 1/32768. When expected_rate is non-zero a file
// with another rate is rejected.
MultichannelWave ReadWav(const std::string& path, int expected_rate = kSampleRate);
MultichannelWave ParseWav(const std::string& bytes, const std::string& origin,
                          int expected_rate = kSampleRate);

// PCM samples are rounded to the nearest multiple of 1/32768 and clipped to
// [-1, 32767/32768].
void WriteWav(const std::string& path, const MultichannelWave& wave,
              WavEncoding encoding = WavEncoding::kFloat32);
std::string SerializeWav(const MultichannelWave& wave, WavEncoding encoding);

}  // namespace pdpcrn

#endif  // PDPCRN_IO_WAV_H_
