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

#include "pdpcrn/io/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdpcrn {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T ReadLe(const std::string& b, size_t pos) {
  T v;
  std::memcpy(&v, b.data() + pos, sizeof(T));
  return v;
}

template <typename T>
void AppendLe(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

void MultichannelWave::Validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("wave: sample rate must be positive");
  for (const auto& ch : channels) {
    if (ch.size() != channels[0].size()) {
      throw std::invalid_argument("wave: channels have different lengths");
    }
  }
}

MultichannelWave ParseWav(const std::string& b, const std::string& origin, int expected_rate) {
  auto fail = [&](const std::string& what) { throw WavError(origin + ": " + what); };
  if (b.size() < 12) fail("truncated header: missing RIFF chunk");
  if (b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0) {
    fail("not a RIFF/WAVE file");
  }
  size_t pos = 12;
  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  uint32_t rate = 0;
  size_t data_pos = 0, data_size = 0;
  bool have_data = false;
  while (pos + 8 <= b.size()) {
    const std::string id = b.substr(pos, 4);
    const uint32_t size = ReadLe<uint32_t>(b, pos + 4);
    const size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > b.size()) fail("truncated 'fmt ' chunk");
      format = ReadLe<uint16_t>(b, body);
      channels = ReadLe<uint16_t>(b, body + 2);
      rate = ReadLe<uint32_t>(b, body + 4);
      block_align = ReadLe<uint16_t>(b, body + 12);
      bits = ReadLe<uint16_t>(b, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) fail("truncated extensible 'fmt ' chunk");
        // The sub-format GUID starts with the plain format tag.
        format = ReadLe<uint16_t>(b, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_size = std::min<size_t>(size, b.size() - body);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) fail("truncated header: missing 'fmt ' chunk");
  if (!have_data) fail("truncated header: missing 'data' chunk");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    fail("unsupported encoding (format " + std::to_string(format) + ", " + std::to_string(bits) +
         " bits); expected PCM 16-bit or IEEE float 32-bit");
  }
  if (channels == 0) fail("zero channels");
  if (block_align != channels * bits / 8) fail("inconsistent block alignment");
  if (expected_rate != 0 && static_cast<int>(rate) != expected_rate) {
    fail("sample rate " + std::to_string(rate) + " Hz, expected " + std::to_string(expected_rate) +
         " Hz (no resampling is performed)");
  }
  const size_t frames = data_size / block_align;
  MultichannelWave wave(channels, static_cast<int64_t>(frames), static_cast<int>(rate));
  for (size_t n = 0; n < frames; ++n) {
    for (uint16_t c = 0; c < channels; ++c) {
      const size_t at = data_pos + n * block_align + c * (bits / 8);
      wave.channels[c][n] = pcm16 ? ReadLe<int16_t>(b, at) / 32768.0
                                  : static_cast<double>(ReadLe<float>(b, at));
    }
  }
  return wave;
}

MultichannelWave ReadWav(const std::string& path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseWav(ss.str(), path, expected_rate);
}

std::string SerializeWav(const MultichannelWave& wave, WavEncoding encoding) {
  wave.Validate();
  const uint16_t channels = static_cast<uint16_t>(wave.num_channels());
  if (channels == 0) throw std::invalid_argument("wave: no channels to write");
  const uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const uint16_t block = channels * bits / 8;
  const uint64_t frames = static_cast<uint64_t>(wave.num_samples());
  const uint64_t data_size = frames * block;
  if (data_size + 36 > 0xFFFFFFFFull) throw std::invalid_argument("wave: too long for RIFF");
  std::string out;
  out.reserve(static_cast<size_t>(44 + data_size));
  out += "RIFF";
  AppendLe<uint32_t>(out, static_cast<uint32_t>(36 + data_size));
  out += "WAVEfmt ";
  AppendLe<uint32_t>(out, 16);
  AppendLe<uint16_t>(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  AppendLe<uint16_t>(out, channels);
  AppendLe<uint32_t>(out, static_cast<uint32_t>(wave.sample_rate));
  AppendLe<uint32_t>(out, static_cast<uint32_t>(wave.sample_rate) * block);
  AppendLe<uint16_t>(out, block);
  AppendLe<uint16_t>(out, bits);
  out += "data";
  AppendLe<uint32_t>(out, static_cast<uint32_t>(data_size));
  for (uint64_t n = 0; n < frames; ++n) {
    for (uint16_t c = 0; c < channels; ++c) {
      const double v = wave.channels[c][n];
      if (encoding == WavEncoding::kPcm16) {
        const double q = std::clamp(std::nearbyint(v * 32768.0), -32768.0, 32767.0);
        AppendLe<int16_t>(out, static_cast<int16_t>(q));
      } else {
        AppendLe<float>(out, static_cast<float>(v));
      }
    }
  }
  return out;
}

void WriteWav(const std::string& path, const MultichannelWave& wave, WavEncoding encoding) {
  const std::string bytes = SerializeWav(wave, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace pdpcrn
