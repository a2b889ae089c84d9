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

#include "pdpcrn/signal/sources.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include "pdpcrn/io/wav.h"

namespace pdpcrn {

namespace fs = std::filesystem;

namespace {

struct Formants {
  double f[3];
  double bw[3];
};

// Spectral envelope of three resonances evaluated at frequency hz.
double Envelope(const Formants& fm, double hz) {
  double a = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double u = (hz - fm.f[k]) / fm.bw[k];
    a += (k == 0 ? 1.0 : 0.6 / k) / (1.0 + u * u);
  }
  return a;
}

}  // namespace

std::vector<double> SyntheticSpeech(int64_t samples, Rng& rng, int sample_rate) {
  std::vector<double> out(samples, 0.0);
  const double fs = sample_rate;
  const double speaker_f0 = rng.Uniform(95.0, 210.0);
  int64_t pos = static_cast<int64_t>(rng.Uniform(0.05, 0.2) * fs);
  std::vector<double> phase(64, 0.0);
  while (pos < samples) {
    const double kind = rng.Uniform();
    if (kind < 0.15) {
      pos += static_cast<int64_t>(rng.Uniform(0.08, 0.25) * fs);  // pause
      continue;
    }
    if (kind < 0.35) {
      // Fricative: high-passed noise with a smooth envelope.
      const int64_t len = static_cast<int64_t>(rng.Uniform(0.06, 0.15) * fs);
      const double gain = rng.Uniform(0.05, 0.15);
      double prev = 0.0;
      for (int64_t n = 0; n < len && pos + n < samples; ++n) {
        const double w = rng.Normal();
        const double hp = w - prev;
        prev = w;
        const double env = std::sin(std::numbers::pi * (n + 0.5) / len);
        out[pos + n] += gain * env * hp;
      }
      pos += len;
      continue;
    }
    // Voiced syllable.
    const int64_t len = static_cast<int64_t>(rng.Uniform(0.12, 0.32) * fs);
    Formants a{{rng.Uniform(300, 850), rng.Uniform(900, 2300), rng.Uniform(2300, 3300)},
               {rng.Uniform(60, 120), rng.Uniform(80, 160), rng.Uniform(120, 220)}};
    Formants b = a;
    for (int k = 0; k < 3; ++k) b.f[k] *= rng.Uniform(0.85, 1.15);
    const double f0_start = speaker_f0 * rng.Uniform(0.9, 1.15);
    const double f0_end = speaker_f0 * rng.Uniform(0.8, 1.05);
    const double gain = rng.Uniform(0.5, 1.0);
    const int64_t attack = len / 6;
    for (int64_t n = 0; n < len && pos + n < samples; ++n) {
      const double r = static_cast<double>(n) / len;
      const double f0 = f0_start + (f0_end - f0_start) * r;
      Formants cur;
      for (int k = 0; k < 3; ++k) {
        cur.f[k] = a.f[k] + (b.f[k] - a.f[k]) * r;
        cur.bw[k] = a.bw[k];
      }
      double env = 1.0;
      if (n < attack) env = static_cast<double>(n) / attack;
      if (n > len - attack) env = static_cast<double>(len - n) / attack;
      double v = 0.0;
      const int harmonics = std::min<int>(64, static_cast<int>(4000.0 / f0));
      for (int h = 1; h <= harmonics; ++h) {
        phase[h - 1] += 2.0 * std::numbers::pi * f0 * h / fs;
        if (phase[h - 1] > 2.0 * std::numbers::pi) phase[h - 1] -= 2.0 * std::numbers::pi;
        v += Envelope(cur, f0 * h) * std::sin(phase[h - 1]) / std::sqrt(static_cast<double>(h));
      }
      out[pos + n] += gain * env * v;
    }
    pos += len + static_cast<int64_t>(rng.Uniform(0.0, 0.05) * fs);
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out) v *= 0.5 / peak;
  }
  return out;
}

std::vector<double> PinkNoise(int64_t samples, Rng& rng) {
  std::vector<double> out(samples);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  double energy = 0.0;
  for (int64_t n = 0; n < samples; ++n) {
    const double w = rng.Normal();
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    out[n] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
    energy += out[n] * out[n];
  }
  if (energy > 0.0) {
    const double scale = 1.0 / std::sqrt(energy / samples);
    for (double& v : out) v *= scale;
  }
  return out;
}

std::vector<std::string> ListWavFiles(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("corpus directory '" + dir + "' is not readable");
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") files.push_back(entry.path().string());
  }
  if (ec) throw IoError("cannot list '" + dir + "': " + ec.message());
  if (files.empty()) throw std::invalid_argument("corpus directory '" + dir + "' holds no WAV files");
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<double> LoadSegment(const std::string& path, int64_t samples, Rng& rng) {
  const MultichannelWave wave = ReadWav(path);
  const std::vector<double>& x = wave.channels.at(0);
  if (x.empty()) throw IoError("'" + path + "' holds no samples");
  std::vector<double> out(samples);
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t offset = n > samples ? static_cast<int64_t>(rng.Below(n - samples + 1)) : 0;
  for (int64_t i = 0; i < samples; ++i) out[i] = x[(offset + i) % n];
  return out;
}

}  // namespace pdpcrn
