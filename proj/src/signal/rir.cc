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

#include "pdpcrn/signal/rir.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pdpcrn {

namespace {

constexpr int kSincTaps = 16;

bool Inside(const Vec3& p, const Vec3& room) {
  return p.x > 0 && p.y > 0 && p.z > 0 && p.x < room.x && p.y < room.y && p.z < room.z;
}

std::string Str(const Vec3& p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " + std::to_string(p.z) + ")";
}

nlohmann::json VecJson(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 JsonVec(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

void AddFractionalImpulse(std::vector<double>& h, double delay, double amp) {
  static const auto table = [] {
    std::array<std::pair<double, double>, kSincTaps> t{};
    for (int i = 0; i < kSincTaps; ++i) {
      const double a = 2.0 * std::numbers::pi * (i - kSincTaps / 2 + 1) / kSincTaps;
      t[i] = {std::cos(a), std::sin(a)};
    }
    return t;
  }();
  const double base = std::floor(delay);
  const double frac = delay - base;
  const int64_t n0 = static_cast<int64_t>(base);
  const int64_t size = static_cast<int64_t>(h.size());
  if (frac == 0.0) {
    if (n0 >= 0 && n0 < size) h[n0] += amp;
    return;
  }
  // With x = k - frac: sin(pi x) = (-1)^(k+1) sin(pi frac), and the Hann
  // phase 2 pi x / taps splits into a per-k table and one rotation.
  // 1 - frac is exact, so this keeps full precision for frac near 1.
  const double sin_pf = std::sin(std::numbers::pi * std::min(frac, 1.0 - frac));
  const double b = 2.0 * std::numbers::pi * frac / kSincTaps;
  const double cb = std::cos(b), sb = std::sin(b);
  for (int i = 0; i < kSincTaps; ++i) {
    const int k = i - kSincTaps / 2 + 1;
    const int64_t n = n0 + k;
    if (n < 0 || n >= size) continue;
    const double x = k - frac;
    const double window = 0.5 * (1.0 + table[i].first * cb + table[i].second * sb);
    const double sign = (k & 1) ? 1.0 : -1.0;
    h[n] += amp * window * sign * sin_pf / (std::numbers::pi * x);
  }
}

// Allen and Berkley's high-pass: zeros at DC, poles at radius exp(-w).
void HighPass(std::vector<double>& h, double cutoff_hz, int sample_rate) {
  const double w = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double r = std::exp(-w);
  const double b1 = 2.0 * r * std::cos(w), b2 = -r * r, a1 = -(1.0 + r);
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (double& v : h) {
    const double y = b1 * y1 + b2 * y2 + v + a1 * x1 + r * x2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

}  // namespace

double Distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

Vec3 SceneConfig::SourcePosition() const {
  return {array_center.x + source_distance * std::cos(source_azimuth),
          array_center.y + source_distance * std::sin(source_azimuth), array_center.z};
}

std::vector<Vec3> SceneConfig::MicPositions() const {
  std::vector<Vec3> mics(num_mics);
  for (int m = 0; m < num_mics; ++m) {
    const double phi = 2.0 * std::numbers::pi * m / num_mics;
    mics[m] = {array_center.x + array_radius * std::cos(phi),
               array_center.y + array_radius * std::sin(phi), array_center.z};
  }
  return mics;
}

void SceneConfig::Validate() const {
  if (num_mics < 1) throw std::invalid_argument("scene: num_mics must be >= 1");
  if (!(rt60 > 0.0)) throw std::invalid_argument("scene: rt60 must be positive");
  if (!Inside(SourcePosition(), room_dims)) {
    throw std::invalid_argument("scene: source " + Str(SourcePosition()) + " is outside the room");
  }
  if (!Inside(noise_position, room_dims)) {
    throw std::invalid_argument("scene: noise source " + Str(noise_position) + " is outside the room");
  }
  for (const Vec3& m : MicPositions()) {
    if (!Inside(m, room_dims)) throw std::invalid_argument("scene: microphone " + Str(m) + " is outside the room");
  }
}

nlohmann::json SceneToJson(const SceneConfig& s) {
  return {{"room_dims", VecJson(s.room_dims)},   {"array_center", VecJson(s.array_center)},
          {"array_radius", s.array_radius},      {"num_mics", s.num_mics},
          {"source_distance", s.source_distance}, {"source_azimuth", s.source_azimuth},
          {"noise_position", VecJson(s.noise_position)}, {"rt60", s.rt60},
          {"snr_db", s.snr_db},                  {"seed", s.seed}};
}

SceneConfig SceneFromJson(const nlohmann::json& j) {
  SceneConfig s;
  s.room_dims = JsonVec(j.at("room_dims"));
  s.array_center = JsonVec(j.at("array_center"));
  s.array_radius = j.at("array_radius").get<double>();
  s.num_mics = j.at("num_mics").get<int>();
  s.source_distance = j.at("source_distance").get<double>();
  s.source_azimuth = j.at("source_azimuth").get<double>();
  s.noise_position = JsonVec(j.at("noise_position"));
  s.rt60 = j.at("rt60").get<double>();
  s.snr_db = j.at("snr_db").get<double>();
  s.seed = j.at("seed").get<uint64_t>();
  return s;
}

double ReflectionCoefficient(const Vec3& room, double rt60) {
  if (!(rt60 > 0.0)) throw std::invalid_argument("rir: rt60 must be positive");
  const double volume = room.x * room.y * room.z;
  const double surface = 2.0 * (room.x * room.y + room.x * room.z + room.y * room.z);
  const double alpha = 1.0 - std::exp(-0.161 * volume / (surface * rt60));
  if (!(alpha < 1.0)) {
    throw std::invalid_argument("rir: rt60 " + std::to_string(rt60) +
                                " s is unachievable for this room (absorption reaches 1)");
  }
  return std::sqrt(1.0 - alpha);
}

MultichannelWave GenerateRir(const SceneConfig& scene, const Vec3& source, const RirOptions& options) {
  scene.Validate();
  if (!Inside(source, scene.room_dims)) {
    throw std::invalid_argument("rir: source " + Str(source) + " is outside the room");
  }
  const double beta = ReflectionCoefficient(scene.room_dims, scene.rt60);
  const int fs = options.sample_rate;
  const int64_t length = options.length > 0 ? options.length
                                            : std::max<int64_t>(1, std::llround(scene.rt60 * fs));
  const double max_dist = (length + kSincTaps) * kSoundSpeed / fs;
  const Vec3& L = scene.room_dims;
  auto order_for = [&](double side) {
    const int reach = static_cast<int>(std::ceil(max_dist / (2.0 * side))) + 1;
    return options.max_order >= 0 ? std::min(options.max_order, reach) : reach;
  };
  const int nx = order_for(L.x), ny = order_for(L.y), nz = order_for(L.z);
  const std::vector<Vec3> mics = scene.MicPositions();
  MultichannelWave rir(scene.num_mics, length, fs);
  std::vector<double> gain(2 * (nx + ny + nz) + 8);
  for (size_t k = 0; k < gain.size(); ++k) gain[k] = std::pow(beta, static_cast<double>(k));
  // Reflections along one axis for image index n and parity q: |n - q| + |n|.
  for (int m = 0; m < scene.num_mics; ++m) {
    const Vec3& mic = mics[m];
    std::vector<double>& h = rir.channels[m];
    for (int ix = -nx; ix <= nx; ++ix) {
      for (int qx = 0; qx < 2; ++qx) {
        const int kx = std::abs(ix - qx) + std::abs(ix);
        if (options.max_order >= 0 && kx > options.max_order) continue;
        const double dx = (1 - 2 * qx) * source.x + 2 * ix * L.x - mic.x;
        if (std::abs(dx) > max_dist) continue;
        for (int iy = -ny; iy <= ny; ++iy) {
          for (int qy = 0; qy < 2; ++qy) {
            const int ky = std::abs(iy - qy) + std::abs(iy);
            if (options.max_order >= 0 && kx + ky > options.max_order) continue;
            const double dy = (1 - 2 * qy) * source.y + 2 * iy * L.y - mic.y;
            const double dxy2 = dx * dx + dy * dy;
            if (dxy2 > max_dist * max_dist) continue;
            for (int iz = -nz; iz <= nz; ++iz) {
              for (int qz = 0; qz < 2; ++qz) {
                const int kz = std::abs(iz - qz) + std::abs(iz);
                const int order = kx + ky + kz;
                if (options.max_order >= 0 && order > options.max_order) continue;
                const double dz = (1 - 2 * qz) * source.z + 2 * iz * L.z - mic.z;
                const double d = std::sqrt(dxy2 + dz * dz);
                if (d > max_dist) continue;
                const double delay = d / kSoundSpeed * fs;
                const double amp = gain[order] / (4.0 * std::numbers::pi * d);
                AddFractionalImpulse(h, delay, amp);
              }
            }
          }
        }
      }
    }
    if (options.highpass_hz > 0.0) HighPass(h, options.highpass_hz, fs);
  }
  return rir;
}

double EstimateT60(const std::vector<double>& rir, int sample_rate) {
  const size_t n = rir.size();
  std::vector<double> edc(n);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += rir[i] * rir[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("rir: zero energy");
  // Least-squares line through the decay curve between -5 and -25 dB.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (size_t i = 0; i < n; ++i) {
    const double db = 10.0 * std::log10(edc[i] / acc);
    if (db > -5.0) continue;
    if (db < -25.0) break;
    const double t = static_cast<double>(i) / sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("rir: decay curve too short for a -5..-25 dB fit");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -60.0 / slope;
}

}  // namespace pdpcrn
