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

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "grad_check.h"
#include "pdpcrn/signal/dataset.h"
#include "pdpcrn/signal/fft.h"
#include "pdpcrn/signal/rir.h"
#include "pdpcrn/signal/scene.h"
#include "pdpcrn/signal/sources.h"
#include "pdpcrn/signal/stft.h"

namespace pdpcrn {
namespace {

namespace fs = std::filesystem;
using testing::GradCheck;
using testing::Project;
using testing::RandomLeaf;

MultichannelWave RandomWave(int channels, int64_t n, Rng& rng) {
  MultichannelWave w(channels, n);
  for (auto& ch : w.channels)
    for (double& v : ch) v = rng.Uniform(-1, 1);
  return w;
}

TEST_CASE("stft geometry and trivial inputs") {
  MultichannelWave zero(2, 1600);
  Spectrogram s = Stft(zero);
  CHECK(s.bins == 201);
  CHECK(s.frames == 7);
  for (double v : s.real) CHECK(v == 0.0);
  MultichannelWave back = Istft(s);
  for (double v : back.channels[0]) CHECK(v == 0.0);
  CHECK_THROWS_AS(Stft(MultichannelWave(1, 399)), std::invalid_argument);
}

TEST_CASE("1 kHz sine peaks at bin 25") {
  MultichannelWave w(1, 16000);
  for (int n = 0; n < 16000; ++n) w.channels[0][n] = std::sin(2 * std::numbers::pi * 1000 * n / 16000.0);
  Spectrogram s = Stft(w);
  for (int64_t t = 0; t < s.frames; ++t) {
    int best = 0;
    double best_mag = -1;
    for (int f = 0; f < s.bins; ++f) {
      const double mag = std::hypot(s.real[s.Index(0, t, f)], s.imag[s.Index(0, t, f)]);
      if (mag > best_mag) best_mag = mag, best = f;
    }
    CHECK(best == 25);
  }
}

TEST_CASE("stft round trip on the interior") {
  Rng rng(1);
  MultichannelWave x = RandomWave(2, 16000, rng);
  MultichannelWave y = Istft(Stft(x));
  double num = 0, den = 0;
  for (int m = 0; m < 2; ++m)
    for (int64_t n = 200; n < y.num_samples() - 200; ++n) {
      num += std::pow(y.channels[m][n] - x.channels[m][n], 2);
      den += std::pow(x.channels[m][n], 2);
    }
  CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("padded stft reconstructs every sample") {
  Rng rng(2);
  for (int64_t n : {400, 401, 599, 16000, 16123}) {
    MultichannelWave x = RandomWave(1, n, rng);
    StftConfig cfg;
    cfg.pad_edges = true;
    MultichannelWave y = Istft(Stft(x, cfg));
    REQUIRE(y.num_samples() == n);
    double worst = 0;
    for (int64_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y.channels[0][i] - x.channels[0][i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("parseval per frame") {
  Rng rng(3);
  MultichannelWave x = RandomWave(1, 1200, rng);
  Spectrogram s = Stft(x);
  const auto w = SineWindow(400);
  for (int64_t t = 0; t < s.frames; ++t) {
    double et = 0, ef = 0;
    for (int k = 0; k < 400; ++k) et += std::pow(w[k] * x.channels[0][t * 200 + k], 2);
    for (int f = 0; f < s.bins; ++f) {
      const double p = std::pow(s.real[s.Index(0, t, f)], 2) + std::pow(s.imag[s.Index(0, t, f)], 2);
      ef += (f == 0 || f == 200) ? p : 2 * p;
    }
    CHECK(std::abs(ef / 400 - et) / et < 1e-9);
  }
}

TEST_CASE("single frame inverse is a windowed segment") {
  Rng rng(4);
  MultichannelWave x = RandomWave(1, 400, rng);
  MultichannelWave y = Istft(Stft(x));
  const auto w = SineWindow(400);
  for (int k = 0; k < 400; ++k) CHECK(std::abs(y.channels[0][k] - w[k] * w[k] * x.channels[0][k]) < 1e-12);
}

TEST_CASE("tensor istft matches istft and has correct gradients") {
  Rng rng(5);
  MultichannelWave x = RandomWave(2, 1800, rng);
  Spectrogram s = Stft(x);
  Tensor<double> planes = SpectrogramToTensor<double>(s);
  Tensor<double> re = Slice(planes, 1, 0, 2), im = Slice(planes, 1, 2, 4);
  Tensor<double> y = IstftTensor(re, im, 200, 400);
  MultichannelWave ref = Istft(s);
  for (int m = 0; m < 2; ++m)
    for (int64_t n = 0; n < ref.num_samples(); ++n)
      CHECK(std::abs(y.at({0, m, n}) - ref.channels[m][n]) < 1e-12);
  Tensor<double> r = RandomLeaf({1, 2, 3, 9}, rng), i = RandomLeaf({1, 2, 3, 9}, rng);
  // Imaginary DC and Nyquist parts do not reach the waveform.
  CHECK(GradCheck([&] { return Project(IstftTensor(r, i, 8, 16)); }, {r, i}) < 1e-6);
  Spectrogram round = TensorToSpectrogram(planes, s);
  CHECK(round.real == s.real);
  CHECK(round.imag == s.imag);
}

TEST_CASE("fft convolution matches direct convolution") {
  Rng rng(6);
  std::vector<double> a(300), b(77);
  for (double& v : a) v = rng.Normal();
  for (double& v : b) v = rng.Normal();
  std::vector<double> c = FftConvolve(a, b);
  REQUIRE(c.size() == 376);
  for (size_t n = 0; n < c.size(); n += 13) {
    double acc = 0;
    for (size_t i = 0; i < a.size(); ++i)
      if (n >= i && n - i < b.size()) acc += a[i] * b[n - i];
    CHECK(std::abs(acc - c[n]) < 1e-10);
  }
}

TEST_CASE("direct path of an integer delay is a single impulse") {
  SceneConfig scene;
  scene.num_mics = 1;
  scene.array_radius = 0.0;
  scene.source_distance = 48.0 * kSoundSpeed / kSampleRate;
  RirOptions opt;
  opt.max_order = 0;
  opt.length = 200;
  opt.highpass_hz = 0.0;
  MultichannelWave h = GenerateRir(scene, scene.SourcePosition(), opt);
  const double d = Distance(scene.SourcePosition(), scene.MicPositions()[0]);
  const double amp = 1.0 / (4 * std::numbers::pi * d);
  for (int n = 0; n < 200; ++n) {
    if (n == 48) CHECK(h.channels[0][n] == doctest::Approx(amp).epsilon(1e-9));
    else CHECK(std::abs(h.channels[0][n]) < 1e-9);
  }
}

TEST_CASE("direct-path arrivals follow geometry") {
  SceneConfig scene;
  RirOptions opt;
  opt.max_order = 0;
  opt.length = 400;
  const Vec3 src = scene.SourcePosition();
  MultichannelWave h = GenerateRir(scene, src, opt);
  const auto mics = scene.MicPositions();
  std::vector<double> arrival(16);
  for (int m = 0; m < 16; ++m) {
    const double d = Distance(src, mics[m]);
    const double amp = 1.0 / (4 * std::numbers::pi * d);
    int first = -1;
    for (int n = 0; n < 400 && first < 0; ++n)
      if (std::abs(h.channels[m][n]) >= 0.5 * amp) first = n;
    arrival[m] = first;
    CHECK(std::abs(first - d / kSoundSpeed * kSampleRate) <= 1.0);
  }
  // Mic 0 faces the source (azimuth 0); mic 8 is on the far side.
  CHECK(Distance(src, mics[0]) < Distance(src, mics[8]));
  CHECK(arrival[0] < arrival[8]);
}

TEST_CASE("schroeder decay matches the requested rt60") {
  for (double rt : {0.3, 0.5, 0.8}) {
    SceneConfig scene;
    scene.num_mics = 1;
    scene.rt60 = rt;
    MultichannelWave h = GenerateRir(scene, scene.SourcePosition());
    const double est = EstimateT60(h.channels[0]);
    MESSAGE("rt60 " << rt << " estimated " << est);
    CHECK(std::abs(est - rt) / rt < 0.2);
  }
}

TEST_CASE("rir errors") {
  SceneConfig scene;
  CHECK_THROWS_AS(ReflectionCoefficient(scene.room_dims, 1e-5), std::invalid_argument);
  CHECK_THROWS_AS(ReflectionCoefficient(scene.room_dims, 0.0), std::invalid_argument);
  scene.source_distance = 10.0;
  CHECK_THROWS_AS(scene.Validate(), std::invalid_argument);
  SceneConfig ok;
  CHECK_THROWS_AS(GenerateRir(ok, Vec3{7, 1, 1}), std::invalid_argument);
  CHECK(SceneFromJson(SceneToJson(ok)).source_distance == ok.source_distance);
}

TEST_CASE("mixture decomposition and SNR") {
  Rng rng(7);
  std::vector<double> speech = SyntheticSpeech(16000, rng);
  std::vector<double> noise = PinkNoise(12000, rng);
  SceneConfig scene = RandomScene(rng, 4, 0.4, 0.0);
  MixResult a = MixScene(speech, noise, scene);
  for (int m = 0; m < 4; ++m)
    for (int64_t n = 0; n < a.mixture.num_samples(); ++n)
      CHECK(a.mixture.channels[m][n] == a.speech_image.channels[m][n] + a.noise_image.channels[m][n]);
  const auto mask = SpeechActiveMask(a.speech_image.channels[0]);
  double es = 0, en = 0;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) es += std::pow(a.speech_image.channels[0][i], 2), en += std::pow(a.noise_image.channels[0][i], 2);
  CHECK(std::abs(es / en - 1.0) < 1e-10);
  scene.snr_db = -10.0;
  MixResult b = MixScene(speech, noise, scene);
  for (int64_t n = 0; n < 16000; n += 97)
    CHECK(b.noise_image.channels[2][n] == doctest::Approx(std::sqrt(10.0) * a.noise_image.channels[2][n]).epsilon(1e-12));
  CHECK(std::abs(MaskedSnrDb(b.speech_image.channels[0], b.noise_image.channels[0], mask) + 10.0) < 0.01);
  CHECK_THROWS_AS(MixScene(std::vector<double>(1000, 0.0), noise, scene), std::invalid_argument);
}

TEST_CASE("synthetic sources are deterministic") {
  Rng a(8), b(8);
  CHECK(SyntheticSpeech(8000, a) == SyntheticSpeech(8000, b));
  Rng c(9);
  std::vector<double> p = PinkNoise(16000, c);
  double e = 0;
  for (double v : p) e += v * v;
  CHECK(std::abs(e / 16000 - 1.0) < 1e-12);
}

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("dataset synthesis is deterministic and complete") {
  const fs::path root = fs::temp_directory_path() / "pdpcrn_signal_dataset";
  fs::remove_all(root);
  DatasetConfig cfg;
  cfg.count = 5;
  cfg.num_mics = 2;
  cfg.seed = 7;
  cfg.utterance_seconds = 1.0;
  cfg.rt60s = {0.2, 0.3};
  auto rows = SynthesizeDataset(cfg, (root / "a").string());
  cfg.threads = 1;
  SynthesizeDataset(cfg, (root / "b").string());
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) {
    CHECK(fs::exists(root / "a" / r.mixture_path));
    CHECK(ReadAll(root / "a" / r.mixture_path) == ReadAll(root / "b" / r.mixture_path));
    CHECK(ReadAll(root / "a" / r.target_path) == ReadAll(root / "b" / r.target_path));
  }
  CHECK(ReadAll(root / "a/manifest.jsonl") == ReadAll(root / "b/manifest.jsonl"));
  CHECK(ReadManifest((root / "a/manifest.jsonl").string()).size() == 5);
  CHECK(SceneGrid(DatasetConfig{}.snrs_db, DatasetConfig{}.rt60s).size() == 45);
  DatasetConfig bad = cfg;
  bad.corpus_dir = (root / "missing").string();
  CHECK_THROWS_AS(SynthesizeDataset(bad, (root / "c").string()), IoError);
}

}  // namespace
}  // namespace pdpcrn
