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

#include "pdpcrn/signal/dataset.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "pdpcrn/signal/scene.h"
#include "pdpcrn/signal/sources.h"
#include "pdpcrn/tensor/random.h"

namespace pdpcrn {

namespace fs = std::filesystem;

int DefaultThreadCount() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PDPCRN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

std::vector<std::pair<double, double>> SceneGrid(const std::vector<double>& snrs,
                                                 const std::vector<double>& rt60s) {
  std::vector<std::pair<double, double>> cells;
  for (double s : snrs)
    for (double r : rt60s) cells.emplace_back(s, r);
  return cells;
}

std::vector<ManifestRow> SynthesizeDataset(const DatasetConfig& config, const std::string& out_dir) {
  if (config.count < 0) throw std::invalid_argument("synth: count must be non-negative");
  if (config.utterance_seconds <= 0.0) throw std::invalid_argument("synth: utterance length must be positive");
  const auto cells = SceneGrid(config.snrs_db, config.rt60s);
  if (config.grid && cells.empty()) throw std::invalid_argument("synth: empty SNR/RT60 grid");
  std::vector<std::string> speech_files, noise_files;
  if (!config.corpus_dir.empty()) speech_files = ListWavFiles(config.corpus_dir);
  if (!config.noise_dir.empty()) noise_files = ListWavFiles(config.noise_dir);

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "mix", ec);
  fs::create_directories(fs::path(out_dir) / "target", ec);
  if (ec || !fs::is_directory(fs::path(out_dir) / "mix")) {
    throw IoError("cannot create output directory '" + out_dir + "'");
  }

  const int64_t samples = std::llround(config.utterance_seconds * kSampleRate);
  std::vector<ManifestRow> rows(config.count);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int i = next++; i < config.count; i = next++) {
      try {
        const uint64_t row_seed = MixSeed(config.seed, static_cast<uint64_t>(i));
        Rng rng(row_seed);
        double snr, rt60;
        if (config.grid) {
          std::tie(snr, rt60) = cells[i % cells.size()];
        } else {
          snr = rng.Uniform(-10.0, 10.0);
          rt60 = rng.Uniform(0.2, 1.0);
        }
        SceneConfig scene = RandomScene(rng, config.num_mics, rt60, snr);
        scene.seed = row_seed;
        const std::vector<double> speech =
            speech_files.empty() ? SyntheticSpeech(samples, rng)
                                 : LoadSegment(speech_files[rng.Below(speech_files.size())], samples, rng);
        const std::vector<double> noise =
            noise_files.empty() ? PinkNoise(samples, rng)
                                : LoadSegment(noise_files[rng.Below(noise_files.size())], samples, rng);
        MixResult mix = MixScene(speech, noise, scene);
        if (config.peak_normalize) {
          double peak = 0.0;
          for (const auto& ch : mix.mixture.channels)
            for (double v : ch) peak = std::max(peak, std::abs(v));
          const double g = peak > 0.0 ? 0.9 / peak : 1.0;
          for (auto* w : {&mix.mixture, &mix.target})
            for (auto& ch : w->channels)
              for (double& v : ch) v *= g;
        }
        char id[32];
        std::snprintf(id, sizeof(id), "%06d", i);
        ManifestRow& row = rows[i];
        row.id = id;
        row.mixture_path = std::string("mix/") + id + ".wav";
        row.target_path = std::string("target/") + id + ".wav";
        row.snr_db = snr;
        row.rt60_s = rt60;
        row.seed = row_seed;
        row.scene = SceneToJson(scene);
        WriteWav((fs::path(out_dir) / row.mixture_path).string(), mix.mixture, config.encoding);
        WriteWav((fs::path(out_dir) / row.target_path).string(), mix.target, config.encoding);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = config.count;
      }
    }
  };
  const int threads = std::max(1, std::min(config.threads > 0 ? config.threads : DefaultThreadCount(),
                                           std::max(1, config.count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  WriteManifest((fs::path(out_dir) / "manifest.jsonl").string(), rows);
  return rows;
}

}  // namespace pdpcrn
