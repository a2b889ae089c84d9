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

#ifndef PDPCRN_SIGNAL_DATASET_H_
#define PDPCRN_SIGNAL_DATASET_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdpcrn/io/manifest.h"
#include "pdpcrn/io/wav.h"

namespace pdpcrn {

struct DatasetConfig {
  // Empty directories select the synthetic speech and pink noise sources.
  std::string corpus_dir;
  std::string noise_dir;
  int count = 10;
  int num_mics = 16;
  uint64_t seed = 0;
  double utterance_seconds = 3.0;
  // Grid mode cycles rows through every (snr, rt60) cell; otherwise each row
  // draws snr ~ U[-10, 10] dB and rt60 ~ U[0.2, 1.0] s.
  bool grid = true;
  std::vector<double> snrs_db{-10, -5, 0, 5, 10};
  std::vector<double> rt60s{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  // Scales mixture and target together so the mixture peak is 0.9.
  bool peak_normalize = true;
  WavEncoding encoding = WavEncoding::kFloat32;
  // Worker threads; 0 uses DefaultThreadCount().
  int threads = 0;
};

// hardware_concurrency, capped by the PDPCRN_THREADS environment variable.
int DefaultThreadCount();

// Every (snr, rt60) pair, SNR-major.
std::vector<std::pair<double, double>> SceneGrid(const std::vector<double>& snrs,
                                                 const std::vector<double>& rt60s);

// Writes mix/<id>.wav, target/<id>.wav and manifest.jsonl below out_dir.
// Row i is generated from MixSeed(seed, i) alone, so the output does not
// depend on the thread count. Throws IoError when out_dir is unwritable and
// std::invalid_argument on an empty corpus. The returned rows hold paths
// relative to out_dir, exactly as written; ReadManifest resolves them.
std::vector<ManifestRow> SynthesizeDataset(const DatasetConfig& config, const std::string& out_dir);

}  // namespace pdpcrn

#endif  // PDPCRN_SIGNAL_DATASET_H_
