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

// Single-file run configuration shared by every subcommand.
//
// Sections and keys, with defaults:
//
//   [run]     seed = 0             root of every random stream
//   [model]   preset = full        full | tiny; the keys below override it
//             variant = pdpcrn     pdpcrn | dpcrn
//             bi_interaction = true
//             mics, encoder_channels, kernels, strides, mixing_blocks,
//             dprnn_hidden, baseline_dprnn_hidden, attention_heads,
//             attention_head_dim, depthwise_kernel, interaction_channels
//             (preset values; extents are written "TxF", e.g. 2x5)
//   [train]   lr = 0.001, plateau_patience = 2, lr_factor = 0.5,
//             epochs = 60, batch_size = 4, segment_seconds = 3,
//             steps_per_epoch = 0, loss = si_sdr
//   [scene]   count = 10, utterance_seconds = 3, grid = true,
//             snrs_db = -10,-5,0,5,10, rt60s = 0.2,...,1.0,
//             corpus_dir = "", noise_dir = "", peak_normalize = true,
//             encoding = float32
//   [split]   period = 10          row i is test when i % period ==
//                                  period - 1, validation when it equals
//                                  period - 2, training otherwise; 0 or 1
//                                  writes no split manifests
//   [eval]    unprocessed = true   include the unprocessed mixture row
//   [profile] seconds = 1

#ifndef PDPCRN_APP_RUN_CONFIG_H_
#define PDPCRN_APP_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>

#include "pdpcrn/io/ini.h"
#include "pdpcrn/models/config.h"
#include "pdpcrn/profile/profile.h"
#include "pdpcrn/signal/dataset.h"
#include "pdpcrn/training/trainer.h"

namespace pdpcrn {

// Stream ids for seeds derived from the root seed.
inline constexpr uint64_t kDatasetStream = 1;
inline constexpr uint64_t kTrainStream = 2;

struct RunConfig {
  uint64_t seed = 0;
  std::string preset = "full";
  ModelConfig model = ModelConfig::Full();
  TrainConfig train;
  DatasetConfig scene;
  int split_period = 10;
  bool eval_unprocessed = true;
  ProfileGeometry profile;

  uint64_t dataset_seed() const;
  uint64_t train_seed() const;
  // Copies with the derived seeds filled in.
  DatasetConfig DatasetForRun() const;
  TrainConfig TrainForRun() const;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

// Consumes every key it understands, then rejects the rest.
RunConfig RunConfigFromIni(IniConfig& ini);
// Flat "section.key" map that RunConfigFromIni reads back to an equal config.
std::map<std::string, std::string> RunConfigToFlat(const RunConfig& config);
std::string RunConfigToIni(const RunConfig& config);

}  // namespace pdpcrn

#endif  // PDPCRN_APP_RUN_CONFIG_H_
