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

// Epoch loop over in-memory utterances with plateau learning-rate decay,
// loss-curve logging and resumable checkpoints.

#ifndef PDPCRN_TRAINING_TRAINER_H_
#define PDPCRN_TRAINING_TRAINER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdpcrn/io/manifest.h"
#include "pdpcrn/io/wav.h"
#include "pdpcrn/models/network.h"
#include "pdpcrn/tensor/random.h"
#include "pdpcrn/training/adam.h"
#include "pdpcrn/training/loss.h"
#include "pdpcrn/training/scheduler.h"

namespace pdpcrn {

struct TrainConfig {
  double lr = 1e-3;
  int plateau_patience = 2;
  double lr_factor = 0.5;
  int epochs = 60;
  int batch_size = 4;
  // Training crops; shorter utterances are zero-padded to this length.
  double segment_seconds = 3.0;
  // Batches per epoch; 0 means one pass over the training set. Larger values
  // continue through freshly shuffled passes.
  int steps_per_epoch = 0;
  uint64_t seed = 0;
  LossKind loss_kind = LossKind::kSiSdr;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

nlohmann::json TrainConfigToJson(const TrainConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig TrainConfigFromJson(const nlohmann::json& j);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  // Rate used during this epoch.
  double lr = 0.0;
};

struct TrainingExample {
  std::string id;
  MultichannelWave mixture;
  MultichannelWave target;
};

// Reads every mixture and target of the manifest. Throws IoError.
std::vector<TrainingExample> LoadExamples(const std::vector<ManifestRow>& rows);

// Single-threaded float32 trainer. Writes <out_dir>/loss.csv,
// <out_dir>/last.ckpt and <out_dir>/best.ckpt after every epoch.
class Trainer {
 public:
  // Throws ConfigError for invalid configs, empty example sets or examples
  // whose channel count differs from the model.
  Trainer(const ModelConfig& model, const TrainConfig& train, std::vector<TrainingExample> train_set,
          std::vector<TrainingExample> val_set, std::string out_dir);

  // Restores weights, optimizer moments, scheduler, data-order RNG and loss
  // history from a checkpoint written by a trainer with the same configs.
  void Resume(const std::string& checkpoint_path);

  // Trains until `epochs` epochs are complete.
  void Run(const std::function<void(const EpochRecord&)>& on_epoch = {});
  EpochRecord RunEpoch();

  // One optimizer step on a [B, 2M, T, F] batch; returns the loss before
  // the update. Throws NumericError naming `batch_id` on a non-finite loss.
  double TrainStep(const Tensor<float>& mixture, const Tensor<float>& target, const std::string& batch_id);
  // Mean eval-mode loss over the full validation utterances.
  double ValidationLoss();

  Network<float>& network() { return net_; }
  const std::vector<EpochRecord>& history() const { return history_; }
  int completed_epochs() const { return static_cast<int>(history_.size()); }
  double lr() const { return scheduler_.lr(); }
  std::string last_checkpoint() const { return out_dir_ + "/last.ckpt"; }
  std::string best_checkpoint() const { return out_dir_ + "/best.ckpt"; }

 private:
  void SaveState(const std::string& path) const;
  void WriteLossCsv() const;
  // Random crops of the given examples stacked along the batch axis.
  std::pair<Tensor<float>, Tensor<float>> MakeBatch(const std::vector<size_t>& indices);
  std::vector<size_t> NextBatch();

  ModelConfig model_config_;
  TrainConfig config_;
  std::vector<TrainingExample> train_set_;
  std::vector<TrainingExample> val_set_;
  std::string out_dir_;
  Network<float> net_;
  Adam<float> adam_;
  PlateauScheduler scheduler_;
  Rng rng_;
  // Remaining indices of the current shuffled pass.
  std::vector<size_t> order_;
  std::vector<EpochRecord> history_;
  double best_val_;
};

// Loads both manifests, trains, and returns the loss history.
std::vector<EpochRecord> TrainFromManifests(const ModelConfig& model, const TrainConfig& train,
                                            const std::vector<ManifestRow>& train_rows,
                                            const std::vector<ManifestRow>& val_rows, const std::string& out_dir);

}  // namespace pdpcrn

#endif  // PDPCRN_TRAINING_TRAINER_H_
