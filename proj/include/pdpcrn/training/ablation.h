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

// Paired training runs that differ only in the bi-directional interaction
// switch, evaluated on a common manifest.

#ifndef PDPCRN_TRAINING_ABLATION_H_
#define PDPCRN_TRAINING_ABLATION_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "pdpcrn/metrics/evaluate.h"
#include "pdpcrn/training/trainer.h"

namespace pdpcrn {

inline constexpr char kUnprocessedMethod[] = "Unprocessed";

// Scores the eval-mode network stored in `checkpoint` on `rows`.
MetricReport EvaluateCheckpoint(const std::string& method, const std::string& checkpoint,
                                const std::vector<ManifestRow>& rows);

struct AblationArm {
  std::string method;
  ModelConfig model;
  int64_t params = 0;
  std::vector<EpochRecord> history;
  std::string best_checkpoint;
  MetricReport report;
};

struct AblationResult {
  MetricReport unprocessed;
  std::vector<AblationArm> arms;
  nlohmann::json report;
  std::string text;
};

// Trains `model` with bi_interaction on and then off from the same seed,
// evaluates the best checkpoint of each plus the unprocessed mixtures on
// eval_rows, and writes <out_dir>/{pdpcrn,pdpcrn_wo_bi}/ training outputs,
// per-utterance metric CSVs, ablation.json and ablation.txt. Throws
// ConfigError when the model is not a PDPCRN.
AblationResult RunAblation(const ModelConfig& model, const TrainConfig& train,
                           const std::vector<ManifestRow>& train_rows, const std::vector<ManifestRow>& val_rows,
                           const std::vector<ManifestRow>& eval_rows, const std::string& out_dir);

// Paired report of already evaluated arms.
nlohmann::json AblationJson(const MetricReport& unprocessed, const std::vector<AblationArm>& arms);
std::string FormatAblation(const MetricReport& unprocessed, const std::vector<AblationArm>& arms);

}  // namespace pdpcrn

#endif  // PDPCRN_TRAINING_ABLATION_H_
