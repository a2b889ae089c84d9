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

// Checkpoint files: "PDPC", u32 format version, u64 structural hash, u64
// length and bytes of a JSON metadata blob, u32 tensor count, then per
// tensor a u32-length-prefixed UTF-8 name, u32 rank, u64 dims and float32
// values. All fields little-endian.

#ifndef PDPCRN_MODELS_CHECKPOINT_H_
#define PDPCRN_MODELS_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "json.hpp"
#include "pdpcrn/models/network.h"

namespace pdpcrn {

inline constexpr uint32_t kCheckpointVersion = 1;

struct CheckpointData {
  uint64_t structural_hash = 0;
  // Holds "model" (the ModelConfig) plus caller-defined entries.
  nlohmann::json meta = nlohmann::json::object();
  NamedTensors<float> tensors;

  // Throws IoError when absent.
  const Tensor<float>& Find(const std::string& name) const;
  bool Contains(const std::string& name) const;
};

// Written to a temporary file and renamed into place. Throws IoError.
void SaveCheckpoint(const std::string& path, const CheckpointData& data);
// Throws IoError for unreadable or malformed files.
CheckpointData LoadCheckpoint(const std::string& path);

// Parameters and buffers of `net` under their own names, with the model
// config stored in meta["model"] and `extra` merged into meta.
template <Real T>
CheckpointData CaptureModel(const Network<T>& net, const nlohmann::json& extra = nlohmann::json::object());

// Copies checkpoint values into the network. Throws ConfigError when the
// structural hash differs or a tensor is missing or misshapen.
template <Real T>
void RestoreModel(const CheckpointData& data, Network<T>& net);

// Builds the network described by meta["model"] and restores it.
template <Real T>
Network<T> LoadModel(const std::string& path);

}  // namespace pdpcrn

#endif  // PDPCRN_MODELS_CHECKPOINT_H_
