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

#ifndef PDPCRN_IO_MANIFEST_H_
#define PDPCRN_IO_MANIFEST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace pdpcrn {

// One synthesized example. Paths are stored relative to the manifest file
// and resolved against its directory on read.
struct ManifestRow {
  std::string id;
  std::string mixture_path;
  std::string target_path;
  double snr_db = 0.0;
  double rt60_s = 0.0;
  uint64_t seed = 0;
  nlohmann::json scene = nlohmann::json::object();
};

nlohmann::json ManifestRowToJson(const ManifestRow& row);
ManifestRow ManifestRowFromJson(const nlohmann::json& j);

// One JSON object per line. Throws IoError on unreadable files and on
// malformed lines (with the line number).
std::vector<ManifestRow> ReadManifest(const std::string& path);
void WriteManifest(const std::string& path, const std::vector<ManifestRow>& rows);

}  // namespace pdpcrn

#endif  // PDPCRN_IO_MANIFEST_H_
