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

#include "pdpcrn/io/manifest.h"

#include <filesystem>
#include <fstream>

#include "pdpcrn/io/errors.h"

namespace pdpcrn {

namespace fs = std::filesystem;

nlohmann::json ManifestRowToJson(const ManifestRow& row) {
  return nlohmann::json{{"id", row.id},         {"mixture_path", row.mixture_path},
                        {"target_path", row.target_path}, {"snr_db", row.snr_db},
                        {"rt60_s", row.rt60_s}, {"seed", row.seed},
                        {"scene", row.scene}};
}

ManifestRow ManifestRowFromJson(const nlohmann::json& j) {
  ManifestRow row;
  row.mixture_path = j.at("mixture_path").get<std::string>();
  row.target_path = j.at("target_path").get<std::string>();
  row.snr_db = j.at("snr_db").get<double>();
  row.rt60_s = j.at("rt60_s").get<double>();
  row.seed = j.at("seed").get<uint64_t>();
  row.id = j.value("id", fs::path(row.mixture_path).stem().string());
  if (j.contains("scene")) row.scene = j.at("scene");
  return row;
}

std::vector<ManifestRow> ReadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  const fs::path base = fs::path(path).parent_path();
  std::vector<ManifestRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ManifestRow row = ManifestRowFromJson(nlohmann::json::parse(line));
      row.mixture_path = (base / row.mixture_path).lexically_normal().string();
      row.target_path = (base / row.target_path).lexically_normal().string();
      rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": malformed manifest row: " + e.what());
    }
  }
  return rows;
}

void WriteManifest(const std::string& path, const std::vector<ManifestRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open manifest '" + path + "' for writing");
  for (const auto& row : rows) out << ManifestRowToJson(row).dump() << '\n';
  if (!out) throw IoError("write failed for manifest '" + path + "'");
}

}  // namespace pdpcrn
