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

#ifndef PDPCRN_IO_INI_H_
#define PDPCRN_IO_INI_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pdpcrn {

// Flat view of an INI file keyed by "section.key". Getters record which keys
// were consumed so that leftovers can be rejected as unknown.
class IniConfig {
 public:
  IniConfig() = default;

  // Throw ConfigError on syntax errors; Load throws IoError when the file is
  // unreadable.
  static IniConfig Load(const std::string& path);
  static IniConfig Parse(const std::string& text);

  // Overrides take the form "section.key=value".
  void ApplyOverride(const std::string& assignment);
  void Set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  std::string GetString(const std::string& key, const std::string& fallback);
  double GetDouble(const std::string& key, double fallback);
  int64_t GetInt(const std::string& key, int64_t fallback);
  uint64_t GetUint(const std::string& key, uint64_t fallback);
  bool GetBool(const std::string& key, bool fallback);
  // Comma-separated integers.
  std::vector<int64_t> GetIntList(const std::string& key, const std::vector<int64_t>& fallback);
  std::vector<double> GetDoubleList(const std::string& key, const std::vector<double>& fallback);

  // Throws ConfigError naming every key that no getter asked for.
  void RejectUnknown() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

// Writes sections in key order; values are emitted verbatim.
std::string FormatIni(const std::map<std::string, std::string>& flat);

}  // namespace pdpcrn

#endif  // PDPCRN_IO_INI_H_
