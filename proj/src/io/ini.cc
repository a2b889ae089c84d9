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

#include "pdpcrn/io/ini.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pdpcrn/io/errors.h"

namespace pdpcrn {

namespace pt = boost::property_tree;

namespace {

IniConfig FromTree(const pt::ptree& tree) {
  IniConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config: key '" + section + "' must belong to a [section]");
    }
    for (const auto& [key, value] : body) cfg.Set(section + "." + key, value.data());
  }
  return cfg;
}

std::string Trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t");
  const size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  const std::string s = Trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("config: '" + key + "' has invalid value '" + text + "'");
  }
  return v;
}

}  // namespace

IniConfig IniConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

IniConfig IniConfig::Parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return FromTree(tree);
}

void IniConfig::ApplyOverride(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  const std::string key = eq == std::string::npos ? "" : Trim(assignment.substr(0, eq));
  if (key.empty() || key.find('.') == std::string::npos) {
    throw ConfigError("config: override '" + assignment + "' is not of the form section.key=value");
  }
  Set(key, Trim(assignment.substr(eq + 1)));
}

std::string IniConfig::GetString(const std::string& key, const std::string& fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : Trim(it->second);
}

double IniConfig::GetDouble(const std::string& key, double fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseNumber<double>(key, it->second);
}

int64_t IniConfig::GetInt(const std::string& key, int64_t fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseNumber<int64_t>(key, it->second);
}

uint64_t IniConfig::GetUint(const std::string& key, uint64_t fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseNumber<uint64_t>(key, it->second);
}

bool IniConfig::GetBool(const std::string& key, bool fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = Trim(it->second);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<int64_t> IniConfig::GetIntList(const std::string& key,
                                           const std::vector<int64_t>& fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int64_t> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseNumber<int64_t>(key, item));
  return out;
}

std::vector<double> IniConfig::GetDoubleList(const std::string& key, const std::vector<double>& fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseNumber<double>(key, item));
  return out;
}

void IniConfig::RejectUnknown() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (consumed_.count(key)) continue;
    unknown += unknown.empty() ? key : ", " + key;
  }
  if (!unknown.empty()) throw ConfigError("config: unknown keys: " + unknown);
}

std::string FormatIni(const std::map<std::string, std::string>& flat) {
  std::ostringstream os;
  std::string current;
  for (const auto& [key, value] : flat) {
    const size_t dot = key.find('.');
    const std::string section = key.substr(0, dot);
    if (section != current) {
      if (!current.empty()) os << '\n';
      os << '[' << section << "]\n";
      current = section;
    }
    os << key.substr(dot + 1) << " = " << value << '\n';
  }
  return os.str();
}

}  // namespace pdpcrn
