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

#include "pdpcrn/tensor/tensor_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace pdpcrn {

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};

void WriteU32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t ReadU32(std::istream& is) {
  uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4)) throw std::runtime_error("tensor dump: truncated header");
  return v;
}

}  // namespace

void WriteTensorDump(std::ostream& os, const Tensor<double>& t) {
  os.write(kMagic, 4);
  WriteU32(os, static_cast<uint32_t>(t.rank()));
  for (int64_t d : t.shape()) WriteU32(os, static_cast<uint32_t>(d));
  os.write(reinterpret_cast<const char*>(t.raw()), static_cast<std::streamsize>(t.numel() * 8));
}

Tensor<double> ReadTensorDump(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("tensor dump: bad magic");
  }
  const uint32_t rank = ReadU32(is);
  Shape shape(rank);
  for (uint32_t i = 0; i < rank; ++i) shape[i] = ReadU32(is);
  std::vector<double> values(static_cast<size_t>(NumElements(shape)));
  if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * 8))) {
    throw std::runtime_error("tensor dump: truncated payload");
  }
  return Tensor<double>(std::move(shape), std::move(values));
}

void SaveTensorDump(const std::string& path, const Tensor<double>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  WriteTensorDump(os, t);
}

Tensor<double> LoadTensorDump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return ReadTensorDump(is);
}

}  // namespace pdpcrn
