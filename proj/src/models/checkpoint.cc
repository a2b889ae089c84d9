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

#include "pdpcrn/models/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdpcrn/io/errors.h"

namespace pdpcrn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'P', 'D', 'P', 'C'};

template <typename U>
void Put(std::string& buf, U v) {
  char bytes[sizeof(U)];
  std::memcpy(bytes, &v, sizeof(U));
  buf.append(bytes, sizeof(U));
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  template <typename U>
  U Get(const char* what) {
    U v;
    std::memcpy(&v, Take(sizeof(U), what), sizeof(U));
    return v;
  }

  const char* Take(size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw IoError(origin_ + ": truncated checkpoint while reading " + what);
    }
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  const std::string& origin_;
  size_t pos_ = 0;
};

}  // namespace

const Tensor<float>& CheckpointData::Find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.tensor;
  }
  throw IoError("checkpoint: missing tensor '" + name + "'");
}

bool CheckpointData::Contains(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return true;
  }
  return false;
}

void SaveCheckpoint(const std::string& path, const CheckpointData& data) {
  std::string buf(kMagic, 4);
  Put<uint32_t>(buf, kCheckpointVersion);
  Put<uint64_t>(buf, data.structural_hash);
  const std::string meta = data.meta.dump();
  Put<uint64_t>(buf, meta.size());
  buf += meta;
  Put<uint32_t>(buf, static_cast<uint32_t>(data.tensors.size()));
  for (const auto& t : data.tensors) {
    Put<uint32_t>(buf, static_cast<uint32_t>(t.name.size()));
    buf += t.name;
    Put<uint32_t>(buf, static_cast<uint32_t>(t.tensor.rank()));
    for (int64_t d : t.tensor.shape()) Put<uint64_t>(buf, static_cast<uint64_t>(d));
    buf.append(reinterpret_cast<const char*>(t.tensor.raw()), t.tensor.numel() * sizeof(float));
  }
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open checkpoint for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError(path + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path + ": cannot move checkpoint into place: " + ec.message());
}

CheckpointData LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open checkpoint");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  Reader r(bytes, path);
  if (std::memcmp(r.Take(4, "magic"), kMagic, 4) != 0) throw IoError(path + ": not a checkpoint (bad magic)");
  const uint32_t version = r.Get<uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  CheckpointData data;
  data.structural_hash = r.Get<uint64_t>("hash");
  const uint64_t meta_len = r.Get<uint64_t>("metadata length");
  const char* meta = r.Take(meta_len, "metadata");
  try {
    data.meta = nlohmann::json::parse(meta, meta + meta_len);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": malformed checkpoint metadata: " + e.what());
  }
  const uint32_t count = r.Get<uint32_t>("tensor count");
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.Get<uint32_t>("tensor name length");
    std::string name(r.Take(name_len, "tensor name"), name_len);
    const uint32_t rank = r.Get<uint32_t>("tensor rank");
    if (rank > 8) throw IoError(path + ": tensor '" + name + "' has implausible rank");
    Shape shape(rank);
    uint64_t n = 1;
    for (auto& d : shape) {
      const uint64_t v = r.Get<uint64_t>("tensor dims");
      if (v > (uint64_t{1} << 32)) throw IoError(path + ": tensor '" + name + "' has implausible size");
      d = static_cast<int64_t>(v);
      n *= v;
    }
    std::vector<float> values(n);
    std::memcpy(values.data(), r.Take(n * sizeof(float), "tensor values"), n * sizeof(float));
    data.tensors.push_back({std::move(name), Tensor<float>(std::move(shape), std::move(values))});
  }
  if (!r.AtEnd()) throw IoError(path + ": trailing bytes after checkpoint tensors");
  return data;
}

template <Real T>
CheckpointData CaptureModel(const Network<T>& net, const nlohmann::json& extra) {
  CheckpointData data;
  data.structural_hash = net.StructuralHash();
  data.meta = extra.is_object() ? extra : nlohmann::json::object();
  data.meta["model"] = ModelConfigToJson(net.config());
  for (const auto& t : net.Parameters()) data.tensors.push_back({t.name, t.tensor.template Cast<float>()});
  for (const auto& t : net.Buffers()) data.tensors.push_back({t.name, t.tensor.template Cast<float>()});
  return data;
}

template <Real T>
void RestoreModel(const CheckpointData& data, Network<T>& net) {
  if (data.structural_hash != net.StructuralHash()) {
    throw ConfigError("checkpoint structural hash does not match the configured model");
  }
  auto restore = [&data](const NamedTensors<T>& targets) {
    for (const auto& t : targets) {
      if (!data.Contains(t.name)) throw ConfigError("checkpoint: missing tensor '" + t.name + "'");
      const Tensor<float>& src = data.Find(t.name);
      if (src.shape() != t.tensor.shape()) {
        throw ConfigError("checkpoint: tensor '" + t.name + "' has shape " + ShapeToString(src.shape()) +
                          ", model expects " + ShapeToString(t.tensor.shape()));
      }
      Tensor<T> dst = t.tensor;
      std::copy(src.data().begin(), src.data().end(), dst.mutable_data().begin());
    }
  };
  restore(net.Parameters());
  restore(net.Buffers());
}

template <Real T>
Network<T> LoadModel(const std::string& path) {
  const CheckpointData data = LoadCheckpoint(path);
  if (!data.meta.contains("model")) throw IoError(path + ": checkpoint has no model config");
  Network<T> net(ModelConfigFromJson(data.meta["model"]));
  RestoreModel(data, net);
  return net;
}

#define PDPCRN_INSTANTIATE(T)                                                             \
  template CheckpointData CaptureModel<T>(const Network<T>&, const nlohmann::json&);    \
  template void RestoreModel<T>(const CheckpointData&, Network<T>&);                     \
  template Network<T> LoadModel<T>(const std::string&);

PDPCRN_INSTANTIATE(float)
PDPCRN_INSTANTIATE(double)
#undef PDPCRN_INSTANTIATE

}  // namespace pdpcrn
