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

#include "pdpcrn/training/trainer.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>

#include "pdpcrn/io/errors.h"
#include "pdpcrn/models/checkpoint.h"
#include "pdpcrn/signal/stft.h"
#include "pdpcrn/tensor/ops.h"

namespace pdpcrn {

namespace {

constexpr uint64_t kDataStream = 0x64617461;

StftConfig TrainingStft() {
  StftConfig cfg;
  cfg.pad_edges = true;
  return cfg;
}

Tensor<float> SpectrumOf(const MultichannelWave& wave) {
  return SpectrogramToTensor<float>(Stft(wave, TrainingStft()));
}

MultichannelWave Crop(const MultichannelWave& wave, int64_t offset, int64_t length) {
  MultichannelWave out;
  out.sample_rate = wave.sample_rate;
  for (const auto& ch : wave.channels) {
    std::vector<double> seg(static_cast<size_t>(length), 0.0);
    const int64_t n = std::min<int64_t>(length, static_cast<int64_t>(ch.size()) - offset);
    std::copy(ch.begin() + offset, ch.begin() + offset + n, seg.begin());
    out.channels.push_back(std::move(seg));
  }
  return out;
}

void CheckExamples(const std::vector<TrainingExample>& set, const char* which, int64_t mics) {
  if (set.empty()) throw ConfigError(std::string("trainer: the ") + which + " set is empty");
  for (const auto& ex : set) {
    if (static_cast<int64_t>(ex.mixture.channels.size()) != mics ||
        ex.target.channels.size() != ex.mixture.channels.size()) {
      throw ConfigError("trainer: example '" + ex.id + "' has " + std::to_string(ex.mixture.channels.size()) +
                        " mixture and " + std::to_string(ex.target.channels.size()) +
                        " target channels, model expects " + std::to_string(mics));
    }
    if (ex.mixture.channels[0].size() != ex.target.channels[0].size()) {
      throw ConfigError("trainer: example '" + ex.id + "' has mixture and target of different lengths");
    }
  }
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (plateau_patience < 1) throw ConfigError("train.plateau_patience must be at least 1");
  if (!(lr_factor > 0.0 && lr_factor < 1.0)) throw ConfigError("train.lr_factor must lie in (0, 1)");
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (!(segment_seconds * kSampleRate >= StftConfig{}.window)) {
    throw ConfigError("train.segment_seconds must cover at least one STFT window");
  }
  if (steps_per_epoch < 0) throw ConfigError("train.steps_per_epoch must be non-negative");
}

nlohmann::json TrainConfigToJson(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"plateau_patience", c.plateau_patience},
          {"lr_factor", c.lr_factor},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"segment_seconds", c.segment_seconds},
          {"steps_per_epoch", c.steps_per_epoch},
          {"seed", c.seed},
          {"loss", LossKindName(c.loss_kind)}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j) {
  TrainConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "lr") c.lr = value.get<double>();
    else if (key == "plateau_patience") c.plateau_patience = value.get<int>();
    else if (key == "lr_factor") c.lr_factor = value.get<double>();
    else if (key == "epochs") c.epochs = value.get<int>();
    else if (key == "batch_size") c.batch_size = value.get<int>();
    else if (key == "segment_seconds") c.segment_seconds = value.get<double>();
    else if (key == "steps_per_epoch") c.steps_per_epoch = value.get<int>();
    else if (key == "seed") c.seed = value.get<uint64_t>();
    else if (key == "loss") c.loss_kind = ParseLossKind(value.get<std::string>());
    else throw ConfigError("unknown train config key '" + key + "'");
  }
  c.Validate();
  return c;
}

std::vector<TrainingExample> LoadExamples(const std::vector<ManifestRow>& rows) {
  std::vector<TrainingExample> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back({row.id, ReadWav(row.mixture_path), ReadWav(row.target_path)});
  return out;
}

Trainer::Trainer(const ModelConfig& model, const TrainConfig& train, std::vector<TrainingExample> train_set,
                 std::vector<TrainingExample> val_set, std::string out_dir)
    : model_config_((model.Validate(), model)),
      config_((train.Validate(), train)),
      train_set_(std::move(train_set)),
      val_set_(std::move(val_set)),
      out_dir_(std::move(out_dir)),
      net_(model_config_, config_.seed),
      adam_(net_.Parameters()),
      scheduler_(config_.lr, config_.plateau_patience, config_.lr_factor),
      rng_(MixSeed(config_.seed, kDataStream)),
      best_val_(std::numeric_limits<double>::infinity()) {
  CheckExamples(train_set_, "training", model_config_.mics);
  CheckExamples(val_set_, "validation", model_config_.mics);
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw IoError("trainer: cannot create '" + out_dir_ + "': " + ec.message());
}

std::vector<size_t> Trainer::NextBatch() {
  if (order_.empty()) {
    order_.resize(train_set_.size());
    for (size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    for (size_t i = order_.size() - 1; i > 0; --i) std::swap(order_[i], order_[rng_.Below(i + 1)]);
  }
  const size_t take = std::min<size_t>(config_.batch_size, order_.size());
  std::vector<size_t> batch(order_.begin(), order_.begin() + take);
  order_.erase(order_.begin(), order_.begin() + take);
  return batch;
}

std::pair<Tensor<float>, Tensor<float>> Trainer::MakeBatch(const std::vector<size_t>& indices) {
  const int64_t segment = std::llround(config_.segment_seconds * kSampleRate);
  std::vector<Tensor<float>> mixtures, targets;
  for (size_t i : indices) {
    const TrainingExample& ex = train_set_[i];
    const int64_t length = static_cast<int64_t>(ex.mixture.channels[0].size());
    const int64_t offset = length > segment ? static_cast<int64_t>(rng_.Below(length - segment + 1)) : 0;
    mixtures.push_back(SpectrumOf(Crop(ex.mixture, offset, segment)));
    targets.push_back(SpectrumOf(Crop(ex.target, offset, segment)));
  }
  return {Concat(mixtures, 0), Concat(targets, 0)};
}

double Trainer::TrainStep(const Tensor<float>& mixture, const Tensor<float>& target, const std::string& batch_id) {
  const StftConfig stft = TrainingStft();
  GradSession<float> session;
  const Tensor<float> loss =
      SpectralLoss(net_.Forward(mixture, true), target, config_.loss_kind, stft.hop, stft.fft_size);
  const double value = loss.item();
  if (!std::isfinite(value)) throw NumericError("non-finite training loss in " + batch_id);
  session.Backward(loss);
  adam_.Step(scheduler_.lr());
  adam_.ZeroGrad();
  return value;
}

double Trainer::ValidationLoss() {
  const StftConfig stft = TrainingStft();
  double total = 0.0;
  for (const auto& ex : val_set_) {
    const double value = SpectralLoss(net_.Forward(SpectrumOf(ex.mixture), false), SpectrumOf(ex.target),
                                      config_.loss_kind, stft.hop, stft.fft_size)
                             .item();
    if (!std::isfinite(value)) throw NumericError("non-finite validation loss for '" + ex.id + "'");
    total += value;
  }
  return total / static_cast<double>(val_set_.size());
}

EpochRecord Trainer::RunEpoch() {
  EpochRecord rec;
  rec.epoch = completed_epochs() + 1;
  rec.lr = scheduler_.lr();
  const size_t passes = (train_set_.size() + config_.batch_size - 1) / config_.batch_size;
  const int steps = config_.steps_per_epoch > 0 ? config_.steps_per_epoch : static_cast<int>(passes);
  double total = 0.0;
  for (int s = 0; s < steps; ++s) {
    const std::vector<size_t> indices = NextBatch();
    std::string id = "epoch " + std::to_string(rec.epoch) + " batch " + std::to_string(s) + " (";
    for (size_t k = 0; k < indices.size(); ++k) id += (k ? "," : "") + train_set_[indices[k]].id;
    id += ")";
    const auto [mixture, target] = MakeBatch(indices);
    total += TrainStep(mixture, target, id);
  }
  rec.train_loss = total / steps;
  rec.val_loss = ValidationLoss();
  scheduler_.Observe(rec.val_loss);
  history_.push_back(rec);
  WriteLossCsv();
  if (rec.val_loss < best_val_) {
    best_val_ = rec.val_loss;
    SaveState(best_checkpoint());
  }
  SaveState(last_checkpoint());
  return rec;
}

void Trainer::Run(const std::function<void(const EpochRecord&)>& on_epoch) {
  while (completed_epochs() < config_.epochs) {
    const EpochRecord rec = RunEpoch();
    if (on_epoch) on_epoch(rec);
  }
}

void Trainer::SaveState(const std::string& path) const {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& r : history_) {
    history.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}, {"lr", r.lr}});
  }
  nlohmann::json train = {{"config", TrainConfigToJson(config_)},
                          {"adam_steps", adam_.steps()},
                          {"scheduler", scheduler_.ToJson()},
                          {"rng", rng_.State()},
                          {"order", order_},
                          {"history", history},
                          {"best_val", best_val_}};
  CheckpointData data = CaptureModel(net_, {{"train", train}});
  for (auto& t : adam_.ExportMoments()) data.tensors.push_back(std::move(t));
  SaveCheckpoint(path, data);
}

void Trainer::Resume(const std::string& checkpoint_path) {
  const CheckpointData data = LoadCheckpoint(checkpoint_path);
  if (!data.meta.contains("train")) throw ConfigError(checkpoint_path + ": not a training checkpoint");
  const nlohmann::json& train = data.meta["train"];
  nlohmann::json saved = train.at("config"), current = TrainConfigToJson(config_);
  saved.erase("epochs");
  current.erase("epochs");
  if (saved != current) {
    throw ConfigError(checkpoint_path + ": training config differs from the checkpoint (" + saved.dump() + ")");
  }
  RestoreModel(data, net_);
  adam_.ImportMoments(data.tensors, train.at("adam_steps").get<int64_t>());
  scheduler_ = PlateauScheduler::FromJson(train.at("scheduler"));
  rng_.Restore(train.at("rng").get<std::string>());
  order_ = train.at("order").get<std::vector<size_t>>();
  history_.clear();
  for (const auto& r : train.at("history")) {
    history_.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<double>(), r.at("val_loss").get<double>(),
                        r.at("lr").get<double>()});
  }
  best_val_ = train.at("best_val").get<double>();
}

void Trainer::WriteLossCsv() const {
  const std::string path = out_dir_ + "/loss.csv";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,train_loss,val_loss,lr\n" << std::setprecision(17);
  for (const auto& r : history_) out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.lr << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<EpochRecord> TrainFromManifests(const ModelConfig& model, const TrainConfig& train,
                                            const std::vector<ManifestRow>& train_rows,
                                            const std::vector<ManifestRow>& val_rows, const std::string& out_dir) {
  Trainer trainer(model, train, LoadExamples(train_rows), LoadExamples(val_rows), out_dir);
  trainer.Run();
  return trainer.history();
}

}  // namespace pdpcrn
