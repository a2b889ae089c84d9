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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "grad_check.h"
#include "pdpcrn/io/errors.h"
#include "pdpcrn/signal/dataset.h"
#include "pdpcrn/signal/stft.h"
#include "pdpcrn/tensor/ops.h"
#include "pdpcrn/training/adam.h"
#include "pdpcrn/training/loss.h"
#include "pdpcrn/training/scheduler.h"
#include "pdpcrn/training/trainer.h"

namespace pdpcrn {
namespace {

namespace fs = std::filesystem;

TEST_CASE("si-sdr loss of a perfect estimate sits on the bound") {
  Rng rng(1);
  const Tensor<double> t = testing::RandomTensor({2, 4, 6, 9}, rng);
  CHECK(std::abs(SpectralLoss(t, t, LossKind::kSiSdr, 8, 16).item() + 60.0) < 1e-9);
  CHECK(SpectralLoss(t, t, LossKind::kSpectralMse, 8, 16).item() == 0.0);
}

TEST_CASE("loss gradients match finite differences") {
  Rng rng(2);
  const Tensor<double> target = testing::RandomTensor({2, 4, 5, 9}, rng);
  for (LossKind kind : {LossKind::kSiSdr, LossKind::kSpectralMse}) {
    CAPTURE(LossKindName(kind));
    Tensor<double> pred = testing::RandomLeaf({2, 4, 5, 9}, rng);
    CHECK(testing::GradCheck([&] { return SpectralLoss(pred, target, kind, 8, 16); }, {pred}) < 1e-3);
  }
}

TEST_CASE("loss errors") {
  const Tensor<double> a({1, 4, 3, 9}, 1.0), b({1, 4, 4, 9}, 1.0), odd({1, 3, 3, 9}, 1.0);
  CHECK_THROWS_AS(SpectralLoss(a, b, LossKind::kSiSdr, 8, 16), ShapeError);
  CHECK_THROWS_AS(SpectralLoss(odd, odd, LossKind::kSiSdr, 8, 16), ShapeError);
  Tensor<double> silent = a.Detach();
  auto d = silent.mutable_data();
  // Channel 1: real plane 1 and imaginary plane 3.
  for (int64_t i = 27; i < 54; ++i) d[i] = 0.0;
  for (int64_t i = 81; i < 108; ++i) d[i] = 0.0;
  CHECK_THROWS_AS(SpectralLoss(a, silent, LossKind::kSiSdr, 8, 16), std::invalid_argument);
  CHECK_THROWS_AS(SpectralLoss(a, silent, LossKind::kSpectralMse, 8, 16), std::invalid_argument);
  CHECK(ParseLossKind("SI_SDR") == LossKind::kSiSdr);
  CHECK_THROWS_AS(ParseLossKind("l1"), ConfigError);
}

TEST_CASE("adam on w^2 follows the hand-rolled trace") {
  Tensor<double> w({1}, 1.0);
  w.set_requires_grad(true);
  Adam<double> adam({{"w", w}});
  double ref = 1.0, m = 0.0, v = 0.0;
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= 10; ++t) {
    w.mutable_grad()[0] = 2.0 * w.data()[0];
    adam.Step(lr);
    adam.ZeroGrad();
    const double g = 2.0 * ref;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t)), vh = v / (1 - std::pow(b2, t));
    ref -= lr * mh / (std::sqrt(vh) + eps);
    CHECK(std::abs(w.data()[0] - ref) < 1e-12);
  }
  CHECK(adam.steps() == 10);
}

TEST_CASE("adam constant gradient steps by lr") {
  Tensor<double> w({2}, std::vector<double>{0.0, 0.0});
  w.set_requires_grad(true);
  Adam<double> adam({{"w", w}});
  double prev0 = 0.0, prev1 = 0.0;
  for (int t = 0; t < 100; ++t) {
    w.mutable_grad()[0] = 3.0;
    w.mutable_grad()[1] = -0.02;
    adam.Step(1e-2);
    adam.ZeroGrad();
    CHECK(std::abs((prev0 - w.data()[0]) - 1e-2) < 1e-8);
    CHECK(std::abs((w.data()[1] - prev1) - 1e-2) < 1e-8);
    prev0 = w.data()[0];
    prev1 = w.data()[1];
  }
}

TEST_CASE("adam zero gradient and moment decay") {
  Tensor<double> w({3}, 0.5);
  w.set_requires_grad(true);
  Adam<double> adam({{"w", w}});
  adam.Step(0.1);
  for (double x : w.data()) CHECK(x == 0.5);
  w.mutable_grad()[0] = 1.0;
  adam.Step(0.1);
  adam.ZeroGrad();
  const double m1 = adam.ExportMoments()[0].tensor.data()[0];
  const double v1 = adam.ExportMoments()[1].tensor.data()[0];
  adam.Step(0.1);
  CHECK(adam.ExportMoments()[0].tensor.data()[0] == doctest::Approx(0.9 * m1).epsilon(1e-6));
  CHECK(adam.ExportMoments()[1].tensor.data()[0] == doctest::Approx(0.999 * v1).epsilon(1e-6));
}

TEST_CASE("adam rejects non-finite gradients by name") {
  Tensor<double> a({2}, 1.0), b({2}, 1.0);
  a.set_requires_grad(true);
  b.set_requires_grad(true);
  Adam<double> adam({{"layer.a", a}, {"layer.b", b}});
  a.mutable_grad()[0] = 1.0;
  b.mutable_grad()[1] = std::numeric_limits<double>::quiet_NaN();
  try {
    adam.Step(0.1);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("layer.b") != std::string::npos);
  }
  CHECK(a.data()[0] == 1.0);
  CHECK(adam.steps() == 0);
}

std::vector<int> HalvingEpochs(const std::vector<double>& losses) {
  PlateauScheduler s(1e-3);
  std::vector<int> epochs;
  double previous = s.lr();
  for (size_t i = 0; i < losses.size(); ++i) {
    if (s.Observe(losses[i])) epochs.push_back(static_cast<int>(i) + 1);
    CHECK(s.lr() <= previous);
    previous = s.lr();
  }
  return epochs;
}

TEST_CASE("plateau scheduler") {
  CHECK(HalvingEpochs({3.0, 2.9, 2.8}).empty());
  CHECK(HalvingEpochs({3.0, 3.0, 3.0}) == std::vector<int>{3});
  CHECK(HalvingEpochs({3.0, 3.1, 2.9, 2.95, 2.97}) == std::vector<int>{5});
  CHECK(HalvingEpochs({1, 2, 3, 4, 5, 6, 7}) == std::vector<int>{3, 5, 7});
  PlateauScheduler s(1e-3);
  s.Observe(2.0);
  s.Observe(2.5);
  const PlateauScheduler r = PlateauScheduler::FromJson(s.ToJson());
  CHECK(r.lr() == s.lr());
  CHECK(r.best() == s.best());
  CHECK(r.bad_epochs() == 1);
  CHECK_THROWS_AS(PlateauScheduler(0.0), ConfigError);
  CHECK_THROWS_AS(PlateauScheduler(1e-3, 0), ConfigError);
  CHECK_THROWS_AS(PlateauScheduler(1e-3, 2, 1.0), ConfigError);
}

TEST_CASE("train config json") {
  TrainConfig c;
  c.lr = 2e-3;
  c.loss_kind = LossKind::kSpectralMse;
  c.steps_per_epoch = 7;
  const TrainConfig d = TrainConfigFromJson(TrainConfigToJson(c));
  CHECK(TrainConfigToJson(d) == TrainConfigToJson(c));
  CHECK_THROWS_AS(TrainConfigFromJson({{"momentum", 0.9}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromJson({{"lr", -1.0}}), ConfigError);
}

// Two-mic utterances of one second shared by the trainer tests.
const std::vector<TrainingExample>& Examples() {
  static const std::vector<TrainingExample> examples = [] {
    const fs::path root = fs::temp_directory_path() / "pdpcrn_training_data";
    fs::remove_all(root);
    DatasetConfig cfg;
    cfg.count = 3;
    cfg.num_mics = 2;
    cfg.seed = 21;
    cfg.utterance_seconds = 1.0;
    cfg.snrs_db = {0.0};
    cfg.rt60s = {0.3};
    SynthesizeDataset(cfg, root.string());
    return LoadExamples(ReadManifest((root / "manifest.jsonl").string()));
  }();
  return examples;
}

TrainConfig QuickTrain() {
  TrainConfig c;
  c.epochs = 2;
  c.batch_size = 2;
  c.segment_seconds = 0.5;
  c.steps_per_epoch = 2;
  c.seed = 5;
  return c;
}

TEST_CASE("tiny models overfit one batch") {
  for (Variant variant : {Variant::kPdpcrn, Variant::kDpcrn}) {
    CAPTURE(VariantName(variant));
    ModelConfig model = ModelConfig::Tiny();
    model.variant = variant;
    const auto& ex = Examples();
    Trainer trainer(model, QuickTrain(), {ex[0], ex[1]}, {ex[2]},
                    (fs::temp_directory_path() / "pdpcrn_overfit_batch").string());
    StftConfig stft;
    stft.pad_edges = true;
    const Tensor<float> mix = Concat<float>({SpectrogramToTensor<float>(Stft(ex[0].mixture, stft)),
                                             SpectrogramToTensor<float>(Stft(ex[1].mixture, stft))}, 0);
    const Tensor<float> tgt = Concat<float>({SpectrogramToTensor<float>(Stft(ex[0].target, stft)),
                                             SpectrogramToTensor<float>(Stft(ex[1].target, stft))}, 0);
    std::vector<double> losses;
    for (int step = 0; step < 50; ++step) losses.push_back(trainer.TrainStep(mix, tgt, "fixed"));
    MESSAGE(VariantName(variant) << " loss " << losses.front() << " -> " << losses.back());
    CHECK(losses.back() < losses.front());
    double head = 0.0, tail = 0.0;
    for (int i = 0; i < 10; ++i) head += losses[i], tail += losses[40 + i];
    CHECK(tail < head);
  }
}

TEST_CASE("training is deterministic and resumes bitwise") {
  const auto& ex = Examples();
  const ModelConfig model = ModelConfig::Tiny();
  const fs::path root = fs::temp_directory_path() / "pdpcrn_resume";
  fs::remove_all(root);
  auto fresh = [&](const std::string& dir, int epochs) {
    TrainConfig c = QuickTrain();
    c.epochs = epochs;
    return Trainer(model, c, {ex[0], ex[1], ex[2]}, {ex[2]}, (root / dir).string());
  };
  Trainer a = fresh("a", 2);
  a.Run();
  Trainer b = fresh("b", 2);
  b.Run();
  REQUIRE(a.history().size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(a.history()[i].train_loss == b.history()[i].train_loss);
    CHECK(a.history()[i].val_loss == b.history()[i].val_loss);
  }

  Trainer first = fresh("c", 1);
  first.Run();
  Trainer resumed = fresh("d", 2);
  resumed.Resume(first.last_checkpoint());
  CHECK(resumed.completed_epochs() == 1);
  resumed.Run();
  CHECK(resumed.history()[1].train_loss == a.history()[1].train_loss);
  CHECK(resumed.history()[1].val_loss == a.history()[1].val_loss);
  const auto pa = a.network().Parameters(), pr = resumed.network().Parameters();
  bool identical = true;
  for (size_t i = 0; i < pa.size(); ++i) {
    identical = identical && std::equal(pa[i].tensor.data().begin(), pa[i].tensor.data().end(),
                                        pr[i].tensor.data().begin());
  }
  CHECK(identical);

  std::ifstream csv(root / "a" / "loss.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "epoch,train_loss,val_loss,lr");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);
  CHECK(fs::exists(root / "a" / "best.ckpt"));
  CHECK(fs::exists(root / "a" / "last.ckpt"));

  TrainConfig other = QuickTrain();
  other.lr = 5e-4;
  Trainer mismatched(model, other, {ex[0]}, {ex[2]}, (root / "e").string());
  CHECK_THROWS_AS(mismatched.Resume(first.last_checkpoint()), ConfigError);
}

TEST_CASE("non-finite loss aborts naming the batch") {
  auto ex = Examples();
  for (double& v : ex[1].mixture.channels[0]) v = std::numeric_limits<double>::quiet_NaN();
  TrainConfig c = QuickTrain();
  c.batch_size = 1;
  c.steps_per_epoch = 3;
  Trainer trainer(ModelConfig::Tiny(), c, {ex[0], ex[1], ex[2]}, {ex[2]},
                  (fs::temp_directory_path() / "pdpcrn_nan").string());
  try {
    trainer.RunEpoch();
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find(ex[1].id) != std::string::npos);
  }
}

TEST_CASE("trainer input validation") {
  const auto& ex = Examples();
  ModelConfig four = ModelConfig::Tiny();
  four.mics = 4;
  const std::string dir = (fs::temp_directory_path() / "pdpcrn_bad").string();
  CHECK_THROWS_AS(Trainer(four, QuickTrain(), {ex[0]}, {ex[1]}, dir), ConfigError);
  CHECK_THROWS_AS(Trainer(ModelConfig::Tiny(), QuickTrain(), {}, {ex[1]}, dir), ConfigError);
}

}  // namespace
}  // namespace pdpcrn
