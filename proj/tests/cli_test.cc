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
#include <set>
#include <sstream>

#include "doctest.h"
#include "pdpcrn/app/cli.h"
#include "pdpcrn/app/run_config.h"
#include "pdpcrn/io/errors.h"
#include "pdpcrn/io/manifest.h"
#include "pdpcrn/io/wav.h"

namespace pdpcrn {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult Run(std::vector<std::string> args) {
  args.insert(args.begin(), "pdpcrn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path FreshDir(const std::string& name) {
  const fs::path root = fs::temp_directory_path() / name;
  fs::remove_all(root);
  fs::create_directories(root);
  return root;
}

std::set<std::string> Tree(const fs::path& root) {
  std::set<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    files.insert(fs::relative(e.path(), root).string());
  }
  return files;
}

const std::vector<std::string> kTinyTrain{"--set", "model.preset=tiny", "--set", "train.epochs=1",
                                          "--set", "train.batch_size=2", "--set", "train.segment_seconds=0.5",
                                          "--set", "train.steps_per_epoch=1"};

std::vector<std::string> Cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST_CASE("run config defaults, presets and round trip") {
  IniConfig empty;
  const RunConfig d = RunConfigFromIni(empty);
  CHECK(d.model.mics == 16);
  CHECK(d.model.encoder_channels == std::vector<int64_t>{32, 32, 32, 64, 80});
  CHECK(d.train.lr == 1e-3);
  CHECK(d.train.epochs == 60);
  CHECK(d.scene.count == 10);
  CHECK(d.split_period == 10);
  CHECK(d.profile.seconds == 1.0);

  IniConfig ini = IniConfig::Parse(
      "[run]\nseed = 42\n[model]\npreset = tiny\nvariant = dpcrn\nkernels = 2x5,2x3,2x3,2x3,2x3\n"
      "[train]\nlr = 0.003\nloss = spectral_mse\n[scene]\nsnrs_db = -2.5,7\nencoding = pcm16\n");
  const RunConfig c = RunConfigFromIni(ini);
  CHECK(c.seed == 42);
  CHECK(c.model.mics == 2);
  CHECK(c.model.variant == Variant::kDpcrn);
  CHECK(c.train.loss_kind == LossKind::kSpectralMse);
  CHECK(c.scene.snrs_db == std::vector<double>{-2.5, 7});
  CHECK(c.DatasetForRun().seed == MixSeed(42, kDatasetStream));
  CHECK(c.TrainForRun().seed == MixSeed(42, kTrainStream));
  CHECK(c.DatasetForRun().seed != c.TrainForRun().seed);

  IniConfig echoed = IniConfig::Parse(RunConfigToIni(c));
  CHECK(RunConfigToFlat(RunConfigFromIni(echoed)) == RunConfigToFlat(c));
}

TEST_CASE("run config rejects unknown keys and invalid values") {
  IniConfig unknown = IniConfig::Parse("[train]\nlr = 0.1\nlearning_rate = 0.1\n");
  CHECK_THROWS_WITH_AS(RunConfigFromIni(unknown), doctest::Contains("train.learning_rate"), ConfigError);
  IniConfig bad = IniConfig::Parse("[model]\nkernels = 2by5\n");
  CHECK_THROWS_AS(RunConfigFromIni(bad), ConfigError);
  IniConfig preset = IniConfig::Parse("[model]\npreset = huge\n");
  CHECK_THROWS_AS(RunConfigFromIni(preset), ConfigError);
  IniConfig epochs = IniConfig::Parse("[train]\nepochs = 0\n");
  CHECK_THROWS_AS(RunConfigFromIni(epochs), ConfigError);
}

TEST_CASE("profile emits the two-row comparison") {
  const fs::path root = FreshDir("pdpcrn_cli_profile");
  const CliResult r = Run({"profile", "--variant", "pdpcrn", "--variant", "dpcrn", "--out", (root / "p").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("| Method | #Params(K) | FLOPs(G) |") != std::string::npos);
  CHECK(r.out.find("| PDPCRN | 719.43 |") != std::string::npos);
  CHECK(r.out.find("| DPCRN | 764.56 |") != std::string::npos);
  CHECK(r.out.find("w/o BI") == std::string::npos);
  for (const char* f : {"profile.md", "profile.csv", "profile.json", "config.ini", "seed.json"}) {
    CHECK(fs::exists(root / "p" / f));
  }
  CHECK(Run({"profile", "--variant", "crn", "--out", (root / "q").string()}).code == kExitConfig);
}

TEST_CASE("synth is deterministic and records its seed") {
  const fs::path root = FreshDir("pdpcrn_cli_synth");
  const std::vector<std::string> args{"synth", "--count", "5", "--mics", "2", "--seconds", "1", "--set",
                                      "split.period=5"};
  REQUIRE(Run(Cat(args, {"--seed", "7", "--out", (root / "a").string()})).code == kExitOk);
  REQUIRE(Run(Cat(args, {"--seed", "7", "--out", (root / "b").string()})).code == kExitOk);
  CHECK(Slurp(root / "a/manifest.jsonl") == Slurp(root / "b/manifest.jsonl"));
  CHECK(Slurp(root / "a/mix/000003.wav") == Slurp(root / "b/mix/000003.wav"));
  CHECK(ReadManifest((root / "a/train.jsonl").string()).size() == 3);
  CHECK(ReadManifest((root / "a/val.jsonl").string()).size() == 1);
  CHECK(ReadManifest((root / "a/test.jsonl").string()).size() == 1);
  const auto seeds = nlohmann::json::parse(Slurp(root / "a/seed.json"));
  CHECK(seeds["root_seed"] == 7);
  CHECK(seeds["dataset_seed"] == MixSeed(7, kDatasetStream));

  // The echoed config reproduces the run on its own.
  REQUIRE(Run({"synth", "--config", (root / "a/config.ini").string(), "--out", (root / "c").string()}).code ==
          kExitOk);
  CHECK(Slurp(root / "a/manifest.jsonl") == Slurp(root / "c/manifest.jsonl"));
  CHECK(Slurp(root / "a/config.ini") == Slurp(root / "c/config.ini"));

  REQUIRE(Run(Cat(args, {"--seed", "8", "--out", (root / "d").string()})).code == kExitOk);
  CHECK(Slurp(root / "a/manifest.jsonl") != Slurp(root / "d/manifest.jsonl"));
}

TEST_CASE("end to end with no writes outside --out") {
  const fs::path root = FreshDir("pdpcrn_cli_e2e");
  const std::string data = (root / "data").string();
  REQUIRE(Run({"synth", "--count", "4", "--mics", "2", "--seconds", "1", "--seed", "3", "--set", "split.period=4",
               "--out", data})
              .code == kExitOk);
  const std::set<std::string> before = Tree(root);

  const CliResult enh = Run({"enhance", "--identity", "--in", data + "/mix/000000.wav", "--out",
                             (root / "enh").string()});
  REQUIRE(enh.code == kExitOk);
  CHECK(Slurp(root / "enh/000000.wav") == Slurp(root / "data/mix/000000.wav"));

  const CliResult tr = Run(Cat({"train", "--train", data + "/train.jsonl", "--val", data + "/val.jsonl", "--seed",
                                "4", "--out", (root / "run").string()},
                               kTinyTrain));
  REQUIRE(tr.code == kExitOk);
  CHECK(tr.out.find("epoch 1 ") != std::string::npos);
  const std::string ckpt = (root / "run/best.ckpt").string();
  REQUIRE(fs::exists(ckpt));

  const CliResult net_enh =
      Run({"enhance", "--checkpoint", ckpt, "--in", data + "/mix/000001.wav", "--out", (root / "enh2").string()});
  REQUIRE(net_enh.code == kExitOk);
  const MultichannelWave in = ReadWav(data + "/mix/000001.wav");
  const MultichannelWave est = ReadWav((root / "enh2/000001.wav").string());
  CHECK(est.num_channels() == in.num_channels());
  CHECK(est.num_samples() == in.num_samples());

  const CliResult ev = Run({"eval", "--manifest", data + "/test.jsonl", "--checkpoint", ckpt, "--out",
                            (root / "eval").string()});
  REQUIRE(ev.code == kExitOk);
  CHECK(ev.out.find("Unprocessed") != std::string::npos);
  CHECK(ev.out.find("PDPCRN") != std::string::npos);
  CHECK(fs::exists(root / "eval/metrics_unprocessed.csv"));
  CHECK(fs::exists(root / "eval/metrics_pdpcrn.csv"));
  CHECK(fs::exists(root / "eval/report.json"));

  const CliResult resumed = Run(Cat({"train", "--train", data + "/train.jsonl", "--val", data + "/val.jsonl",
                                     "--seed", "4", "--resume", (root / "run/last.ckpt").string(), "--epochs", "2",
                                     "--out", (root / "run2").string()},
                                    kTinyTrain));
  CHECK(resumed.code == kExitOk);
  CHECK(resumed.out.find("epoch 2 ") != std::string::npos);

  std::set<std::string> after = Tree(root);
  for (const auto& f : before) after.erase(f);
  for (const auto& f : after) {
    const std::string top = fs::path(f).begin()->string();
    CAPTURE(f);
    CHECK((top == "enh" || top == "enh2" || top == "run" || top == "run2" || top == "eval"));
  }
  for (const char* dir : {"enh", "run", "eval"}) {
    CHECK(fs::exists(root / dir / "config.ini"));
    CHECK(fs::exists(root / dir / "seed.json"));
  }
}

TEST_CASE("exit codes and one-line errors") {
  const fs::path root = FreshDir("pdpcrn_cli_errors");
  auto one_line = [](const CliResult& r) {
    return r.err.rfind("error[", 0) == 0 && r.err.find('\n') == r.err.size() - 1;
  };
  const CliResult flag = Run({"synth", "--bogus", "--out", (root / "x").string()});
  CHECK(flag.code == kExitConfig);
  CHECK(one_line(flag));
  CHECK(Run({}).code == kExitConfig);
  const CliResult key = Run({"synth", "--set", "scene.colour=red", "--out", (root / "y").string()});
  CHECK(key.code == kExitConfig);
  CHECK(key.err.find("scene.colour") != std::string::npos);
  CHECK_FALSE(fs::exists(root / "y"));
  const CliResult missing = Run({"eval", "--manifest", (root / "none.jsonl").string(), "--out", (root / "z").string()});
  CHECK(missing.code == kExitIo);
  CHECK(one_line(missing));
  CHECK(Run({"enhance", "--in", "a.wav", "--out", (root / "w").string()}).code == kExitConfig);
  CHECK(Run({"synth", "--config", (root / "absent.ini").string(), "--out", (root / "v").string()}).code ==
        kExitIo);

  // A manifest row whose audio is gone yields a partial report and an I/O code.
  REQUIRE(Run({"synth", "--count", "2", "--mics", "2", "--seconds", "1", "--out", (root / "d").string()}).code ==
          kExitOk);
  fs::remove(root / "d/mix/000001.wav");
  const CliResult partial = Run({"eval", "--manifest", (root / "d/manifest.jsonl").string(), "--out",
                                 (root / "e").string()});
  CHECK(partial.code == kExitIo);
  CHECK(one_line(partial));
  CHECK(fs::exists(root / "e/report.json"));

  // Non-finite audio aborts training with the numeric code.
  MultichannelWave bad(2, 16000);
  bad.channels[0][100] = std::nan("");
  fs::create_directories(root / "nan/mix");
  WriteWav((root / "nan/mix/a.wav").string(), bad);
  MultichannelWave tone(2, 16000);
  for (auto& ch : tone.channels) {
    for (size_t i = 0; i < ch.size(); ++i) ch[i] = 0.1 * std::sin(0.05 * static_cast<double>(i));
  }
  WriteWav((root / "nan/mix/t.wav").string(), tone);
  ManifestRow row;
  row.id = "a";
  row.mixture_path = "mix/a.wav";
  row.target_path = "mix/t.wav";
  WriteManifest((root / "nan/m.jsonl").string(), {row});
  const std::string m = (root / "nan/m.jsonl").string();
  const CliResult nan = Run(Cat({"train", "--train", m, "--val", m, "--out", (root / "nan_run").string()}, kTinyTrain));
  CHECK(nan.code == kExitNumeric);
  CHECK(nan.err.find("a") != std::string::npos);
}

}  // namespace
}  // namespace pdpcrn
