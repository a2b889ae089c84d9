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

#include "pdpcrn/app/cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pdpcrn/app/run_config.h"
#include "pdpcrn/io/errors.h"
#include "pdpcrn/io/manifest.h"
#include "pdpcrn/io/wav.h"
#include "pdpcrn/metrics/evaluate.h"
#include "pdpcrn/models/checkpoint.h"
#include "pdpcrn/profile/profile.h"
#include "pdpcrn/training/ablation.h"

namespace pdpcrn {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string out;
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<uint64_t> seed;
  // Subcommand shortcuts, applied last as "section.key=value".
  std::vector<std::string> shortcuts;
};

void AddCommon(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--out", o.out, "Output directory; nothing is written elsewhere")->required();
  sub->add_option("--config", o.config_path, "INI run configuration");
  sub->add_option("--set", o.sets, "Override section.key=value (repeatable)");
  sub->add_option("--seed", o.seed, "Root seed (run.seed)");
}

// Registers a flag whose value becomes the override `key=value`.
template <typename T>
void AddShortcut(CLI::App* sub, CommonOptions& o, const std::string& flag, const std::string& key,
                 const std::string& help) {
  sub->add_option_function<T>(
      flag, [&o, key](const T& v) { o.shortcuts.push_back(key + "=" + CLI::detail::to_string(v)); }, help);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  f << text;
  if (!f) throw IoError("cannot write '" + path.string() + "'");
}

std::string Join(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

// Resolves the configuration, creates --out and records config and seeds.
RunConfig Prepare(const CommonOptions& o, const std::string& command) {
  IniConfig ini = o.config_path.empty() ? IniConfig() : IniConfig::Load(o.config_path);
  for (const auto& s : o.sets) ini.ApplyOverride(s);
  if (o.seed) ini.Set("run.seed", std::to_string(*o.seed));
  for (const auto& s : o.shortcuts) ini.ApplyOverride(s);
  const RunConfig config = RunConfigFromIni(ini);
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create output directory '" + o.out + "': " + ec.message());
  WriteText(fs::path(o.out) / "config.ini", RunConfigToIni(config));
  const nlohmann::json seeds = {{"root_seed", config.seed},
                                {"dataset_seed", config.dataset_seed()},
                                {"train_seed", config.train_seed()},
                                {"command", command}};
  WriteText(fs::path(o.out) / "seed.json", seeds.dump(2) + "\n");
  return config;
}

void CheckThreadsEnv() {
  const char* env = std::getenv("PDPCRN_THREADS");
  if (env == nullptr) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) {
    throw ConfigError("PDPCRN_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
}

std::string Slug(const std::string& method) {
  std::string s;
  for (char c : method) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!s.empty() && s.back() != '_') {
      s += '_';
    }
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

ModelConfig ProfileVariant(ModelConfig base, const std::string& name) {
  if (name == "pdpcrn") {
    base.variant = Variant::kPdpcrn;
    base.bi_interaction = true;
  } else if (name == "pdpcrn_wo_bi") {
    base.variant = Variant::kPdpcrn;
    base.bi_interaction = false;
  } else if (name == "dpcrn") {
    base.variant = Variant::kDpcrn;
  } else {
    throw ConfigError("unknown profile variant '" + name + "' (expected pdpcrn, pdpcrn_wo_bi or dpcrn)");
  }
  return base;
}

int Synth(const RunConfig& config, const std::string& out_dir, std::ostream& out) {
  const std::vector<ManifestRow> rows = SynthesizeDataset(config.DatasetForRun(), out_dir);
  out << "synth: " << rows.size() << " mixtures, " << config.model.mics << " mics -> "
      << (fs::path(out_dir) / "manifest.jsonl").string() << "\n";
  const int p = config.split_period;
  if (p > 1) {
    std::vector<ManifestRow> train, val, test;
    for (size_t i = 0; i < rows.size(); ++i) {
      const int r = static_cast<int>(i % p);
      (r == p - 1 ? test : r == p - 2 ? val : train).push_back(rows[i]);
    }
    WriteManifest((fs::path(out_dir) / "train.jsonl").string(), train);
    WriteManifest((fs::path(out_dir) / "val.jsonl").string(), val);
    WriteManifest((fs::path(out_dir) / "test.jsonl").string(), test);
    out << "split: " << train.size() << " train, " << val.size() << " val, " << test.size() << " test\n";
  }
  return kExitOk;
}

int Train(const RunConfig& config, const std::string& out_dir, const std::string& train_manifest,
          const std::string& val_manifest, const std::string& resume, std::ostream& out) {
  Trainer trainer(config.model, config.TrainForRun(), LoadExamples(ReadManifest(train_manifest)),
                  LoadExamples(ReadManifest(val_manifest)), out_dir);
  if (!resume.empty()) trainer.Resume(resume);
  trainer.Run([&out](const EpochRecord& r) {
    out << "epoch " << r.epoch << " train_loss " << r.train_loss << " val_loss " << r.val_loss << " lr " << r.lr
        << std::endl;
  });
  out << "best checkpoint: " << trainer.best_checkpoint() << "\n";
  return kExitOk;
}

int EnhanceFiles(const std::string& out_dir, const std::vector<std::string>& inputs, const std::string& checkpoint,
                 bool identity, std::ostream& out) {
  if (identity == !checkpoint.empty()) throw ConfigError("enhance needs exactly one of --checkpoint or --identity");
  std::optional<Network<float>> net;
  Enhancer enhancer = PassthroughEnhancer();
  if (!identity) {
    net.emplace(LoadModel<float>(checkpoint));
    enhancer = NetworkEnhancer(*net);
  }
  std::set<std::string> names;
  for (const auto& in : inputs) {
    const fs::path target = fs::path(out_dir) / fs::path(in).filename();
    if (!names.insert(target.filename().string()).second) {
      throw ConfigError("two inputs share the file name '" + target.filename().string() + "'");
    }
    std::error_code ec;
    if (fs::equivalent(target, in, ec)) throw ConfigError("enhance would overwrite its input '" + in + "'");
  }
  for (const auto& in : inputs) {
    const MultichannelWave mixture = ReadWav(in);
    if (net && mixture.num_channels() != net->config().mics) {
      throw ConfigError("'" + in + "' has " + std::to_string(mixture.num_channels()) + " channels, model expects " +
                        std::to_string(net->config().mics));
    }
    const fs::path target = fs::path(out_dir) / fs::path(in).filename();
    WriteWav(target.string(), enhancer(mixture, MultichannelWave()), WavEncoding::kFloat32);
    out << "enhance: " << in << " -> " << target.string() << "\n";
  }
  return kExitOk;
}

int Eval(const RunConfig& config, const std::string& out_dir, const std::string& manifest,
         const std::vector<std::string>& checkpoints, std::ostream& out, std::ostream& err) {
  const std::vector<ManifestRow> rows = ReadManifest(manifest);
  std::vector<MetricReport> reports;
  if (config.eval_unprocessed) reports.push_back(Evaluate(kUnprocessedMethod, rows, PassthroughEnhancer()));
  std::set<std::string> used;
  for (const auto& ckpt : checkpoints) {
    const CheckpointData data = LoadCheckpoint(ckpt);
    const std::string base = MethodName(ModelConfigFromJson(data.meta.at("model")));
    std::string method = base;
    for (int k = 2; used.count(method); ++k) method = base + " #" + std::to_string(k);
    used.insert(method);
    reports.push_back(EvaluateCheckpoint(method, ckpt, rows));
  }
  if (reports.empty()) throw ConfigError("eval has nothing to score: pass --checkpoint or set eval.unprocessed");
  size_t failed = 0;
  for (const auto& r : reports) {
    WriteMetricsCsv((fs::path(out_dir) / ("metrics_" + Slug(r.method) + ".csv")).string(), r);
    failed += r.errors.size();
  }
  WriteText(fs::path(out_dir) / "report.json", ReportJson(reports).dump(2) + "\n");
  const std::string text = FormatReport(reports);
  WriteText(fs::path(out_dir) / "report.txt", text);
  out << text;
  if (failed > 0) {
    err << "error[io]: " << failed << " utterance(s) could not be scored; see report.json" << std::endl;
    return kExitIo;
  }
  return kExitOk;
}

int Profile(const RunConfig& config, const std::string& out_dir, std::vector<std::string> variants,
            std::ostream& out) {
  if (variants.empty()) variants = {"pdpcrn", "pdpcrn_wo_bi", "dpcrn"};
  std::vector<ProfileReport> reports;
  for (const auto& v : variants) reports.push_back(ProfileModel(ProfileVariant(config.model, v), config.profile));
  const std::string md = ProfileMarkdown(reports);
  WriteText(fs::path(out_dir) / "profile.md", md);
  WriteText(fs::path(out_dir) / "profile.csv", ProfileCsv(reports));
  WriteText(fs::path(out_dir) / "profile.json", ProfileJson(reports).dump(2) + "\n");
  out << md;
  return kExitOk;
}

int Ablate(const RunConfig& config, const std::string& out_dir, const std::string& train_manifest,
           const std::string& val_manifest, const std::string& eval_manifest, std::ostream& out) {
  const AblationResult result = RunAblation(config.model, config.TrainForRun(), ReadManifest(train_manifest),
                                            ReadManifest(val_manifest), ReadManifest(eval_manifest), out_dir);
  out << result.text;
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Multichannel speech enhancement toolkit", "pdpcrn");
  app.require_subcommand(1);
  CommonOptions o;
  std::string train_manifest, val_manifest, eval_manifest, manifest, resume, checkpoint;
  std::vector<std::string> inputs, checkpoints, variants;
  bool identity = false;

  CLI::App* synth = app.add_subcommand("synth", "Synthesize a multichannel mixture dataset");
  AddCommon(synth, o);
  AddShortcut<int>(synth, o, "--count", "scene.count", "Number of mixtures");
  AddShortcut<int>(synth, o, "--mics", "model.mics", "Microphones per mixture");
  AddShortcut<double>(synth, o, "--seconds", "scene.utterance_seconds", "Utterance length");

  CLI::App* train = app.add_subcommand("train", "Train a model");
  AddCommon(train, o);
  train->add_option("--train", train_manifest, "Training manifest")->required();
  train->add_option("--val", val_manifest, "Validation manifest")->required();
  train->add_option("--resume", resume, "Checkpoint to resume from");
  AddShortcut<int>(train, o, "--epochs", "train.epochs", "Total epochs");

  CLI::App* enhance = app.add_subcommand("enhance", "Enhance WAV files");
  AddCommon(enhance, o);
  enhance->add_option("--in", inputs, "Input WAV (repeatable)")->required();
  auto* ck = enhance->add_option("--checkpoint", checkpoint, "Model checkpoint");
  enhance->add_flag("--identity", identity, "Debug model that returns its input")->excludes(ck);

  CLI::App* eval = app.add_subcommand("eval", "Score a manifest");
  AddCommon(eval, o);
  eval->add_option("--manifest", manifest, "Manifest to score")->required();
  eval->add_option("--checkpoint", checkpoints, "Model checkpoint (repeatable)");

  CLI::App* profile = app.add_subcommand("profile", "Parameter and FLOP report");
  AddCommon(profile, o);
  profile->add_option("--variant", variants, "pdpcrn, pdpcrn_wo_bi or dpcrn (repeatable)");
  AddShortcut<double>(profile, o, "--seconds", "profile.seconds", "Audio length");

  CLI::App* ablate = app.add_subcommand("ablate", "Paired run with and without bi-directional interaction");
  AddCommon(ablate, o);
  ablate->add_option("--train", train_manifest, "Training manifest")->required();
  ablate->add_option("--val", val_manifest, "Validation manifest")->required();
  ablate->add_option("--eval", eval_manifest, "Held-out manifest")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error[config]: " << msg << std::endl;
    return kExitConfig;
  }

  try {
    CheckThreadsEnv();
    const std::string command = Join(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    const RunConfig config = Prepare(o, command);
    if (sub == synth) return Synth(config, o.out, out);
    if (sub == train) return Train(config, o.out, train_manifest, val_manifest, resume, out);
    if (sub == enhance) return EnhanceFiles(o.out, inputs, checkpoint, identity, out);
    if (sub == eval) return Eval(config, o.out, manifest, checkpoints, out, err);
    if (sub == profile) return Profile(config, o.out, variants, out);
    return Ablate(config, o.out, train_manifest, val_manifest, eval_manifest, out);
  } catch (const std::exception& e) {
    err << FormatError(e) << std::endl;
    return ExitCodeFor(e);
  }
}

}  // namespace pdpcrn
