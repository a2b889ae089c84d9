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

// Acceptance suite: prints one PASS or FAIL line per criterion and exits
// non-zero when any criterion fails. Artifacts go under --work.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "grad_check.h"
#include "model_fixtures.h"
#include "pdpcrn/app/cli.h"
#include "pdpcrn/io/manifest.h"
#include "pdpcrn/io/wav.h"
#include "pdpcrn/metrics/evaluate.h"
#include "pdpcrn/metrics/si_sdr.h"
#include "pdpcrn/metrics/stoi.h"
#include "pdpcrn/models/blocks.h"
#include "pdpcrn/models/network.h"
#include "pdpcrn/nn/attention.h"
#include "pdpcrn/nn/conv.h"
#include "pdpcrn/nn/linear.h"
#include "pdpcrn/nn/lstm.h"
#include "pdpcrn/nn/norm.h"
#include "pdpcrn/profile/profile.h"
#include "pdpcrn/signal/dataset.h"
#include "pdpcrn/signal/rir.h"
#include "pdpcrn/signal/scene.h"
#include "pdpcrn/signal/sources.h"
#include "pdpcrn/signal/stft.h"
#include "pdpcrn/training/ablation.h"

#ifndef PDPCRN_TEST_DATA_DIR
#error "PDPCRN_TEST_DATA_DIR must be defined"
#endif

namespace pdpcrn {
namespace {

namespace fs = std::filesystem;
using testing::CausalityResult;
using testing::CheckCausality;
using testing::PooledGradCheck;
using testing::Project;
using testing::RandomLeaf;
using testing::RandomTensor;
using testing::SmallConfig;
using TD = Tensor<double>;

// Reference totals for the full configuration.
constexpr double kReferencePdpcrnParams = 790.78e3;
constexpr double kReferenceDpcrnParams = 814.60e3;
constexpr double kParamTolerance = 0.15;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(double v, int precision = 3) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string Fixed(double v, int decimals) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

fs::path FreshDir(const fs::path& p) {
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ModelConfig FullVariant(Variant v, bool bi) {
  ModelConfig c = ModelConfig::Full();
  c.variant = v;
  c.bi_interaction = bi;
  return c;
}

// 1 ---------------------------------------------------------------------

Outcome ParamOrdering(const fs::path& work) {
  const ProfileReport p = ProfileModel(FullVariant(Variant::kPdpcrn, true));
  const ProfileReport w = ProfileModel(FullVariant(Variant::kPdpcrn, false));
  const ProfileReport d = ProfileModel(FullVariant(Variant::kDpcrn, true));
  const double pp = p.total_params(), wp = w.total_params(), dp = d.total_params();
  const double gap_p = pp / kReferencePdpcrnParams - 1.0, gap_d = dp / kReferenceDpcrnParams - 1.0;
  std::ostringstream md;
  md << ProfileMarkdown({p, w, d}) << "\n### Residual against the reference totals\n\n"
     << "| Method | Counted | Reference | Gap |\n|---|---:|---:|---:|\n"
     << "| " << p.method << " | " << p.total_params() << " | " << kReferencePdpcrnParams << " | "
     << Fixed(100 * gap_p, 2) << "% |\n"
     << "| " << d.method << " | " << d.total_params() << " | " << kReferenceDpcrnParams << " | "
     << Fixed(100 * gap_d, 2) << "% |\n";
  WriteText(work / "c1" / "profile.md", md.str());
  Outcome o;
  o.pass = pp < dp && wp < pp && std::abs(gap_p) <= kParamTolerance && std::abs(gap_d) <= kParamTolerance;
  o.detail = "PDPCRN " + Fixed(pp / 1e3, 2) + "K (" + Fixed(100 * gap_p, 1) + "% vs 790.78K) < DPCRN " +
             Fixed(dp / 1e3, 2) + "K (" + Fixed(100 * gap_d, 1) + "% vs 814.60K); w/o BI " + Fixed(wp / 1e3, 2) +
             "K; per-layer table in " + (work / "c1" / "profile.md").string();
  return o;
}

// 2 ---------------------------------------------------------------------

Outcome FlopOrdering() {
  const ProfileReport p = ProfileModel(FullVariant(Variant::kPdpcrn, true));
  const ProfileReport d = ProfileModel(FullVariant(Variant::kDpcrn, true));
  Outcome o;
  o.pass = p.total_flops() <= d.total_flops();
  o.detail = "PDPCRN " + Fixed(p.total_flops() / 1e9, 3) + " GFLOPs <= DPCRN " + Fixed(d.total_flops() / 1e9, 3) +
             " GFLOPs for 1 s (" + std::to_string(p.geometry.frames()) + " frames)";
  return o;
}

// 3 ---------------------------------------------------------------------

std::vector<TD> WithParams(std::vector<TD> inputs, const NamedTensors<double>& params) {
  for (const auto& p : params) inputs.push_back(p.tensor);
  return inputs;
}

NamedTensors<double> ParamsWithPrefix(const Network<double>& net, const std::string& prefix) {
  NamedTensors<double> out;
  for (const auto& p : net.Parameters()) {
    if (p.name.rfind(prefix, 0) == 0) out.push_back(p);
  }
  return out;
}

// Relative error pools every input and parameter of a layer, so tensors whose
// exact gradient is zero (a key bias under softmax, a bias feeding a
// training-mode batch norm) are judged against the layer's gradient scale.
Outcome GradientSuite() {
  std::vector<std::pair<std::string, double>> layers;
  Rng rng(31);
  {
    Linear<double> lin(4, 3, rng);
    TD x = RandomLeaf({2, 5, 4}, rng);
    layers.emplace_back("linear", PooledGradCheck([&] { return Project(lin.Forward(x)); }, {x, lin.weight(), lin.bias()}));
  }
  {
    Conv2dSpec s = Conv2dSpec::Make(4, 6, 2, 3, 1, 2);
    s.groups = 2;
    TD x = RandomLeaf({2, 4, 5, 7}, rng), w = RandomLeaf({6, 2, 2, 3}, rng), b = RandomLeaf({6}, rng);
    layers.emplace_back("conv2d", PooledGradCheck([&] { return Project(Conv2d(x, w, b, s)); }, {x, w, b}));
    Conv2dSpec ts = Conv2dSpec::Make(6, 4, 2, 3, 1, 2);
    TD y = RandomLeaf({2, 6, 5, 4}, rng), wt = RandomLeaf({6, 4, 2, 3}, rng), bt = RandomLeaf({4}, rng);
    layers.emplace_back("conv_transpose2d",
                        PooledGradCheck([&] { return Project(ConvTranspose2d(y, wt, bt, ts, 7)); }, {y, wt, bt}));
    Conv2dSpec dw = Conv2dSpec::Depthwise(3, 3);
    TD xd = RandomLeaf({1, 3, 6, 4}, rng), wd = RandomLeaf({3, 1, 3, 1}, rng);
    layers.emplace_back("depthwise_conv", PooledGradCheck([&] { return Project(Conv2d(xd, wd, TD(), dw)); }, {xd, wd}));
  }
  {
    Lstm<double> lstm(LstmSpec{3, 4, true}, rng);
    TD x = RandomLeaf({2, 5, 3}, rng), h0 = RandomLeaf({2, 2, 4}, rng), c0 = RandomLeaf({2, 2, 4}, rng);
    NamedTensors<double> p;
    lstm.AppendParameters("", p);
    layers.emplace_back("lstm", PooledGradCheck(
                                    [&] {
                                      LstmResult<double> r = lstm.Forward(x, h0, c0);
                                      return Add(Add(Project(r.output, 1), Project(r.h_n, 2)), Project(r.c_n, 3));
                                    },
                                    WithParams({x, h0, c0}, p)));
  }
  {
    TD q = RandomLeaf({3, 5, 2}, rng), k = RandomLeaf({3, 5, 2}, rng), v = RandomLeaf({3, 5, 2}, rng);
    layers.emplace_back("causal_attention",
                        PooledGradCheck([&] { return Project(ScaledDotProductAttention(q, k, v, true)); }, {q, k, v}));
    MultiHeadAttention<double> mha(AttentionSpec{4, 2, 2, true}, rng);
    TD x = RandomLeaf({2, 4, 4}, rng), ext = RandomLeaf({2, 4, 4}, rng);
    NamedTensors<double> p;
    mha.AppendParameters("", p);
    layers.emplace_back("multi_head_attention",
                        PooledGradCheck([&] { return Project(mha.Forward(x, ext)); }, WithParams({x, ext}, p)));
  }
  {
    BatchNorm2d<double> bn(3);
    bn.gamma() = RandomLeaf({3}, rng);
    bn.beta() = RandomLeaf({3}, rng);
    TD x = RandomLeaf({2, 3, 4, 4}, rng);
    layers.emplace_back("batch_norm_train",
                        PooledGradCheck([&] { return Project(bn.Forward(x, true)); }, {x, bn.gamma(), bn.beta()}));
    layers.emplace_back("batch_norm_eval",
                        PooledGradCheck([&] { return Project(bn.Forward(x, false)); }, {x, bn.gamma(), bn.beta()}));
    LayerNorm<double> ln(5);
    ln.gamma() = RandomLeaf({5}, rng);
    ln.beta() = RandomLeaf({5}, rng);
    TD z = RandomLeaf({3, 2, 5}, rng);
    layers.emplace_back("layer_norm", PooledGradCheck([&] { return Project(ln.Forward(z)); }, {z, ln.gamma(), ln.beta()}));
  }
  {
    TD r = RandomLeaf({1, 2, 3, 9}, rng), i = RandomLeaf({1, 2, 3, 9}, rng);
    layers.emplace_back("istft", PooledGradCheck([&] { return Project(IstftTensor(r, i, 8, 16)); }, {r, i}));
    TD ref = RandomTensor({2, 64}, rng), est = RandomLeaf({2, 64}, rng);
    layers.emplace_back("si_sdr", PooledGradCheck([&] { return Sum(SiSdrTensor(ref, est)); }, {est}));
  }
  {
    TD x = RandomLeaf({1, 4, 3, 5}, rng);
    Dprnn<double> d(4, 6, rng);
    NamedTensors<double> dp;
    d.AppendParameters("", dp);
    layers.emplace_back("dprnn", PooledGradCheck([&] { return Project(d.Forward(x)); }, WithParams({x}, dp)));
    InteractionGate<double> g(4, 3, rng);
    NamedTensors<double> gp;
    g.AppendParameters("", gp);
    layers.emplace_back("interaction_gate", PooledGradCheck([&] { return Project(g.Forward(x, true)); }, WithParams({x}, gp)));
    ModelConfig c = SmallConfig();
    c.encoder_channels = {4, 4, 4, 4, 4};
    c.dprnn_hidden = 4;
    c.attention_heads = 2;
    c.attention_head_dim = 2;
    c.interaction_channels = 2;
    MixingBlock<double> block(c, rng);
    NamedTensors<double> bp;
    block.AppendParameters("", bp);
    layers.emplace_back("mixing_block",
                        PooledGradCheck([&] { return Project(block.Forward(x, true)); }, WithParams({x}, bp)));
  }
  {
    Network<double> net(SmallConfig(), 32);
    TD x = RandomLeaf({1, 4, 3, 17}, rng);
    layers.emplace_back("encoder", PooledGradCheck([&] { return Project(net.encoder().Forward(x, false).back()); },
                                             WithParams({x}, ParamsWithPrefix(net, "encoder."))));
    const std::vector<TD> feats = net.encoder().Forward(x.Detach(), false);
    TD latent = feats.back().Detach();
    latent.set_requires_grad(true);
    layers.emplace_back("decoder", PooledGradCheck([&] { return Project(net.decoder().Forward(latent, feats, false)); },
                                             WithParams({latent}, ParamsWithPrefix(net, "decoder."))));
  }
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, err] : layers) {
    if (err >= worst) worst = err, worst_name = name;
  }
  double e2e = 0.0;
  std::string e2e_text;
  for (Variant v : {Variant::kPdpcrn, Variant::kDpcrn}) {
    Network<double> net(SmallConfig(v), 11);
    Rng r(12);
    TD x = RandomLeaf({2, 4, 3, 17}, r);
    const double err =
        PooledGradCheck([&] { return Project(net.Forward(x, true)); }, WithParams({x}, net.Parameters()), 1e-5, 6);
    e2e = std::max(e2e, err);
    e2e_text += " " + VariantName(v) + " " + Fmt(err, 2);
  }
  Outcome o;
  o.pass = worst < 1e-4 && e2e < 1e-3;
  o.detail = std::to_string(layers.size()) + " layer checks, worst " + Fmt(worst, 2) + " (" + worst_name +
             ", limit 1e-4); end-to-end" + e2e_text + " (limit 1e-3)";
  return o;
}

// 4 ---------------------------------------------------------------------

Outcome CausalitySuite() {
  std::vector<std::pair<std::string, CausalityResult>> results;
  for (Variant v : {Variant::kPdpcrn, Variant::kDpcrn}) {
    Network<double> net(SmallConfig(v), 41);
    results.emplace_back(VariantName(v),
                         CheckCausality([&](const TD& x) { return net.Forward(x, false); }, {1, 4, 8, 17}, 20, 42));
  }
  Network<double> net(SmallConfig(), 43);
  results.emplace_back("encoder", CheckCausality([&](const TD& x) { return net.encoder().Forward(x, false).back(); },
                                                 {1, 4, 8, 17}, 20, 44));
  results.emplace_back("mixing_block",
                       CheckCausality([&](const TD& x) { return net.block(0).Forward(x, false); }, {1, 16, 8, 5}, 20,
                                      45));
  Rng rng(46);
  const std::vector<TD> shapes = net.encoder().Forward(RandomTensor({1, 4, 8, 17}, rng), false);
  results.emplace_back("decoder", CheckCausality(
                                      [&](const TD& latent) {
                                        // Skips carry the latent's frames so every decoder input sees the
                                        // perturbation.
                                        std::vector<TD> skips;
                                        for (const auto& s : shapes) {
                                          TD k(s.shape());
                                          auto kd = k.mutable_data();
                                          const int64_t inner = s.dim(3), frames = s.dim(2);
                                          for (int64_t i = 0; i < k.numel(); ++i) {
                                            const int64_t t = (i / inner) % frames;
                                            kd[i] = latent.at({0, 0, t, 0}) * ((i % 7) - 3) + s.data()[i];
                                          }
                                          skips.push_back(k);
                                        }
                                        return net.decoder().Forward(latent, skips, false);
                                      },
                                      shapes.back().shape(), 20, 47));
  Outcome o;
  o.pass = true;
  double worst = 0.0, weakest = 1e300;
  for (const auto& [name, r] : results) {
    o.pass = o.pass && r.past_change < 1e-9 && r.future_change > 1e-6;
    worst = std::max(worst, r.past_change);
    weakest = std::min(weakest, r.future_change);
  }
  o.detail = "encoder, mixing block, decoder, pdpcrn, dpcrn x 20 trials: max past change " + Fmt(worst, 2) +
             " (limit 1e-9), min future change " + Fmt(weakest, 2);
  return o;
}

// 5 ---------------------------------------------------------------------

Outcome StftRoundTrip() {
  Rng rng(51);
  const StftConfig cfg;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t n = 4000 + static_cast<int64_t>(rng.Below(28000));
    MultichannelWave x(1, n);
    for (double& v : x.channels[0]) v = rng.Uniform(-1.0, 1.0);
    const MultichannelWave y = Istft(Stft(x, cfg));
    const int64_t end = std::min(n, y.num_samples()) - cfg.fft_size;
    double num = 0.0, den = 0.0;
    for (int64_t i = cfg.fft_size; i < end; ++i) {
      num += std::pow(y.channels[0][i] - x.channels[0][i], 2);
      den += std::pow(x.channels[0][i], 2);
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {worst < 1e-6, "100 random signals, worst interior relative error " + Fmt(worst, 2) + " (limit 1e-6)"};
}

// 6 ---------------------------------------------------------------------

Outcome RirValidity() {
  Outcome o{true, ""};
  double worst_t60 = 0.0, worst_delay = 0.0;
  for (double rt : {0.3, 0.5, 0.8}) {
    SceneConfig scene;
    scene.rt60 = rt;
    const Vec3 src = scene.SourcePosition();
    const MultichannelWave h = GenerateRir(scene, src);
    const auto mics = scene.MicPositions();
    double mean_t60 = 0.0;
    for (int m = 0; m < scene.num_mics; ++m) {
      const double est = EstimateT60(h.channels[m]);
      mean_t60 += est / scene.num_mics;
      worst_t60 = std::max(worst_t60, std::abs(est - rt) / rt);
      const double dist = Distance(src, mics[m]);
      const double amp = 1.0 / (4.0 * std::numbers::pi * dist);
      int64_t first = -1;
      for (int64_t n = 0; n < h.num_samples() && first < 0; ++n) {
        if (std::abs(h.channels[m][n]) >= 0.5 * amp) first = n;
      }
      const double delay_err = first < 0 ? 1e9 : std::abs(first - dist / kSoundSpeed * kSampleRate);
      worst_delay = std::max(worst_delay, delay_err);
    }
    o.detail += (o.detail.empty() ? "T60 " : ", ") + Fixed(rt, 1) + "->" + Fixed(mean_t60, 3);
  }
  o.pass = worst_t60 <= 0.2 && worst_delay <= 1.0;
  o.detail += " s (worst mic " + Fixed(100 * worst_t60, 1) + "%, limit 20%); first arrival worst " +
              Fixed(worst_delay, 2) + " samples over 16 mics (limit 1)";
  return o;
}

// 7 ---------------------------------------------------------------------

// Synthesizes the grid to disk, then re-measures each written mixture
// against a regenerated reverberant speech image.
Outcome MixtureSnr(const fs::path& work) {
  DatasetConfig cfg;
  cfg.count = 45;
  cfg.num_mics = 4;
  cfg.seed = 71;
  cfg.utterance_seconds = 2.0;
  const fs::path dir = FreshDir(work / "c7");
  const std::vector<ManifestRow> rows = ReadManifest(
      (SynthesizeDataset(cfg, dir.string()), dir / "manifest.jsonl").string());
  const int64_t samples = std::llround(cfg.utterance_seconds * kSampleRate);
  std::set<std::pair<double, double>> cells;
  double worst = 0.0;
  for (const auto& row : rows) {
    cells.emplace(row.snr_db, row.rt60_s);
    Rng rng(row.seed);
    const SceneConfig scene = RandomScene(rng, cfg.num_mics, row.rt60_s, row.snr_db);
    const std::vector<double> speech = SyntheticSpeech(samples, rng);
    const std::vector<double> noise = PinkNoise(samples, rng);
    const MixResult regen = MixScene(speech, noise, scene);
    const MultichannelWave mix = ReadWav(row.mixture_path), target = ReadWav(row.target_path);
    // Undo the peak normalization with the gain between written and
    // regenerated targets.
    double tt = 0.0, tr = 0.0;
    for (int64_t i = 0; i < samples; ++i) {
      tt += target.channels[0][i] * regen.target.channels[0][i];
      tr += regen.target.channels[0][i] * regen.target.channels[0][i];
    }
    const double gain = tt / tr;
    const std::vector<double>& s = regen.speech_image.channels[0];
    const std::vector<bool> mask = SpeechActiveMask(s);
    double es = 0.0, en = 0.0;
    for (int64_t i = 0; i < samples; ++i) {
      if (!mask[i]) continue;
      const double n = mix.channels[0][i] / gain - s[i];
      es += s[i] * s[i];
      en += n * n;
    }
    worst = std::max(worst, std::abs(10.0 * std::log10(es / en) - row.snr_db));
  }
  return {worst <= 0.01 && cells.size() == 45,
          std::to_string(cells.size()) + " cells from written files, worst |requested - measured| " +
              Fmt(worst, 2) + " dB (limit 0.01)"};
}

// 8 ---------------------------------------------------------------------

std::string DataPath(const std::string& name) { return std::string(PDPCRN_TEST_DATA_DIR) + "/" + name; }

Outcome StoiCorrectness() {
  const std::vector<double> clean = ReadWav(DataPath("stoi_clean.wav")).channels[0];
  const bool identity = Stoi(clean, clean, kSampleRate) == 1.0;

  Rng rng(81);
  const std::vector<double> noise = PinkNoise(static_cast<int64_t>(clean.size()), rng);
  SceneConfig scene = RandomScene(rng, 1, 0.4, 0.0);
  std::string trend;
  bool monotonic = true;
  double previous = -2.0;
  for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
    scene.snr_db = snr;
    const MixResult mix = MixScene(clean, noise, scene);
    const double s = Stoi(mix.target.channels[0], mix.mixture.channels[0], kSampleRate);
    monotonic = monotonic && s > previous;
    previous = s;
    trend += (trend.empty() ? "" : "->") + Fixed(100 * s, 1);
  }

  std::ifstream in(DataPath("stoi_golden.json"));
  const nlohmann::json golden = nlohmann::json::parse(in);
  double worst = 0.0;
  for (const auto& [file, value] : golden["stoi"].items()) {
    const double s = Stoi(clean, ReadWav(DataPath(file)).channels[0], kSampleRate);
    worst = std::max(worst, std::abs(s - value.get<double>()));
  }
  return {identity && monotonic && worst < 1e-3,
          std::string("identity ") + (identity ? "exactly 1" : "not 1") + "; mixture STOI over -10..10 dB " + trend +
              (monotonic ? " (increasing)" : " (NOT increasing)") + "; golden max diff " + Fmt(worst, 2) +
              " (limit 1e-3)"};
}

// 9 ---------------------------------------------------------------------

struct OverfitRun {
  fs::path dir;
  nlohmann::json report;
  std::string text;
};

// Two utterances, trained on and scored against themselves.
OverfitRun RunOverfit(const fs::path& dir) {
  FreshDir(dir);
  DatasetConfig d;
  d.count = 2;
  d.num_mics = 2;
  d.seed = 9;
  d.utterance_seconds = 1.0;
  d.snrs_db = {0.0, 5.0};
  d.rt60s = {0.3};
  SynthesizeDataset(d, (dir / "data").string());
  const std::vector<ManifestRow> rows = ReadManifest((dir / "data" / "manifest.jsonl").string());
  TrainConfig t;
  t.lr = 1e-2;
  t.epochs = 10;
  t.steps_per_epoch = 20;
  t.batch_size = 2;
  t.segment_seconds = 1.0;
  t.seed = 1;
  t.loss_kind = LossKind::kSpectralMse;
  const AblationResult r = RunAblation(ModelConfig::Tiny(), t, rows, rows, rows, (dir / "out").string());
  return {dir, r.report, r.text};
}

std::optional<OverfitRun> overfit_first;

Outcome OverfitSmoke(const fs::path& work) {
  overfit_first = RunOverfit(work / "c9");
  const nlohmann::json& runs = overfit_first->report["runs"];
  const double gain = runs[0]["si_sdr_gain_db"];
  const nlohmann::json& wo = runs[1];
  const bool converged = wo["final_train_loss"].get<double>() < wo["initial_train_loss"].get<double>() &&
                         std::isfinite(wo["best_val_loss"].get<double>());
  std::cout << overfit_first->text << std::flush;
  return {gain >= 10.0 && converged,
          "tiny PDPCRN, 200 steps on 2 utterances: SI-SDR gain " + Fixed(gain, 2) + " dB (limit 10); w/o BI gain " +
              Fixed(wo["si_sdr_gain_db"].get<double>(), 2) + " dB, train loss " +
              Fmt(wo["initial_train_loss"].get<double>(), 4) + " -> " + Fmt(wo["final_train_loss"].get<double>(), 4) +
              (converged ? " (converged)" : " (NOT converged)")};
}

// 10 --------------------------------------------------------------------

// Desk-scale run through the command-line tool.
constexpr char kDeskConfig[] = R"([run]
seed = 10

[model]
preset = tiny
mics = 4
encoder_channels = 16,16,16,16,32
dprnn_hidden = 32
attention_heads = 8
attention_head_dim = 4

[train]
epochs = 5
batch_size = 1
segment_seconds = 4
lr = 0.01
loss = si_sdr

[scene]
count = 50
utterance_seconds = 4

[split]
period = 10
)";

struct DeskRun {
  fs::path dir;
  double unprocessed_stoi = 0.0;
  double model_stoi = 0.0;
  std::string report;
  int exit_code = 0;
  std::string failed_step;
};

int Cli(const std::vector<std::string>& args, std::ostream& out) {
  std::vector<const char*> argv{"pdpcrn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return RunCli(static_cast<int>(argv.size()), argv.data(), out, std::cerr);
}

DeskRun RunDesk(const fs::path& dir) {
  FreshDir(dir);
  WriteText(dir / "desk.ini", kDeskConfig);
  const std::string cfg = (dir / "desk.ini").string(), data = (dir / "data").string();
  DeskRun r;
  r.dir = dir;
  std::ostringstream log;
  const std::vector<std::pair<std::string, std::vector<std::string>>> steps{
      {"synth", {"synth", "--config", cfg, "--out", data}},
      {"train",
       {"train", "--config", cfg, "--train", data + "/train.jsonl", "--val", data + "/val.jsonl", "--out",
        (dir / "run").string()}},
      {"eval",
       {"eval", "--config", cfg, "--manifest", data + "/test.jsonl", "--checkpoint", (dir / "run/best.ckpt").string(),
        "--out", (dir / "eval").string()}},
  };
  for (const auto& [name, args] : steps) {
    r.exit_code = Cli(args, log);
    if (r.exit_code != kExitOk) {
      r.failed_step = name;
      return r;
    }
  }
  WriteText(dir / "log.txt", log.str());
  r.report = Slurp(dir / "eval" / "report.txt");
  const nlohmann::json j = nlohmann::json::parse(Slurp(dir / "eval" / "report.json"));
  for (const auto& row : j["metrics"]["STOI_pct"]) {
    const double mean = row["mean"].get<double>() / 100.0;
    (row["method"] == kUnprocessedMethod ? r.unprocessed_stoi : r.model_stoi) = mean;
  }
  return r;
}

std::optional<DeskRun> desk_first;

Outcome DeskScale(const fs::path& work) {
  desk_first = RunDesk(work / "c10");
  const DeskRun& r = *desk_first;
  if (!r.failed_step.empty()) {
    return {false, r.failed_step + " step exited with code " + std::to_string(r.exit_code)};
  }
  std::cout << r.report << std::flush;
  return {r.model_stoi > r.unprocessed_stoi,
          "50 mixtures, M=4, 5 epochs; held-out mean STOI PDPCRN " + Fixed(100 * r.model_stoi, 2) +
              "% vs unprocessed " + Fixed(100 * r.unprocessed_stoi, 2) + "% (must be strictly above)"};
}

// 11 --------------------------------------------------------------------

// Files whose bytes must repeat across reruns, relative to the run root.
std::vector<std::string> OverfitFiles() {
  return {"out/pdpcrn/loss.csv", "out/pdpcrn_wo_bi/loss.csv", "out/pdpcrn/metrics.csv",
          "out/pdpcrn_wo_bi/metrics.csv", "out/unprocessed_metrics.csv"};
}

std::vector<std::string> DeskFiles() {
  return {"run/loss.csv", "eval/metrics_unprocessed.csv", "eval/metrics_pdpcrn.csv"};
}

Outcome Determinism(const fs::path& work) {
  if (!overfit_first) overfit_first = RunOverfit(work / "c9");
  if (!desk_first) desk_first = RunDesk(work / "c10");
  const OverfitRun again9 = RunOverfit(work / "c11" / "c9");
  const DeskRun again10 = RunDesk(work / "c11" / "c10");
  std::vector<std::string> mismatched;
  size_t compared = 0;
  auto compare = [&](const fs::path& a, const fs::path& b, const std::vector<std::string>& files) {
    for (const auto& f : files) {
      ++compared;
      if (!fs::exists(a / f) || !fs::exists(b / f) || Slurp(a / f) != Slurp(b / f)) mismatched.push_back(f);
    }
  };
  compare(overfit_first->dir, again9.dir, OverfitFiles());
  compare(desk_first->dir, again10.dir, DeskFiles());
  std::string detail = std::to_string(compared - mismatched.size()) + "/" + std::to_string(compared) +
                       " loss-curve and metric CSVs byte-identical across reruns of criteria 9 and 10";
  for (const auto& f : mismatched) detail += "; differs: " + f;
  return {mismatched.empty(), detail};
}

}  // namespace
}  // namespace pdpcrn

int main(int argc, char** argv) {
  using namespace pdpcrn;
  CLI::App app("Acceptance criteria 1-11", "acceptance");
  std::string work = (fs::temp_directory_path() / "pdpcrn_acceptance").string();
  std::vector<int> only;
  app.add_option("--work", work, "Artifact directory");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',')->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"parameter ordering", [&] { return ParamOrdering(work); }},
      {"FLOP ordering", [] { return FlopOrdering(); }},
      {"gradient suite", [] { return GradientSuite(); }},
      {"causality suite", [] { return CausalitySuite(); }},
      {"STFT round trip", [] { return StftRoundTrip(); }},
      {"RIR validity", [] { return RirValidity(); }},
      {"mixture SNR", [&] { return MixtureSnr(work); }},
      {"STOI correctness", [] { return StoiCorrectness(); }},
      {"overfit smoke", [&] { return OverfitSmoke(work); }},
      {"desk-scale end to end", [&] { return DeskScale(work); }},
      {"determinism", [&] { return Determinism(work); }},
  };
  int failed = 0, ran = 0;
  std::vector<std::string> lines;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << o.detail << " ["
         << std::fixed << std::setprecision(1) << secs << " s]";
    std::cout << line.str() << std::endl;
    lines.push_back(line.str());
    ++ran;
    failed += o.pass ? 0 : 1;
  }
  std::cout << "\nSummary\n";
  for (const auto& l : lines) std::cout << l << "\n";
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
