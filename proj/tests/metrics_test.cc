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
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "grad_check.h"
#include "json.hpp"
#include "pdpcrn/metrics/evaluate.h"
#include "pdpcrn/metrics/resample.h"
#include "pdpcrn/metrics/si_sdr.h"
#include "pdpcrn/metrics/stoi.h"
#include "pdpcrn/signal/dataset.h"

#ifndef PDPCRN_TEST_DATA_DIR
#error "PDPCRN_TEST_DATA_DIR must be defined"
#endif

namespace pdpcrn {
namespace {

namespace fs = std::filesystem;

std::string DataPath(const std::string& name) { return std::string(PDPCRN_TEST_DATA_DIR) + "/" + name; }

nlohmann::json Golden() {
  std::ifstream in(DataPath("stoi_golden.json"));
  return nlohmann::json::parse(in);
}

std::vector<double> Mono(const std::string& name) { return ReadWav(DataPath(name)).channels[0]; }

// STOI written directly from the algorithm definition with a
// naive DFT; shares only the resampler with the production code.
double LiteralStoi(const std::vector<double>& clean16, const std::vector<double>& degraded16) {
  const std::vector<double> x10 = ResamplePoly(clean16, 10000, 16000);
  const std::vector<double> y10 = ResamplePoly(degraded16, 10000, 16000);
  const int N = 256, hop = 128, nfft = 512, J = 15, L = 30;
  std::vector<double> w(N);
  for (int n = 0; n < N; ++n) w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (n + 1) / (N + 1)));
  std::vector<int64_t> starts;
  for (int64_t s = 0; s < static_cast<int64_t>(x10.size()) - N; s += hop) starts.push_back(s);
  std::vector<double> energy;
  for (int64_t s : starts) {
    double e = 0;
    for (int n = 0; n < N; ++n) e += std::pow(w[n] * x10[s + n], 2);
    energy.push_back(10.0 * std::log10(e));
  }
  const double top = *std::max_element(energy.begin(), energy.end());
  std::vector<int64_t> kept;
  for (size_t i = 0; i < starts.size(); ++i)
    if (energy[i] > top - 40.0) kept.push_back(starts[i]);
  std::vector<double> x((kept.size() - 1) * hop + N), y(x.size());
  for (size_t j = 0; j < kept.size(); ++j)
    for (int n = 0; n < N; ++n) {
      x[j * hop + n] += w[n] * x10[kept[j] + n];
      y[j * hop + n] += w[n] * y10[kept[j] + n];
    }
  std::vector<int> lo(J), hi(J);
  for (int j = 0; j < J; ++j) {
    const double cf = 150.0 * std::pow(2.0, j / 3.0);
    lo[j] = static_cast<int>(std::lround(cf * std::pow(2.0, -1.0 / 6.0) / (10000.0 / nfft)));
    hi[j] = static_cast<int>(std::lround(cf * std::pow(2.0, 1.0 / 6.0) / (10000.0 / nfft)));
  }
  auto envelopes = [&](const std::vector<double>& s) {
    std::vector<std::vector<double>> env(J);
    for (int64_t start = 0; start < static_cast<int64_t>(s.size()) - N; start += hop) {
      std::vector<double> power(nfft / 2 + 1);
      for (int k = 0; k <= nfft / 2; ++k) {
        std::complex<double> acc = 0;
        for (int n = 0; n < N; ++n) acc += w[n] * s[start + n] * std::polar(1.0, -2.0 * std::numbers::pi * k * n / nfft);
        power[k] = std::norm(acc);
      }
      for (int j = 0; j < J; ++j) {
        double e = 0;
        for (int k = lo[j]; k < hi[j]; ++k) e += power[k];
        env[j].push_back(std::sqrt(e));
      }
    }
    return env;
  };
  const auto X = envelopes(x), Y = envelopes(y);
  const int M = static_cast<int>(X[0].size());
  const double c = std::pow(10.0, 15.0 / 20.0);
  double sum = 0;
  int count = 0;
  for (int m = L - 1; m < M; ++m) {
    for (int j = 0; j < J; ++j) {
      std::vector<double> a(X[j].begin() + m - L + 1, X[j].begin() + m + 1);
      std::vector<double> b(Y[j].begin() + m - L + 1, Y[j].begin() + m + 1);
      double na = 0, nb = 0;
      for (int i = 0; i < L; ++i) na += a[i] * a[i], nb += b[i] * b[i];
      const double alpha = std::sqrt(na / nb);
      for (int i = 0; i < L; ++i) b[i] = std::min(alpha * b[i], (1.0 + c) * a[i]);
      double ma = 0, mb = 0;
      for (int i = 0; i < L; ++i) ma += a[i] / L, mb += b[i] / L;
      double sab = 0, saa = 0, sbb = 0;
      for (int i = 0; i < L; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
      }
      sum += sab / std::sqrt(saa * sbb);
      ++count;
    }
  }
  return sum / count;
}

TEST_CASE("resampler matches the reference trace") {
  const auto g = Golden()["resample"];
  std::vector<double> x(400);
  for (int n = 0; n < 400; ++n) x[n] = std::sin(0.1 * n) + 0.5 * std::cos(0.37 * n);
  const auto y = ResamplePoly(x, 10000, 16000);
  REQUIRE(static_cast<int>(y.size()) == g["length"].get<int>());
  for (const auto& [idx, value] : g["samples"].items()) {
    CHECK(std::abs(y[std::stoi(idx)] - value.get<double>()) < 1e-12);
  }
  const auto h = ResampleFilter(10000, 16000);
  CHECK(h.size() == 581);
  double s = 0;
  for (double v : h) s += v;
  CHECK(std::abs(s - 1.0) < 1e-14);
}

TEST_CASE("third octave bands") {
  const auto obm = ThirdOctaveBands();
  REQUIRE(obm.size() == 15);
  // 150 Hz * 2^(-1/6) = 133.6 Hz is nearest bin 7 (136.7 Hz).
  CHECK(obm[0][6] == 0.0);
  CHECK(obm[0][7] == 1.0);
  for (const auto& row : obm) CHECK(std::accumulate(row.begin(), row.end(), 0.0) > 0);
}

TEST_CASE("stoi matches the golden scores and the literal oracle") {
  const auto g = Golden()["stoi"];
  const auto clean = Mono("stoi_clean.wav");
  for (const auto& [name, value] : g.items()) {
    const double s = Stoi(clean, Mono(name), 16000);
    MESSAGE(name << " stoi " << s << " golden " << value.get<double>());
    CHECK(std::abs(s - value.get<double>()) < 1e-3);
  }
  const auto noisy = Mono("stoi_noisy_0dB.wav");
  const double literal = LiteralStoi(clean, noisy);
  CHECK(std::abs(Stoi(clean, noisy, 16000) - literal) < 1e-3);
}

TEST_CASE("stoi identity, gain invariance and monotonicity") {
  const auto clean = Mono("stoi_clean.wav");
  CHECK(Stoi(clean, clean, 16000) == 1.0);
  const auto noisy = Mono("stoi_noisy_0dB.wav");
  const double base = Stoi(clean, noisy, 16000);
  for (double gain : {0.5, 0.8, 1.7, 2.0}) {
    std::vector<double> scaled = noisy;
    for (double& v : scaled) v *= gain;
    CHECK(std::abs(Stoi(clean, scaled, 16000) - base) < 1e-9);
  }
  Rng rng(3);
  std::vector<double> noise(clean.size());
  for (double& v : noise) v = rng.Normal();
  double es = 0, en = 0;
  for (size_t i = 0; i < clean.size(); ++i) es += clean[i] * clean[i], en += noise[i] * noise[i];
  double previous = -2.0;
  for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
    const double k = std::sqrt(es / (en * std::pow(10.0, snr / 10.0)));
    std::vector<double> y = clean;
    for (size_t i = 0; i < y.size(); ++i) y[i] += k * noise[i];
    const double s = Stoi(clean, y, 16000);
    CHECK(s > previous);
    previous = s;
  }
}

TEST_CASE("stoi errors") {
  const auto clean = Mono("stoi_clean.wav");
  std::vector<double> shorter(clean.begin(), clean.end() - 1);
  CHECK_THROWS_AS(Stoi(clean, shorter, 16000), std::invalid_argument);
  CHECK_THROWS_AS(Stoi(std::vector<double>(8000, 0.0), std::vector<double>(8000, 0.1), 16000),
                  std::invalid_argument);
  std::vector<double> brief(clean.begin() + 16000, clean.begin() + 19000);
  CHECK_THROWS_AS(Stoi(brief, brief, 16000), std::invalid_argument);
}

TEST_CASE("si-sdr bounds and constructed values") {
  Rng rng(4);
  std::vector<double> x(1000), n(1000);
  for (double& v : x) v = rng.Normal();
  for (double& v : n) v = rng.Normal();
  double xn = 0, xx = 0;
  for (size_t i = 0; i < x.size(); ++i) xn += x[i] * n[i], xx += x[i] * x[i];
  for (size_t i = 0; i < x.size(); ++i) n[i] -= xn / xx * x[i];
  double nn = 0;
  for (double v : n) nn += v * v;
  for (double& v : n) v *= std::sqrt(xx / nn);
  std::vector<double> y(x.size()), scaled(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] + n[i], scaled[i] = 3.7 * x[i];
  CHECK(std::abs(SiSdr(x, y)) < 1e-9);
  CHECK(SiSdr(x, scaled) == kSiSdrBoundDb);
  CHECK(SiSdr(x, n) == -kSiSdrBoundDb);
  std::vector<double> y2 = y, y37 = y;
  for (double& v : y2) v *= 0.25;
  for (double& v : y37) v *= 3.7;
  CHECK(SiSdr(x, y2) == SiSdr(x, y));
  CHECK(std::abs(SiSdr(x, y37) - SiSdr(x, y)) < 1e-12);
  CHECK_THROWS_AS(SiSdr(std::vector<double>(10, 0.0), y), std::invalid_argument);
  CHECK_THROWS_AS(SiSdr(x, std::vector<double>(10, 1.0)), std::invalid_argument);
}

TEST_CASE("tensor si-sdr agrees with the scalar form and has correct gradients") {
  Rng rng(5);
  Tensor<double> ref = testing::RandomTensor({2, 64}, rng);
  Tensor<double> est = testing::RandomLeaf({2, 64}, rng);
  {
    auto d = est.mutable_data();
    for (int64_t i = 0; i < est.numel(); ++i) d[i] += 2.0 * ref.data()[i];
  }
  const Tensor<double> v = SiSdrTensor(ref, est);
  for (int b = 0; b < 2; ++b) {
    std::vector<double> r(ref.data().begin() + 64 * b, ref.data().begin() + 64 * (b + 1));
    std::vector<double> e(est.data().begin() + 64 * b, est.data().begin() + 64 * (b + 1));
    CHECK(std::abs(v.at({b}) - SiSdr(r, e)) < 5e-3);
  }
  CHECK(std::abs(SiSdrTensor(ref, ref).at({0}) - kSiSdrBoundDb) < 1e-9);
  CHECK(testing::GradCheck([&] { return Sum(SiSdrTensor(ref, est)); }, {est}) < 1e-6);
}

TEST_CASE("evaluation over a synthesized manifest") {
  const fs::path root = fs::temp_directory_path() / "pdpcrn_metrics_eval";
  fs::remove_all(root);
  DatasetConfig cfg;
  cfg.count = 4;
  cfg.num_mics = 2;
  cfg.seed = 11;
  cfg.utterance_seconds = 1.5;
  cfg.snrs_db = {-5.0, 5.0};
  cfg.rt60s = {0.2, 0.3};
  SynthesizeDataset(cfg, root.string());
  auto rows = ReadManifest((root / "manifest.jsonl").string());
  REQUIRE(rows.size() == 4);

  const MetricReport oracle = Evaluate("Oracle", rows, OracleEnhancer());
  REQUIRE(oracle.rows.size() == 4);
  for (const auto& r : oracle.rows) {
    CHECK(r.stoi == 1.0);
    CHECK(r.si_sdr_db == kSiSdrBoundDb);
  }
  ManifestRow missing = rows[0];
  missing.id = "missing";
  missing.mixture_path = (root / "nope.wav").string();
  rows.push_back(missing);
  const MetricReport plain = Evaluate("Unprocessed", rows, PassthroughEnhancer());
  CHECK(plain.rows.size() == 4);
  REQUIRE(plain.errors.size() == 1);
  CHECK(plain.errors[0].rfind("missing: ", 0) == 0);

  double stoi = 0, sdr = 0;
  for (const auto& r : plain.rows) stoi += r.stoi / 4, sdr += r.si_sdr_db / 4;
  CHECK(std::abs(plain.Overall().stoi - stoi) < 1e-12);
  CHECK(std::abs(plain.Overall().si_sdr_db - sdr) < 1e-12);
  for (const auto& g : plain.BySnr()) {
    double s = 0;
    int n = 0;
    for (const auto& r : plain.rows)
      if (r.snr_db == g.snr_db) s += r.stoi, ++n;
    CHECK(g.count == n);
    CHECK(std::abs(g.stoi - s / n) < 1e-12);
  }
  const auto j = ReportJson({plain, oracle});
  CHECK(j["snr_columns"].size() == 2);
  CHECK(j["metrics"]["STOI_pct"][1]["method"] == "Oracle");
  CHECK(j["metrics"]["STOI_pct"][1]["mean"].get<double>() == 100.0);
  CHECK(j["errors"]["Unprocessed"].size() == 1);
  CHECK(!FormatReport({plain, oracle}).empty());

  WriteMetricsCsv((root / "m.csv").string(), plain);
  std::ifstream in(root / "m.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "id,snr_db,rt60_s,stoi_pct,si_sdr_db");
}

}  // namespace
}  // namespace pdpcrn
