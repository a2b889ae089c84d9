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

// Objective evaluation of an enhancer over a manifest, aggregated across
// the SNR x RT60 grid.

#ifndef PDPCRN_METRICS_EVALUATE_H_
#define PDPCRN_METRICS_EVALUATE_H_

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdpcrn/io/manifest.h"
#include "pdpcrn/io/wav.h"
#include "pdpcrn/models/network.h"

namespace pdpcrn {

struct MetricRow {
  std::string id;
  double snr_db = 0.0;
  double rt60_s = 0.0;
  double stoi = 0.0;  // [-1, 1]
  double si_sdr_db = 0.0;
};

// Arithmetic means over the rows of one group.
struct MetricMean {
  double snr_db = 0.0;
  double rt60_s = 0.0;  // NaN when grouped by SNR only
  double stoi = 0.0;
  double si_sdr_db = 0.0;
  int64_t count = 0;
};

struct MetricReport {
  std::string method;
  std::vector<MetricRow> rows;
  // "id: message" for rows that could not be scored.
  std::vector<std::string> errors;

  MetricMean Overall() const;
  // Sorted by (snr_db, rt60_s).
  std::vector<MetricMean> ByCell() const;
  // Sorted by snr_db.
  std::vector<MetricMean> BySnr() const;
};

// Maps a mixture to an M-channel estimate of the target. The target is
// passed only so that oracle baselines can be expressed; real enhancers
// must ignore it.
using Enhancer = std::function<MultichannelWave(const MultichannelWave& mixture, const MultichannelWave& target)>;

Enhancer PassthroughEnhancer();
Enhancer OracleEnhancer();
// STFT with edge padding, eval-mode network pass, inverse STFT. The network
// must outlive the enhancer.
template <Real T>
Enhancer NetworkEnhancer(Network<T>& net);

// STOI and SI-SDR per channel, averaged over channels.
MetricRow ScoreUtterance(const ManifestRow& row, const MultichannelWave& target, const MultichannelWave& estimate);

// Rows whose files are missing or unscorable are reported in errors and
// skipped; the run continues.
MetricReport Evaluate(const std::string& method, const std::vector<ManifestRow>& rows, const Enhancer& enhancer);

// Columns id,snr_db,rt60_s,stoi_pct,si_sdr_db. Throws IoError.
void WriteMetricsCsv(const std::string& path, const MetricReport& report);

// Methods x metrics over SNR columns, mirroring the layout of the usual
// comparison table, plus per-cell means and errors for each method.
nlohmann::json ReportJson(const std::vector<MetricReport>& methods);

// Plain-text rendering of ReportJson.
std::string FormatReport(const std::vector<MetricReport>& methods);

}  // namespace pdpcrn

#endif  // PDPCRN_METRICS_EVALUATE_H_
