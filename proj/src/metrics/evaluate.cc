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

#include "pdpcrn/metrics/evaluate.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "pdpcrn/io/errors.h"
#include "pdpcrn/metrics/si_sdr.h"
#include "pdpcrn/metrics/stoi.h"

namespace pdpcrn {

namespace {

MetricMean MeanOf(const std::vector<const MetricRow*>& rows, double snr, double rt60) {
  MetricMean m;
  m.snr_db = snr;
  m.rt60_s = rt60;
  for (const MetricRow* r : rows) {
    m.stoi += r->stoi;
    m.si_sdr_db += r->si_sdr_db;
  }
  m.count = static_cast<int64_t>(rows.size());
  if (m.count > 0) {
    m.stoi /= m.count;
    m.si_sdr_db /= m.count;
  }
  return m;
}

}  // namespace

MetricMean MetricReport::Overall() const {
  std::vector<const MetricRow*> all;
  for (const auto& r : rows) all.push_back(&r);
  return MeanOf(all, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
}

std::vector<MetricMean> MetricReport::ByCell() const {
  std::map<std::pair<double, double>, std::vector<const MetricRow*>> groups;
  for (const auto& r : rows) groups[{r.snr_db, r.rt60_s}].push_back(&r);
  std::vector<MetricMean> out;
  for (const auto& [key, members] : groups) out.push_back(MeanOf(members, key.first, key.second));
  return out;
}

std::vector<MetricMean> MetricReport::BySnr() const {
  std::map<double, std::vector<const MetricRow*>> groups;
  for (const auto& r : rows) groups[r.snr_db].push_back(&r);
  std::vector<MetricMean> out;
  for (const auto& [snr, members] : groups) {
    out.push_back(MeanOf(members, snr, std::numeric_limits<double>::quiet_NaN()));
  }
  return out;
}

Enhancer PassthroughEnhancer() {
  return [](const MultichannelWave& mixture, const MultichannelWave&) { return mixture; };
}

Enhancer OracleEnhancer() {
  return [](const MultichannelWave&, const MultichannelWave& target) { return target; };
}

template <Real T>
Enhancer NetworkEnhancer(Network<T>& net) {
  return [&net](const MultichannelWave& mixture, const MultichannelWave&) {
    StftConfig cfg;
    cfg.pad_edges = true;
    return Istft(Enhance(net, Stft(mixture, cfg)), mixture.sample_rate);
  };
}

MetricRow ScoreUtterance(const ManifestRow& row, const MultichannelWave& target, const MultichannelWave& estimate) {
  if (target.num_channels() != estimate.num_channels() || target.num_samples() != estimate.num_samples()) {
    throw std::invalid_argument("estimate has " + std::to_string(estimate.num_channels()) + "x" +
                                std::to_string(estimate.num_samples()) + " samples, target " +
                                std::to_string(target.num_channels()) + "x" + std::to_string(target.num_samples()));
  }
  MetricRow m;
  m.id = row.id;
  m.snr_db = row.snr_db;
  m.rt60_s = row.rt60_s;
  const int channels = target.num_channels();
  for (int c = 0; c < channels; ++c) {
    m.stoi += Stoi(target.channels[c], estimate.channels[c], target.sample_rate) / channels;
    m.si_sdr_db += SiSdr(target.channels[c], estimate.channels[c]) / channels;
  }
  return m;
}

MetricReport Evaluate(const std::string& method, const std::vector<ManifestRow>& rows, const Enhancer& enhancer) {
  MetricReport report;
  report.method = method;
  for (const auto& row : rows) {
    try {
      const MultichannelWave mixture = ReadWav(row.mixture_path);
      const MultichannelWave target = ReadWav(row.target_path);
      report.rows.push_back(ScoreUtterance(row, target, enhancer(mixture, target)));
    } catch (const NumericError&) {
      throw;
    } catch (const std::exception& e) {
      report.errors.push_back(row.id + ": " + e.what());
    }
  }
  return report;
}

void WriteMetricsCsv(const std::string& path, const MetricReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "id,snr_db,rt60_s,stoi_pct,si_sdr_db\n";
  out << std::setprecision(10);
  for (const auto& r : report.rows) {
    out << r.id << ',' << r.snr_db << ',' << r.rt60_s << ',' << 100.0 * r.stoi << ',' << r.si_sdr_db << '\n';
  }
  if (!out) throw IoError(path + ": write failed");
}

nlohmann::json ReportJson(const std::vector<MetricReport>& methods) {
  std::map<double, int> snr_index;
  for (const auto& m : methods)
    for (const auto& r : m.rows) snr_index[r.snr_db] = 0;
  std::vector<double> snrs;
  for (auto& [snr, idx] : snr_index) {
    idx = static_cast<int>(snrs.size());
    snrs.push_back(snr);
  }
  nlohmann::json stoi = nlohmann::json::array(), sisdr = nlohmann::json::array();
  nlohmann::json cells = nlohmann::json::object(), errors = nlohmann::json::object();
  for (const auto& m : methods) {
    nlohmann::json sv(snrs.size(), nullptr), dv(snrs.size(), nullptr);
    for (const auto& g : m.BySnr()) {
      sv[snr_index[g.snr_db]] = 100.0 * g.stoi;
      dv[snr_index[g.snr_db]] = g.si_sdr_db;
    }
    const MetricMean all = m.Overall();
    stoi.push_back({{"method", m.method}, {"values", sv}, {"mean", 100.0 * all.stoi}, {"count", all.count}});
    sisdr.push_back({{"method", m.method}, {"values", dv}, {"mean", all.si_sdr_db}, {"count", all.count}});
    nlohmann::json c = nlohmann::json::array();
    for (const auto& g : m.ByCell()) {
      c.push_back({{"snr_db", g.snr_db},
                   {"rt60_s", g.rt60_s},
                   {"stoi_pct", 100.0 * g.stoi},
                   {"si_sdr_db", g.si_sdr_db},
                   {"count", g.count}});
    }
    cells[m.method] = c;
    errors[m.method] = m.errors;
  }
  return {{"snr_columns", snrs},
          {"metrics", {{"STOI_pct", stoi}, {"SI-SDR_dB", sisdr}}},
          {"cells", cells},
          {"errors", errors}};
}

std::string FormatReport(const std::vector<MetricReport>& methods) {
  const nlohmann::json j = ReportJson(methods);
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  for (const char* metric : {"STOI_pct", "SI-SDR_dB"}) {
    os << std::left << std::setw(18) << metric;
    for (double snr : j["snr_columns"]) os << std::right << std::setw(9) << snr;
    os << std::right << std::setw(9) << "mean" << '\n';
    for (const auto& row : j["metrics"][metric]) {
      os << std::left << std::setw(18) << row["method"].get<std::string>();
      for (const auto& v : row["values"]) {
        if (v.is_null()) os << std::right << std::setw(9) << "-";
        else os << std::right << std::setw(9) << v.get<double>();
      }
      os << std::right << std::setw(9) << row["mean"].get<double>() << '\n';
    }
  }
  return os.str();
}

template Enhancer NetworkEnhancer<float>(Network<float>&);
template Enhancer NetworkEnhancer<double>(Network<double>&);

}  // namespace pdpcrn
