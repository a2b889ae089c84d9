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

#include "pdpcrn/training/ablation.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pdpcrn/io/errors.h"
#include "pdpcrn/models/checkpoint.h"

namespace pdpcrn {

namespace {

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

}  // namespace

MetricReport EvaluateCheckpoint(const std::string& method, const std::string& checkpoint,
                                const std::vector<ManifestRow>& rows) {
  Network<float> net = LoadModel<float>(checkpoint);
  return Evaluate(method, rows, NetworkEnhancer(net));
}

nlohmann::json AblationJson(const MetricReport& unprocessed, const std::vector<AblationArm>& arms) {
  std::vector<MetricReport> reports{unprocessed};
  for (const auto& arm : arms) reports.push_back(arm.report);
  nlohmann::json j = ReportJson(reports);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& arm : arms) {
    nlohmann::json run = {{"method", arm.method},
                          {"params", arm.params},
                          {"bi_interaction", arm.model.bi_interaction},
                          {"epochs", arm.history.size()},
                          {"best_checkpoint", arm.best_checkpoint}};
    if (!arm.history.empty()) {
      run["initial_train_loss"] = arm.history.front().train_loss;
      run["final_train_loss"] = arm.history.back().train_loss;
      double best = arm.history.front().val_loss;
      for (const auto& r : arm.history) best = std::min(best, r.val_loss);
      run["best_val_loss"] = best;
    }
    run["si_sdr_gain_db"] = arm.report.Overall().si_sdr_db - unprocessed.Overall().si_sdr_db;
    run["stoi_gain_pct"] = 100.0 * (arm.report.Overall().stoi - unprocessed.Overall().stoi);
    runs.push_back(run);
  }
  j["runs"] = runs;
  return j;
}

std::string FormatAblation(const MetricReport& unprocessed, const std::vector<AblationArm>& arms) {
  const nlohmann::json j = AblationJson(unprocessed, arms);
  std::vector<MetricReport> reports{unprocessed};
  for (const auto& arm : arms) reports.push_back(arm.report);
  std::ostringstream os;
  os << FormatReport(reports) << '\n' << std::fixed << std::setprecision(3);
  os << std::left << std::setw(18) << "run" << std::right << std::setw(10) << "params" << std::setw(8) << "epochs"
     << std::setw(12) << "loss0" << std::setw(12) << "loss_end" << std::setw(12) << "dSI-SDR" << std::setw(10)
     << "dSTOI" << '\n';
  for (const auto& run : j["runs"]) {
    os << std::left << std::setw(18) << run["method"].get<std::string>() << std::right << std::setw(10)
       << run["params"].get<int64_t>() << std::setw(8) << run["epochs"].get<int64_t>();
    if (run.contains("initial_train_loss")) {
      os << std::setw(12) << run["initial_train_loss"].get<double>() << std::setw(12)
         << run["final_train_loss"].get<double>();
    } else {
      os << std::setw(12) << "-" << std::setw(12) << "-";
    }
    os << std::setw(12) << run["si_sdr_gain_db"].get<double>() << std::setw(10) << run["stoi_gain_pct"].get<double>()
       << '\n';
  }
  return os.str();
}

AblationResult RunAblation(const ModelConfig& model, const TrainConfig& train,
                           const std::vector<ManifestRow>& train_rows, const std::vector<ManifestRow>& val_rows,
                           const std::vector<ManifestRow>& eval_rows, const std::string& out_dir) {
  if (model.variant != Variant::kPdpcrn) throw ConfigError("ablation: the bi_interaction switch needs a PDPCRN model");
  const std::vector<TrainingExample> train_set = LoadExamples(train_rows);
  const std::vector<TrainingExample> val_set = LoadExamples(val_rows);
  AblationResult result;
  result.unprocessed = Evaluate(kUnprocessedMethod, eval_rows, PassthroughEnhancer());
  std::filesystem::create_directories(out_dir);
  WriteMetricsCsv(out_dir + "/unprocessed_metrics.csv", result.unprocessed);
  for (bool bi : {true, false}) {
    AblationArm arm;
    arm.model = model;
    arm.model.bi_interaction = bi;
    arm.method = MethodName(arm.model);
    const std::string dir = out_dir + (bi ? "/pdpcrn" : "/pdpcrn_wo_bi");
    Trainer trainer(arm.model, train, train_set, val_set, dir);
    trainer.Run();
    arm.params = trainer.network().ParamCount();
    arm.history = trainer.history();
    arm.best_checkpoint = trainer.best_checkpoint();
    arm.report = EvaluateCheckpoint(arm.method, arm.best_checkpoint, eval_rows);
    WriteMetricsCsv(dir + "/metrics.csv", arm.report);
    result.arms.push_back(std::move(arm));
  }
  result.report = AblationJson(result.unprocessed, result.arms);
  result.text = FormatAblation(result.unprocessed, result.arms);
  WriteText(out_dir + "/ablation.json", result.report.dump(2) + "\n");
  WriteText(out_dir + "/ablation.txt", result.text);
  return result;
}

}  // namespace pdpcrn
