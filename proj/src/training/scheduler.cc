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

#include "pdpcrn/training/scheduler.h"

#include <limits>

#include "pdpcrn/io/errors.h"

namespace pdpcrn {

PlateauScheduler::PlateauScheduler(double lr, int patience, double factor)
    : lr_(lr), patience_(patience), factor_(factor), best_(std::numeric_limits<double>::infinity()) {
  if (!(lr > 0.0)) throw ConfigError("scheduler: learning rate must be positive");
  if (patience < 1) throw ConfigError("scheduler: patience must be at least 1");
  if (!(factor > 0.0 && factor < 1.0)) throw ConfigError("scheduler: factor must lie in (0, 1)");
}

bool PlateauScheduler::Observe(double validation_loss) {
  if (validation_loss < best_) {
    best_ = validation_loss;
    bad_epochs_ = 0;
    return false;
  }
  if (++bad_epochs_ < patience_) return false;
  lr_ *= factor_;
  bad_epochs_ = 0;
  return true;
}

nlohmann::json PlateauScheduler::ToJson() const {
  nlohmann::json j = {{"lr", lr_}, {"patience", patience_}, {"factor", factor_}, {"bad_epochs", bad_epochs_}};
  // JSON has no infinity; a missing best means nothing was observed yet.
  if (best_ != std::numeric_limits<double>::infinity()) j["best"] = best_;
  return j;
}

PlateauScheduler PlateauScheduler::FromJson(const nlohmann::json& j) {
  PlateauScheduler s(j.at("lr").get<double>(), j.at("patience").get<int>(), j.at("factor").get<double>());
  s.bad_epochs_ = j.at("bad_epochs").get<int>();
  if (j.contains("best")) s.best_ = j["best"].get<double>();
  return s;
}

}  // namespace pdpcrn
