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

#ifndef PDPCRN_TRAINING_SCHEDULER_H_
#define PDPCRN_TRAINING_SCHEDULER_H_

#include "json.hpp"

namespace pdpcrn {

// Multiplies the learning rate by `factor` once the validation loss has
// failed to strictly improve on its best value for `patience` consecutive
// epochs. The counter restarts after every reduction and every improvement.
class PlateauScheduler {
 public:
  // Throws ConfigError unless lr > 0, patience >= 1 and 0 < factor < 1.
  PlateauScheduler(double lr, int patience = 2, double factor = 0.5);

  // Records one epoch; returns true when the rate was reduced.
  bool Observe(double validation_loss);

  double lr() const { return lr_; }
  double best() const { return best_; }
  int bad_epochs() const { return bad_epochs_; }

  nlohmann::json ToJson() const;
  static PlateauScheduler FromJson(const nlohmann::json& j);

 private:
  double lr_;
  int patience_;
  double factor_;
  double best_;
  int bad_epochs_ = 0;
};

}  // namespace pdpcrn

#endif  // PDPCRN_TRAINING_SCHEDULER_H_
