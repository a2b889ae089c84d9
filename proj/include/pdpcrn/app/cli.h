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

// Command-line surface: synth, train, enhance, eval, profile and ablate.
//
// Every subcommand takes --out DIR, --config FILE, --set section.key=value
// (repeatable, applied after the file) and --seed N, and writes config.ini
// (the effective configuration) and seed.json into DIR. Failures print one
// line of the form "error[category]: message" and return the exit codes in
// pdpcrn/io/errors.h.

#ifndef PDPCRN_APP_CLI_H_
#define PDPCRN_APP_CLI_H_

#include <ostream>

namespace pdpcrn {

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdpcrn

#endif  // PDPCRN_APP_CLI_H_
