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

#ifndef PDPCRN_IO_ERRORS_H_
#define PDPCRN_IO_ERRORS_H_

#include <exception>
#include <stdexcept>
#include <string>

namespace pdpcrn {

// Process exit codes shared by every command-line entry point.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNumeric = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a computation produces a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int ExitCodeFor(const std::exception& e);
// "error[<category>]: <message>" on one line; newlines in the message are
// replaced so the line stays machine-parseable.
std::string FormatError(const std::exception& e);

}  // namespace pdpcrn

#endif  // PDPCRN_IO_ERRORS_H_
