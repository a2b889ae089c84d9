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

#ifndef PDPCRN_TENSOR_TENSOR_IO_H_
#define PDPCRN_TENSOR_TENSOR_IO_H_

#include <iosfwd>
#include <string>

#include "pdpcrn/tensor/tensor.h"

namespace pdpcrn {

// Golden-test dump: "TNSR", u32 rank, u32 dims[rank], then float64 values in
// row-major order. All fields little-endian.
void WriteTensorDump(std::ostream& os, const Tensor<double>& t);
Tensor<double> ReadTensorDump(std::istream& is);

void SaveTensorDump(const std::string& path, const Tensor<double>& t);
Tensor<double> LoadTensorDump(const std::string& path);

}  // namespace pdpcrn

#endif  // PDPCRN_TENSOR_TENSOR_IO_H_
