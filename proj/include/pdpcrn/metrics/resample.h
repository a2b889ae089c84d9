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

#ifndef PDPCRN_METRICS_RESAMPLE_H_
#define PDPCRN_METRICS_RESAMPLE_H_

#include <vector>

namespace pdpcrn {

// Anti-aliasing filter of the Octave resample() port used by the common
// STOI implementations: Kaiser-windowed sinc for 60 dB rejection with a
// roll-off of a tenth of the cutoff, normalized to unit sum. `up` and
// `down` are reduced by their gcd first.
std::vector<double> ResampleFilter(int up, int down);

// Polyphase rational resampling by up / down with ResampleFilter, zero
// padding at both ends and the filter centred on each output sample.
// Output length is ceil(n * up / down).
std::vector<double> ResamplePoly(const std::vector<double>& x, int up, int down);

}  // namespace pdpcrn

#endif  // PDPCRN_METRICS_RESAMPLE_H_
