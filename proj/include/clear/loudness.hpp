// Copyright 2026 The cleargen authors
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

#pragma once

#include <limits>

#include "clear/waveform.hpp"

namespace clear {

// Returned when every gating block of a signal sits below the absolute gate,
// i.e. the loudness is not measurable (digital silence and near-silence).
inline constexpr double kImmeasurablyQuiet = -std::numeric_limits<double>::infinity();

inline bool is_measurable(double lufs) { return lufs > kImmeasurablyQuiet; }

// Integrated loudness in dB LUFS per ITU-R BS.1770-4: K-weighting (high-shelf
// plus high-pass), 400 ms blocks with 75% overlap, -70 LUFS absolute gate and
// -10 LU relative gate. Mono input, 48 kHz only (the K-filter coefficients are
// the standard's 48 kHz set). Throws DataError on empty input.
//
// Signals shorter than one 400 ms block are measured as a single block over
// their full length.
double measure_loudness(const Waveform& audio);

}  // namespace clear
