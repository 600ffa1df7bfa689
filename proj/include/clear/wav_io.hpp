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

#include <filesystem>

#include "clear/waveform.hpp"

namespace clear {

struct WavData {
  Waveform wave;
  int source_bits = 16;  // bit depth of the file the samples came from
};

// Reads a RIFF WAV file. Accepted input: PCM, mono, 16 or 24 bit, 48 kHz.
// Anything else raises DataError (the pipeline does not resample).
WavData read_wav(const std::filesystem::path& path);

// Writes PCM 16-bit mono at the waveform's rate. Samples are scaled by 2^15,
// rounded to nearest and clamped to the int16 range, so a write/read round
// trip is exact to within one quantization step (2^-15).
void write_wav(const Waveform& wave, const std::filesystem::path& path);

}  // namespace clear
