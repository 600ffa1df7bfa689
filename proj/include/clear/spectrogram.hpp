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

#include <cstddef>
#include <filesystem>
#include <vector>

#include "clear/waveform.hpp"

namespace clear {

struct STFTParams {
  double window_ms = 25.0;
  double hop_ms = 10.0;
  // 0 = auto: the next power of two holding one window (2048 at 48 kHz/25 ms).
  std::size_t fft_size = 0;
  double log_epsilon = 1e-10;
};

// Log-magnitude STFT, 20*log10(|X| + epsilon), Hann window. Row-major,
// frames x bins with bins = fft_size/2 + 1. Input of a fixed length always
// produces fixed dimensions.
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<float> values;
  STFTParams stft;

  float at(std::size_t frame, std::size_t bin) const {
    return values[frame * bins + bin];
  }
};

// Throws DataError when the input is shorter than one analysis window.
Spectrogram compute_spectrogram(const Waveform& audio, const STFTParams& params = {});

// Flat binary export: magic "CSPC", then u32 version/frames/bins/fft_size/
// window_samples/hop_samples/sample_rate, then frames*bins float32 row-major
// (all little-endian). See docs/FORMATS.md.
void write_spectrogram(const Spectrogram& spec, const std::filesystem::path& path);

}  // namespace clear
