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

#include <cmath>
#include <cstddef>
#include <vector>

namespace clear {

inline constexpr int kSampleRate = 48000;

// Mono audio, samples normalized to [-1, +1].
struct Waveform {
  std::vector<float> samples;
  int rate = kSampleRate;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  double duration_ms() const {
    return static_cast<double>(samples.size()) * 1000.0 / rate;
  }
};

inline double db_to_gain(double db) { return std::pow(10.0, db / 20.0); }

inline double gain_to_db(double gain) { return 20.0 * std::log10(gain); }

inline void scale(Waveform& w, double gain) {
  for (auto& s : w.samples) s = static_cast<float>(s * gain);
}

// Hard-clamps samples to [-1, +1]; returns how many were touched.
inline std::size_t clamp_unit(Waveform& w) {
  std::size_t clamped = 0;
  for (auto& s : w.samples) {
    if (s > 1.0f) {
      s = 1.0f;
      ++clamped;
    } else if (s < -1.0f) {
      s = -1.0f;
      ++clamped;
    }
  }
  return clamped;
}

}  // namespace clear
