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

#include "clear/loudness.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include <fmt/format.h>

#include "clear/errors.hpp"

namespace clear {

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;

  void apply(std::vector<double>& x) const {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (auto& v : x) {
      const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = v;
      y2 = y1;
      y1 = y;
      v = y;
    }
  }
};

// BS.1770-4 K-weighting at 48 kHz: stage 1 models the acoustic effect of the
// head (high shelf), stage 2 is the RLB high-pass.
constexpr Biquad kShelf = {1.53512485958697, -2.69169618940638, 1.19839281085285,
                           -1.69065929318241, 0.73248077421585};
constexpr Biquad kHighPass = {1.0, -2.0, 1.0, -1.99004745483398, 0.99007225036621};

constexpr double kAbsoluteGateLufs = -70.0;
constexpr double kRelativeGateLu = -10.0;
constexpr double kOffset = -0.691;

double block_loudness(double mean_square) {
  return kOffset + 10.0 * std::log10(mean_square);
}

}  // namespace

double measure_loudness(const Waveform& audio) {
  if (audio.empty()) throw DataError("measure_loudness: empty waveform");
  if (audio.rate != kSampleRate) {
    throw DataError(fmt::format("measure_loudness: rate {} unsupported", audio.rate));
  }

  std::vector<double> x(audio.samples.begin(), audio.samples.end());
  kShelf.apply(x);
  kHighPass.apply(x);

  const std::size_t block = static_cast<std::size_t>(0.400 * audio.rate);
  const std::size_t step = static_cast<std::size_t>(0.100 * audio.rate);

  std::vector<double> block_ms;
  if (x.size() < block) {
    double sum = 0.0;
    for (double v : x) sum += v * v;
    block_ms.push_back(sum / static_cast<double>(x.size()));
  } else {
    for (std::size_t start = 0; start + block <= x.size(); start += step) {
      double sum = 0.0;
      for (std::size_t i = start; i < start + block; ++i) sum += x[i] * x[i];
      block_ms.push_back(sum / static_cast<double>(block));
    }
  }

  // Absolute gate.
  std::vector<double> gated;
  for (double ms : block_ms) {
    if (ms > 0.0 && block_loudness(ms) > kAbsoluteGateLufs) gated.push_back(ms);
  }
  if (gated.empty()) return kImmeasurablyQuiet;

  // Relative gate, threshold from the mean of absolutely gated blocks.
  double mean = 0.0;
  for (double ms : gated) mean += ms;
  mean /= static_cast<double>(gated.size());
  const double relative_gate = block_loudness(mean) + kRelativeGateLu;

  double sum = 0.0;
  std::size_t count = 0;
  for (double ms : gated) {
    if (block_loudness(ms) > relative_gate) {
      sum += ms;
      ++count;
    }
  }
  if (count == 0) return kImmeasurablyQuiet;
  return block_loudness(sum / static_cast<double>(count));
}

}  // namespace clear
