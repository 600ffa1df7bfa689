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

#include "clear/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "clear/errors.hpp"
#include "clear/rng.hpp"

namespace clear {

namespace {

// Base delays (milliseconds) for the comb and all-pass stages. For short
// reverberation times the combs are scaled down so several echoes fit inside
// the decay and the measured RT60 stays near the target.
constexpr double kCombBaseMs[4] = {29.7, 33.1, 37.1, 41.1};
constexpr double kAllPassMs[2] = {5.0, 1.7};
constexpr double kAllPassGain = 0.7;
// Wet mix over the four-comb sum. High enough that the decay tail, not the
// direct path, carries the energy decay curve between -5 and -35 dB.
constexpr double kWetMix = 0.1;

std::size_t to_samples(double ms, int rate) {
  auto n = static_cast<std::size_t>(std::lround(ms / 1000.0 * rate));
  return std::max<std::size_t>(n, 1);
}

void comb_accumulate(const std::vector<float>& x, std::vector<double>& acc,
                     std::size_t delay, double feedback) {
  std::vector<double> line(delay, 0.0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double in = i < x.size() ? x[i] : 0.0;
    const double out = in + feedback * line[pos];
    line[pos] = out;
    pos = (pos + 1) % delay;
    acc[i] += out;
  }
}

void allpass_inplace(std::vector<double>& x, std::size_t delay, double gain) {
  std::vector<double> line(delay, 0.0);
  std::size_t pos = 0;
  for (auto& v : x) {
    const double buffered = line[pos];
    const double w = v + gain * buffered;
    line[pos] = w;
    pos = (pos + 1) % delay;
    v = buffered - gain * w;
  }
}

}  // namespace

Waveform add_noise(const Waveform& audio, double attenuation_db, std::uint64_t seed) {
  if (attenuation_db < -90.0 || attenuation_db > -80.0) {
    throw DataError(fmt::format(
        "add_noise: attenuation {} dB outside [-90, -80]", attenuation_db));
  }
  const double f = db_to_gain(attenuation_db);
  Rng rng(seed);
  Waveform out = audio;
  for (auto& s : out.samples) {
    const double noise = (2.0 * rng.unit() - 1.0) * f;
    s = static_cast<float>(s + noise);
  }
  clamp_unit(out);
  return out;
}

Waveform apply_reverb(const Waveform& audio, double rt60_ms) {
  if (rt60_ms < 50.0 || rt60_ms > 400.0) {
    throw DataError(fmt::format("apply_reverb: rt60 {} ms outside [50, 400]", rt60_ms));
  }

  const double scale = std::clamp(rt60_ms / 400.0, 0.22, 1.0);
  const std::size_t tail = to_samples(rt60_ms * 1.5 + 100.0, audio.rate);
  const std::size_t total = audio.size() + tail;

  std::vector<double> wet(total, 0.0);
  for (double base_ms : kCombBaseMs) {
    const std::size_t delay = to_samples(base_ms * scale, audio.rate) | 1;  // keep odd
    const double feedback =
        std::pow(10.0, -3.0 * static_cast<double>(delay) /
                           (rt60_ms / 1000.0 * audio.rate));
    comb_accumulate(audio.samples, wet, delay, feedback);
  }
  for (double ap_ms : kAllPassMs) {
    allpass_inplace(wet, to_samples(ap_ms * scale, audio.rate), kAllPassGain);
  }

  Waveform out;
  out.rate = audio.rate;
  out.samples.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    const double dry = i < audio.size() ? audio.samples[i] : 0.0;
    out.samples[i] = static_cast<float>(dry + kWetMix * wet[i]);
  }
  return out;
}

SceneAudio render_scene(const SymbolicScene& scene, const SoundBank& bank,
                        double canvas_ms, RenderDiagnostics* diagnostics) {
  const double total_ms = scene.total_duration_ms();
  if (total_ms > canvas_ms + 1e-6) {
    throw DataError(fmt::format(
        "render_scene: scene {} lasts {:.1f} ms, longer than the {:.1f} ms canvas",
        scene.scene_id, total_ms, canvas_ms));
  }

  const auto canvas = static_cast<std::size_t>(std::lround(canvas_ms / 1000.0 * kSampleRate));
  Waveform mix;
  mix.samples.assign(canvas, 0.0f);

  for (const auto& placed : scene.sounds) {
    const ElementarySound& src = bank.get(placed.source_id);
    const auto offset =
        static_cast<std::size_t>(std::lround(placed.start_ms / 1000.0 * kSampleRate));
    for (std::size_t i = 0; i < src.audio.size() && offset + i < canvas; ++i) {
      mix.samples[offset + i] += src.audio.samples[i];
    }
  }

  Waveform noisy = add_noise(mix, scene.post.noise_attenuation_db,
                             derive_seed(scene.seed, stream::kNoise));
  Waveform wet = apply_reverb(noisy, scene.post.reverb_rt60_ms);
  wet.samples.resize(canvas);  // drop the tail beyond the canvas

  const std::size_t clamped = clamp_unit(wet);
  if (diagnostics != nullptr) diagnostics->clamped_samples = clamped;

  SceneAudio out;
  out.scene_id = scene.scene_id;
  out.audio = std::move(wet);
  out.canvas_ms = canvas_ms;
  return out;
}

}  // namespace clear
