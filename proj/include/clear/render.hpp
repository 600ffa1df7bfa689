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

#include <cstdint>

#include "clear/bank.hpp"
#include "clear/scene.hpp"
#include "clear/waveform.hpp"

namespace clear {

struct SceneAudio {
  long scene_id = 0;
  Waveform audio;
  double canvas_ms = 0.0;
};

struct RenderDiagnostics {
  std::size_t clamped_samples = 0;
};

// Adds uniform white noise from [-f, +f] with 20*log10(f) = attenuation_db,
// then clamps to [-1, +1]. attenuation_db must lie in [-90, -80]. For a given
// seed the noise realization is reproducible sample for sample.
Waveform add_noise(const Waveform& audio, double attenuation_db, std::uint64_t seed);

// Schroeder reverberator: four parallel feedback combs followed by two series
// all-pass diffusers, with comb feedback chosen so the impulse response decays
// 60 dB in rt60_ms. Output is input length plus the reverb tail; no clamping.
// rt60_ms must lie in [50, 400].
Waveform apply_reverb(const Waveform& audio, double rt60_ms);

// Places the scene's sounds at their start offsets on a canvas of canvas_ms,
// adds the scene's noise floor over the whole canvas, applies reverberation,
// truncates back to the canvas and clamps. Bit-identical for identical inputs.
SceneAudio render_scene(const SymbolicScene& scene, const SoundBank& bank,
                        double canvas_ms, RenderDiagnostics* diagnostics = nullptr);

}  // namespace clear
