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
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clear/bank.hpp"
#include "clear/types.hpp"

namespace clear {

struct PostProcessParams {
  double noise_attenuation_db = -85.0;  // in [-90, -80]
  double reverb_rt60_ms = 200.0;        // in [50, 400]
};

struct PlacedSound {
  std::string source_id;
  Instrument instrument;
  Note note;
  Loudness loudness;
  Brightness brightness;
  double duration_ms = 0.0;
  int absolute_position = 0;  // 1-based
  int relative_position = 0;  // rank among same-instrument sounds
  GlobalPosition global_position = GlobalPosition::beginning;
  double start_ms = 0.0;
};

// The ground truth questions are asked and answered against.
struct SymbolicScene {
  long scene_id = 0;
  Split split = Split::train;
  std::vector<PlacedSound> sounds;
  PostProcessParams post;
  std::uint64_t seed = 0;

  double total_duration_ms() const;
};

// Fills absolute positions 1..n, per-instrument relative positions, global
// positions (first 30% beginning, last 30% end, middle otherwise; 3/4/3 for
// ten sounds) and cumulative start offsets.
std::vector<PlacedSound> derive_position_attributes(std::vector<PlacedSound> sounds);

// Picks `sounds_per_scene` distinct sounds uniformly from the bank (keyed on
// sorted ids, so bank order does not matter), samples post-processing
// parameters and derives position attributes. Deterministic for
// (bank, scene_id, master_seed).
SymbolicScene compose_scene(const SoundBank& bank, long scene_id,
                            std::uint64_t master_seed, int sounds_per_scene = 10);

nlohmann::json scene_to_json(const SymbolicScene& scene);
SymbolicScene scene_from_json(const nlohmann::json& j);

}  // namespace clear
