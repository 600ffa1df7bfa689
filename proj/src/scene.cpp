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

#include "clear/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clear/errors.hpp"
#include "clear/rng.hpp"

namespace clear {

double SymbolicScene::total_duration_ms() const {
  double total = 0.0;
  for (const auto& s : sounds) total += s.duration_ms;
  return total;
}

std::vector<PlacedSound> derive_position_attributes(std::vector<PlacedSound> sounds) {
  if (sounds.empty()) throw DataError("derive_position_attributes: empty selection");

  const int n = static_cast<int>(sounds.size());
  const int edge = static_cast<int>(std::ceil(0.3 * n));  // 3 for ten sounds
  std::array<int, kNumInstruments> instrument_rank{};
  double cursor_ms = 0.0;
  for (int i = 0; i < n; ++i) {
    auto& s = sounds[i];
    s.absolute_position = i + 1;
    s.relative_position = ++instrument_rank[static_cast<int>(s.instrument)];
    if (s.absolute_position <= edge) {
      s.global_position = GlobalPosition::beginning;
    } else if (s.absolute_position > n - edge) {
      s.global_position = GlobalPosition::end;
    } else {
      s.global_position = GlobalPosition::middle;
    }
    s.start_ms = cursor_ms;
    cursor_ms += s.duration_ms;
  }
  return sounds;
}

SymbolicScene compose_scene(const SoundBank& bank, long scene_id,
                            std::uint64_t master_seed, int sounds_per_scene) {
  if (static_cast<int>(bank.sounds.size()) < sounds_per_scene) {
    throw DataError(fmt::format(
        "compose_scene: bank has {} sounds, need at least {}", bank.sounds.size(),
        sounds_per_scene));
  }

  SymbolicScene scene;
  scene.scene_id = scene_id;
  scene.seed = derive_seed(master_seed, stream::kScene, static_cast<std::uint64_t>(scene_id));
  Rng rng(scene.seed);

  // Selection is keyed on sorted ids so that bank file order is irrelevant.
  std::vector<const ElementarySound*> pool;
  pool.reserve(bank.sounds.size());
  for (const auto& s : bank.sounds) pool.push_back(&s);
  std::sort(pool.begin(), pool.end(),
            [](const ElementarySound* a, const ElementarySound* b) { return a->id < b->id; });

  // Partial Fisher-Yates: draw without replacement.
  std::vector<PlacedSound> selection;
  selection.reserve(static_cast<std::size_t>(sounds_per_scene));
  for (int i = 0; i < sounds_per_scene; ++i) {
    const auto j = i + static_cast<int>(rng.below(pool.size() - static_cast<std::size_t>(i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    const ElementarySound& src = *pool[static_cast<std::size_t>(i)];
    PlacedSound placed;
    placed.source_id = src.id;
    placed.instrument = src.instrument;
    placed.note = src.note;
    placed.loudness = src.loudness_label;
    placed.brightness = src.brightness_label;
    placed.duration_ms = src.duration_ms;
    selection.push_back(std::move(placed));
  }

  scene.sounds = derive_position_attributes(std::move(selection));
  scene.post.noise_attenuation_db = rng.uniform(-90.0, -80.0);
  scene.post.reverb_rt60_ms = rng.uniform(50.0, 400.0);
  return scene;
}

nlohmann::json scene_to_json(const SymbolicScene& scene) {
  nlohmann::json sounds = nlohmann::json::array();
  for (const auto& s : scene.sounds) {
    sounds.push_back({
        {"source_id", s.source_id},
        {"instrument", to_string(s.instrument)},
        {"note", to_string(s.note)},
        {"loudness", to_string(s.loudness)},
        {"brightness", to_string(s.brightness)},
        {"duration_ms", s.duration_ms},
        {"absolute_position", s.absolute_position},
        {"relative_position", s.relative_position},
        {"global_position", to_string(s.global_position)},
        {"start_ms", s.start_ms},
    });
  }
  return {
      {"scene_id", scene.scene_id},
      {"split", to_string(scene.split)},
      {"seed", scene.seed},
      {"post_process",
       {{"noise_attenuation_db", scene.post.noise_attenuation_db},
        {"reverb_rt60_ms", scene.post.reverb_rt60_ms}}},
      {"sounds", sounds},
  };
}

SymbolicScene scene_from_json(const nlohmann::json& j) {
  SymbolicScene scene;
  scene.scene_id = j.at("scene_id").get<long>();
  scene.split = split_from_string(j.at("split").get<std::string>());
  scene.seed = j.at("seed").get<std::uint64_t>();
  const auto& post = j.at("post_process");
  scene.post.noise_attenuation_db = post.at("noise_attenuation_db").get<double>();
  scene.post.reverb_rt60_ms = post.at("reverb_rt60_ms").get<double>();
  for (const auto& js : j.at("sounds")) {
    PlacedSound s;
    s.source_id = js.at("source_id").get<std::string>();
    s.instrument = instrument_from_string(js.at("instrument").get<std::string>());
    s.note = note_from_string(js.at("note").get<std::string>());
    s.loudness = loudness_from_string(js.at("loudness").get<std::string>());
    s.brightness = brightness_from_string(js.at("brightness").get<std::string>());
    s.duration_ms = js.at("duration_ms").get<double>();
    s.absolute_position = js.at("absolute_position").get<int>();
    s.relative_position = js.at("relative_position").get<int>();
    s.global_position = global_position_from_string(js.at("global_position").get<std::string>());
    s.start_ms = js.at("start_ms").get<double>();
    scene.sounds.push_back(std::move(s));
  }
  return scene;
}

}  // namespace clear
