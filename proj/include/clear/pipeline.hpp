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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clear/templates.hpp"
#include "clear/types.hpp"

namespace clear {

struct DatasetConfig {
  long n_scenes = 1000;
  int questions_min = 20;
  int questions_max = 40;
  double train_ratio = 0.70;
  double val_ratio = 0.15;
  double test_ratio = 0.15;
  std::uint64_t master_seed = 0;
  double canvas_ms = 0.0;  // 0 = auto: longest scene, rounded up to a second
  std::string bank_dir;    // used when synthetic_bank is false
  bool synthetic_bank = true;
  std::string template_dir = "templates/default";
  std::string output_dir = "out";
  int jobs = 1;
  bool render_audio = true;
  bool export_spectrograms = false;
  int instantiate_budget = 40;
  int sounds_per_scene = 10;
  bool verbose = false;
  bool machine_log = false;
};

void validate_config(const DatasetConfig& config);

nlohmann::json config_to_json(const DatasetConfig& config);
DatasetConfig config_from_json(const nlohmann::json& j);

// Deterministic largest-remainder split assignment in scene-id order, ties
// favoring later splits (so n=10 at 70/15/15 gives 7/1/2).
std::vector<Split> split_scenes(long n, double train_ratio, double val_ratio,
                                double test_ratio);

struct DatasetManifest {
  DatasetConfig config;
  double canvas_ms = 0.0;
  std::map<std::string, long> scene_counts;     // per split name
  std::map<std::string, long> question_counts;  // per split name
  std::map<std::string, long> rejections;       // per rejection class
  long question_shortfall = 0;  // scenes that could not fill their quota
  std::size_t clamped_samples = 0;
  std::map<std::string, std::string> digests;  // relative path -> sha256
};

nlohmann::json manifest_to_json(const DatasetManifest& manifest);

struct SceneQuestions {
  std::vector<QAInstance> questions;
  std::map<RejectionClass, long> rejections;
  bool shortfall = false;  // could not fill the scene's question quota
};

// Questions for one scene. Templates are walked in a per-scene shuffled cycle
// so usage stays uniform across the dataset; binding seeds derive from
// (master_seed, scene_id, attempt), so results are independent of scheduling.
SceneQuestions generate_scene_questions(const SymbolicScene& scene,
                                        const TemplateSet& templates,
                                        const DatasetConfig& config);

// End-to-end generation: bank, scenes, questions, optional audio and
// spectrograms, manifest. Every stored answer is re-executed against its
// scene before writing. Output is a pure function of the config; worker
// count does not change a byte.
DatasetManifest generate_dataset(const DatasetConfig& config);

// Per-split record files under <dataset>/scenes and <dataset>/questions
// (see docs/FORMATS.md). Writers emit one file per split; the reader loads
// every split and returns scenes ordered by scene_id.
void write_scene_files(const std::vector<SymbolicScene>& scenes,
                       const std::filesystem::path& dataset_dir);
std::vector<SymbolicScene> read_scene_files(const std::filesystem::path& dataset_dir);
void write_question_files(
    const std::map<std::string, std::vector<QAInstance>>& questions_by_split,
    const std::filesystem::path& dataset_dir);

struct StatsReport {
  std::map<std::string, std::map<std::string, long>> answers_by_split;
  std::map<std::string, std::map<std::string, long>> families_by_split;
  std::map<std::string, std::map<std::string, long>> template_usage_by_split;
  std::map<std::string, std::map<std::string, long>> attributes_by_split;
  std::map<std::string, double> majority_by_split;
  std::map<std::string, long> question_totals;
  std::map<std::string, long> scene_totals;
};

StatsReport compute_stats(const std::filesystem::path& dataset_dir);

// CSV tables plus a text summary under <dataset>/stats/.
void write_stats(const StatsReport& report, const std::filesystem::path& dataset_dir);

// Fraction of questions answered by always picking the most frequent class.
double majority_baseline(const std::vector<std::string>& answers);

struct VerifyMismatch {
  long question_id = 0;
  std::string split;
  std::string reason;
};

struct VerifyReport {
  long checked = 0;
  std::vector<VerifyMismatch> mismatches;
};

// Re-executes every stored program against its scene and compares answers;
// also checks that every referenced scene exists.
VerifyReport verify_dataset(const std::filesystem::path& dataset_dir);

}  // namespace clear
