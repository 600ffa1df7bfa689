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

#include "clear/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clear/digest.hpp"
#include "clear/errors.hpp"
#include "clear/render.hpp"
#include "clear/rng.hpp"
#include "clear/spectrogram.hpp"
#include "clear/wav_io.hpp"

namespace clear {

namespace {

namespace fs = std::filesystem;

void parallel_for(long n, int jobs, const std::function<void(long)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int count = std::min<long>(jobs, n);
  threads.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string scene_wav_name(Split split, long scene_id) {
  return fmt::format("CLEAR_{}_{:06d}.wav", to_string(split), scene_id);
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot create '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

nlohmann::json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("'{}': {}", path.string(), e.what()));
  }
}

}  // namespace

SceneQuestions generate_scene_questions(const SymbolicScene& scene,
                                        const TemplateSet& templates,
                                        const DatasetConfig& config) {
  SceneQuestions out;
  Rng plan(derive_seed(config.master_seed, stream::kQuestionPlan,
                       static_cast<std::uint64_t>(scene.scene_id)));
  const int target = plan.range_int(config.questions_min, config.questions_max);

  std::vector<std::size_t> cycle(templates.templates.size());
  for (std::size_t i = 0; i < cycle.size(); ++i) cycle[i] = i;
  plan.shuffle(cycle);

  std::set<std::string> seen_signatures;
  const long max_rounds = static_cast<long>(target) * 8 + 32;
  std::size_t cursor = 0;
  for (long round = 0; round < max_rounds && static_cast<int>(out.questions.size()) < target;
       ++round) {
    const auto& tmpl = templates.templates[cycle[cursor]];
    cursor = (cursor + 1) % cycle.size();

    const auto seed = derive_seed(config.master_seed, stream::kBinding,
                                  static_cast<std::uint64_t>(scene.scene_id),
                                  static_cast<std::uint64_t>(round));
    auto result = instantiate(tmpl, scene, seed, config.instantiate_budget);
    if (std::holds_alternative<Rejection>(result)) {
      ++out.rejections[std::get<Rejection>(result).cls];
      continue;
    }
    auto& inst = std::get<Instantiated>(result);
    if (!seen_signatures.insert(inst.signature).second) {
      ++out.rejections[RejectionClass::duplicate];
      continue;
    }
    out.questions.push_back(std::move(inst.qa));
  }
  out.shortfall = static_cast<int>(out.questions.size()) < target;
  return out;
}

namespace {

nlohmann::json question_to_json(const QAInstance& q) {
  return {
      {"question_id", q.question_id},
      {"scene_id", q.scene_id},
      {"template_id", q.template_id},
      {"family", to_string(q.family)},
      {"text", q.text},
      {"answer", q.answer},
      {"program", program_to_json(q.program)},
  };
}

QAInstance question_from_json(const nlohmann::json& j) {
  QAInstance q;
  q.question_id = j.at("question_id").get<long>();
  q.scene_id = j.at("scene_id").get<long>();
  q.template_id = j.at("template_id").get<std::string>();
  q.family = family_from_string(j.at("family").get<std::string>());
  q.text = j.at("text").get<std::string>();
  q.answer = j.at("answer").get<std::string>();
  q.program = parse_program(j.at("program"));
  return q;
}

nlohmann::json bank_to_json(const SoundBank& bank) {
  nlohmann::json sounds = nlohmann::json::array();
  for (const auto& s : bank.sounds) {
    sounds.push_back({
        {"id", s.id},
        {"instrument", to_string(s.instrument)},
        {"note", to_string(s.note)},
        {"loudness", to_string(s.loudness_label)},
        {"brightness", to_string(s.brightness_label)},
        {"measured_lufs", s.measured_lufs},
        {"spectral_centroid_hz", s.spectral_centroid},
        {"duration_ms", s.duration_ms},
    });
  }
  return {{"source", bank.source_descriptor}, {"sounds", sounds}};
}

}  // namespace

void validate_config(const DatasetConfig& config) {
  if (config.n_scenes < 1) throw UsageError("n_scenes must be at least 1");
  if (config.questions_min < 1 || config.questions_max < config.questions_min) {
    throw UsageError("questions range must satisfy 1 <= min <= max");
  }
  if (config.train_ratio <= 0.0 || config.val_ratio <= 0.0 || config.test_ratio <= 0.0) {
    throw UsageError("split ratios must be positive");
  }
  const double sum = config.train_ratio + config.val_ratio + config.test_ratio;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw UsageError(fmt::format("split ratios sum to {}, expected 1", sum));
  }
  if (config.jobs < 1) throw UsageError("jobs must be at least 1");
  if (config.sounds_per_scene < 1) throw UsageError("sounds_per_scene must be at least 1");
  if (config.instantiate_budget < 1) throw UsageError("instantiate budget must be at least 1");
  if (!config.synthetic_bank && config.bank_dir.empty()) {
    throw UsageError("either synthetic_bank or bank_dir is required");
  }
}

nlohmann::json config_to_json(const DatasetConfig& c) {
  return {
      {"n_scenes", c.n_scenes},
      {"questions_min", c.questions_min},
      {"questions_max", c.questions_max},
      {"train_ratio", c.train_ratio},
      {"val_ratio", c.val_ratio},
      {"test_ratio", c.test_ratio},
      {"master_seed", c.master_seed},
      {"canvas_ms", c.canvas_ms},
      {"bank_dir", c.bank_dir},
      {"synthetic_bank", c.synthetic_bank},
      {"template_dir", c.template_dir},
      {"output_dir", c.output_dir},
      {"jobs", c.jobs},
      {"render_audio", c.render_audio},
      {"export_spectrograms", c.export_spectrograms},
      {"instantiate_budget", c.instantiate_budget},
      {"sounds_per_scene", c.sounds_per_scene},
  };
}

DatasetConfig config_from_json(const nlohmann::json& j) {
  DatasetConfig c;
  c.n_scenes = j.value("n_scenes", c.n_scenes);
  c.questions_min = j.value("questions_min", c.questions_min);
  c.questions_max = j.value("questions_max", c.questions_max);
  c.train_ratio = j.value("train_ratio", c.train_ratio);
  c.val_ratio = j.value("val_ratio", c.val_ratio);
  c.test_ratio = j.value("test_ratio", c.test_ratio);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.canvas_ms = j.value("canvas_ms", c.canvas_ms);
  c.bank_dir = j.value("bank_dir", c.bank_dir);
  c.synthetic_bank = j.value("synthetic_bank", c.synthetic_bank);
  c.template_dir = j.value("template_dir", c.template_dir);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.jobs = j.value("jobs", c.jobs);
  c.render_audio = j.value("render_audio", c.render_audio);
  c.export_spectrograms = j.value("export_spectrograms", c.export_spectrograms);
  c.instantiate_budget = j.value("instantiate_budget", c.instantiate_budget);
  c.sounds_per_scene = j.value("sounds_per_scene", c.sounds_per_scene);
  return c;
}

std::vector<Split> split_scenes(long n, double train_ratio, double val_ratio,
                                double test_ratio) {
  if (n < 1) throw UsageError("split_scenes: n must be at least 1");
  const double ratios[3] = {train_ratio, val_ratio, test_ratio};
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0.0 || ratios[1] <= 0.0 || ratios[2] <= 0.0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw UsageError("split_scenes: ratios must be positive and sum to 1");
  }

  long counts[3];
  double remainders[3];
  long assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = ratios[i] * static_cast<double>(n);
    counts[i] = static_cast<long>(std::floor(exact));
    remainders[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  // Largest remainder; ties go to the later split.
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[i] >= remainders[best]) best = i;
    }
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }

  std::vector<Split> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < 3; ++s) {
    for (long i = 0; i < counts[s]; ++i) out.push_back(static_cast<Split>(s));
  }
  return out;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  return {
      {"config", config_to_json(m.config)},
      {"canvas_ms", m.canvas_ms},
      {"scene_counts", m.scene_counts},
      {"question_counts", m.question_counts},
      {"rejections", m.rejections},
      {"question_shortfall", m.question_shortfall},
      {"clamped_samples", m.clamped_samples},
      {"digests", m.digests},
  };
}

DatasetManifest generate_dataset(const DatasetConfig& config) {
  validate_config(config);

  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir / "scenes");
  fs::create_directories(out_dir / "questions");

  SoundBank bank = config.synthetic_bank
                       ? synthesize_bank(SynthSpec::default_bank(), config.master_seed)
                       : ingest_bank(config.bank_dir);
  bank = normalize_intermediate_loudness(std::move(bank));

  const TemplateSet templates = load_templates(config.template_dir);

  const auto splits =
      split_scenes(config.n_scenes, config.train_ratio, config.val_ratio, config.test_ratio);

  // Scenes are cheap; compose serially in id order.
  std::vector<SymbolicScene> scenes;
  scenes.reserve(static_cast<std::size_t>(config.n_scenes));
  for (long id = 0; id < config.n_scenes; ++id) {
    auto scene = compose_scene(bank, id, config.master_seed, config.sounds_per_scene);
    scene.split = splits[static_cast<std::size_t>(id)];
    scenes.push_back(std::move(scene));
  }

  double canvas_ms = config.canvas_ms;
  if (canvas_ms <= 0.0) {
    double longest = 0.0;
    for (const auto& s : scenes) longest = std::max(longest, s.total_duration_ms());
    canvas_ms = std::ceil(longest / 1000.0) * 1000.0;
  }

  // Questions, fanned out across scenes.
  std::vector<SceneQuestions> per_scene(scenes.size());
  parallel_for(config.n_scenes, config.jobs, [&](long i) {
    per_scene[static_cast<std::size_t>(i)] =
        generate_scene_questions(scenes[static_cast<std::size_t>(i)], templates, config);
    if (config.machine_log) {
      fmt::print("event=questions_done scene_id={} count={}\n", i,
                 per_scene[static_cast<std::size_t>(i)].questions.size());
    }
  });

  DatasetManifest manifest;
  manifest.config = config;
  manifest.canvas_ms = canvas_ms;

  // Assign per-split question ids in scene order, then verify every stored
  // answer against the oracle before anything is written.
  std::map<std::string, std::vector<QAInstance>> questions_by_split;
  std::map<Split, long> next_question_id;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    auto& bucket = per_scene[i];
    for (auto& [cls, n] : bucket.rejections) {
      manifest.rejections[std::string(to_string(cls))] += n;
    }
    if (bucket.shortfall) ++manifest.question_shortfall;
    for (auto& q : bucket.questions) {
      q.question_id = next_question_id[scenes[i].split]++;
      questions_by_split[std::string(to_string(scenes[i].split))].push_back(std::move(q));
    }
  }

  for (const auto& [split, qs] : questions_by_split) {
    (void)split;
    for (const QAInstance& q : qs) {
      const auto& scene = scenes[static_cast<std::size_t>(q.scene_id)];
      const auto recheck = answer_of(execute_program(q.program, scene).value, q.family);
      if (recheck != q.answer) {
        throw DataError(fmt::format(
            "oracle re-execution mismatch for scene {} question {}: '{}' vs '{}'",
            q.scene_id, q.question_id, q.answer, recheck));
      }
    }
  }

  write_scene_files(scenes, out_dir);
  write_question_files(questions_by_split, out_dir);
  for (Split split : kAllSplits) {
    const auto split_name = std::string(to_string(split));
    long scene_count = 0;
    for (const auto& s : scenes) {
      if (s.split == split) ++scene_count;
    }
    manifest.scene_counts[split_name] = scene_count;
    manifest.question_counts[split_name] =
        static_cast<long>(questions_by_split[split_name].size());
  }

  write_text_file(out_dir / "bank.json", bank_to_json(bank).dump(2) + "\n");

  if (config.render_audio) {
    for (Split split : kAllSplits) {
      fs::create_directories(out_dir / "audio" / to_string(split));
      if (config.export_spectrograms) {
        fs::create_directories(out_dir / "spectrograms" / to_string(split));
      }
    }
    std::vector<std::size_t> clamp_counts(scenes.size(), 0);
    parallel_for(config.n_scenes, config.jobs, [&](long i) {
      const auto& scene = scenes[static_cast<std::size_t>(i)];
      RenderDiagnostics diag;
      const auto rendered = render_scene(scene, bank, canvas_ms, &diag);
      clamp_counts[static_cast<std::size_t>(i)] = diag.clamped_samples;
      const auto name = scene_wav_name(scene.split, scene.scene_id);
      write_wav(rendered.audio, out_dir / "audio" / to_string(scene.split) / name);
      if (config.export_spectrograms) {
        const auto spec = compute_spectrogram(rendered.audio);
        const auto spec_name =
            fmt::format("CLEAR_{}_{:06d}.spec", to_string(scene.split), scene.scene_id);
        write_spectrogram(spec, out_dir / "spectrograms" / to_string(scene.split) / spec_name);
      }
      if (config.verbose || config.machine_log) {
        fmt::print(config.machine_log ? "event=rendered scene_id={} clamped={}\n"
                                      : "rendered scene {} (clamped samples: {})\n",
                   scene.scene_id, diag.clamped_samples);
      }
    });
    for (std::size_t c : clamp_counts) manifest.clamped_samples += c;
  }

  // Content digests over everything emitted so far, in sorted path order.
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    manifest.digests[fs::relative(file, out_dir).generic_string()] = sha256_file_hex(file);
  }

  write_text_file(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

void write_scene_files(const std::vector<SymbolicScene>& scenes,
                       const std::filesystem::path& dataset_dir) {
  fs::create_directories(dataset_dir / "scenes");
  for (Split split : kAllSplits) {
    const auto split_name = std::string(to_string(split));
    nlohmann::json list = nlohmann::json::array();
    for (const auto& scene : scenes) {
      if (scene.split == split) list.push_back(scene_to_json(scene));
    }
    nlohmann::json doc = {{"info", {{"split", split_name}}}, {"scenes", list}};
    write_text_file(
        dataset_dir / "scenes" / fmt::format("CLEAR_{}_scenes.json", split_name),
        doc.dump(2) + "\n");
  }
}

std::vector<SymbolicScene> read_scene_files(const std::filesystem::path& dataset_dir) {
  std::vector<SymbolicScene> scenes;
  for (Split split : kAllSplits) {
    const auto path = dataset_dir / "scenes" /
                      fmt::format("CLEAR_{}_scenes.json", to_string(split));
    if (!fs::exists(path)) {
      throw DataError(fmt::format("scene file '{}' is missing", path.string()));
    }
    for (const auto& js : load_json_file(path).at("scenes")) {
      scenes.push_back(scene_from_json(js));
    }
  }
  std::sort(scenes.begin(), scenes.end(),
            [](const SymbolicScene& a, const SymbolicScene& b) {
              return a.scene_id < b.scene_id;
            });
  return scenes;
}

void write_question_files(
    const std::map<std::string, std::vector<QAInstance>>& questions_by_split,
    const std::filesystem::path& dataset_dir) {
  fs::create_directories(dataset_dir / "questions");
  for (Split split : kAllSplits) {
    const auto split_name = std::string(to_string(split));
    nlohmann::json list = nlohmann::json::array();
    if (const auto it = questions_by_split.find(split_name);
        it != questions_by_split.end()) {
      for (const auto& q : it->second) list.push_back(question_to_json(q));
    }
    nlohmann::json doc = {{"info", {{"split", split_name}}}, {"questions", list}};
    write_text_file(
        dataset_dir / "questions" / fmt::format("CLEAR_{}_questions.json", split_name),
        doc.dump(2) + "\n");
  }
}

double majority_baseline(const std::vector<std::string>& answers) {
  if (answers.empty()) throw DataError("majority_baseline: no answers");
  std::map<std::string, long> counts;
  for (const auto& a : answers) ++counts[a];
  long best = 0;
  for (const auto& [answer, n] : counts) {
    (void)answer;
    best = std::max(best, n);
  }
  return static_cast<double>(best) / static_cast<double>(answers.size());
}

StatsReport compute_stats(const std::filesystem::path& dataset_dir) {
  StatsReport report;
  for (Split split : kAllSplits) {
    const auto split_name = std::string(to_string(split));
    const auto questions_path =
        dataset_dir / "questions" / fmt::format("CLEAR_{}_questions.json", split_name);
    const auto scenes_path =
        dataset_dir / "scenes" / fmt::format("CLEAR_{}_scenes.json", split_name);
    if (!fs::exists(questions_path) || !fs::exists(scenes_path)) {
      throw DataError(fmt::format("stats: split '{}' is missing from '{}'", split_name,
                                  dataset_dir.string()));
    }

    std::vector<std::string> answers;
    for (const auto& jq : load_json_file(questions_path).at("questions")) {
      const auto answer = jq.at("answer").get<std::string>();
      answers.push_back(answer);
      ++report.answers_by_split[split_name][answer];
      ++report.families_by_split[split_name][jq.at("family").get<std::string>()];
      ++report.template_usage_by_split[split_name][jq.at("template_id").get<std::string>()];
    }
    report.question_totals[split_name] = static_cast<long>(answers.size());
    if (!answers.empty()) {
      report.majority_by_split[split_name] = majority_baseline(answers);
    }

    long scene_count = 0;
    for (const auto& js : load_json_file(scenes_path).at("scenes")) {
      ++scene_count;
      for (const auto& sound : js.at("sounds")) {
        auto& attrs = report.attributes_by_split[split_name];
        ++attrs[fmt::format("instrument:{}", sound.at("instrument").get<std::string>())];
        ++attrs[fmt::format("note:{}", sound.at("note").get<std::string>())];
        ++attrs[fmt::format("loudness:{}", sound.at("loudness").get<std::string>())];
        ++attrs[fmt::format("brightness:{}", sound.at("brightness").get<std::string>())];
      }
    }
    report.scene_totals[split_name] = scene_count;
  }
  return report;
}

void write_stats(const StatsReport& report, const std::filesystem::path& dataset_dir) {
  const auto stats_dir = dataset_dir / "stats";
  fs::create_directories(stats_dir);

  const auto write_csv =
      [&](const std::string& name,
          const std::map<std::string, std::map<std::string, long>>& table,
          const std::string& key_header) {
        std::string csv = fmt::format("split,{},count\n", key_header);
        for (const auto& [split, rows] : table) {
          for (const auto& [key, count] : rows) {
            csv += fmt::format("{},{},{}\n", split, key, count);
          }
        }
        write_text_file(stats_dir / name, csv);
      };

  write_csv("answers.csv", report.answers_by_split, "answer");
  write_csv("families.csv", report.families_by_split, "family");
  write_csv("template_usage.csv", report.template_usage_by_split, "template_id");
  write_csv("attributes.csv", report.attributes_by_split, "attribute");

  std::string summary;
  for (const auto& [split, total] : report.question_totals) {
    summary += fmt::format("{}: {} scenes, {} questions", split,
                           report.scene_totals.at(split), total);
    if (report.majority_by_split.count(split)) {
      summary += fmt::format(", majority-class baseline {:.4f}",
                             report.majority_by_split.at(split));
    }
    summary += "\n";
  }

  long usage_min = 0, usage_max = 0;
  std::map<std::string, long> merged_usage;
  for (const auto& [split, rows] : report.template_usage_by_split) {
    (void)split;
    for (const auto& [id, n] : rows) merged_usage[id] += n;
  }
  for (const auto& [id, n] : merged_usage) {
    (void)id;
    usage_min = usage_min == 0 ? n : std::min(usage_min, n);
    usage_max = std::max(usage_max, n);
  }
  if (usage_min > 0) {
    summary += fmt::format("template usage max/min ratio: {:.3f}\n",
                           static_cast<double>(usage_max) / static_cast<double>(usage_min));
  }
  write_text_file(stats_dir / "summary.txt", summary);
}

VerifyReport verify_dataset(const std::filesystem::path& dataset_dir) {
  VerifyReport report;
  for (Split split : kAllSplits) {
    const auto split_name = std::string(to_string(split));
    const auto scenes_path =
        dataset_dir / "scenes" / fmt::format("CLEAR_{}_scenes.json", split_name);
    const auto questions_path =
        dataset_dir / "questions" / fmt::format("CLEAR_{}_questions.json", split_name);
    if (!fs::exists(scenes_path) || !fs::exists(questions_path)) {
      throw DataError(fmt::format("verify: split '{}' is missing from '{}'", split_name,
                                  dataset_dir.string()));
    }

    std::map<long, SymbolicScene> scenes;
    for (const auto& js : load_json_file(scenes_path).at("scenes")) {
      auto scene = scene_from_json(js);
      scenes[scene.scene_id] = std::move(scene);
    }

    for (const auto& jq : load_json_file(questions_path).at("questions")) {
      ++report.checked;
      long question_id = -1;
      try {
        const auto q = question_from_json(jq);
        question_id = q.question_id;
        const auto scene_it = scenes.find(q.scene_id);
        if (scene_it == scenes.end()) {
          report.mismatches.push_back(
              {q.question_id, split_name,
               fmt::format("scene {} does not exist", q.scene_id)});
          continue;
        }
        const auto answer = answer_of(execute_program(q.program, scene_it->second).value,
                                      q.family);
        if (answer != q.answer) {
          report.mismatches.push_back(
              {q.question_id, split_name,
               fmt::format("stored answer '{}', oracle says '{}'", q.answer, answer)});
        }
      } catch (const Error& e) {
        report.mismatches.push_back({question_id, split_name, e.what()});
      }
    }
  }
  return report;
}

}  // namespace clear
