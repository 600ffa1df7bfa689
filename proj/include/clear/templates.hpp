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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clear/program.hpp"

namespace clear {

enum class SlotDomain {
  instrument,
  note,
  loudness,
  brightness,
  global_position,
  relation,
  position,
};

SlotDomain slot_domain_from_string(std::string_view name);
const std::vector<std::string>& default_domain_values(SlotDomain domain);

struct SlotSpec {
  std::string name;
  SlotDomain domain;
  bool nullable = false;                 // null binding bypasses the filter node
  std::vector<std::string> values;       // empty = domain defaults
};

struct Constraint {
  enum class Kind { not_equal };  // listed slots must be pairwise distinct
  Kind kind = Kind::not_equal;
  std::vector<std::string> slots;
};

struct QuestionTemplate {
  std::string template_id;
  Family family;
  Program skeleton;  // value_args may hold <slot> placeholders
  std::vector<SlotSpec> slots;
  std::vector<Constraint> constraints;
  std::vector<std::string> text_variants;
};

struct TemplateSet {
  std::vector<QuestionTemplate> templates;

  std::vector<Family> missing_families() const;
};

// Loads every .json template in the directory (sorted by filename) and
// cross-validates slots against program placeholders and text tokens.
// Emits a warning to stderr when some of the nine families are absent.
TemplateSet load_templates(const std::filesystem::path& directory);

struct QAInstance {
  long question_id = 0;
  long scene_id = 0;
  std::string template_id;
  std::string text;
  Program program;
  std::string answer;
  Family family = Family::yes_no;
};

enum class RejectionClass {
  constraint,
  ill_posed,
  degenerate,
  hint,          // answer surfaces among the queried sound's own descriptors
  unanswerable,  // brightness question touching an ambiguous sound
  duplicate,     // same (template, bindings) already emitted for the scene
  budget,
};

std::string_view to_string(RejectionClass cls);

struct Rejection {
  RejectionClass cls = RejectionClass::budget;  // class of the last failed attempt
  int attempts = 0;
  bool exhausted = false;
};

struct Instantiated {
  QAInstance qa;
  // template_id plus the sorted bindings; used for per-scene deduplication.
  std::string signature;
};

using InstantiateResult = std::variant<Instantiated, Rejection>;

// Rejection-samples slot bindings (uniform over each slot's domain, nullable
// slots including one null option), binds the skeleton, and validates:
// constraints, ill-posedness, ambiguous-brightness answers, the hint rule,
// and relation degeneracy. On success the stored answer is the oracle's.
InstantiateResult instantiate(const QuestionTemplate& tmpl, const SymbolicScene& scene,
                              std::uint64_t seed, int budget = 40);

// True iff some unique() node receives a set of size != 1 during evaluation.
bool check_ill_posed(const Program& program, const SymbolicScene& scene);

// True iff bypassing some relate node (replacing it with the full scene set)
// evaluates cleanly to the same answer, i.e. the relation carries no
// information on this scene. Precondition: program evaluates cleanly.
bool check_degenerate(const Program& program, const SymbolicScene& scene);

// Null bindings carry this marker value.
inline constexpr std::string_view kNullBinding = "\xE2\x88\x85";  // "∅"

// Picks one text variant uniformly and substitutes slot surfaces (positions
// as spelled-out ordinals, everything else verbatim). Null bindings vanish
// and surrounding whitespace collapses.
std::string realize_text(const QuestionTemplate& tmpl,
                         const std::map<std::string, std::string>& bindings,
                         std::uint64_t seed);

}  // namespace clear
