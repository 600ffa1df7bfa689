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

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clear/scene.hpp"
#include "clear/types.hpp"

namespace clear {

// Questions are functional programs: a topologically ordered list of typed
// nodes, each consuming earlier nodes' values. Filters narrow a sound set by
// one attribute, relate() maps a sound to everything strictly before or after
// it, unique() turns a singleton set into a reference, queries read one
// attribute off a reference, and the integer/boolean nodes combine results.
enum class NodeKind {
  scene,
  filter_instrument,
  filter_note,
  filter_loudness,
  filter_brightness,
  filter_global_position,
  filter_absolute_position,
  filter_relative_position,
  relate,
  unique,
  count,
  exist,
  query_instrument,
  query_note,
  query_loudness,
  query_brightness,
  query_absolute_position,
  query_relative_position,
  query_global_position,
  same_instrument,
  same_note,
  same_loudness,
  same_brightness,
  equal_integer,
  less_than,
  greater_than,
  equal_attribute,
  logical_and,
  logical_or,
};

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view name);

enum class ValueType { sound_set, sound_ref, integer, boolean, attribute };

struct ProgramNode {
  NodeKind kind;
  std::vector<int> inputs;
  std::vector<std::string> value_args;
};

struct Program {
  std::vector<ProgramNode> nodes;
  int output = -1;
};

enum class AttributeCategory {
  instrument,
  note,
  loudness,
  brightness,
  absolute_position,
  relative_position,
  global_position,
};

struct Attribute {
  AttributeCategory category;
  std::string value;  // canonical surface; positions as decimal strings

  bool operator==(const Attribute&) const = default;
};

struct SoundSet {
  std::vector<int> positions;  // ascending absolute positions

  bool operator==(const SoundSet&) const = default;
};

struct SoundRef {
  int position;
};

struct Value {
  std::variant<SoundSet, SoundRef, long, bool, Attribute> v;
};

// The nine question families of the answer taxonomy. Absolute and relative
// position share the ordinal answer surfaces.
enum class Family {
  yes_no,
  note,
  instrument,
  brightness,
  loudness,
  counting,
  absolute_position,
  relative_position,
  global_position,
};
inline constexpr int kNumFamilies = 9;

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

// Family implied by a program's output node, e.g. count -> counting,
// exist/comparisons -> yes_no, query_note -> note.
Family family_of_output(const Program& program);

// Structural validation: known kinds, arities, argument literals, inputs that
// reference strictly earlier nodes, an output from which every node is
// reachable, and input/output type agreement. With allow_placeholders,
// value_args of the form <name> are accepted (template skeletons).
void validate_program(const Program& program, bool allow_placeholders = false);

Program parse_program(const nlohmann::json& j, bool allow_placeholders = false);
nlohmann::json program_to_json(const Program& program);

struct EvalOutcome {
  Value value;
  // Set when a brightness-semantic node touched a sound labeled `none`
  // (query_brightness on it, or same_brightness anchored at it). The template
  // engine rejects such instantiations; brightness questions are only asked
  // about clearly separable sounds.
  bool touched_ambiguous_brightness = false;
};

// Evaluates the program against a scene with derived position attributes.
// Throws IllPosedError when unique() receives a set of size != 1.
EvalOutcome execute_program(const Program& program, const SymbolicScene& scene);

// Maps a final value to one of the 47 answer classes. Throws DataError when
// the value does not fit the family (including brightness `none`).
std::string answer_of(const Value& value, Family family);

struct AnswerClass {
  Family family;
  std::string surface;
};

// All (family, surface) pairs; 57 entries whose distinct surfaces number 47
// because the ten ordinals serve both position families.
const std::vector<AnswerClass>& answer_registry();

bool is_placeholder(std::string_view arg);

}  // namespace clear
