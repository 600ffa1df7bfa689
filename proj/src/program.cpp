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

#include "clear/program.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clear/errors.hpp"

namespace clear {

namespace {

struct KindInfo {
  std::string_view name;
  std::vector<ValueType> input_types;
  int n_args;
  ValueType result;
};

const std::array<KindInfo, 29>& kind_table() {
  using VT = ValueType;
  static const std::array<KindInfo, 29> table = {{
      {"scene", {}, 0, VT::sound_set},
      {"filter_instrument", {VT::sound_set}, 1, VT::sound_set},
      {"filter_note", {VT::sound_set}, 1, VT::sound_set},
      {"filter_loudness", {VT::sound_set}, 1, VT::sound_set},
      {"filter_brightness", {VT::sound_set}, 1, VT::sound_set},
      {"filter_global_position", {VT::sound_set}, 1, VT::sound_set},
      {"filter_absolute_position", {VT::sound_set}, 1, VT::sound_set},
      {"filter_relative_position", {VT::sound_set}, 1, VT::sound_set},
      {"relate", {VT::sound_ref}, 1, VT::sound_set},
      {"unique", {VT::sound_set}, 0, VT::sound_ref},
      {"count", {VT::sound_set}, 0, VT::integer},
      {"exist", {VT::sound_set}, 0, VT::boolean},
      {"query_instrument", {VT::sound_ref}, 0, VT::attribute},
      {"query_note", {VT::sound_ref}, 0, VT::attribute},
      {"query_loudness", {VT::sound_ref}, 0, VT::attribute},
      {"query_brightness", {VT::sound_ref}, 0, VT::attribute},
      {"query_absolute_position", {VT::sound_ref}, 0, VT::attribute},
      {"query_relative_position", {VT::sound_ref}, 0, VT::attribute},
      {"query_global_position", {VT::sound_ref}, 0, VT::attribute},
      {"same_instrument", {VT::sound_ref}, 0, VT::sound_set},
      {"same_note", {VT::sound_ref}, 0, VT::sound_set},
      {"same_loudness", {VT::sound_ref}, 0, VT::sound_set},
      {"same_brightness", {VT::sound_ref}, 0, VT::sound_set},
      {"equal_integer", {VT::integer, VT::integer}, 0, VT::boolean},
      {"less_than", {VT::integer, VT::integer}, 0, VT::boolean},
      {"greater_than", {VT::integer, VT::integer}, 0, VT::boolean},
      {"equal_attribute", {VT::attribute, VT::attribute}, 0, VT::boolean},
      {"and", {VT::boolean, VT::boolean}, 0, VT::boolean},
      {"or", {VT::boolean, VT::boolean}, 0, VT::boolean},
  }};
  return table;
}

const KindInfo& info_of(NodeKind kind) {
  return kind_table()[static_cast<std::size_t>(kind)];
}

int parse_position_literal(std::string_view s, std::string_view what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1 || value > 10) {
    throw DataError(fmt::format("{} literal '{}' is not a position in 1..10", what, s));
  }
  return value;
}

void validate_literal(NodeKind kind, const std::string& arg) {
  switch (kind) {
    case NodeKind::filter_instrument:
      instrument_from_string(arg);
      break;
    case NodeKind::filter_note:
      note_from_string(arg);
      break;
    case NodeKind::filter_loudness:
      loudness_from_string(arg);
      break;
    case NodeKind::filter_brightness:
      if (arg != "bright" && arg != "dark") {
        throw DataError(fmt::format("brightness filter literal '{}' must be bright or dark", arg));
      }
      break;
    case NodeKind::filter_global_position:
      global_position_from_string(arg);
      break;
    case NodeKind::filter_absolute_position:
    case NodeKind::filter_relative_position:
      parse_position_literal(arg, to_string(kind));
      break;
    case NodeKind::relate:
      if (arg != "before" && arg != "after") {
        throw DataError(fmt::format("relate literal '{}' must be before or after", arg));
      }
      break;
    default:
      throw DataError(fmt::format("node kind '{}' takes no literal", to_string(kind)));
  }
}

const PlacedSound& sound_at(const SymbolicScene& scene, int position) {
  for (const auto& s : scene.sounds) {
    if (s.absolute_position == position) return s;
  }
  throw DataError(fmt::format("no sound at position {}", position));
}

const SoundSet& as_set(const Value& v) {
  if (const auto* p = std::get_if<SoundSet>(&v.v)) return *p;
  throw DataError("expected a sound set");
}
SoundRef as_ref(const Value& v) {
  if (const auto* p = std::get_if<SoundRef>(&v.v)) return *p;
  throw DataError("expected a sound reference");
}
long as_int(const Value& v) {
  if (const auto* p = std::get_if<long>(&v.v)) return *p;
  throw DataError("expected an integer");
}
bool as_bool(const Value& v) {
  if (const auto* p = std::get_if<bool>(&v.v)) return *p;
  throw DataError("expected a boolean");
}
const Attribute& as_attr(const Value& v) {
  if (const auto* p = std::get_if<Attribute>(&v.v)) return *p;
  throw DataError("expected an attribute");
}

template <typename Pred>
SoundSet filter_set(const SymbolicScene& scene, const SoundSet& in, Pred pred) {
  SoundSet out;
  for (int pos : in.positions) {
    if (pred(sound_at(scene, pos))) out.positions.push_back(pos);
  }
  return out;
}

template <typename Pred>
SoundSet others_matching(const SymbolicScene& scene, int ref_pos, Pred pred) {
  SoundSet out;
  for (const auto& s : scene.sounds) {
    if (s.absolute_position != ref_pos && pred(s)) out.positions.push_back(s.absolute_position);
  }
  std::sort(out.positions.begin(), out.positions.end());
  return out;
}

}  // namespace

std::string_view to_string(NodeKind kind) { return info_of(kind).name; }

NodeKind node_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kind_table().size(); ++i) {
    if (kind_table()[i].name == name) return static_cast<NodeKind>(i);
  }
  throw DataError(fmt::format("unknown node kind '{}'", name));
}

std::string_view to_string(Family family) {
  static constexpr std::array<std::string_view, 9> names = {
      "yes_no",   "note",     "instrument",        "brightness",        "loudness",
      "counting", "absolute_position", "relative_position", "global_position"};
  return names[static_cast<std::size_t>(family)];
}

Family family_from_string(std::string_view name) {
  for (int i = 0; i < kNumFamilies; ++i) {
    if (to_string(static_cast<Family>(i)) == name) return static_cast<Family>(i);
  }
  throw DataError(fmt::format("unknown question family '{}'", name));
}

Family family_of_output(const Program& program) {
  if (program.output < 0 || program.output >= static_cast<int>(program.nodes.size())) {
    throw DataError("program output index out of range");
  }
  switch (program.nodes[static_cast<std::size_t>(program.output)].kind) {
    case NodeKind::exist:
    case NodeKind::equal_integer:
    case NodeKind::less_than:
    case NodeKind::greater_than:
    case NodeKind::equal_attribute:
    case NodeKind::logical_and:
    case NodeKind::logical_or:
      return Family::yes_no;
    case NodeKind::count:
      return Family::counting;
    case NodeKind::query_instrument:
      return Family::instrument;
    case NodeKind::query_note:
      return Family::note;
    case NodeKind::query_loudness:
      return Family::loudness;
    case NodeKind::query_brightness:
      return Family::brightness;
    case NodeKind::query_absolute_position:
      return Family::absolute_position;
    case NodeKind::query_relative_position:
      return Family::relative_position;
    case NodeKind::query_global_position:
      return Family::global_position;
    default:
      throw DataError(fmt::format(
          "output node kind '{}' does not produce an answer",
          to_string(program.nodes[static_cast<std::size_t>(program.output)].kind)));
  }
}

bool is_placeholder(std::string_view arg) {
  return arg.size() > 2 && arg.front() == '<' && arg.back() == '>';
}

void validate_program(const Program& program, bool allow_placeholders) {
  if (program.nodes.empty()) throw DataError("program has no nodes");
  if (program.output < 0 || program.output >= static_cast<int>(program.nodes.size())) {
    throw DataError(fmt::format("program output index {} out of range", program.output));
  }

  std::vector<ValueType> types(program.nodes.size());
  for (std::size_t i = 0; i < program.nodes.size(); ++i) {
    const auto& node = program.nodes[i];
    const auto& info = info_of(node.kind);
    if (node.inputs.size() != info.input_types.size()) {
      throw DataError(fmt::format("node {}: '{}' expects {} inputs, got {}", i, info.name,
                                  info.input_types.size(), node.inputs.size()));
    }
    for (std::size_t j = 0; j < node.inputs.size(); ++j) {
      const int in = node.inputs[j];
      if (in < 0 || in >= static_cast<int>(i)) {
        throw DataError(fmt::format(
            "node {}: input {} does not reference a strictly earlier node", i, in));
      }
      if (types[static_cast<std::size_t>(in)] != info.input_types[j]) {
        throw DataError(fmt::format("node {}: '{}' input {} has the wrong type", i,
                                    info.name, in));
      }
    }
    if (static_cast<int>(node.value_args.size()) != info.n_args) {
      throw DataError(fmt::format("node {}: '{}' expects {} literal(s), got {}", i,
                                  info.name, info.n_args, node.value_args.size()));
    }
    for (const auto& arg : node.value_args) {
      if (allow_placeholders && is_placeholder(arg)) continue;
      try {
        validate_literal(node.kind, arg);
      } catch (const DataError& e) {
        throw DataError(fmt::format("node {}: {}", i, e.what()));
      }
    }
    types[i] = info.result;
  }

  // Every node must feed the output.
  std::vector<bool> reachable(program.nodes.size(), false);
  std::vector<int> stack = {program.output};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (reachable[static_cast<std::size_t>(n)]) continue;
    reachable[static_cast<std::size_t>(n)] = true;
    for (int in : program.nodes[static_cast<std::size_t>(n)].inputs) stack.push_back(in);
  }
  for (std::size_t i = 0; i < reachable.size(); ++i) {
    if (!reachable[i]) {
      throw DataError(fmt::format("node {} is unreachable from the output", i));
    }
  }
}

Program parse_program(const nlohmann::json& j, bool allow_placeholders) {
  Program program;
  if (!j.is_object() || !j.contains("nodes") || !j.contains("output")) {
    throw DataError("program json needs 'nodes' and 'output'");
  }
  for (const auto& jn : j.at("nodes")) {
    ProgramNode node;
    node.kind = node_kind_from_string(jn.at("kind").get<std::string>());
    if (jn.contains("inputs")) node.inputs = jn.at("inputs").get<std::vector<int>>();
    if (jn.contains("value_args")) {
      node.value_args = jn.at("value_args").get<std::vector<std::string>>();
    }
    program.nodes.push_back(std::move(node));
  }
  program.output = j.at("output").get<int>();
  validate_program(program, allow_placeholders);
  return program;
}

nlohmann::json program_to_json(const Program& program) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : program.nodes) {
    nodes.push_back({{"kind", to_string(node.kind)},
                     {"inputs", node.inputs},
                     {"value_args", node.value_args}});
  }
  return {{"nodes", nodes}, {"output", program.output}};
}

EvalOutcome execute_program(const Program& program, const SymbolicScene& scene) {
  EvalOutcome outcome;
  std::vector<Value> memo(program.nodes.size());

  for (std::size_t i = 0; i < program.nodes.size(); ++i) {
    const auto& node = program.nodes[i];
    const auto in = [&](std::size_t j) -> const Value& {
      return memo[static_cast<std::size_t>(node.inputs[j])];
    };
    Value out;

    switch (node.kind) {
      case NodeKind::scene: {
        SoundSet all;
        for (const auto& s : scene.sounds) all.positions.push_back(s.absolute_position);
        std::sort(all.positions.begin(), all.positions.end());
        out.v = std::move(all);
        break;
      }
      case NodeKind::filter_instrument: {
        const auto want = instrument_from_string(node.value_args[0]);
        out.v = filter_set(scene, as_set(in(0)),
                           [&](const PlacedSound& s) { return s.instrument == want; });
        break;
      }
      case NodeKind::filter_note: {
        const auto want = note_from_string(node.value_args[0]);
        out.v = filter_set(scene, as_set(in(0)),
                           [&](const PlacedSound& s) { return s.note == want; });
        break;
      }
      case NodeKind::filter_loudness: {
        const auto want = loudness_from_string(node.value_args[0]);
        out.v = filter_set(scene, as_set(in(0)),
                           [&](const PlacedSound& s) { return s.loudness == want; });
        break;
      }
      case NodeKind::filter_brightness: {
        // `none` sounds never satisfy a brightness filter.
        const auto want = brightness_from_string(node.value_args[0]);
        out.v = filter_set(scene, as_set(in(0)),
                           [&](const PlacedSound& s) { return s.brightness == want; });
        break;
      }
      case NodeKind::filter_global_position: {
        const auto want = global_position_from_string(node.value_args[0]);
        out.v = filter_set(scene, as_set(in(0)),
                           [&](const PlacedSound& s) { return s.global_position == want; });
        break;
      }
      case NodeKind::filter_absolute_position: {
        const int want = parse_position_literal(node.value_args[0], "filter_absolute_position");
        out.v = filter_set(scene, as_set(in(0)),
                           [&](const PlacedSound& s) { return s.absolute_position == want; });
        break;
      }
      case NodeKind::filter_relative_position: {
        const int want = parse_position_literal(node.value_args[0], "filter_relative_position");
        out.v = filter_set(scene, as_set(in(0)),
                           [&](const PlacedSound& s) { return s.relative_position == want; });
        break;
      }
      case NodeKind::relate: {
        const int anchor = as_ref(in(0)).position;
        const bool before = node.value_args[0] == "before";
        SoundSet rel;
        for (const auto& s : scene.sounds) {
          if (before ? s.absolute_position < anchor : s.absolute_position > anchor) {
            rel.positions.push_back(s.absolute_position);
          }
        }
        std::sort(rel.positions.begin(), rel.positions.end());
        out.v = std::move(rel);
        break;
      }
      case NodeKind::unique: {
        const auto& set = as_set(in(0));
        if (set.positions.size() != 1) {
          throw IllPosedError(fmt::format(
              "unique at node {} received a set of size {}", i, set.positions.size()));
        }
        out.v = SoundRef{set.positions[0]};
        break;
      }
      case NodeKind::count:
        out.v = static_cast<long>(as_set(in(0)).positions.size());
        break;
      case NodeKind::exist:
        out.v = !as_set(in(0)).positions.empty();
        break;
      case NodeKind::query_instrument: {
        const auto& s = sound_at(scene, as_ref(in(0)).position);
        out.v = Attribute{AttributeCategory::instrument, std::string(to_string(s.instrument))};
        break;
      }
      case NodeKind::query_note: {
        const auto& s = sound_at(scene, as_ref(in(0)).position);
        out.v = Attribute{AttributeCategory::note, std::string(to_string(s.note))};
        break;
      }
      case NodeKind::query_loudness: {
        const auto& s = sound_at(scene, as_ref(in(0)).position);
        out.v = Attribute{AttributeCategory::loudness, std::string(to_string(s.loudness))};
        break;
      }
      case NodeKind::query_brightness: {
        const auto& s = sound_at(scene, as_ref(in(0)).position);
        if (s.brightness == Brightness::none) outcome.touched_ambiguous_brightness = true;
        out.v = Attribute{AttributeCategory::brightness, std::string(to_string(s.brightness))};
        break;
      }
      case NodeKind::query_absolute_position: {
        const auto& s = sound_at(scene, as_ref(in(0)).position);
        out.v = Attribute{AttributeCategory::absolute_position,
                          std::to_string(s.absolute_position)};
        break;
      }
      case NodeKind::query_relative_position: {
        const auto& s = sound_at(scene, as_ref(in(0)).position);
        out.v = Attribute{AttributeCategory::relative_position,
                          std::to_string(s.relative_position)};
        break;
      }
      case NodeKind::query_global_position: {
        const auto& s = sound_at(scene, as_ref(in(0)).position);
        out.v = Attribute{AttributeCategory::global_position,
                          std::string(to_string(s.global_position))};
        break;
      }
      case NodeKind::same_instrument: {
        const auto& anchor = sound_at(scene, as_ref(in(0)).position);
        out.v = others_matching(scene, anchor.absolute_position, [&](const PlacedSound& s) {
          return s.instrument == anchor.instrument;
        });
        break;
      }
      case NodeKind::same_note: {
        const auto& anchor = sound_at(scene, as_ref(in(0)).position);
        out.v = others_matching(scene, anchor.absolute_position, [&](const PlacedSound& s) {
          return s.note == anchor.note;
        });
        break;
      }
      case NodeKind::same_loudness: {
        const auto& anchor = sound_at(scene, as_ref(in(0)).position);
        out.v = others_matching(scene, anchor.absolute_position, [&](const PlacedSound& s) {
          return s.loudness == anchor.loudness;
        });
        break;
      }
      case NodeKind::same_brightness: {
        const auto& anchor = sound_at(scene, as_ref(in(0)).position);
        if (anchor.brightness == Brightness::none) {
          outcome.touched_ambiguous_brightness = true;
          out.v = SoundSet{};
        } else {
          out.v = others_matching(scene, anchor.absolute_position, [&](const PlacedSound& s) {
            return s.brightness == anchor.brightness;
          });
        }
        break;
      }
      case NodeKind::equal_integer:
        out.v = as_int(in(0)) == as_int(in(1));
        break;
      case NodeKind::less_than:
        out.v = as_int(in(0)) < as_int(in(1));
        break;
      case NodeKind::greater_than:
        out.v = as_int(in(0)) > as_int(in(1));
        break;
      case NodeKind::equal_attribute:
        out.v = as_attr(in(0)) == as_attr(in(1));
        break;
      case NodeKind::logical_and:
        out.v = as_bool(in(0)) && as_bool(in(1));
        break;
      case NodeKind::logical_or:
        out.v = as_bool(in(0)) || as_bool(in(1));
        break;
    }

    memo[i] = std::move(out);
  }

  outcome.value = memo[static_cast<std::size_t>(program.output)];
  return outcome;
}

std::string answer_of(const Value& value, Family family) {
  switch (family) {
    case Family::yes_no:
      return as_bool(value) ? "yes" : "no";
    case Family::counting: {
      const long n = as_int(value);
      if (n < 0 || n > 10) throw DataError(fmt::format("count {} outside 0..10", n));
      return std::to_string(n);
    }
    case Family::note: {
      const auto& a = as_attr(value);
      if (a.category != AttributeCategory::note) throw DataError("expected a note attribute");
      return a.value;
    }
    case Family::instrument: {
      const auto& a = as_attr(value);
      if (a.category != AttributeCategory::instrument) {
        throw DataError("expected an instrument attribute");
      }
      return a.value;
    }
    case Family::brightness: {
      const auto& a = as_attr(value);
      if (a.category != AttributeCategory::brightness) {
        throw DataError("expected a brightness attribute");
      }
      if (a.value == "none") {
        throw DataError("brightness of an ambiguous sound has no answer class");
      }
      return a.value;
    }
    case Family::loudness: {
      const auto& a = as_attr(value);
      if (a.category != AttributeCategory::loudness) {
        throw DataError("expected a loudness attribute");
      }
      return a.value;
    }
    case Family::absolute_position: {
      const auto& a = as_attr(value);
      if (a.category != AttributeCategory::absolute_position) {
        throw DataError("expected an absolute position attribute");
      }
      return std::string(ordinal_word(parse_position_literal(a.value, "absolute position")));
    }
    case Family::relative_position: {
      const auto& a = as_attr(value);
      if (a.category != AttributeCategory::relative_position) {
        throw DataError("expected a relative position attribute");
      }
      return std::string(ordinal_word(parse_position_literal(a.value, "relative position")));
    }
    case Family::global_position: {
      const auto& a = as_attr(value);
      if (a.category != AttributeCategory::global_position) {
        throw DataError("expected a global position attribute");
      }
      return a.value;
    }
  }
  throw DataError("unhandled family");
}

const std::vector<AnswerClass>& answer_registry() {
  static const std::vector<AnswerClass> registry = [] {
    std::vector<AnswerClass> r;
    r.push_back({Family::yes_no, "yes"});
    r.push_back({Family::yes_no, "no"});
    for (int i = 0; i < kNumNotes; ++i) {
      r.push_back({Family::note, std::string(to_string(static_cast<Note>(i)))});
    }
    for (int i = 0; i < kNumInstruments; ++i) {
      r.push_back({Family::instrument, std::string(to_string(static_cast<Instrument>(i)))});
    }
    r.push_back({Family::brightness, "bright"});
    r.push_back({Family::brightness, "dark"});
    r.push_back({Family::loudness, "quiet"});
    r.push_back({Family::loudness, "loud"});
    for (int n = 0; n <= 10; ++n) r.push_back({Family::counting, std::to_string(n)});
    for (int p = 1; p <= 10; ++p) {
      r.push_back({Family::absolute_position, std::string(ordinal_word(p))});
    }
    for (int p = 1; p <= 10; ++p) {
      r.push_back({Family::relative_position, std::string(ordinal_word(p))});
    }
    r.push_back({Family::global_position, "beginning"});
    r.push_back({Family::global_position, "middle"});
    r.push_back({Family::global_position, "end"});
    return r;
  }();
  return registry;
}

}  // namespace clear
