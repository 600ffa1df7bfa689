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

#include "clear/templates.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clear/errors.hpp"
#include "clear/rng.hpp"

namespace clear {

namespace {

// Which slot domain a placeholder must have, per node kind.
SlotDomain required_domain(NodeKind kind) {
  switch (kind) {
    case NodeKind::filter_instrument:
      return SlotDomain::instrument;
    case NodeKind::filter_note:
      return SlotDomain::note;
    case NodeKind::filter_loudness:
      return SlotDomain::loudness;
    case NodeKind::filter_brightness:
      return SlotDomain::brightness;
    case NodeKind::filter_global_position:
      return SlotDomain::global_position;
    case NodeKind::filter_absolute_position:
    case NodeKind::filter_relative_position:
      return SlotDomain::position;
    case NodeKind::relate:
      return SlotDomain::relation;
    default:
      throw DataError(fmt::format("node kind '{}' cannot take a slot placeholder",
                                  to_string(kind)));
  }
}

bool is_filter(NodeKind kind) {
  switch (kind) {
    case NodeKind::filter_instrument:
    case NodeKind::filter_note:
    case NodeKind::filter_loudness:
    case NodeKind::filter_brightness:
    case NodeKind::filter_global_position:
    case NodeKind::filter_absolute_position:
    case NodeKind::filter_relative_position:
      return true;
    default:
      return false;
  }
}

std::string placeholder_token(const std::string& slot_name) {
  return fmt::format("<{}>", slot_name);
}

// Extracts <token> names from a text variant.
std::vector<std::string> text_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const auto end = text.find('>', pos);
    if (end == std::string::npos) break;
    tokens.push_back(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return tokens;
}

std::string surface_form(SlotDomain domain, const std::string& value) {
  if (domain == SlotDomain::position) {
    return std::string(ordinal_word(std::stoi(value)));
  }
  return value;
}

std::string collapse_spaces(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = false;
  for (char c : text) {
    if (c == ' ') {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty() && c != '?' && c != ',' && c != '.') out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

struct BoundProgram {
  Program program;
  // For each node of `program`, the slot names bound into its value_args.
  std::vector<std::vector<std::string>> node_slots;
};

// Substitutes bindings into the skeleton. Null-bound filter nodes are removed
// and their consumers rewired to the filter's input.
BoundProgram bind_skeleton(const QuestionTemplate& tmpl,
                           const std::map<std::string, std::string>& bindings) {
  const auto& skeleton = tmpl.skeleton;
  std::vector<int> remap(skeleton.nodes.size(), -1);
  BoundProgram bound;

  for (std::size_t i = 0; i < skeleton.nodes.size(); ++i) {
    const auto& node = skeleton.nodes[i];
    bool bypass = false;
    ProgramNode next;
    next.kind = node.kind;
    std::vector<std::string> slots_here;

    for (const auto& arg : node.value_args) {
      if (!is_placeholder(arg)) {
        next.value_args.push_back(arg);
        continue;
      }
      const std::string slot_name = arg.substr(1, arg.size() - 2);
      const auto it = bindings.find(slot_name);
      if (it == bindings.end()) {
        throw DataError(fmt::format("template '{}': slot '{}' is unbound",
                                    tmpl.template_id, slot_name));
      }
      if (it->second == kNullBinding) {
        bypass = true;
        break;
      }
      next.value_args.push_back(it->second);
      slots_here.push_back(slot_name);
    }

    if (bypass) {
      // A filter that is not there: point consumers at its input.
      remap[i] = remap[static_cast<std::size_t>(node.inputs[0])];
      continue;
    }
    for (int in : node.inputs) next.inputs.push_back(remap[static_cast<std::size_t>(in)]);
    remap[i] = static_cast<int>(bound.program.nodes.size());
    bound.program.nodes.push_back(std::move(next));
    bound.node_slots.push_back(std::move(slots_here));
  }

  bound.program.output = remap[static_cast<std::size_t>(skeleton.output)];
  validate_program(bound.program);
  return bound;
}

// Slot names on the queried sound's own filter chain: from the output query
// node through unique() and filters, stopping at scene/relate/same_* (slots
// below a relation describe the other sound, not the queried one).
std::vector<std::string> queried_chain_slots(const BoundProgram& bound) {
  const auto& program = bound.program;
  const auto& out_node = program.nodes[static_cast<std::size_t>(program.output)];
  if (out_node.inputs.empty()) return {};

  std::vector<std::string> slots;
  int cur = out_node.inputs[0];
  while (true) {
    const auto& node = program.nodes[static_cast<std::size_t>(cur)];
    if (node.kind == NodeKind::unique) {
      cur = node.inputs[0];
    } else if (is_filter(node.kind)) {
      for (const auto& s : bound.node_slots[static_cast<std::size_t>(cur)]) {
        slots.push_back(s);
      }
      cur = node.inputs[0];
    } else {
      break;
    }
  }
  return slots;
}

bool is_query_family(Family family) {
  switch (family) {
    case Family::note:
    case Family::instrument:
    case Family::brightness:
    case Family::loudness:
    case Family::absolute_position:
    case Family::relative_position:
    case Family::global_position:
      return true;
    default:
      return false;
  }
}

}  // namespace

SlotDomain slot_domain_from_string(std::string_view name) {
  if (name == "instrument") return SlotDomain::instrument;
  if (name == "note") return SlotDomain::note;
  if (name == "loudness") return SlotDomain::loudness;
  if (name == "brightness") return SlotDomain::brightness;
  if (name == "global_position") return SlotDomain::global_position;
  if (name == "relation") return SlotDomain::relation;
  if (name == "position") return SlotDomain::position;
  throw DataError(fmt::format("unknown slot domain '{}'", name));
}

const std::vector<std::string>& default_domain_values(SlotDomain domain) {
  static const std::vector<std::string> instruments = {"cello", "clarinet", "flute",
                                                       "trumpet", "violin"};
  static const std::vector<std::string> notes = {"A", "A#", "B", "C", "C#", "D",
                                                 "D#", "E", "F", "F#", "G", "G#"};
  static const std::vector<std::string> loudness = {"quiet", "loud"};
  static const std::vector<std::string> brightness = {"bright", "dark"};
  static const std::vector<std::string> global = {"beginning", "middle", "end"};
  static const std::vector<std::string> relation = {"before", "after"};
  static const std::vector<std::string> position = {"1", "2", "3", "4", "5",
                                                    "6", "7", "8", "9", "10"};
  switch (domain) {
    case SlotDomain::instrument:
      return instruments;
    case SlotDomain::note:
      return notes;
    case SlotDomain::loudness:
      return loudness;
    case SlotDomain::brightness:
      return brightness;
    case SlotDomain::global_position:
      return global;
    case SlotDomain::relation:
      return relation;
    case SlotDomain::position:
      return position;
  }
  throw DataError("unhandled slot domain");
}

std::string_view to_string(RejectionClass cls) {
  switch (cls) {
    case RejectionClass::constraint:
      return "constraint";
    case RejectionClass::ill_posed:
      return "ill_posed";
    case RejectionClass::degenerate:
      return "degenerate";
    case RejectionClass::hint:
      return "hint";
    case RejectionClass::unanswerable:
      return "unanswerable";
    case RejectionClass::duplicate:
      return "duplicate";
    case RejectionClass::budget:
      return "budget";
  }
  return "unknown";
}

std::vector<Family> TemplateSet::missing_families() const {
  std::set<Family> seen;
  for (const auto& t : templates) seen.insert(t.family);
  std::vector<Family> missing;
  for (int i = 0; i < kNumFamilies; ++i) {
    const auto f = static_cast<Family>(i);
    if (!seen.count(f)) missing.push_back(f);
  }
  return missing;
}

TemplateSet load_templates(const std::filesystem::path& directory) {
  if (!std::filesystem::is_directory(directory)) {
    throw IoError(fmt::format("template directory '{}' does not exist", directory.string()));
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw DataError(fmt::format("no templates in '{}'", directory.string()));
  }

  TemplateSet set;
  std::set<std::string> ids;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw IoError(fmt::format("cannot open template '{}'", file.string()));
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("template '{}': {}", file.string(), e.what()));
    }

    QuestionTemplate tmpl;
    try {
      tmpl.template_id = j.value("template_id", file.stem().string());
      tmpl.family = family_from_string(j.at("family").get<std::string>());
      for (const auto& js : j.at("slots")) {
        SlotSpec slot;
        slot.name = js.at("name").get<std::string>();
        slot.domain = slot_domain_from_string(js.at("domain").get<std::string>());
        slot.nullable = js.value("nullable", false);
        slot.values = js.value("values", std::vector<std::string>{});
        if (slot.values.empty()) slot.values = default_domain_values(slot.domain);
        tmpl.slots.push_back(std::move(slot));
      }
      if (j.contains("constraints")) {
        for (const auto& jc : j.at("constraints")) {
          Constraint c;
          const auto kind = jc.at("kind").get<std::string>();
          if (kind != "not_equal") {
            throw DataError(fmt::format("unknown constraint kind '{}'", kind));
          }
          c.slots = jc.at("slots").get<std::vector<std::string>>();
          tmpl.constraints.push_back(std::move(c));
        }
      }
      tmpl.skeleton = parse_program(j.at("program"), /*allow_placeholders=*/true);
      tmpl.text_variants = j.at("text").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("template '{}': {}", file.string(), e.what()));
    }

    if (tmpl.text_variants.empty()) {
      throw DataError(fmt::format("template '{}': no text variants", file.string()));
    }
    if (!ids.insert(tmpl.template_id).second) {
      throw DataError(fmt::format("duplicate template id '{}'", tmpl.template_id));
    }

    // Cross-validation: slots vs text tokens vs program placeholders.
    std::set<std::string> slot_names;
    for (const auto& s : tmpl.slots) {
      if (!slot_names.insert(s.name).second) {
        throw DataError(fmt::format("template '{}': duplicate slot '{}'",
                                    file.string(), s.name));
      }
    }
    for (const auto& variant : tmpl.text_variants) {
      for (const auto& token : text_tokens(variant)) {
        if (!slot_names.count(token)) {
          throw DataError(fmt::format("template '{}': text placeholder <{}> is not a slot",
                                      file.string(), token));
        }
      }
    }
    std::set<std::string> used;
    for (std::size_t i = 0; i < tmpl.skeleton.nodes.size(); ++i) {
      const auto& node = tmpl.skeleton.nodes[i];
      for (const auto& arg : node.value_args) {
        if (!is_placeholder(arg)) continue;
        const std::string name = arg.substr(1, arg.size() - 2);
        const auto it =
            std::find_if(tmpl.slots.begin(), tmpl.slots.end(),
                         [&](const SlotSpec& s) { return s.name == name; });
        if (it == tmpl.slots.end()) {
          throw DataError(fmt::format("template '{}': program placeholder <{}> is not a slot",
                                      file.string(), name));
        }
        if (it->domain != required_domain(node.kind)) {
          throw DataError(fmt::format(
              "template '{}': slot '{}' has the wrong domain for node {}", file.string(),
              name, i));
        }
        if (it->nullable && !is_filter(node.kind)) {
          throw DataError(fmt::format(
              "template '{}': nullable slot '{}' may only bind filter nodes",
              file.string(), name));
        }
        used.insert(name);
      }
    }
    for (const auto& s : tmpl.slots) {
      if (!used.count(s.name)) {
        throw DataError(fmt::format("template '{}': slot '{}' never used in the program",
                                    file.string(), s.name));
      }
    }
    for (const auto& c : tmpl.constraints) {
      for (const auto& s : c.slots) {
        if (!slot_names.count(s)) {
          throw DataError(fmt::format("template '{}': constraint references unknown slot '{}'",
                                      file.string(), s));
        }
      }
    }
    if (family_of_output(tmpl.skeleton) != tmpl.family) {
      throw DataError(fmt::format(
          "template '{}': declared family '{}' does not match the output node",
          file.string(), to_string(tmpl.family)));
    }

    set.templates.push_back(std::move(tmpl));
  }

  const auto missing = set.missing_families();
  if (!missing.empty()) {
    std::string names;
    for (const auto f : missing) {
      names += names.empty() ? "" : ", ";
      names += to_string(f);
    }
    fmt::print(stderr, "warning: template set covers no {} questions\n", names);
  }
  return set;
}

bool check_ill_posed(const Program& program, const SymbolicScene& scene) {
  try {
    execute_program(program, scene);
    return false;
  } catch (const IllPosedError&) {
    return true;
  }
}

bool check_degenerate(const Program& program, const SymbolicScene& scene) {
  const auto family = family_of_output(program);
  std::string original;
  try {
    original = answer_of(execute_program(program, scene).value, family);
  } catch (const DataError&) {
    return false;  // caller validates well-posedness separately
  }

  for (std::size_t r = 0; r < program.nodes.size(); ++r) {
    if (program.nodes[r].kind != NodeKind::relate) continue;
    Program reduced = program;
    reduced.nodes[r] = ProgramNode{NodeKind::scene, {}, {}};
    try {
      if (answer_of(execute_program(reduced, scene).value, family) == original) {
        return true;
      }
    } catch (const DataError&) {
      // Including ill-posed reductions: the relation is informative here.
    }
  }
  return false;
}

std::string realize_text(const QuestionTemplate& tmpl,
                         const std::map<std::string, std::string>& bindings,
                         std::uint64_t seed) {
  Rng rng(seed);
  std::string text = tmpl.text_variants[rng.below(tmpl.text_variants.size())];

  for (const auto& slot : tmpl.slots) {
    const auto it = bindings.find(slot.name);
    if (it == bindings.end()) {
      throw DataError(fmt::format("realize_text: slot '{}' is unbound", slot.name));
    }
    const std::string token = placeholder_token(slot.name);
    const std::string surface =
        it->second == kNullBinding ? "" : surface_form(slot.domain, it->second);
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
      text.replace(pos, token.size(), surface);
      pos += surface.size();
    }
  }
  return collapse_spaces(text);
}

InstantiateResult instantiate(const QuestionTemplate& tmpl, const SymbolicScene& scene,
                              std::uint64_t seed, int budget) {
  if (budget <= 0) throw DataError("instantiate: budget must be positive");

  Rng rng(derive_seed(seed, stream::kBinding));
  Rejection rejection;

  for (int attempt = 0; attempt < budget; ++attempt) {
    rejection.attempts = attempt + 1;

    std::map<std::string, std::string> bindings;
    for (const auto& slot : tmpl.slots) {
      const std::size_t extent = slot.values.size() + (slot.nullable ? 1 : 0);
      const std::size_t pick = rng.below(extent);
      bindings[slot.name] =
          pick == slot.values.size() ? std::string(kNullBinding) : slot.values[pick];
    }

    bool constraint_failed = false;
    for (const auto& c : tmpl.constraints) {
      for (std::size_t a = 0; a + 1 < c.slots.size() && !constraint_failed; ++a) {
        for (std::size_t b = a + 1; b < c.slots.size(); ++b) {
          if (bindings.at(c.slots[a]) == bindings.at(c.slots[b])) {
            constraint_failed = true;
            break;
          }
        }
      }
    }
    if (constraint_failed) {
      rejection.cls = RejectionClass::constraint;
      continue;
    }

    BoundProgram bound;
    try {
      bound = bind_skeleton(tmpl, bindings);
    } catch (const DataError&) {
      rejection.cls = RejectionClass::constraint;
      continue;
    }

    EvalOutcome outcome;
    try {
      outcome = execute_program(bound.program, scene);
    } catch (const IllPosedError&) {
      rejection.cls = RejectionClass::ill_posed;
      continue;
    }
    if (outcome.touched_ambiguous_brightness) {
      rejection.cls = RejectionClass::unanswerable;
      continue;
    }

    std::string answer;
    try {
      answer = answer_of(outcome.value, tmpl.family);
    } catch (const DataError&) {
      rejection.cls = RejectionClass::unanswerable;
      continue;
    }

    if (is_query_family(tmpl.family)) {
      bool hinted = false;
      for (const auto& slot_name : queried_chain_slots(bound)) {
        const auto& slot = *std::find_if(tmpl.slots.begin(), tmpl.slots.end(),
                                         [&](const SlotSpec& s) { return s.name == slot_name; });
        if (surface_form(slot.domain, bindings.at(slot_name)) == answer) {
          hinted = true;
          break;
        }
      }
      if (hinted) {
        rejection.cls = RejectionClass::hint;
        continue;
      }
    }

    if (check_degenerate(bound.program, scene)) {
      rejection.cls = RejectionClass::degenerate;
      continue;
    }

    Instantiated result;
    result.qa.scene_id = scene.scene_id;
    result.qa.template_id = tmpl.template_id;
    result.qa.program = std::move(bound.program);
    result.qa.answer = std::move(answer);
    result.qa.family = tmpl.family;
    result.qa.text =
        realize_text(tmpl, bindings, derive_seed(seed, stream::kText, attempt));

    std::string signature = tmpl.template_id;
    for (const auto& [name, value] : bindings) {
      signature += fmt::format("|{}={}", name, value);
    }
    result.signature = std::move(signature);
    return result;
  }

  rejection.exhausted = true;
  return rejection;
}

}  // namespace clear
