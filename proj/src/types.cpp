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

#include "clear/types.hpp"

#include <cmath>

#include <fmt/format.h>

#include "clear/errors.hpp"

namespace clear {

namespace {

constexpr std::array<std::string_view, 5> kInstrumentNames = {
    "cello", "clarinet", "flute", "trumpet", "violin"};

constexpr std::array<std::string_view, 12> kNoteNames = {
    "A", "A#", "B", "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#"};

constexpr std::array<std::string_view, 2> kLoudnessNames = {"quiet", "loud"};

constexpr std::array<std::string_view, 3> kBrightnessNames = {"bright", "dark", "none"};

constexpr std::array<std::string_view, 3> kGlobalNames = {"beginning", "middle", "end"};

constexpr std::array<std::string_view, 3> kSplitNames = {"train", "val", "test"};

constexpr std::array<std::string_view, 10> kOrdinals = {
    "first", "second", "third",   "fourth", "fifth",
    "sixth", "seventh", "eighth", "ninth",  "tenth"};

template <typename Enum, std::size_t N>
Enum parse_enum(const std::array<std::string_view, N>& names, std::string_view s,
                std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw DataError(fmt::format("unknown {} value '{}'", what, s));
}

}  // namespace

std::string_view to_string(Instrument v) { return kInstrumentNames[static_cast<int>(v)]; }
std::string_view to_string(Note v) { return kNoteNames[static_cast<int>(v)]; }
std::string_view to_string(Loudness v) { return kLoudnessNames[static_cast<int>(v)]; }
std::string_view to_string(Brightness v) { return kBrightnessNames[static_cast<int>(v)]; }
std::string_view to_string(GlobalPosition v) { return kGlobalNames[static_cast<int>(v)]; }
std::string_view to_string(Split v) { return kSplitNames[static_cast<int>(v)]; }

Instrument instrument_from_string(std::string_view s) {
  return parse_enum<Instrument>(kInstrumentNames, s, "instrument");
}
Note note_from_string(std::string_view s) {
  return parse_enum<Note>(kNoteNames, s, "note");
}
Loudness loudness_from_string(std::string_view s) {
  return parse_enum<Loudness>(kLoudnessNames, s, "loudness");
}
Brightness brightness_from_string(std::string_view s) {
  return parse_enum<Brightness>(kBrightnessNames, s, "brightness");
}
GlobalPosition global_position_from_string(std::string_view s) {
  return parse_enum<GlobalPosition>(kGlobalNames, s, "global position");
}
Split split_from_string(std::string_view s) {
  return parse_enum<Split>(kSplitNames, s, "split");
}

double note_frequency_hz(Note n) {
  // Semitone distance from A4 within octave 4: C is 9 below A, G# is 1 below.
  static constexpr std::array<int, 12> kSemitonesFromA = {0,  1,  2, -9, -8, -7,
                                                          -6, -5, -4, -3, -2, -1};
  return 440.0 * std::pow(2.0, kSemitonesFromA[static_cast<int>(n)] / 12.0);
}

std::string_view ordinal_word(int position) {
  if (position < 1 || position > 10) {
    throw DataError(fmt::format("ordinal out of range: {}", position));
  }
  return kOrdinals[position - 1];
}

int ordinal_from_word(std::string_view s) {
  for (int i = 0; i < 10; ++i) {
    if (kOrdinals[i] == s) return i + 1;
  }
  throw DataError(fmt::format("unknown ordinal '{}'", s));
}

}  // namespace clear
