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

#include <array>
#include <string>
#include <string_view>

namespace clear {

enum class Instrument { cello, clarinet, flute, trumpet, violin };
inline constexpr int kNumInstruments = 5;

// Chromatic pitch classes of the fourth octave.
enum class Note { A, A_sharp, B, C, C_sharp, D, D_sharp, E, F, F_sharp, G, G_sharp };
inline constexpr int kNumNotes = 12;

enum class Loudness { quiet, loud };

// `none` marks sounds whose spectral centroid falls between the dark and
// bright thresholds; they never satisfy brightness filters.
enum class Brightness { bright, dark, none };

enum class GlobalPosition { beginning, middle, end };

enum class Split { train, val, test };

std::string_view to_string(Instrument v);
std::string_view to_string(Note v);
std::string_view to_string(Loudness v);
std::string_view to_string(Brightness v);
std::string_view to_string(GlobalPosition v);
std::string_view to_string(Split v);

Instrument instrument_from_string(std::string_view s);
Note note_from_string(std::string_view s);
Loudness loudness_from_string(std::string_view s);
Brightness brightness_from_string(std::string_view s);
GlobalPosition global_position_from_string(std::string_view s);
Split split_from_string(std::string_view s);

// Equal-tempered fundamental of a pitch class in octave 4 (A4 = 440 Hz).
double note_frequency_hz(Note n);

// Ordinal surface forms: 1 -> "first", ..., 10 -> "tenth".
std::string_view ordinal_word(int position);
int ordinal_from_word(std::string_view s);

inline constexpr std::array<Split, 3> kAllSplits = {Split::train, Split::val, Split::test};

}  // namespace clear
