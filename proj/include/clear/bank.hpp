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
#include <string>
#include <string_view>
#include <vector>

#include "clear/types.hpp"
#include "clear/waveform.hpp"

namespace clear {

// One annotated recording: a single instrument playing a single note.
struct ElementarySound {
  std::string id;
  Instrument instrument;
  Note note;
  Loudness loudness_label = Loudness::quiet;
  Brightness brightness_label = Brightness::none;
  double measured_lufs = 0.0;
  double spectral_centroid = 0.0;  // Hz
  double duration_ms = 0.0;
  Waveform audio;
};

struct SoundBank {
  std::vector<ElementarySound> sounds;
  std::string source_descriptor;

  const ElementarySound* find(std::string_view id) const;
  const ElementarySound& get(std::string_view id) const;  // throws DataError
};

struct IngestConfig {
  double trim_window_ms = 100.0;
  double trim_threshold_db = -50.0;
  double dark_max_hz = 1500.0;
  double bright_min_hz = 2000.0;
};

// Removes leading and trailing low-energy windows. Energy per window is
// E = 10*log10(sum x_i^2) over non-overlapping windows of window_ms; a partial
// final window shorter than half a window is merged with its neighbor.
// Retained samples are a contiguous, untouched slice of the input; the result
// may be empty.
Waveform trim_silence(const Waveform& audio, double window_ms = 100.0,
                      double threshold_db = -50.0);

// Amplitude-weighted mean frequency of the Hann-windowed whole-sound spectrum.
double spectral_centroid_hz(const Waveform& audio);

// dark below dark_max_hz, bright above bright_min_hz, none in between.
Brightness classify_brightness(const Waveform& audio, double dark_max_hz = 1500.0,
                               double bright_min_hz = 2000.0);

// Loads WAV files listed in the directory's manifest (see docs/FORMATS.md),
// quantizes to the 16-bit grid, trims silence and annotates loudness,
// brightness and duration. Files without a manifest entry are ignored; a
// missing manifest falls back to `{instrument}_{note}.wav` filename parsing
// with '#' written as 's'.
SoundBank ingest_bank(const std::filesystem::path& directory,
                      const IngestConfig& config = {});

// Attenuates sounds whose integrated loudness lies in [-30.5, -24] dB LUFS by
// -10 dB and re-measures them, then assigns loudness labels: loud iff the
// final LUFS is above -27 (the midpoint of the gap the attenuation creates).
SoundBank normalize_intermediate_loudness(SoundBank bank);

struct SynthInstrument {
  Instrument instrument;
  std::vector<Note> notes;
  std::vector<double> harmonics;  // amplitude of partial k at (k+1) * f0
};

struct SynthSpec {
  std::vector<SynthInstrument> instruments;
  double duration_min_ms = 500.0;
  double duration_max_ms = 2000.0;
  // Pre-normalization loudness targets. Sounds alternate between the loud
  // band and the intermediate band (which normalize_intermediate_loudness
  // later attenuates); every seventh sound sits just below the intermediate
  // range so that path is exercised too.
  double loud_band_lufs[2] = {-23.5, -20.5};
  double intermediate_band_lufs[2] = {-30.0, -25.0};
  double low_band_lufs[2] = {-33.0, -31.0};

  // Five instruments, twelve chromatic notes each except cello with eight:
  // a 56-sound bank.
  static SynthSpec default_bank();
};

// Additive-synthesis test fixture: deterministic for (spec, seed), annotated
// by the same operations as ingest_bank. Apply normalize_intermediate_loudness
// afterwards, as with an ingested bank.
SoundBank synthesize_bank(const SynthSpec& spec, std::uint64_t seed);

// Writes one 16-bit WAV per sound plus a manifest, so the directory can be
// re-ingested with ingest_bank.
void write_bank(const SoundBank& bank, const std::filesystem::path& directory);

}  // namespace clear
