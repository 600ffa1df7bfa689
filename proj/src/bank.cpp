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

#include "clear/bank.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "clear/errors.hpp"
#include "clear/fft.hpp"
#include "clear/loudness.hpp"
#include "clear/rng.hpp"
#include "clear/wav_io.hpp"

namespace clear {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Windows for silence trimming: non-overlapping, with a trailing partial
// window merged into its neighbor when shorter than half a window.
std::vector<std::pair<std::size_t, std::size_t>> trim_windows(std::size_t n,
                                                              std::size_t win) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  if (n == 0) return spans;
  const std::size_t full = n / win;
  const std::size_t rem = n - full * win;
  for (std::size_t i = 0; i < full; ++i) spans.emplace_back(i * win, (i + 1) * win);
  if (rem > 0) {
    if (rem < win / 2 && !spans.empty()) {
      spans.back().second = n;
    } else {
      spans.emplace_back(full * win, n);
    }
  }
  return spans;
}

double window_energy_db(const Waveform& audio, std::size_t begin, std::size_t end) {
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double s = audio.samples[i];
    sum += s * s;
  }
  return sum > 0.0 ? 10.0 * std::log10(sum)
                   : -std::numeric_limits<double>::infinity();
}

void quantize_to_16bit_grid(Waveform& w) {
  for (auto& s : w.samples) {
    long q = std::lround(static_cast<double>(s) * 32768.0);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    s = static_cast<float>(static_cast<double>(q) / 32768.0);
  }
}

void annotate(ElementarySound& sound, const IngestConfig& config) {
  sound.audio = trim_silence(sound.audio, config.trim_window_ms, config.trim_threshold_db);
  if (sound.audio.empty()) {
    throw DataError(fmt::format("sound '{}' is entirely silence", sound.id));
  }
  sound.duration_ms = sound.audio.duration_ms();
  sound.measured_lufs = measure_loudness(sound.audio);
  sound.spectral_centroid = spectral_centroid_hz(sound.audio);
  sound.brightness_label =
      classify_brightness(sound.audio, config.dark_max_hz, config.bright_min_hz);
  // Provisional label; normalize_intermediate_loudness assigns the final one.
  sound.loudness_label = sound.measured_lufs > -27.0 ? Loudness::loud : Loudness::quiet;
}

std::string note_file_token(Note n) {
  std::string token(to_string(n));
  std::replace(token.begin(), token.end(), '#', 's');
  return token;
}

Note note_from_file_token(std::string_view token) {
  std::string s(token);
  std::replace(s.begin(), s.end(), 's', '#');
  return note_from_string(s);
}

struct ManifestRecord {
  std::string file;
  Instrument instrument;
  Note note;
};

// Manifest line format: file=<name> instrument=<name> note=<pitch class>.
// '#' may be written literally or as 's'. Blank lines and '#'-prefixed
// comment lines are skipped.
std::vector<ManifestRecord> parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open manifest '{}'", path.string()));
  std::vector<ManifestRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::map<std::string, std::string> kv;
    std::istringstream ls(line);
    std::string field;
    while (ls >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) {
        throw DataError(fmt::format("manifest '{}' line {}: expected key=value, got '{}'",
                                    path.string(), line_no, field));
      }
      kv[field.substr(0, eq)] = field.substr(eq + 1);
    }
    for (const char* key : {"file", "instrument", "note"}) {
      if (!kv.count(key)) {
        throw DataError(fmt::format("manifest '{}' line {}: missing field '{}'",
                                    path.string(), line_no, key));
      }
    }
    ManifestRecord rec;
    rec.file = kv["file"];
    rec.instrument = instrument_from_string(kv["instrument"]);
    const std::string& note = kv["note"];
    rec.note = note.find('s') != std::string::npos ? note_from_file_token(note)
                                                   : note_from_string(note);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ManifestRecord> records_from_filenames(const std::filesystem::path& dir) {
  std::vector<ManifestRecord> records;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wav") continue;
    const std::string stem = entry.path().stem().string();
    const auto underscore = stem.find('_');
    if (underscore == std::string::npos) {
      throw DataError(fmt::format(
          "no manifest and filename '{}' does not follow instrument_note.wav",
          entry.path().filename().string()));
    }
    ManifestRecord rec;
    rec.file = entry.path().filename().string();
    rec.instrument = instrument_from_string(stem.substr(0, underscore));
    rec.note = note_from_file_token(stem.substr(underscore + 1));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

const ElementarySound* SoundBank::find(std::string_view id) const {
  for (const auto& s : sounds) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const ElementarySound& SoundBank::get(std::string_view id) const {
  const auto* s = find(id);
  if (s == nullptr) throw DataError(fmt::format("sound id '{}' not in bank", id));
  return *s;
}

Waveform trim_silence(const Waveform& audio, double window_ms, double threshold_db) {
  if (window_ms <= 0.0) throw DataError("trim_silence: window_ms must be positive");
  if (audio.empty()) return {std::vector<float>{}, audio.rate};

  const auto win = static_cast<std::size_t>(std::lround(window_ms / 1000.0 * audio.rate));
  const auto spans = trim_windows(audio.size(), std::max<std::size_t>(win, 1));

  std::size_t first = spans.size(), last = spans.size();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (window_energy_db(audio, spans[i].first, spans[i].second) >= threshold_db) {
      if (first == spans.size()) first = i;
      last = i;
    }
  }
  if (first == spans.size()) return {std::vector<float>{}, audio.rate};

  Waveform out;
  out.rate = audio.rate;
  out.samples.assign(audio.samples.begin() + static_cast<std::ptrdiff_t>(spans[first].first),
                     audio.samples.begin() + static_cast<std::ptrdiff_t>(spans[last].second));
  return out;
}

double spectral_centroid_hz(const Waveform& audio) {
  if (audio.empty()) throw DataError("spectral_centroid_hz: empty waveform");

  const std::size_t n = audio.size();
  const std::size_t nfft = next_pow2(n);
  std::vector<std::complex<double>> buf(nfft, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    // Hann window keeps leakage sidelobes from skewing the centroid.
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                          static_cast<double>(n));
    buf[i] = audio.samples[i] * w;
  }
  fft_inplace(buf);

  double num = 0.0, den = 0.0;
  const double bin_hz = static_cast<double>(audio.rate) / static_cast<double>(nfft);
  for (std::size_t k = 1; k <= nfft / 2; ++k) {
    const double mag = std::abs(buf[k]);
    num += static_cast<double>(k) * bin_hz * mag;
    den += mag;
  }
  return den > 0.0 ? num / den : 0.0;
}

Brightness classify_brightness(const Waveform& audio, double dark_max_hz,
                               double bright_min_hz) {
  if (audio.empty()) throw DataError("classify_brightness: empty waveform");
  if (dark_max_hz >= bright_min_hz) {
    throw DataError("classify_brightness: dark_max_hz must be below bright_min_hz");
  }
  const double centroid = spectral_centroid_hz(audio);
  if (centroid < dark_max_hz) return Brightness::dark;
  if (centroid > bright_min_hz) return Brightness::bright;
  return Brightness::none;
}

SoundBank ingest_bank(const std::filesystem::path& directory, const IngestConfig& config) {
  if (!std::filesystem::is_directory(directory)) {
    throw IoError(fmt::format("bank directory '{}' does not exist", directory.string()));
  }

  const auto manifest_path = directory / "manifest.txt";
  std::vector<ManifestRecord> records = std::filesystem::exists(manifest_path)
                                            ? parse_manifest(manifest_path)
                                            : records_from_filenames(directory);
  if (records.empty()) throw DataError(fmt::format("no sounds found in '{}'", directory.string()));

  std::sort(records.begin(), records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) { return a.file < b.file; });

  SoundBank bank;
  bank.source_descriptor = directory.string();
  std::map<std::string, int> id_counts;
  for (const auto& rec : records) {
    ElementarySound sound;
    std::string base = fmt::format("{}_{}", to_string(rec.instrument),
                                   note_file_token(rec.note));
    const int repeat = ++id_counts[base];
    sound.id = repeat == 1 ? base : fmt::format("{}_{}", base, repeat);
    sound.instrument = rec.instrument;
    sound.note = rec.note;

    WavData wav;
    try {
      wav = read_wav(directory / rec.file);
    } catch (const IoError& e) {
      throw IoError(fmt::format("ingesting '{}': {}", rec.file, e.what()));
    }
    sound.audio = std::move(wav.wave);
    if (wav.source_bits > 16) quantize_to_16bit_grid(sound.audio);
    annotate(sound, config);
    bank.sounds.push_back(std::move(sound));
  }

  std::sort(bank.sounds.begin(), bank.sounds.end(),
            [](const ElementarySound& a, const ElementarySound& b) { return a.id < b.id; });
  return bank;
}

SoundBank normalize_intermediate_loudness(SoundBank bank) {
  for (auto& sound : bank.sounds) {
    if (sound.measured_lufs >= -30.5 && sound.measured_lufs <= -24.0) {
      scale(sound.audio, db_to_gain(-10.0));
      sound.measured_lufs = measure_loudness(sound.audio);
    }
    sound.loudness_label =
        sound.measured_lufs > -27.0 ? Loudness::loud : Loudness::quiet;
  }
  return bank;
}

SynthSpec SynthSpec::default_bank() {
  const std::vector<Note> all_notes = {Note::A, Note::A_sharp, Note::B,  Note::C,
                                       Note::C_sharp, Note::D, Note::D_sharp, Note::E,
                                       Note::F, Note::F_sharp, Note::G, Note::G_sharp};
  const std::vector<Note> cello_notes = {Note::C, Note::C_sharp, Note::D, Note::D_sharp,
                                         Note::E, Note::F, Note::F_sharp, Note::G};

  SynthSpec spec;
  spec.instruments = {
      {Instrument::cello, cello_notes, {1.0, 0.6, 0.35, 0.2, 0.1, 0.05}},
      {Instrument::clarinet, all_notes,
       {1.0, 0.05, 0.62, 0.05, 0.45, 0.04, 0.32, 0.03, 0.22, 0.03, 0.15, 0.02, 0.10}},
      {Instrument::flute, all_notes, {1.0, 0.35, 0.12, 0.05}},
      {Instrument::trumpet, all_notes,
       {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2}},
      {Instrument::violin, all_notes, {}},
  };
  // Violin: geometric rolloff, bright across the full octave.
  auto& violin = spec.instruments.back().harmonics;
  double a = 1.0;
  for (int k = 0; k < 20; ++k) {
    a *= 0.93;
    violin.push_back(a);
  }
  return spec;
}

SoundBank synthesize_bank(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.instruments.empty()) {
    throw DataError("synthesize_bank: spec lists no instruments");
  }

  SoundBank bank;
  bank.source_descriptor = fmt::format("synthetic:{:#x}", seed);
  int index = 0;
  for (const auto& inst : spec.instruments) {
    if (inst.notes.empty() || inst.harmonics.empty()) {
      throw DataError(fmt::format("synthesize_bank: instrument '{}' has empty notes or harmonics",
                                  to_string(inst.instrument)));
    }
    for (Note note : inst.notes) {
      Rng rng(derive_seed(seed, stream::kSynth, static_cast<std::uint64_t>(index)));
      const double duration_ms = rng.uniform(spec.duration_min_ms, spec.duration_max_ms);
      const double f0 = note_frequency_hz(note);
      const auto n = static_cast<std::size_t>(std::lround(duration_ms / 1000.0 * kSampleRate));

      Waveform w;
      w.samples.resize(n);
      const std::size_t ramp = static_cast<std::size_t>(0.010 * kSampleRate);
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < inst.harmonics.size(); ++k) {
          const double f = f0 * static_cast<double>(k + 1);
          if (f >= kSampleRate / 2.0) break;
          s += inst.harmonics[k] *
               std::sin(2.0 * kPi * f * static_cast<double>(i) / kSampleRate);
        }
        double env = 1.0;
        if (i < ramp) {
          env = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / ramp);
        } else if (i + ramp >= n) {
          env = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(n - 1 - i) / ramp);
        }
        w.samples[i] = static_cast<float>(s * env);
      }

      // Peak-normalize, then scale to the pre-normalization loudness target.
      float peak = 0.0f;
      for (float s : w.samples) peak = std::max(peak, std::abs(s));
      if (peak > 0.0f) scale(w, 0.9 / peak);

      double target;
      if (index % 7 == 6) {
        target = rng.uniform(spec.low_band_lufs[0], spec.low_band_lufs[1]);
      } else if (index % 2 == 0) {
        target = rng.uniform(spec.loud_band_lufs[0], spec.loud_band_lufs[1]);
      } else {
        target = rng.uniform(spec.intermediate_band_lufs[0], spec.intermediate_band_lufs[1]);
      }
      const double measured = measure_loudness(w);
      scale(w, db_to_gain(target - measured));
      quantize_to_16bit_grid(w);

      ElementarySound sound;
      sound.id = fmt::format("{}_{}", to_string(inst.instrument), note_file_token(note));
      sound.instrument = inst.instrument;
      sound.note = note;
      sound.audio = std::move(w);
      annotate(sound, IngestConfig{});
      bank.sounds.push_back(std::move(sound));
      ++index;
    }
  }

  std::sort(bank.sounds.begin(), bank.sounds.end(),
            [](const ElementarySound& a, const ElementarySound& b) { return a.id < b.id; });
  return bank;
}

void write_bank(const SoundBank& bank, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  std::ofstream manifest(directory / "manifest.txt");
  if (!manifest) {
    throw IoError(fmt::format("cannot create manifest in '{}'", directory.string()));
  }
  manifest << "# file instrument note\n";
  for (const auto& sound : bank.sounds) {
    const std::string file = sound.id + ".wav";
    write_wav(sound.audio, directory / file);
    manifest << fmt::format("file={} instrument={} note={}\n", file,
                            to_string(sound.instrument), note_file_token(sound.note));
  }
}

}  // namespace clear
