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

#include "clear/spectrogram.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>

#include <fmt/format.h>

#include "clear/errors.hpp"
#include "clear/fft.hpp"

namespace clear {

namespace {

constexpr double kPi = 3.14159265358979323846;

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff),
  };
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

Spectrogram compute_spectrogram(const Waveform& audio, const STFTParams& params) {
  if (params.hop_ms <= 0.0 || params.window_ms < params.hop_ms) {
    throw DataError("compute_spectrogram: need window_ms >= hop_ms > 0");
  }
  const auto window =
      static_cast<std::size_t>(std::lround(params.window_ms / 1000.0 * audio.rate));
  const auto hop = static_cast<std::size_t>(std::lround(params.hop_ms / 1000.0 * audio.rate));
  if (audio.size() < window) {
    throw DataError(fmt::format(
        "compute_spectrogram: input of {} samples is shorter than one {}-sample window",
        audio.size(), window));
  }

  std::size_t nfft = params.fft_size == 0 ? next_pow2(window) : params.fft_size;
  if (nfft < window) {
    throw DataError(fmt::format("compute_spectrogram: fft_size {} below window {} samples",
                                nfft, window));
  }

  Spectrogram spec;
  spec.stft = params;
  spec.stft.fft_size = nfft;
  spec.frames = (audio.size() - window) / hop + 1;
  spec.bins = nfft / 2 + 1;
  spec.values.resize(spec.frames * spec.bins);

  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                   static_cast<double>(window));
  }

  std::vector<std::complex<double>> buf;
  for (std::size_t frame = 0; frame < spec.frames; ++frame) {
    buf.assign(nfft, 0.0);
    const std::size_t start = frame * hop;
    for (std::size_t i = 0; i < window; ++i) {
      buf[i] = audio.samples[start + i] * hann[i];
    }
    fft_inplace(buf);
    for (std::size_t k = 0; k < spec.bins; ++k) {
      spec.values[frame * spec.bins + k] =
          static_cast<float>(20.0 * std::log10(std::abs(buf[k]) + params.log_epsilon));
    }
  }
  return spec;
}

void write_spectrogram(const Spectrogram& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot create '{}'", path.string()));

  out.write("CSPC", 4);
  put_u32(out, 1);  // version
  put_u32(out, static_cast<std::uint32_t>(spec.frames));
  put_u32(out, static_cast<std::uint32_t>(spec.bins));
  put_u32(out, static_cast<std::uint32_t>(spec.stft.fft_size));
  put_u32(out, static_cast<std::uint32_t>(std::lround(spec.stft.window_ms / 1000.0 * kSampleRate)));
  put_u32(out, static_cast<std::uint32_t>(std::lround(spec.stft.hop_ms / 1000.0 * kSampleRate)));
  put_u32(out, static_cast<std::uint32_t>(kSampleRate));
  for (float v : spec.values) {
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace clear
