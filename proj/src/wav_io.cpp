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

#include "clear/wav_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <fmt/format.h>

#include "clear/errors.hpp"

namespace clear {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("read failed for '{}'", path.string()));

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError(fmt::format("'{}' is not a RIFF WAV file", path.string()));
  }

  bool have_fmt = false;
  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t size = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw DataError(fmt::format("'{}': truncated chunk '{:.4s}'", path.string(), id));
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw DataError(fmt::format("'{}': short fmt chunk", path.string()));
      format_tag = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    throw DataError(fmt::format("'{}': missing fmt or data chunk", path.string()));
  }
  if (format_tag != 1) {
    throw DataError(fmt::format("'{}': only PCM supported (format tag {})",
                                path.string(), format_tag));
  }
  if (channels != 1) {
    throw DataError(fmt::format("'{}': only mono supported ({} channels)",
                                path.string(), channels));
  }
  if (rate != static_cast<std::uint32_t>(kSampleRate)) {
    throw DataError(fmt::format(
        "'{}': sample rate {} unsupported; the pipeline runs at {} Hz and "
        "resampling is not enabled",
        path.string(), rate, kSampleRate));
  }
  if (bits != 16 && bits != 24) {
    throw DataError(fmt::format("'{}': {}-bit PCM unsupported", path.string(), bits));
  }

  WavData out;
  out.source_bits = bits;
  out.wave.rate = static_cast<int>(rate);
  if (bits == 16) {
    const std::size_t n = data_size / 2;
    out.wave.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::int16_t v =
          static_cast<std::int16_t>(read_u16(data + 2 * i));
      out.wave.samples[i] = static_cast<float>(v / 32768.0);
    }
  } else {
    const std::size_t n = data_size / 3;
    out.wave.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int32_t v = data[3 * i] | (data[3 * i + 1] << 8) | (data[3 * i + 2] << 16);
      if (v & 0x800000) v |= ~0xffffff;  // sign extend
      out.wave.samples[i] = static_cast<float>(v / 8388608.0);
    }
  }
  return out;
}

void write_wav(const Waveform& wave, const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError(fmt::format("parent directory '{}' does not exist", parent.string()));
  }

  const std::uint32_t n = static_cast<std::uint32_t>(wave.samples.size());
  const std::uint32_t data_size = n * 2;
  std::vector<unsigned char> out;
  out.reserve(44 + data_size);

  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(wave.rate));
  put_u32(out, static_cast<std::uint32_t>(wave.rate) * 2);
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits per sample
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);

  for (float s : wave.samples) {
    long q = std::lround(static_cast<double>(s) * 32768.0);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot create '{}'", path.string()));
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace clear
