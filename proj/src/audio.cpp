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
//
// Copyright 2026 The Forge Authors.

#include "forge/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "forge/manifest_io.hpp"

namespace forge {

WavError::WavError(std::size_t byte_offset, const std::string& what)
    : Error("WAV: " + what + " at byte offset " + std::to_string(byte_offset)),
      offset_(byte_offset) {}

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw WavError(pos_, std::string("truncated ") + what);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = b_[pos_] | (b_[pos_ + 1] << 8) | (b_[pos_ + 2] << 16) |
                      (std::uint32_t(b_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(b_[pos_] | (b_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag(const char* what) {
    need(4, what);
    std::string t(reinterpret_cast<const char*>(b_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  void skip(std::size_t n) { pos_ += n; }
  const std::uint8_t* here() const { return b_.data() + pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

float sample_at(const std::uint8_t* p, const Format& f) {
  switch (f.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0f;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0f;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return static_cast<float>(v / 8388608.0);
    }
    case 32: {
      std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24);
      if (f.tag == kFormatFloat) {
        float x;
        std::memcpy(&x, &u, 4);
        return x;
      }
      return static_cast<float>(static_cast<std::int32_t>(u) / 2147483648.0);
    }
  }
  return 0;
}

}  // namespace

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.tag("RIFF header") != "RIFF") throw WavError(0, "missing RIFF tag");
  r.u32("RIFF header");
  if (r.tag("RIFF header") != "WAVE") throw WavError(8, "missing WAVE tag");

  Format fmt;
  bool have_fmt = false;
  while (true) {
    const std::size_t chunk_at = r.pos();
    const std::string id = r.tag("chunk header");
    const std::uint32_t size = r.u32("chunk header");
    if (id == "fmt ") {
      if (size < 16) throw WavError(chunk_at, "fmt chunk too small");
      r.need(size, "fmt chunk");
      const std::size_t body = r.pos();
      fmt.tag = r.u16("fmt chunk");
      fmt.channels = r.u16("fmt chunk");
      fmt.rate = r.u32("fmt chunk");
      r.u32("fmt chunk");
      fmt.block_align = r.u16("fmt chunk");
      fmt.bits = r.u16("fmt chunk");
      if (fmt.tag == kFormatExtensible && size >= 40) {
        r.skip(8);
        fmt.tag = r.u16("fmt chunk");
      }
      r.skip(size - (r.pos() - body) + (size & 1));
      have_fmt = true;
      continue;
    }
    if (id == "data") {
      if (!have_fmt) throw WavError(chunk_at, "data chunk before fmt chunk");
      if (fmt.tag != kFormatPcm && !(fmt.tag == kFormatFloat && fmt.bits == 32))
        throw WavError(chunk_at, "unsupported (non-PCM) encoding " +
                                     std::to_string(fmt.tag));
      if (fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24 && fmt.bits != 32)
        throw WavError(chunk_at, "unsupported bit depth " + std::to_string(fmt.bits));
      if (fmt.channels == 0 || fmt.rate == 0)
        throw WavError(chunk_at, "zero channels or sample rate");
      const std::size_t width = fmt.bits / 8;
      if (fmt.block_align != width * fmt.channels)
        throw WavError(chunk_at, "inconsistent block alignment");
      if (r.remaining() < size) throw WavError(r.pos() + r.remaining(), "truncated data chunk");
      if (size % fmt.block_align != 0)
        throw WavError(r.pos() + size, "data chunk ends mid-frame");
      const std::size_t frames = size / fmt.block_align;
      AudioBuffer out;
      out.sample_rate = static_cast<int>(fmt.rate);
      out.samples.resize(frames);
      const std::uint8_t* p = r.here();
      for (std::size_t i = 0; i < frames; ++i) {
        float acc = 0;
        for (std::size_t c = 0; c < fmt.channels; ++c, p += width)
          acc += sample_at(p, fmt);
        out.samples[i] = acc / fmt.channels;
      }
      return out;
    }
    if (r.remaining() < size) throw WavError(r.pos(), "truncated chunk '" + id + "'");
    r.skip(size + (size & 1));
  }
}

AudioBuffer decode_wav(const std::filesystem::path& path) {
  const auto s = read_file(path);
  return decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, int bit_depth) {
  if (bit_depth != 16 && bit_depth != 24 && bit_depth != 32)
    throw Error("unsupported bit depth " + std::to_string(bit_depth));
  if (buffer.sample_rate <= 0) throw Error("sample rate must be positive");
  const std::uint32_t width = static_cast<std::uint32_t>(bit_depth / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(buffer.samples.size()) * width;
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  auto put = [&](std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  tag("RIFF");
  put(36 + data_size, 4);
  tag("WAVE");
  tag("fmt ");
  put(16, 4);
  put(kFormatPcm, 2);
  put(1, 2);
  put(static_cast<std::uint32_t>(buffer.sample_rate), 4);
  put(static_cast<std::uint32_t>(buffer.sample_rate) * width, 4);
  put(width, 2);
  put(static_cast<std::uint32_t>(bit_depth), 2);
  tag("data");
  put(data_size, 4);
  const double scale = std::ldexp(1.0, bit_depth - 1);
  const double lo = -scale, hi = scale - 1;
  for (float x : buffer.samples) {
    if (!std::isfinite(x)) throw Error("non-finite sample");
    const double q = std::clamp(std::round(double(x) * scale), lo, hi);
    put(static_cast<std::uint32_t>(static_cast<std::int64_t>(q)), static_cast<int>(width));
  }
  return out;
}

void encode_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
                int bit_depth) {
  const auto bytes = encode_wav(buffer, bit_depth);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                           bytes.size()));
}

}  // namespace forge
