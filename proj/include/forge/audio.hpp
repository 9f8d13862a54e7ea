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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "forge/text.hpp"

namespace forge {

// Mono samples in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

class WavError : public Error {
 public:
  WavError(std::size_t byte_offset, const std::string& what);
  std::size_t byte_offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// RIFF/WAVE, integer PCM (8/16/24/32-bit) or 32-bit float, any channel
// count; channels are averaged down to mono.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);
AudioBuffer decode_wav(const std::filesystem::path& path);

// Integer PCM, little-endian, mono. bit_depth is 16, 24 or 32.
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, int bit_depth = 16);
// Atomic write.
void encode_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
                int bit_depth = 16);

}  // namespace forge
