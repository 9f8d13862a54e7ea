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

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

// One tone-bearing syllable in Taiwanese Hakka Romanization, e.g. "ho3".
struct Syllable {
  std::string onset_rime;
  int tone = 0;

  // Parses "<lowercase letters><tone digits>". Throws forge::Error.
  static Syllable parse(std::string_view token);
  std::string str() const;

  bool operator==(const Syllable&) const = default;
};

// Syllables plus the inter-syllable positions carrying a fixed-length pause.
// A pause at position k sits between syllables[k-1] and syllables[k].
struct PhonemeSequence {
  std::vector<Syllable> syllables;
  std::set<std::size_t> pause_positions;

  bool empty() const { return syllables.empty(); }
  std::size_t size() const { return syllables.size(); }
  bool pauses_valid() const;

  // "tien1 gong1 , log8 i3"
  std::string str() const;
  static PhonemeSequence parse(std::string_view line);

  // Syllables [first, last) with pauses re-based to the slice.
  PhonemeSequence slice(std::size_t first, std::size_t last) const;

  bool operator==(const PhonemeSequence&) const = default;
};

}  // namespace forge
