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

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forge/corpus.hpp"
#include "forge/phoneme.hpp"

namespace forge {

struct LexiconEntry {
  std::string surface;
  Dialect dialect = Dialect::kSixian;
  // One syllable per surface character.
  std::vector<Syllable> pronunciation;
  long frequency = 0;
};

class LexiconError : public Error {
 public:
  LexiconError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Multi-dialect conversion table. Entries sharing (dialect, surface) are kept
// in descending frequency; equal frequencies keep load order.
class Lexicon {
 public:
  // Throws forge::Error when the pronunciation length differs from the
  // surface character count.
  void add(LexiconEntry entry);

  // Nullptr when the surface is absent for that dialect.
  const std::vector<LexiconEntry>* lookup(Dialect d,
                                          std::string_view surface) const;
  // Longest surface (in characters) present for the dialect.
  std::size_t max_surface_len(Dialect d) const {
    return max_len_[static_cast<std::size_t>(d)];
  }
  std::size_t size() const { return count_; }

  // TSV: surface, dialect, space-separated syllables, frequency. '#' starts
  // a comment line.
  static Lexicon parse(std::string_view tsv);

 private:
  static std::string key(Dialect d, std::string_view surface);

  std::unordered_map<std::string, std::vector<LexiconEntry>> entries_;
  std::array<std::size_t, 6> max_len_{};
  std::size_t count_ = 0;
};

Lexicon load_lexicon(const std::filesystem::path& path);

enum class G2PMode { kStrict, kLenient };

enum class TokenKind { kWord, kPause, kPunct, kUnknown };

struct TextToken {
  TokenKind kind;
  std::string surface;
  // Character (code point) offset into the input.
  std::size_t offset;

  bool operator==(const TextToken&) const = default;
};

class UnknownCharacterError : public Error {
 public:
  UnknownCharacterError(char32_t ch, std::size_t offset);
  char32_t character() const { return ch_; }
  std::size_t offset() const { return offset_; }

 private:
  char32_t ch_;
  std::size_t offset_;
};

class ToneError : public Error {
 public:
  using Error::Error;
};

// Greedy left-to-right maximum matching against the dialect's surfaces.
// Commas become kPause, other punctuation kPunct, whitespace is skipped.
// Uncovered characters raise UnknownCharacterError (strict) or become
// kUnknown tokens (lenient).
std::vector<TextToken> segment_text(std::string_view text, Dialect dialect,
                                    const Lexicon& lexicon,
                                    G2PMode mode = G2PMode::kStrict);

// Highest-frequency pronunciation per matched surface; pauses at commas;
// tones checked against the dialect's inventory. Lenient mode drops
// unknown characters and lists them in `unknown` when given.
PhonemeSequence g2p_convert(std::string_view text, Dialect dialect,
                            const Lexicon& lexicon, const PipelineConfig& config,
                            G2PMode mode = G2PMode::kStrict,
                            std::vector<TextToken>* unknown = nullptr);

}  // namespace forge
