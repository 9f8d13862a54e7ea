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

#include "forge/g2p.hpp"

#include <algorithm>
#include <sstream>

#include "forge/manifest_io.hpp"

namespace forge {

LexiconError::LexiconError(std::size_t line, const std::string& what)
    : Error("lexicon line " + std::to_string(line) + ": " + what), line_(line) {}

std::string Lexicon::key(Dialect d, std::string_view surface) {
  std::string k(1, static_cast<char>('0' + static_cast<int>(d)));
  k += surface;
  return k;
}

void Lexicon::add(LexiconEntry entry) {
  const auto chars = text::decode_utf8(entry.surface).size();
  if (chars == 0) throw Error("empty lexicon surface");
  if (entry.pronunciation.size() != chars)
    throw Error("surface '" + entry.surface + "' has " + std::to_string(chars) +
                " characters but " + std::to_string(entry.pronunciation.size()) +
                " syllables");
  if (entry.frequency < 0) throw Error("negative frequency for '" + entry.surface + "'");
  auto& slot = max_len_[static_cast<std::size_t>(entry.dialect)];
  slot = std::max(slot, chars);
  auto& list = entries_[key(entry.dialect, entry.surface)];
  auto pos = std::find_if(list.begin(), list.end(), [&](const LexiconEntry& e) {
    return e.frequency < entry.frequency;
  });
  list.insert(pos, std::move(entry));
  ++count_;
}

const std::vector<LexiconEntry>* Lexicon::lookup(Dialect d,
                                                 std::string_view surface) const {
  auto it = entries_.find(key(d, surface));
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::parse(std::string_view tsv) {
  Lexicon lex;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || text::trim(line)[0] == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 3 || cols.size() > 4)
      throw LexiconError(lineno, "expected 4 tab-separated columns");
    try {
      LexiconEntry e;
      e.surface = text::nfc(text::trim(cols[0]));
      e.dialect = parse_dialect(text::trim(cols[1]));
      for (const auto& tok : text::split_ws(cols[2]))
        e.pronunciation.push_back(Syllable::parse(tok));
      if (cols.size() == 4 && !text::trim(cols[3]).empty()) {
        std::size_t used = 0;
        const auto f = text::trim(cols[3]);
        e.frequency = std::stol(f, &used);
        if (used != f.size()) throw Error("malformed frequency '" + f + "'");
      }
      lex.add(std::move(e));
    } catch (const LexiconError&) {
      throw;
    } catch (const Error& err) {
      throw LexiconError(lineno, err.what());
    } catch (const std::logic_error&) {
      throw LexiconError(lineno, "malformed frequency");
    }
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  return Lexicon::parse(read_file(path));
}

UnknownCharacterError::UnknownCharacterError(char32_t ch, std::size_t offset)
    : Error("unknown character '" + text::to_utf8(ch) + "' at offset " +
            std::to_string(offset)),
      ch_(ch),
      offset_(offset) {}

std::vector<TextToken> segment_text(std::string_view input, Dialect dialect,
                                    const Lexicon& lexicon, G2PMode mode) {
  const auto cps = text::decode_utf8(input);
  const std::size_t max_len = lexicon.max_surface_len(dialect);
  std::vector<TextToken> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i].value;
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (text::is_punctuation(c)) {
      out.push_back({text::is_pause_comma(c) ? TokenKind::kPause
                                              : TokenKind::kPunct,
                     text::to_utf8(c), i});
      ++i;
      continue;
    }
    std::size_t matched = 0;
    const std::size_t limit = std::min(max_len, cps.size() - i);
    for (std::size_t len = limit; len >= 1; --len) {
      const auto& last = cps[i + len - 1];
      const auto begin = cps[i].byte_offset;
      const auto surface =
          input.substr(begin, last.byte_offset + last.byte_length - begin);
      if (lexicon.lookup(dialect, surface)) {
        out.push_back({TokenKind::kWord, std::string(surface), i});
        matched = len;
        break;
      }
    }
    if (matched == 0) {
      if (mode == G2PMode::kStrict) throw UnknownCharacterError(c, i);
      out.push_back({TokenKind::kUnknown, text::to_utf8(c), i});
      matched = 1;
    }
    i += matched;
  }
  return out;
}

PhonemeSequence g2p_convert(std::string_view input, Dialect dialect,
                            const Lexicon& lexicon, const PipelineConfig& config,
                            G2PMode mode, std::vector<TextToken>* unknown) {
  const auto& tones = config.tones(dialect);
  PhonemeSequence seq;
  for (const auto& tok : segment_text(input, dialect, lexicon, mode)) {
    switch (tok.kind) {
      case TokenKind::kPause:
        if (!seq.syllables.empty())
          seq.pause_positions.insert(seq.syllables.size());
        break;
      case TokenKind::kPunct:
        break;
      case TokenKind::kUnknown:
        if (unknown) unknown->push_back(tok);
        break;
      case TokenKind::kWord: {
        const auto& best = lexicon.lookup(dialect, tok.surface)->front();
        for (const auto& syl : best.pronunciation) {
          if (!tones.count(syl.tone))
            throw ToneError("tone " + std::to_string(syl.tone) + " of syllable '" +
                            syl.str() + "' is outside the " +
                            std::string(dialect_name(dialect)) + " inventory");
          seq.syllables.push_back(syl);
        }
        break;
      }
    }
  }
  // A trailing comma is not an inter-syllable position.
  seq.pause_positions.erase(seq.syllables.size());
  return seq;
}

}  // namespace forge
