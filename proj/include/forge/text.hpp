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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

// Base for every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace text {

// A decoded code point together with its byte offset in the source string.
struct CodePoint {
  char32_t value;
  std::size_t byte_offset;
  std::size_t byte_length;
};

// Throws forge::Error on malformed UTF-8.
std::vector<CodePoint> decode_utf8(std::string_view s);
std::u32string to_u32(std::string_view s);
std::string to_utf8(char32_t c);
std::string to_utf8(std::u32string_view s);

std::string nfc(std::string_view s);
bool is_nfc(std::string_view s);

// "," and "，": the fixed-length pause marker.
bool is_pause_comma(char32_t c);
// "。" "？" "！" "."
bool is_sentence_final(char32_t c);
// Any Unicode punctuation (general category P*), plus the ASCII and
// full-width marks above.
bool is_punctuation(char32_t c);
bool is_space(char32_t c);

// Characters that count towards speaking rate: everything except
// punctuation and whitespace.
std::size_t count_spoken_chars(std::string_view s);

std::string trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

// Shortest round-trip decimal with at least `min_frac` fractional digits,
// never in exponent notation.
std::string format_decimal(double v, int min_frac = 3);

}  // namespace text
}  // namespace forge
