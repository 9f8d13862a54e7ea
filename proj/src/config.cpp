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

#include "forge/config.hpp"

#include <cctype>

#include "forge/manifest_io.hpp"

namespace forge::config {

using nlohmann::json;

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : Error("config line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_statement();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(line_, what);
  }

  bool eof() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char get() {
    char c = src_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') get();
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_inline_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
        continue;
      }
      break;
    }
  }
  // Whitespace, comments and newlines, as allowed inside arrays.
  void skip_all_ws() { skip_blank_lines(); }

  void end_of_statement() {
    skip_inline_ws();
    skip_comment();
    if (peek() == '\r') get();
    if (!eof() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::string bare_or_quoted_key() {
    skip_inline_ws();
    if (peek() == '"' || peek() == '\'') return string_value();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_' || peek() == '-'))
      k.push_back(get());
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_or_quoted_key()};
    skip_inline_ws();
    while (peek() == '.') {
      get();
      parts.push_back(bare_or_quoted_key());
      skip_inline_ws();
    }
    return parts;
  }

  json* descend(json* node, const std::string& k) {
    auto& child = (*node)[k];
    if (child.is_null()) child = json::object();
    if (child.is_array()) {
      if (child.empty() || !child.back().is_object())
        fail("key '" + k + "' is not a table");
      return &child.back();
    }
    if (!child.is_object()) fail("key '" + k + "' is not a table");
    return &child;
  }

  json* header(json& root) {
    get();
    const bool array_of_tables = peek() == '[';
    if (array_of_tables) get();
    auto parts = dotted_key();
    for (int n = array_of_tables ? 2 : 1; n > 0; --n) {
      if (peek() != ']') fail("unterminated table header");
      get();
    }
    json* node = &root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
      node = descend(node, parts[i]);
    const auto& last = parts.back();
    if (array_of_tables) {
      auto& arr = (*node)[last];
      if (arr.is_null()) arr = json::array();
      if (!arr.is_array()) fail("key '" + last + "' is not an array of tables");
      arr.push_back(json::object());
      return &arr.back();
    }
    return descend(node, last);
  }

  void key_value(json& table) {
    auto parts = dotted_key();
    skip_inline_ws();
    if (get() != '=') fail("expected '=' after key");
    skip_inline_ws();
    json* node = &table;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
      node = descend(node, parts[i]);
    if (node->contains(parts.back()))
      fail("duplicate key '" + parts.back() + "'");
    (*node)[parts.back()] = value();
  }

  json value() {
    const char c = peek();
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') return array_value();
    if (c == '{') return inline_table();
    if (src_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (src_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number_value();
  }

  std::string string_value() {
    const char quote = get();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == quote) break;
      if (quote == '"' && c == '\\') {
        char e = get();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'u': {
            if (pos_ + 4 > src_.size()) fail("bad \\u escape");
            const auto hex = std::string(src_.substr(pos_, 4));
            pos_ += 4;
            out += text::to_utf8(static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
            break;
          }
          default: fail(std::string("unknown escape \\") + e);
        }
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  json array_value() {
    get();
    json arr = json::array();
    while (true) {
      skip_all_ws();
      if (peek() == ']') {
        get();
        return arr;
      }
      arr.push_back(value());
      skip_all_ws();
      if (peek() == ',') {
        get();
        continue;
      }
      if (peek() == ']') {
        get();
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  json inline_table() {
    get();
    json t = json::object();
    skip_inline_ws();
    if (peek() == '}') {
      get();
      return t;
    }
    while (true) {
      key_value(t);
      skip_inline_ws();
      char c = get();
      if (c == '}') return t;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
  }

  json number_value() {
    std::string num;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '+' || peek() == '-' || peek() == '.' ||
                      peek() == '_')) {
      char c = get();
      if (c != '_') num.push_back(c);
    }
    if (num.empty()) fail("expected a value");
    const bool is_float = num.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        double v = std::stod(num, &used);
        if (used != num.size()) fail("malformed number '" + num + "'");
        return v;
      }
      long long v = std::stoll(num, &used, 10);
      if (used != num.size()) fail("malformed number '" + num + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("malformed value '" + num + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

json parse_toml(std::string_view source) { return Parser(source).parse(); }

json load_toml(const std::filesystem::path& path) {
  return parse_toml(read_file(path));
}

}  // namespace forge::config
