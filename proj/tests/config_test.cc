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

#include <gtest/gtest.h>

#include "forge/config.hpp"

namespace forge::config {
namespace {

TEST(Toml, TablesKeysAndScalars) {
  const auto j = parse_toml(R"(# comment
title = "forge"   # trailing
[pipeline]
jobs = 4
ratio = 0.5
neg = -2
on = true
path = 'C:\raw'
[lm.extra]
order = 3
)");
  EXPECT_EQ(j["title"], "forge");
  EXPECT_EQ(j["pipeline"]["jobs"], 4);
  EXPECT_DOUBLE_EQ(j["pipeline"]["ratio"].get<double>(), 0.5);
  EXPECT_EQ(j["pipeline"]["neg"], -2);
  EXPECT_EQ(j["pipeline"]["on"], true);
  EXPECT_EQ(j["pipeline"]["path"], "C:\\raw");
  EXPECT_EQ(j["lm"]["extra"]["order"], 3);
}

TEST(Toml, ArraysAndArraysOfTables) {
  const auto j = parse_toml(R"(
[[source]]
name = "a"
seed_urls = [
  "http://x/1",  # first
  "http://x/2",
]
[[source]]
name = "b"
rules = { text = "p.text", audio = "audio@src" }
[g2p.tones]
Sixian = [1, 2, 3]
)");
  ASSERT_EQ(j["source"].size(), 2u);
  EXPECT_EQ(j["source"][0]["seed_urls"][1], "http://x/2");
  EXPECT_EQ(j["source"][1]["rules"]["audio"], "audio@src");
  EXPECT_EQ(j["g2p"]["tones"]["Sixian"][2], 3);
}

TEST(Toml, StringEscapes) {
  const auto j = parse_toml(R"(s = "a\tb\"c\u5BA2")");
  EXPECT_EQ(j["s"], "a\tb\"c客");
}

TEST(Toml, ErrorsCarryLineNumbers) {
  auto line_of = [](const char* src) {
    try {
      parse_toml(src);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("a = 1\nb = \n"), 2u);
  EXPECT_EQ(line_of("a = 1\na = 2\n"), 2u);
  EXPECT_EQ(line_of("\n\n[table\n"), 3u);
  EXPECT_EQ(line_of("x = \"open\n"), 1u);
  EXPECT_EQ(line_of("x = 1 2\n"), 1u);
  EXPECT_EQ(line_of("x = [1, 2\ny = 3\n"), 2u);
}

}  // namespace
}  // namespace forge::config
