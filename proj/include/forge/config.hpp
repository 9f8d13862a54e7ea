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

#include <filesystem>
#include <string_view>

#include "forge/text.hpp"
#include "json.hpp"

namespace forge::config {

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Parses the TOML subset the toolkit's config files use:
//   [table] and [dotted.table] headers, [[array.of.tables]],
//   key = value with basic/literal strings, integers, floats, booleans,
//   and (possibly multi-line) arrays of those; '#' comments.
// The result is a JSON object tree.
nlohmann::json parse_toml(std::string_view source);
nlohmann::json load_toml(const std::filesystem::path& path);

}  // namespace forge::config
