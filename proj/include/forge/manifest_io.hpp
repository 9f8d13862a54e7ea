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
#include <string>
#include <string_view>

#include "forge/corpus.hpp"

namespace forge {

// A malformed manifest line. line() is 1-based.
class ManifestParseError : public Error {
 public:
  ManifestParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// JSON Lines, one record per line after a '#' header comment. Text fields
// are NFC-normalized; times carry at least three fractional digits. The
// manifest is validated (lenient) first and written atomically.
void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path);

// Unknown fields are kept in Utterance::extra. When `validate` is set, a
// lenient validation failure raises ValidationError.
CorpusManifest read_manifest(const std::filesystem::path& path,
                             bool validate = true);

std::string to_json_line(const Utterance& u);
Utterance utterance_from_json(const nlohmann::json& j);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace forge
