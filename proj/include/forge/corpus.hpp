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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forge/phoneme.hpp"
#include "forge/text.hpp"
#include "json.hpp"

namespace forge {

inline constexpr const char* kToolVersion = "forge 0.1.0";

enum class Dialect { kSixian, kHailu, kDapu, kRaoping, kZhaoan, kNansixian };

inline constexpr std::array<Dialect, 6> kAllDialects = {
    Dialect::kSixian,  Dialect::kHailu,  Dialect::kDapu,
    Dialect::kRaoping, Dialect::kZhaoan, Dialect::kNansixian};

class UnknownDialectError : public Error {
 public:
  explicit UnknownDialectError(std::string_view label);
};

std::string_view dialect_name(Dialect d);
// Hakka name, e.g. 四縣 for Sixian.
std::string_view dialect_display_name(Dialect d);
// Accepts the romanized name (case-insensitive) or the Hakka name.
Dialect parse_dialect(std::string_view label);
std::optional<Dialect> try_parse_dialect(std::string_view label);

enum class Quality { kWellTranscribed, kIllTranscribed };

std::string_view quality_name(Quality q);
Quality parse_quality(std::string_view label);

struct SourceKind {
  enum class Kind { kDict, kExam, kRadio, kOther };

  Kind kind = Kind::kOther;
  std::string other_name;

  static SourceKind dict() { return {Kind::kDict, {}}; }
  static SourceKind exam() { return {Kind::kExam, {}}; }
  static SourceKind radio() { return {Kind::kRadio, {}}; }
  static SourceKind other(std::string name) {
    return {Kind::kOther, std::move(name)};
  }
  // "DICT", "EXAM", "RADIO"; anything else is OTHER(label).
  static SourceKind parse(std::string_view label);

  std::string label() const;
  Quality default_quality() const {
    return kind == Kind::kRadio ? Quality::kIllTranscribed
                                : Quality::kWellTranscribed;
  }

  bool operator==(const SourceKind&) const = default;
  // DICT < EXAM < RADIO < OTHER (by name).
  bool operator<(const SourceKind& o) const;
};

enum class Stage { kScraped, kCleaned, kAligned, kSegmented, kFinal };

std::string_view stage_name(Stage s);
Stage parse_stage(std::string_view label);

struct ProvenanceEntry {
  Stage stage = Stage::kScraped;
  std::string timestamp;
  std::string tool_version;

  bool operator==(const ProvenanceEntry&) const = default;
};

// One aligned symbol, in seconds.
struct AlignedInterval {
  std::string symbol;
  double start_s = 0;
  double end_s = 0;

  bool operator==(const AlignedInterval&) const = default;
};

// Where a segmented record came from and how much edge silence it kept.
struct SegmentOrigin {
  std::string source_id;
  double offset_s = 0;
  double lead_silence_s = 0;
  double trail_silence_s = 0;

  bool operator==(const SegmentOrigin&) const = default;
};

struct Utterance {
  std::string id;
  Dialect dialect = Dialect::kSixian;
  SourceKind source;
  Quality quality = Quality::kWellTranscribed;
  std::string audio_path;
  int sample_rate = 16000;
  double duration_s = 0;
  std::string text;
  std::optional<PhonemeSequence> phonemes;
  std::optional<std::string> speaker_id;
  Stage stage = Stage::kScraped;
  std::vector<ProvenanceEntry> provenance;
  std::optional<std::vector<AlignedInterval>> alignment;
  std::optional<SegmentOrigin> segment;
  // Fields this version does not know about; written back verbatim.
  nlohmann::json extra = nlohmann::json::object();

  // Sets stage and appends a provenance entry stamped with the current UTC time.
  void advance(Stage next);

  bool operator==(const Utterance&) const = default;
};

struct CorpusManifest {
  std::vector<Utterance> records;
  int schema_version = 1;

  bool operator==(const CorpusManifest&) const = default;
};

enum class ValidationMode { kLenient, kStrict };

struct Violation {
  std::string record_id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Pure check; never modifies the manifest. Strict mode additionally requires
// every audio_path to exist on disk.
ValidationReport validate_manifest(const CorpusManifest& manifest,
                                   ValidationMode mode = ValidationMode::kLenient);

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct PipelineConfig {
  double silence_split_threshold_s = 0.05;
  double silence_pad_s = 0.025;
  double concat_pause_s = 0.05;
  int lm_order = 3;
  double discount_d = 0.5;
  double lm_weight_lambda = 1.0;
  std::map<Dialect, std::set<int>> tone_inventory = default_tones();

  static std::map<Dialect, std::set<int>> default_tones();
  const std::set<int>& tones(Dialect d) const;

  // Throws forge::Error naming the first broken constraint.
  void validate() const;
};

// Current UTC time, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace forge
