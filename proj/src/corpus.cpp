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

#include "forge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <sstream>
#include <unordered_map>

namespace forge {

// ---------------------------------------------------------------- phonemes

Syllable Syllable::parse(std::string_view token) {
  std::size_t i = 0;
  while (i < token.size() && token[i] >= 'a' && token[i] <= 'z') ++i;
  if (i == 0)
    throw Error("syllable '" + std::string(token) +
                "' must start with lowercase letters");
  if (i == token.size())
    throw Error("syllable '" + std::string(token) + "' has no tone digits");
  int tone = 0;
  for (std::size_t j = i; j < token.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(token[j])))
      throw Error("syllable '" + std::string(token) + "' has a malformed tone");
    tone = tone * 10 + (token[j] - '0');
  }
  return {std::string(token.substr(0, i)), tone};
}

std::string Syllable::str() const {
  return onset_rime + std::to_string(tone);
}

bool PhonemeSequence::pauses_valid() const {
  for (auto p : pause_positions)
    if (p < 1 || p + 1 > syllables.size()) return false;
  return true;
}

std::string PhonemeSequence::str() const {
  std::string out;
  for (std::size_t i = 0; i < syllables.size(); ++i) {
    if (i > 0) out += pause_positions.count(i) ? " , " : " ";
    out += syllables[i].str();
  }
  return out;
}

PhonemeSequence PhonemeSequence::parse(std::string_view line) {
  PhonemeSequence seq;
  bool pending_pause = false;
  for (const auto& tok : text::split_ws(line)) {
    if (tok == "," || tok == "，") {
      pending_pause = true;
      continue;
    }
    if (pending_pause && !seq.syllables.empty())
      seq.pause_positions.insert(seq.syllables.size());
    pending_pause = false;
    seq.syllables.push_back(Syllable::parse(tok));
  }
  return seq;
}

PhonemeSequence PhonemeSequence::slice(std::size_t first,
                                       std::size_t last) const {
  PhonemeSequence out;
  last = std::min(last, syllables.size());
  if (first >= last) return out;
  out.syllables.assign(syllables.begin() + static_cast<std::ptrdiff_t>(first),
                       syllables.begin() + static_cast<std::ptrdiff_t>(last));
  for (auto p : pause_positions)
    if (p > first && p < last) out.pause_positions.insert(p - first);
  return out;
}

// ---------------------------------------------------------------- dialects

namespace {

struct DialectNames {
  Dialect dialect;
  std::string_view name;
  std::string_view display;
};

constexpr std::array<DialectNames, 6> kDialectNames = {{
    {Dialect::kSixian, "Sixian", "四縣"},
    {Dialect::kHailu, "Hailu", "海陸"},
    {Dialect::kDapu, "Dapu", "大埔"},
    {Dialect::kRaoping, "Raoping", "饒平"},
    {Dialect::kZhaoan, "Zhaoan", "詔安"},
    {Dialect::kNansixian, "Nansixian", "南四縣"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

UnknownDialectError::UnknownDialectError(std::string_view label)
    : Error("unknown dialect '" + std::string(label) + "'") {}

std::string_view dialect_name(Dialect d) {
  return kDialectNames[static_cast<std::size_t>(d)].name;
}

std::string_view dialect_display_name(Dialect d) {
  return kDialectNames[static_cast<std::size_t>(d)].display;
}

std::optional<Dialect> try_parse_dialect(std::string_view label) {
  const auto l = lower(label);
  for (const auto& n : kDialectNames)
    if (l == lower(n.name) || label == n.display) return n.dialect;
  return std::nullopt;
}

Dialect parse_dialect(std::string_view label) {
  if (auto d = try_parse_dialect(label)) return *d;
  throw UnknownDialectError(label);
}

std::string_view quality_name(Quality q) {
  return q == Quality::kWellTranscribed ? "WellTranscribed" : "IllTranscribed";
}

Quality parse_quality(std::string_view label) {
  if (label == "WellTranscribed") return Quality::kWellTranscribed;
  if (label == "IllTranscribed") return Quality::kIllTranscribed;
  throw Error("unknown transcription quality '" + std::string(label) + "'");
}

SourceKind SourceKind::parse(std::string_view label) {
  const auto l = lower(label);
  if (l == "dict") return dict();
  if (l == "exam") return exam();
  if (l == "radio") return radio();
  if (label.empty()) throw Error("empty source label");
  return other(std::string(label));
}

std::string SourceKind::label() const {
  switch (kind) {
    case Kind::kDict: return "DICT";
    case Kind::kExam: return "EXAM";
    case Kind::kRadio: return "RADIO";
    case Kind::kOther: return other_name;
  }
  return other_name;
}

bool SourceKind::operator<(const SourceKind& o) const {
  if (kind != o.kind) return kind < o.kind;
  return other_name < o.other_name;
}

namespace {
constexpr std::array<std::string_view, 5> kStageNames = {
    "Scraped", "Cleaned", "Aligned", "Segmented", "Final"};
}

std::string_view stage_name(Stage s) {
  return kStageNames[static_cast<std::size_t>(s)];
}

Stage parse_stage(std::string_view label) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i)
    if (label == kStageNames[i]) return static_cast<Stage>(i);
  throw Error("unknown stage '" + std::string(label) + "'");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void Utterance::advance(Stage next) {
  stage = next;
  provenance.push_back({next, utc_timestamp(), kToolVersion});
}

// ---------------------------------------------------------------- validation

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << v.record_id << ": " << v.message << "\n";
  return os.str();
}

ValidationError::ValidationError(ValidationReport report)
    : Error("manifest validation failed:\n" + report.summary()),
      report_(std::move(report)) {}

ValidationReport validate_manifest(const CorpusManifest& manifest,
                                   ValidationMode mode) {
  ValidationReport report;
  auto add = [&](const std::string& id, std::string msg) {
    report.violations.push_back({id, std::move(msg)});
  };
  std::unordered_map<std::string, int> seen;
  for (const auto& u : manifest.records) {
    if (u.id.empty()) add(u.id, "empty id");
    if (++seen[u.id] == 2) add(u.id, "duplicate id '" + u.id + "'");
    if (u.sample_rate <= 0) add(u.id, "sample_rate must be positive");
    if (!std::isfinite(u.duration_s) || u.duration_s < 0)
      add(u.id, "duration_s must be a non-negative number");
    else if (u.stage != Stage::kScraped && u.duration_s <= 0)
      add(u.id, "duration_s must be positive past stage Scraped");
    if (u.text.empty()) add(u.id, "empty text");
    if (u.stage >= Stage::kAligned && !u.phonemes)
      add(u.id, "stage " + std::string(stage_name(u.stage)) +
                    " requires phonemes");
    if (u.phonemes && !u.phonemes->pauses_valid())
      add(u.id, "pause position outside the syllable range");
    if (mode == ValidationMode::kStrict &&
        !std::filesystem::exists(u.audio_path))
      add(u.id, "missing audio file '" + u.audio_path + "'");
  }
  return report;
}

// ---------------------------------------------------------------- config

std::map<Dialect, std::set<int>> PipelineConfig::default_tones() {
  std::map<Dialect, std::set<int>> out;
  for (auto d : kAllDialects) out[d] = {1, 2, 3, 4, 5, 6, 7, 8};
  return out;
}

const std::set<int>& PipelineConfig::tones(Dialect d) const {
  static const std::set<int> kEmpty;
  auto it = tone_inventory.find(d);
  return it == tone_inventory.end() ? kEmpty : it->second;
}

void PipelineConfig::validate() const {
  if (!(silence_split_threshold_s > 0))
    throw Error("silence_split_threshold_s must be positive");
  if (!(silence_pad_s >= 0)) throw Error("silence_pad_s must be non-negative");
  if (2 * silence_pad_s > silence_split_threshold_s + 1e-12)
    throw Error("2 * silence_pad_s must not exceed silence_split_threshold_s");
  if (std::abs(2 * silence_pad_s - concat_pause_s) > 1e-12)
    throw Error("concat_pause_s must equal 2 * silence_pad_s");
  if (lm_order < 1) throw Error("lm_order must be at least 1");
  if (!(discount_d >= 0 && discount_d < 1))
    throw Error("discount_D must lie in [0, 1)");
  if (!(lm_weight_lambda >= 0))
    throw Error("lm_weight_lambda must be non-negative");
}

}  // namespace forge
