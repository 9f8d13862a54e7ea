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
#include <optional>
#include <string>
#include <vector>

#include "forge/corpus.hpp"
#include "forge/g2p.hpp"
#include "forge/ingest.hpp"
#include "json.hpp"

namespace forge::pipeline {

enum class StageName { kIngest, kCleanup, kAlign, kSegment, kConcat, kG2P, kStats, kEmit };

inline constexpr std::array<StageName, 8> kAllStages = {
    StageName::kIngest, StageName::kCleanup, StageName::kAlign, StageName::kSegment,
    StageName::kConcat, StageName::kG2P,     StageName::kStats, StageName::kEmit};

std::string_view stage_label(StageName s);
StageName parse_stage_name(std::string_view label);

// Bad stage lists and stages started without their input manifest.
class StageOrderError : public Error {
 public:
  using Error::Error;
};

// Comma-separated, in pipeline order, without repeats.
std::vector<StageName> parse_stage_list(std::string_view csv);

// Manifest file a stage writes, relative to the output directory. Empty for
// stats, which only writes reports.
std::string_view stage_manifest(StageName s);

struct Paths {
  std::filesystem::path output_dir = "out";
  std::filesystem::path lexicon;
  std::filesystem::path background_corpus;
  std::filesystem::path nbest_dir;
  std::filesystem::path scores_dir;
  std::filesystem::path cache_dir = "cache";
};

struct RunConfig {
  PipelineConfig params;
  Paths paths;
  unsigned jobs = 1;
  std::string log_level = "info";
  // Align from audio energy when no score file exists.
  bool energy_fallback = true;
  G2PMode g2p_mode = G2PMode::kStrict;
  double background_discount = 0.5;
  std::vector<ingest::SourceConfig> sources;

  // Relative paths are taken against `base_dir`. FORGE_CACHE_DIR, when set,
  // replaces every cache directory.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& toml_path);
};

struct Dropped {
  std::string id;
  std::string reason;
};

struct StageReport {
  StageName stage;
  std::filesystem::path input;
  std::filesystem::path output;
  std::size_t records_in = 0;
  std::size_t records_out = 0;
  double hours_in = 0;
  double hours_out = 0;
  double wall_s = 0;
  std::vector<Dropped> dropped;
  std::vector<std::string> warnings;
};

struct RunReport {
  std::vector<StageReport> stages;
  std::optional<double> retention_pct;
  std::string error;

  bool ok() const { return error.empty(); }
  nlohmann::json to_json() const;
};

struct RunOptions {
  std::vector<StageName> stages;
  // Replaces the first stage's default input manifest.
  std::optional<std::filesystem::path> input;
  // Network access for ingest; an HttpFetcher when null.
  ingest::Fetcher* fetcher = nullptr;
};

// Runs the requested stages in order. Each stage reads its predecessor's
// manifest and writes its own; run_report.json is written to the output
// directory even when a stage fails. Hard failures are rethrown after the
// report is written.
RunReport run(const RunConfig& config, const RunOptions& options);

// Per-record work, exposed for tests.
Utterance align_record(const Utterance& u, const Lexicon& lexicon, const RunConfig& config);
std::vector<Utterance> segment_record(const Utterance& u, const Lexicon& lexicon,
                                      const RunConfig& config,
                                      const std::filesystem::path& audio_dir);
// Adjacent pairs of each source utterance's segments, in order.
std::vector<Utterance> concatenate_records(const std::vector<Utterance>& segments,
                                           const RunConfig& config,
                                           const std::filesystem::path& audio_dir);

}  // namespace forge::pipeline
