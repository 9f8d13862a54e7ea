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
#include <vector>

#include "forge/corpus.hpp"
#include "forge/ngram.hpp"

namespace forge {

struct Hypothesis {
  TokenSeq tokens;
  double acoustic_logprob = 0;
  // The hypothesis as written, punctuation included. May be empty.
  std::string surface;

  // `surface` when set, otherwise the concatenated tokens.
  std::string text() const;
};

// Decoder output for one utterance. File layout: the initial transcript on
// the first line, then "<acoustic_logprob>\t<tokens>" per hypothesis.
struct NBestList {
  std::string utterance_id;
  std::vector<Hypothesis> hypotheses;
  std::string initial_transcript;

  static NBestList parse(std::string_view file, std::string utterance_id = {});
  static NBestList load(const std::filesystem::path& path, std::string utterance_id = {});
  std::string dump() const;
};

struct HypothesisScore {
  double acoustic = 0;
  // log P_biased - log P_background over the hypothesis tokens.
  double bias = 0;
  double combined = 0;
};

struct CleanupReport {
  std::string utterance_id;
  std::vector<HypothesisScore> scores;
  std::size_t chosen = 0;
  // The chosen tokens differ from the initial transcript's.
  bool changed = false;
};

struct RefineResult {
  Hypothesis chosen;
  double combined = 0;
  CleanupReport report;
};

// Rescores every hypothesis as acoustic + lambda * bias under the biased
// model built from the initial transcript, and returns the best. Ties go to
// the higher acoustic score, then to the earlier hypothesis.
RefineResult refine_transcript(const NBestList& nbest, const NGramLM& background,
                               double discount, double lambda);

struct CleanupOptions {
  double discount = 0.5;
  double lambda = 1.0;
  unsigned jobs = 1;
};

struct CleanupSummary {
  std::size_t processed = 0;
  std::size_t changed = 0;
  std::size_t passed_through = 0;
  // Ill-transcribed records without an n-best file; left out of the output.
  std::vector<std::string> flagged;
  std::vector<CleanupReport> reports;
};

// Well-transcribed records pass through untouched; ill-transcribed ones take
// the refined transcript from <nbest_dir>/<id>.nbest. Every output record is
// at stage Cleaned.
CorpusManifest batch_cleanup(const CorpusManifest& manifest,
                             const std::filesystem::path& nbest_dir,
                             const NGramLM& background, const CleanupOptions& options,
                             CleanupSummary* summary = nullptr);

}  // namespace forge
