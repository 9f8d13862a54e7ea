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

#include "forge/cleanup.hpp"

#include <cmath>
#include <sstream>

#include "forge/manifest_io.hpp"
#include "forge/parallel.hpp"

namespace forge {

std::string Hypothesis::text() const {
  if (!surface.empty()) return surface;
  std::string out;
  for (const auto& t : tokens) out += t;
  return out;
}

NBestList NBestList::parse(std::string_view file, std::string utterance_id) {
  NBestList nb;
  nb.utterance_id = std::move(utterance_id);
  std::istringstream in{std::string(file)};
  std::string line;
  std::size_t lineno = 0;
  bool have_transcript = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_transcript) {
      nb.initial_transcript = text::nfc(text::trim(line));
      have_transcript = true;
      continue;
    }
    if (text::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("n-best line " + std::to_string(lineno) +
                  ": expected <acoustic_logprob>\\t<tokens>");
    Hypothesis h;
    try {
      std::size_t used = 0;
      const auto score = text::trim(line.substr(0, tab));
      h.acoustic_logprob = std::stod(score, &used);
      if (used != score.size()) throw std::invalid_argument(score);
    } catch (const std::logic_error&) {
      throw Error("n-best line " + std::to_string(lineno) + ": malformed acoustic score");
    }
    if (!std::isfinite(h.acoustic_logprob))
      throw Error("n-best line " + std::to_string(lineno) + ": non-finite acoustic score");
    h.surface = text::nfc(text::trim(line.substr(tab + 1)));
    h.tokens = char_tokens(h.surface);
    if (h.tokens.empty())
      throw Error("n-best line " + std::to_string(lineno) + ": empty hypothesis");
    nb.hypotheses.push_back(std::move(h));
  }
  if (nb.hypotheses.empty()) throw Error("empty n-best list");
  return nb;
}

NBestList NBestList::load(const std::filesystem::path& path, std::string utterance_id) {
  return parse(read_file(path), std::move(utterance_id));
}

std::string NBestList::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << initial_transcript << "\n";
  for (const auto& h : hypotheses) os << h.acoustic_logprob << "\t" << h.text() << "\n";
  return os.str();
}

RefineResult refine_transcript(const NBestList& nbest, const NGramLM& background,
                               double discount, double lambda) {
  if (nbest.hypotheses.empty()) throw Error("empty n-best list");
  if (!(lambda >= 0)) throw Error("LM weight must be non-negative");
  const auto transcript = char_tokens(nbest.initial_transcript);
  const BiasedLM biased(background, transcript, discount);

  RefineResult result;
  result.report.utterance_id = nbest.utterance_id;
  std::size_t best = 0;
  for (std::size_t i = 0; i < nbest.hypotheses.size(); ++i) {
    const auto& h = nbest.hypotheses[i];
    HypothesisScore s;
    s.acoustic = h.acoustic_logprob;
    s.bias = bias_gain(biased, h.tokens);
    s.combined = s.acoustic + lambda * s.bias;
    result.report.scores.push_back(s);
    const auto& b = result.report.scores[best];
    if (i > 0 && (s.combined > b.combined ||
                  (s.combined == b.combined && s.acoustic > b.acoustic)))
      best = i;
  }
  result.chosen = nbest.hypotheses[best];
  result.combined = result.report.scores[best].combined;
  result.report.chosen = best;
  result.report.changed = result.chosen.tokens != transcript;
  return result;
}

CorpusManifest batch_cleanup(const CorpusManifest& manifest,
                             const std::filesystem::path& nbest_dir,
                             const NGramLM& background, const CleanupOptions& options,
                             CleanupSummary* summary) {
  struct Outcome {
    std::optional<Utterance> record;
    std::optional<CleanupReport> report;
    bool flagged = false;
  };
  std::vector<Outcome> outcomes(manifest.records.size());
  parallel_for(manifest.records.size(), options.jobs, [&](std::size_t i) {
    Utterance u = manifest.records[i];
    if (u.stage != Stage::kScraped)
      throw Error("cleanup expects Scraped records; '" + u.id + "' is at stage " +
                  std::string(stage_name(u.stage)));
    if (u.quality == Quality::kIllTranscribed) {
      const auto path = nbest_dir / (u.id + ".nbest");
      if (!std::filesystem::exists(path)) {
        outcomes[i].flagged = true;
        return;
      }
      auto nbest = NBestList::load(path, u.id);
      auto r = refine_transcript(nbest, background, options.discount, options.lambda);
      if (r.report.changed) u.text = r.chosen.text();
      outcomes[i].report = std::move(r.report);
    }
    u.advance(Stage::kCleaned);
    outcomes[i].record = std::move(u);
  });

  CorpusManifest out;
  out.schema_version = manifest.schema_version;
  CleanupSummary local;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (o.flagged) {
      local.flagged.push_back(manifest.records[i].id);
      continue;
    }
    if (o.report) {
      ++local.processed;
      local.changed += o.report->changed;
      local.reports.push_back(std::move(*o.report));
    } else {
      ++local.passed_through;
    }
    out.records.push_back(std::move(*o.record));
  }
  if (summary) *summary = std::move(local);
  return out;
}

}  // namespace forge
