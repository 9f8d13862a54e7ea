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

#include "forge/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "forge/aligner.hpp"
#include "forge/audio.hpp"
#include "forge/cleanup.hpp"
#include "forge/config.hpp"
#include "forge/manifest_io.hpp"
#include "forge/parallel.hpp"
#include "forge/segment.hpp"
#include "forge/stats.hpp"

namespace forge::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- stage names

std::string_view stage_label(StageName s) {
  switch (s) {
    case StageName::kIngest: return "ingest";
    case StageName::kCleanup: return "cleanup";
    case StageName::kAlign: return "align";
    case StageName::kSegment: return "segment";
    case StageName::kConcat: return "concat";
    case StageName::kG2P: return "g2p";
    case StageName::kStats: return "stats";
    case StageName::kEmit: return "emit";
  }
  return "?";
}

StageName parse_stage_name(std::string_view label) {
  const auto l = text::trim(label);
  for (auto s : kAllStages)
    if (stage_label(s) == l) return s;
  throw StageOrderError("unknown stage '" + l +
                        "' (expected ingest, cleanup, align, segment, concat, g2p, stats, emit)");
}

std::vector<StageName> parse_stage_list(std::string_view csv) {
  std::vector<StageName> out;
  for (const auto& part : text::split(csv, ',')) {
    if (text::trim(part).empty()) continue;
    const auto s = parse_stage_name(part);
    if (!out.empty() && s <= out.back())
      throw StageOrderError("stage '" + std::string(stage_label(s)) + "' listed after '" +
                            std::string(stage_label(out.back())) +
                            "'; stages must follow pipeline order without repeats");
    out.push_back(s);
  }
  if (out.empty()) throw StageOrderError("no stages requested");
  return out;
}

std::string_view stage_manifest(StageName s) {
  switch (s) {
    case StageName::kIngest: return "scraped.jsonl";
    case StageName::kCleanup: return "cleaned.jsonl";
    case StageName::kAlign: return "aligned.jsonl";
    case StageName::kSegment: return "segmented.jsonl";
    case StageName::kConcat: return "concatenated.jsonl";
    case StageName::kG2P: return "phonemized.jsonl";
    case StageName::kStats: return "";
    case StageName::kEmit: return "final.jsonl";
  }
  return "";
}

namespace {

// Stage whose manifest a stage consumes.
std::optional<StageName> predecessor(StageName s) {
  switch (s) {
    case StageName::kIngest: return std::nullopt;
    case StageName::kCleanup: return StageName::kIngest;
    case StageName::kAlign: return StageName::kCleanup;
    case StageName::kSegment: return StageName::kAlign;
    case StageName::kConcat: return StageName::kSegment;
    case StageName::kG2P: return StageName::kConcat;
    case StageName::kStats: return std::nullopt;
    case StageName::kEmit: return StageName::kG2P;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- config

void check_keys(const json& table, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!table.is_object()) throw Error("config: [" + where + "] must be a table");
  for (const auto& [k, v] : table.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return k == a; });
    if (!ok) throw Error("config: unknown key '" + k + "' in [" + where + "]");
  }
}

template <typename T>
void read(const json& table, const char* key, T& out, const std::string& where) {
  if (!table.contains(key)) return;
  try {
    out = table.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error("config: [" + where + "] " + key + " has the wrong type");
  }
}

void read_path(const json& table, const char* key, fs::path& out, const fs::path& base,
               const std::string& where) {
  std::string s;
  read(table, key, s, where);
  if (s.empty()) return;
  fs::path p(s);
  out = p.is_relative() ? base / p : p;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  check_keys(j, "top level", {"pipeline", "paths", "segment", "concat", "lm", "g2p", "source"});
  c.paths.output_dir = base_dir / "out";
  c.paths.cache_dir = base_dir / "cache";

  if (j.contains("pipeline")) {
    const auto& t = j["pipeline"];
    check_keys(t, "pipeline", {"output_dir", "jobs", "log_level"});
    read_path(t, "output_dir", c.paths.output_dir, base_dir, "pipeline");
    long long jobs = c.jobs;
    read(t, "jobs", jobs, "pipeline");
    if (jobs < 1) throw Error("config: [pipeline] jobs must be >= 1");
    c.jobs = static_cast<unsigned>(jobs);
    read(t, "log_level", c.log_level, "pipeline");
  }
  if (j.contains("paths")) {
    const auto& t = j["paths"];
    check_keys(t, "paths",
               {"lexicon", "background_corpus", "nbest_dir", "scores_dir", "cache_dir"});
    read_path(t, "lexicon", c.paths.lexicon, base_dir, "paths");
    read_path(t, "background_corpus", c.paths.background_corpus, base_dir, "paths");
    read_path(t, "nbest_dir", c.paths.nbest_dir, base_dir, "paths");
    read_path(t, "scores_dir", c.paths.scores_dir, base_dir, "paths");
    read_path(t, "cache_dir", c.paths.cache_dir, base_dir, "paths");
  }
  if (j.contains("segment")) {
    const auto& t = j["segment"];
    check_keys(t, "segment", {"threshold", "pad", "energy_fallback"});
    read(t, "threshold", c.params.silence_split_threshold_s, "segment");
    read(t, "pad", c.params.silence_pad_s, "segment");
    read(t, "energy_fallback", c.energy_fallback, "segment");
  }
  if (j.contains("concat")) {
    const auto& t = j["concat"];
    check_keys(t, "concat", {"pause"});
    read(t, "pause", c.params.concat_pause_s, "concat");
  }
  if (j.contains("lm")) {
    const auto& t = j["lm"];
    check_keys(t, "lm", {"order", "discount", "lambda", "background_discount"});
    read(t, "order", c.params.lm_order, "lm");
    read(t, "discount", c.params.discount_d, "lm");
    read(t, "lambda", c.params.lm_weight_lambda, "lm");
    read(t, "background_discount", c.background_discount, "lm");
    if (!(c.background_discount >= 0 && c.background_discount < 1))
      throw Error("config: [lm] background_discount must lie in [0, 1)");
  }
  if (j.contains("g2p")) {
    const auto& t = j["g2p"];
    check_keys(t, "g2p", {"mode", "tones"});
    std::string mode = "strict";
    read(t, "mode", mode, "g2p");
    if (mode == "strict") c.g2p_mode = G2PMode::kStrict;
    else if (mode == "lenient") c.g2p_mode = G2PMode::kLenient;
    else throw Error("config: [g2p] mode must be \"strict\" or \"lenient\"");
    if (t.contains("tones")) {
      if (!t["tones"].is_object()) throw Error("config: [g2p.tones] must be a table");
      for (const auto& [name, list] : t["tones"].items()) {
        std::set<int> tones;
        try {
          for (const auto& v : list) tones.insert(v.get<int>());
        } catch (const json::exception&) {
          throw Error("config: [g2p.tones] " + name + " must be a list of integers");
        }
        if (tones.empty()) throw Error("config: [g2p.tones] " + name + " is empty");
        c.params.tone_inventory[parse_dialect(name)] = std::move(tones);
      }
    }
  }
  try {
    c.params.validate();
  } catch (const Error& e) {
    throw Error(std::string("config: ") + e.what());
  }

  const char* env_cache = std::getenv("FORGE_CACHE_DIR");
  if (env_cache && *env_cache) c.paths.cache_dir = env_cache;
  if (j.contains("source")) {
    if (!j["source"].is_array()) throw Error("config: 'source' must be an array of tables");
    for (auto s : j["source"]) {
      if (!s.is_object()) throw Error("config: each [[source]] must be a table");
      if (!s.contains("cache_dir")) s["cache_dir"] = c.paths.cache_dir.string();
      auto src = ingest::SourceConfig::from_json(s, base_dir);
      if (env_cache && *env_cache) src.cache_dir = env_cache;
      c.sources.push_back(std::move(src));
    }
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& toml_path) {
  const auto j = config::load_toml(toml_path);
  auto base = fs::absolute(toml_path).parent_path();
  return from_json(j, base);
}

// ---------------------------------------------------------------- report

json RunReport::to_json() const {
  json j;
  j["tool_version"] = kToolVersion;
  j["status"] = ok() ? "ok" : "failed";
  if (!ok()) j["error"] = error;
  if (retention_pct) j["retention_pct"] = *retention_pct;
  j["stages"] = json::array();
  for (const auto& s : stages) {
    json e{{"stage", stage_label(s.stage)},
           {"input", s.input.string()},
           {"output", s.output.string()},
           {"records_in", s.records_in},
           {"records_out", s.records_out},
           {"hours_in", s.hours_in},
           {"hours_out", s.hours_out},
           {"wall_s", s.wall_s},
           {"dropped", json::array()},
           {"warnings", s.warnings}};
    for (const auto& d : s.dropped) e["dropped"].push_back({{"id", d.id}, {"reason", d.reason}});
    j["stages"].push_back(std::move(e));
  }
  return j;
}

// ---------------------------------------------------------------- per record

namespace {

PhonemeSequence phonemize(const Utterance& u, const Lexicon& lexicon, const RunConfig& config,
                          std::vector<std::string>* warnings = nullptr) {
  std::vector<TextToken> unknown;
  auto p = g2p_convert(u.text, u.dialect, lexicon, config.params, config.g2p_mode, &unknown);
  if (warnings && !unknown.empty()) {
    std::string chars;
    for (const auto& t : unknown) chars += t.surface;
    warnings->push_back(u.id + ": dropped characters not in the lexicon: " + chars);
  }
  return p;
}

// Code-point index in `text` of each syllable g2p produces for it.
std::vector<std::size_t> syllable_chars(const Utterance& u, const Lexicon& lexicon,
                                        const RunConfig& config) {
  std::vector<std::size_t> out;
  for (const auto& t : segment_text(u.text, u.dialect, lexicon, config.g2p_mode)) {
    if (t.kind != TokenKind::kWord) continue;
    const auto n = text::to_u32(t.surface).size();
    for (std::size_t k = 0; k < n; ++k) out.push_back(t.offset + k);
  }
  return out;
}

std::string strip_marks(std::u32string_view s) {
  std::size_t b = 0, e = s.size();
  auto mark = [](char32_t c) { return text::is_punctuation(c) || text::is_space(c); };
  while (b < e && mark(s[b])) ++b;
  while (e > b && mark(s[e - 1])) --e;
  return text::to_utf8(s.substr(b, e - b));
}

double seconds(const std::vector<Utterance>& records) {
  std::vector<double> d;
  for (const auto& r : records) d.push_back(r.duration_s);
  std::sort(d.begin(), d.end());
  double s = 0;
  for (double x : d) s += x;
  return s;
}

}  // namespace

Utterance align_record(const Utterance& in, const Lexicon& lexicon, const RunConfig& config) {
  Utterance u = in;
  const auto phon = phonemize(u, lexicon, config);
  if (phon.empty()) throw Error("no syllables after G2P");
  std::vector<std::string> phones;
  for (const auto& s : phon.syllables) phones.push_back(s.str());

  const fs::path score_file =
      config.paths.scores_dir.empty() ? fs::path{} : config.paths.scores_dir / (u.id + ".scores");
  std::optional<AcousticScores> scores;
  if (!score_file.empty() && fs::exists(score_file)) {
    scores = AcousticScores::load(score_file);
  } else if (config.energy_fallback) {
    const auto audio = decode_wav(fs::path(u.audio_path));
    scores = energy_scores(audio.samples, audio.sample_rate, phones);
  } else {
    throw Error("no acoustic scores (" + score_file.string() + ") and energy fallback disabled");
  }
  const auto al = force_align(*scores, phones, true);
  std::vector<AlignedInterval> intervals;
  const double p = scores->frame_period_s();
  for (const auto& s : al.segments)
    intervals.push_back({s.symbol, static_cast<double>(s.start_frame) * p,
                         static_cast<double>(s.end_frame) * p});
  u.alignment = std::move(intervals);
  u.phonemes = phon;
  u.advance(Stage::kAligned);
  return u;
}

std::vector<Utterance> segment_record(const Utterance& u, const Lexicon& lexicon,
                                      const RunConfig& config, const fs::path& audio_dir) {
  if (!u.alignment) throw Error("record has no alignment");
  if (!u.phonemes) throw Error("record has no phonemes");
  const auto audio = decode_wav(fs::path(u.audio_path));
  const double total = audio.duration_s();

  SilenceList silences;
  std::vector<const AlignedInterval*> phones;
  for (const auto& iv : *u.alignment) {
    if (iv.symbol != kSilence) {
      phones.push_back(&iv);
      continue;
    }
    const double b = std::min(iv.start_s, total), e = std::min(iv.end_s, total);
    if (!(e > b)) continue;
    if (!silences.empty() && b <= silences.back().second + 1e-9)
      silences.back().second = std::max(silences.back().second, e);
    else
      silences.emplace_back(b, e);
  }
  if (phones.size() != u.phonemes->size())
    throw Error("alignment has " + std::to_string(phones.size()) + " phones for " +
                std::to_string(u.phonemes->size()) + " syllables");
  const auto chars = syllable_chars(u, lexicon, config);
  if (chars.size() != phones.size())
    throw Error("text no longer matches the aligned syllables");

  const double thr = config.params.silence_split_threshold_s;
  const double pad = config.params.silence_pad_s;
  const auto regions = plan_regions(audio.samples.size(), audio.sample_rate, silences, thr, pad);

  // Assign each phone to the region holding its midpoint.
  std::vector<std::pair<std::size_t, std::size_t>> span(regions.size(), {SIZE_MAX, 0});
  std::size_t r = 0;
  for (std::size_t j = 0; j < phones.size(); ++j) {
    const double mid = 0.5 * (phones[j]->start_s + phones[j]->end_s) * audio.sample_rate;
    while (r + 1 < regions.size() && mid >= static_cast<double>(regions[r].speech_end)) ++r;
    span[r].first = std::min(span[r].first, j);
    span[r].second = j + 1;
  }
  const auto u32 = text::to_u32(u.text);
  std::vector<RegionLabel> labels;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (span[i].first == SIZE_MAX)
      throw Error("speech region " + std::to_string(i + 1) + " has no aligned syllables");
    const auto cb = chars[span[i].first], ce = chars[span[i].second - 1] + 1;
    labels.push_back({strip_marks(std::u32string_view(u32).substr(cb, ce - cb)),
                      u.phonemes->slice(span[i].first, span[i].second)});
  }

  const auto segs = trim_and_split(audio, silences, labels, thr, pad, u.id);
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    Utterance r2 = u;
    r2.id = u.id + "_" + std::to_string(i + 1);
    const auto path = audio_dir / (r2.id + ".wav");
    encode_wav(s.audio, path);
    r2.audio_path = path.string();
    r2.sample_rate = s.audio.sample_rate;
    r2.duration_s = s.duration_s();
    r2.text = s.text;
    r2.phonemes = s.phonemes;
    r2.alignment.reset();
    const double sr = s.audio.sample_rate;
    r2.segment = SegmentOrigin{u.id, s.offset_in_source_s, static_cast<double>(s.lead_silence) / sr,
                               static_cast<double>(s.trail_silence) / sr};
    r2.advance(Stage::kSegmented);
    out.push_back(std::move(r2));
  }
  return out;
}

namespace {

Segment to_segment(const Utterance& u) {
  Segment s;
  s.audio = decode_wav(fs::path(u.audio_path));
  s.text = u.text;
  if (u.phonemes) s.phonemes = *u.phonemes;
  s.source_utterance_id = u.segment->source_id;
  s.offset_in_source_s = u.segment->offset_s;
  const double sr = s.audio.sample_rate;
  s.lead_silence = static_cast<std::size_t>(std::llround(u.segment->lead_silence_s * sr));
  s.trail_silence = static_cast<std::size_t>(std::llround(u.segment->trail_silence_s * sr));
  return s;
}

bool is_concatenation(const Utterance& u) { return u.extra.contains("concat_of"); }

}  // namespace

std::vector<Utterance> concatenate_records(const std::vector<Utterance>& segments,
                                           const RunConfig& config, const fs::path& audio_dir) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Utterance*>> groups;
  for (const auto& u : segments) {
    if (!u.segment || is_concatenation(u)) continue;
    auto& g = groups[u.segment->source_id];
    if (g.empty()) order.push_back(u.segment->source_id);
    g.push_back(&u);
  }
  std::vector<std::pair<const Utterance*, const Utterance*>> pairs;
  for (const auto& src : order) {
    auto& g = groups[src];
    std::stable_sort(g.begin(), g.end(), [](const Utterance* a, const Utterance* b) {
      return a->segment->offset_s < b->segment->offset_s;
    });
    for (std::size_t i = 0; i + 1 < g.size(); ++i) pairs.emplace_back(g[i], g[i + 1]);
  }

  std::vector<Utterance> out(pairs.size());
  parallel_for(pairs.size(), config.jobs, [&](std::size_t k) {
    const auto& [a, b] = pairs[k];
    const auto joined = concatenate(to_segment(*a), to_segment(*b), config.params.concat_pause_s);
    Utterance u = *a;
    const std::string prefix = a->segment->source_id + "_";
    const std::string b_index =
        b->id.rfind(prefix, 0) == 0 ? b->id.substr(prefix.size()) : b->id;
    u.id = a->id + "+" + b_index;
    const auto path = audio_dir / (u.id + ".wav");
    encode_wav(joined.audio, path);
    u.audio_path = path.string();
    u.sample_rate = joined.audio.sample_rate;
    u.duration_s = joined.duration_s();
    u.text = joined.text;
    u.phonemes = joined.phonemes;
    const double sr = joined.audio.sample_rate;
    u.segment = SegmentOrigin{joined.source_utterance_id, joined.offset_in_source_s,
                              static_cast<double>(joined.lead_silence) / sr,
                              static_cast<double>(joined.trail_silence) / sr};
    u.extra["concat_of"] = json::array({a->id, b->id});
    u.advance(Stage::kSegmented);
    out[k] = std::move(u);
  });
  return out;
}

// ---------------------------------------------------------------- run

namespace {

struct Context {
  const RunConfig& config;
  const RunOptions& options;
  std::optional<Lexicon> lexicon;

  const Lexicon& lex() {
    if (!lexicon) {
      if (config.paths.lexicon.empty())
        throw Error("this stage needs [paths] lexicon in the config");
      lexicon = load_lexicon(config.paths.lexicon);
    }
    return *lexicon;
  }
  fs::path out(std::string_view name) const { return config.paths.output_dir / name; }
};

// Applies fn to every record in parallel; records whose fn throws
// forge::Error are dropped and reported. Output keeps input order.
template <typename Fn>
std::vector<Utterance> per_record(const std::vector<Utterance>& in, unsigned jobs,
                                  StageReport& report, Fn&& fn) {
  std::vector<std::vector<Utterance>> results(in.size());
  std::vector<std::optional<std::string>> errors(in.size());
  parallel_for(in.size(), jobs, [&](std::size_t i) {
    try {
      results[i] = fn(in[i]);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (errors[i]) {
      spdlog::warn("[{}] dropped {}: {}", stage_label(report.stage), in[i].id, *errors[i]);
      report.dropped.push_back({in[i].id, *errors[i]});
      continue;
    }
    for (auto& u : results[i]) out.push_back(std::move(u));
  }
  return out;
}

NGramLM background_lm(const RunConfig& config, const CorpusManifest& input) {
  std::vector<TokenSeq> sentences;
  if (!config.paths.background_corpus.empty()) {
    std::istringstream in(read_file(config.paths.background_corpus));
    std::string line;
    while (std::getline(in, line)) {
      auto t = char_tokens(text::nfc(line));
      if (!t.empty()) sentences.push_back(std::move(t));
    }
  } else {
    for (const auto& u : input.records)
      if (u.quality == Quality::kWellTranscribed) sentences.push_back(char_tokens(u.text));
  }
  if (sentences.empty())
    throw Error("cleanup: background LM corpus is empty; set [paths] background_corpus");
  return NGramLM::train(sentences, config.params.lm_order, config.background_discount);
}

std::string stats_text(const StatsTable& table, std::optional<double> retention_pct) {
  std::string s = table.render_text();
  s += "Total hours: " + format_fixed(table.grand_total().hours(), 2) + "\n";
  if (retention_pct) s += "Retention vs scraped: " + format_percent(*retention_pct) + "\n";
  return s;
}

std::optional<double> retention_vs_scraped(const Context& ctx, const CorpusManifest& after,
                                           const fs::path& input) {
  const auto scraped = ctx.out(stage_manifest(StageName::kIngest));
  if (!fs::exists(scraped) || (fs::exists(input) && fs::equivalent(scraped, input)))
    return std::nullopt;
  const auto before = compute_stats(read_manifest(scraped));
  if (!(before.grand_total().seconds > 0)) return std::nullopt;
  // Concatenations re-use audio already counted in their segments.
  CorpusManifest kept;
  for (const auto& u : after.records)
    if (!is_concatenation(u)) kept.records.push_back(u);
  return retention(before, compute_stats(kept));
}

}  // namespace

RunReport run(const RunConfig& config, const RunOptions& options) {
  RunReport report;
  Context ctx{config, options, std::nullopt};
  fs::create_directories(config.paths.output_dir);
  const auto audio_dir = ctx.out("audio");
  const auto report_path = ctx.out("run_report.json");

  auto in_run = [&](StageName s) {
    return std::find(options.stages.begin(), options.stages.end(), s) != options.stages.end();
  };

  std::optional<fs::path> last_manifest;
  try {
    if (options.stages.empty()) throw StageOrderError("no stages requested");
    for (std::size_t k = 0; k < options.stages.size(); ++k) {
      const StageName stage = options.stages[k];
      if (k > 0 && stage <= options.stages[k - 1])
        throw StageOrderError("stages must follow pipeline order without repeats");

      StageReport sr;
      sr.stage = stage;
      const auto started = std::chrono::steady_clock::now();
      const bool first = k == 0;

      // Resolve the input manifest.
      fs::path input;
      if (first && options.input) {
        input = *options.input;
        if (!fs::exists(input)) throw StageOrderError("input manifest not found: " + input.string());
      } else if (stage == StageName::kStats) {
        if (last_manifest) {
          input = *last_manifest;
        } else {
          for (auto s : {StageName::kEmit, StageName::kG2P, StageName::kConcat,
                         StageName::kSegment, StageName::kAlign, StageName::kCleanup,
                         StageName::kIngest}) {
            if (fs::exists(ctx.out(stage_manifest(s)))) {
              input = ctx.out(stage_manifest(s));
              break;
            }
          }
          if (input.empty())
            throw StageOrderError("stats: no manifest found in " +
                                  config.paths.output_dir.string() + "; pass --input");
        }
      } else if (auto pred = predecessor(stage)) {
        input = ctx.out(stage_manifest(*pred));
        const bool inline_align = stage == StageName::kSegment && config.energy_fallback &&
                                  !in_run(*pred) && in_run(StageName::kCleanup);
        if (inline_align) input = ctx.out(stage_manifest(StageName::kCleanup));
        if (!in_run(*pred) && !inline_align && !first)
          throw StageOrderError("stage '" + std::string(stage_label(stage)) + "' needs " +
                                input.filename().string() + " from stage '" +
                                std::string(stage_label(*pred)) +
                                "', which is not in this run; add it to --stages");
        StageName needed = *pred;
        if (stage == StageName::kSegment && !fs::exists(input) && config.energy_fallback) {
          input = ctx.out(stage_manifest(StageName::kCleanup));
          needed = StageName::kCleanup;
          sr.warnings.push_back("aligned.jsonl missing; aligning cleaned records inline");
        }
        if (!fs::exists(input)) {
          std::string msg = "stage '" + std::string(stage_label(stage)) +
                            "' is missing its input " + input.string() + "; run stage '" +
                            std::string(stage_label(needed)) + "' first";
          if (stage == StageName::kSegment && !config.energy_fallback)
            msg += " (energy fallback is disabled, so alignments are required)";
          throw StageOrderError(msg);
        }
      }
      sr.input = input;
      const auto manifest_name = stage_manifest(stage);
      if (!manifest_name.empty()) {
        sr.output = ctx.out(manifest_name);
        if (!input.empty() && fs::exists(input) && fs::exists(sr.output) &&
            fs::equivalent(input, sr.output))
          throw Error("stage '" + std::string(stage_label(stage)) +
                      "' would overwrite its own input " + input.string());
      }
      spdlog::info("[{}] start: {} -> {}", stage_label(stage), input.string(),
                   sr.output.string());

      CorpusManifest in;
      if (!input.empty()) {
        in = read_manifest(input);
        sr.records_in = in.records.size();
        sr.hours_in = seconds(in.records) / 3600.0;
      }
      CorpusManifest result;
      result.schema_version = in.schema_version;

      switch (stage) {
        case StageName::kIngest: {
          if (config.sources.empty()) throw Error("ingest: the config defines no [[source]]");
          ingest::HttpFetcher http;
          ingest::Fetcher& fetcher = options.fetcher ? *options.fetcher : http;
          std::set<std::string> ids;
          for (const auto& src : config.sources) {
            auto crawled = ingest::crawl(src, fetcher);
            for (const auto& f : crawled.failures) sr.warnings.push_back(f);
            auto mat = ingest::materialize(crawled.records, src, fetcher);
            for (const auto& s : mat.skipped) sr.dropped.push_back({s.audio_url, s.reason});
            spdlog::info("[ingest] {}: {} pages, {} network requests, {} records, {} downloads",
                         src.name, crawled.pages_visited, crawled.network_requests,
                         crawled.records.size(), mat.downloads);
            for (auto& u : mat.utterances) {
              if (!ids.insert(u.id).second)
                throw Error("ingest: duplicate record id '" + u.id + "' across sources");
              result.records.push_back(std::move(u));
            }
          }
          break;
        }
        case StageName::kCleanup: {
          const auto bg = background_lm(config, in);
          CleanupSummary summary;
          result = batch_cleanup(in, config.paths.nbest_dir, bg,
                                 {config.params.discount_d, config.params.lm_weight_lambda,
                                  config.jobs},
                                 &summary);
          for (const auto& id : summary.flagged)
            sr.dropped.push_back({id, "ill-transcribed record without an n-best list"});
          spdlog::info("[cleanup] rescored {}, changed {}, passed through {}", summary.processed,
                       summary.changed, summary.passed_through);
          break;
        }
        case StageName::kAlign: {
          const auto& lex = ctx.lex();
          result.records = per_record(in.records, config.jobs, sr, [&](const Utterance& u) {
            return std::vector<Utterance>{align_record(u, lex, config)};
          });
          break;
        }
        case StageName::kSegment: {
          const auto& lex = ctx.lex();
          fs::create_directories(audio_dir);
          result.records = per_record(in.records, config.jobs, sr, [&](const Utterance& u) {
            if (!u.alignment) {
              if (!config.energy_fallback)
                throw StageOrderError("record '" + u.id +
                                      "' has no alignment; run the align stage first");
              return segment_record(align_record(u, lex, config), lex, config, audio_dir);
            }
            return segment_record(u, lex, config, audio_dir);
          });
          break;
        }
        case StageName::kConcat: {
          fs::create_directories(audio_dir);
          result.records = in.records;
          auto joined = concatenate_records(in.records, config, audio_dir);
          for (auto& u : joined) result.records.push_back(std::move(u));
          break;
        }
        case StageName::kG2P: {
          const auto& lex = ctx.lex();
          std::mutex mu;
          result.records = per_record(in.records, config.jobs, sr, [&](const Utterance& u) {
            Utterance r = u;
            std::vector<std::string> warnings;
            r.phonemes = phonemize(u, lex, config, &warnings);
            std::lock_guard lock(mu);
            for (auto& w : warnings) sr.warnings.push_back(std::move(w));
            return std::vector<Utterance>{std::move(r)};
          });
          break;
        }
        case StageName::kStats: {
          const auto table = compute_stats(in);
          const auto ret = retention_vs_scraped(ctx, in, input);
          if (ret) report.retention_pct = ret;
          write_file_atomic(ctx.out("stats.txt"), stats_text(table, ret));
          write_file_atomic(ctx.out("stats.csv"), table.render_csv());
          sr.output = ctx.out("stats.txt");
          result = in;
          break;
        }
        case StageName::kEmit: {
          result.records = per_record(in.records, config.jobs, sr, [&](const Utterance& u) {
            if (!u.phonemes || u.phonemes->empty()) throw Error("record has no phonemes");
            if (!(u.duration_s > 0)) throw Error("record has no audio");
            Utterance r = u;
            r.advance(Stage::kFinal);
            return std::vector<Utterance>{std::move(r)};
          });
          break;
        }
      }

      if (!manifest_name.empty()) {
        if (result.records.empty())
          throw Error("stage '" + std::string(stage_label(stage)) + "' produced no records");
        write_manifest(result, sr.output);
        last_manifest = sr.output;
      }
      if (stage == StageName::kEmit) {
        if (auto ret = retention_vs_scraped(ctx, result, input)) report.retention_pct = ret;
      }
      sr.records_out = result.records.size();
      sr.hours_out = seconds(result.records) / 3600.0;
      sr.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      spdlog::info("[{}] done: {} -> {} records, {:.4f} h, {} dropped", stage_label(stage),
                   sr.records_in, sr.records_out, sr.hours_out, sr.dropped.size());
      report.stages.push_back(std::move(sr));
    }
  } catch (const std::exception& e) {
    report.error = e.what();
    write_file_atomic(report_path, report.to_json().dump(2) + "\n");
    throw;
  }
  write_file_atomic(report_path, report.to_json().dump(2) + "\n");
  return report;
}

}  // namespace forge::pipeline
