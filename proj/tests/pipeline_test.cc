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

#include <cstdlib>

#include "forge/aligner.hpp"
#include "forge/audio.hpp"
#include "forge/manifest_io.hpp"
#include "forge/pipeline.hpp"
#include "forge/stats.hpp"
#include "support/fixtures.hpp"

namespace forge::pipeline {
namespace {

namespace fs = std::filesystem;
using forge::testing::append;
using forge::testing::FixtureServer;
using forge::testing::run_process;
using forge::testing::silence;
using forge::testing::TempDir;
using forge::testing::tone;
using forge::testing::write_text;

TEST(Stages, ParseList) {
  EXPECT_EQ(parse_stage_list("ingest, cleanup,stats"),
            (std::vector<StageName>{StageName::kIngest, StageName::kCleanup, StageName::kStats}));
  EXPECT_EQ(parse_stage_list("g2p,").size(), 1u);
  EXPECT_THROW(parse_stage_list("cleanup,ingest"), StageOrderError);
  EXPECT_THROW(parse_stage_list("align,align"), StageOrderError);
  EXPECT_THROW(parse_stage_list("align,bogus"), StageOrderError);
  EXPECT_THROW(parse_stage_list(""), StageOrderError);
  for (auto s : kAllStages) EXPECT_EQ(parse_stage_name(stage_label(s)), s);
  EXPECT_EQ(stage_manifest(StageName::kIngest), "scraped.jsonl");
  EXPECT_EQ(stage_manifest(StageName::kEmit), "final.jsonl");
  EXPECT_EQ(stage_manifest(StageName::kStats), "");
}

class ConfigFile : public ::testing::Test {
 protected:
  RunConfig load(const std::string& body) {
    write_text(dir_ / "forge.toml", body);
    return RunConfig::load(dir_ / "forge.toml");
  }
  TempDir dir_;
};

TEST_F(ConfigFile, DefaultsAndRelativePaths) {
  const auto c = load(
      "[paths]\nlexicon = \"lex.tsv\"\nscores_dir = \"/abs/scores\"\n"
      "[segment]\nthreshold = 0.06\n[lm]\ndiscount = 0.25\n[g2p]\nmode = \"lenient\"\n");
  EXPECT_EQ(c.paths.lexicon, fs::absolute(dir_.path()) / "lex.tsv");
  EXPECT_EQ(c.paths.scores_dir, fs::path("/abs/scores"));
  EXPECT_EQ(c.paths.output_dir, fs::absolute(dir_.path()) / "out");
  EXPECT_DOUBLE_EQ(c.params.silence_split_threshold_s, 0.06);
  EXPECT_DOUBLE_EQ(c.params.silence_pad_s, 0.025);
  EXPECT_DOUBLE_EQ(c.params.discount_d, 0.25);
  EXPECT_EQ(c.g2p_mode, G2PMode::kLenient);
  EXPECT_TRUE(c.energy_fallback);
  EXPECT_TRUE(c.sources.empty());
}

TEST_F(ConfigFile, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(load("[segment]\nthreshhold = 0.05\n"), Error);
  EXPECT_THROW(load("[nope]\n"), Error);
  EXPECT_THROW(load("[g2p]\nmode = \"fuzzy\"\n"), Error);
  EXPECT_THROW(load("[segment]\nthreshold = \"x\"\n"), Error);
}

TEST_F(ConfigFile, CacheDirFromEnvironment) {
  const std::string body =
      "[[source]]\nname = \"d\"\nkind = \"DICT\"\nseed_urls = [\"http://h/i.html\"]\n"
      "rules = { record = \"div\", text = \"p\", audio = \"audio@src\" }\n";
  EXPECT_EQ(load(body).sources.at(0).cache_dir, fs::absolute(dir_.path()) / "cache");
  ::setenv("FORGE_CACHE_DIR", "/tmp/forge-env-cache", 1);
  const auto c = load(body);
  ::unsetenv("FORGE_CACHE_DIR");
  EXPECT_EQ(c.paths.cache_dir, fs::path("/tmp/forge-env-cache"));
  EXPECT_EQ(c.sources.at(0).cache_dir, fs::path("/tmp/forge-env-cache"));
}

// One utterance with two words separated by a long pause.
class Records : public ::testing::Test {
 protected:
  void SetUp() override {
    write_text(dir_ / "lex.tsv",
               "天\tSixian\ttien1\t1\n光\tSixian\tgong1\t1\n天光\tSixian\ttien1 gong1\t1\n");
    lexicon_ = load_lexicon(dir_ / "lex.tsv");
    auto a = silence(0.3);
    append(a, tone(0.4));
    append(a, silence(0.2));
    append(a, tone(0.4));
    append(a, silence(0.3));
    encode_wav(a, dir_ / "u.wav");
    u_ = forge::testing::make_utterance("u", Dialect::kSixian, SourceKind::dict(), 1.6, "天，光。");
    u_.audio_path = (dir_ / "u.wav").string();
    config_.paths.scores_dir = dir_ / "scores";
  }

  Utterance aligned() const {
    Utterance u = u_;
    u.alignment = std::vector<AlignedInterval>{{kSilence, 0.0, 0.3},
                                               {"tien1", 0.3, 0.7},
                                               {kSilence, 0.7, 0.9},
                                               {"gong1", 0.9, 1.3},
                                               {kSilence, 1.3, 1.6}};
    u.phonemes = PhonemeSequence::parse("tien1 , gong1");
    u.stage = Stage::kAligned;
    return u;
  }

  TempDir dir_;
  Lexicon lexicon_;
  Utterance u_;
  RunConfig config_;
};

TEST_F(Records, AlignFromEnergy) {
  const auto r = align_record(u_, lexicon_, config_);
  EXPECT_EQ(r.stage, Stage::kAligned);
  ASSERT_TRUE(r.phonemes);
  EXPECT_EQ(r.phonemes->str(), "tien1 , gong1");
  ASSERT_TRUE(r.alignment);
  std::vector<std::string> phones;
  for (const auto& iv : *r.alignment)
    if (iv.symbol != kSilence) phones.push_back(iv.symbol);
  EXPECT_EQ(phones, (std::vector<std::string>{"tien1", "gong1"}));
  EXPECT_NEAR(r.alignment->front().start_s, 0.0, 1e-12);
  EXPECT_NEAR(r.alignment->back().end_s, 1.6, 1e-9);
}

TEST_F(Records, AlignFromScoreFile) {
  // 16 frames of 0.1 s: silence, tien1 for 4, silence, gong1 for 4, silence.
  std::vector<double> rows;
  for (int t = 0; t < 16; ++t) {
    const bool t1 = t >= 3 && t < 7, g1 = t >= 9 && t < 13;
    rows.insert(rows.end(), {t1 || g1 ? -5.0 : 0.0, t1 ? 0.0 : -5.0, g1 ? 0.0 : -5.0});
  }
  write_text(dir_ / "scores" / "u.scores",
             AcousticScores(0.1, {kSilence, "tien1", "gong1"}, rows).dump());
  config_.energy_fallback = false;
  const auto r = align_record(u_, lexicon_, config_);
  ASSERT_TRUE(r.alignment);
  ASSERT_EQ(r.alignment->size(), 5u);
  EXPECT_EQ((*r.alignment)[1].symbol, "tien1");
  EXPECT_NEAR((*r.alignment)[1].start_s, 0.3, 1e-12);
  EXPECT_NEAR((*r.alignment)[1].end_s, 0.7, 1e-12);
  EXPECT_NEAR((*r.alignment)[3].start_s, 0.9, 1e-12);
}

TEST_F(Records, AlignWithoutScoresOrFallbackFails) {
  config_.energy_fallback = false;
  EXPECT_THROW(align_record(u_, lexicon_, config_), Error);
}

TEST_F(Records, SegmentAndConcatenate) {
  const auto segs = segment_record(aligned(), lexicon_, config_, dir_ / "audio");
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].id, "u_1");
  EXPECT_EQ(segs[1].id, "u_2");
  EXPECT_EQ(segs[0].text, "天");
  EXPECT_EQ(segs[1].text, "光");
  EXPECT_EQ(segs[0].phonemes->str(), "tien1");
  EXPECT_EQ(segs[1].phonemes->str(), "gong1");
  EXPECT_NEAR(segs[0].duration_s, 0.45, 1e-9);
  EXPECT_NEAR(segs[1].duration_s, 0.45, 1e-9);
  ASSERT_TRUE(segs[1].segment);
  EXPECT_NEAR(segs[1].segment->offset_s, 0.875, 1e-9);
  EXPECT_NEAR(segs[1].segment->lead_silence_s, 0.025, 1e-9);
  EXPECT_EQ(segs[0].stage, Stage::kSegmented);
  EXPECT_FALSE(segs[0].alignment);
  EXPECT_NEAR(decode_wav(fs::path(segs[1].audio_path)).duration_s(), 0.45, 1e-9);

  const auto joined = concatenate_records(segs, config_, dir_ / "audio");
  ASSERT_EQ(joined.size(), 1u);
  EXPECT_EQ(joined[0].id, "u_1+2");
  EXPECT_EQ(joined[0].text, "天，光");
  EXPECT_EQ(joined[0].phonemes->str(), "tien1 , gong1");
  EXPECT_NEAR(joined[0].duration_s, 0.9, 1e-9);
  EXPECT_EQ(joined[0].extra.at("concat_of"), (nlohmann::json{"u_1", "u_2"}));
}

TEST_F(Records, SegmentRejectsMismatchedAlignment) {
  auto u = aligned();
  u.alignment->erase(u.alignment->begin() + 3);
  EXPECT_THROW(segment_record(u, lexicon_, config_, dir_ / "audio"), Error);
  u = aligned();
  u.alignment.reset();
  EXPECT_THROW(segment_record(u, lexicon_, config_, dir_ / "audio"), Error);
}

// Builds the fixture corpus and serves its site directory.
class EndToEnd : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::create_directories(dir_ / "site");
    server_.mount(dir_ / "site");
    server_.start();
    const auto r = run_process(
        {FORGE_MKFIXTURE_BIN, dir_.path().string(), "--base-url", server_.base_url()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    config_ = RunConfig::load(dir_ / "forge.toml");
    config_.jobs = 1;
  }

  RunReport run_stages(const std::string& stages) {
    RunOptions o;
    o.stages = parse_stage_list(stages);
    return run(config_, o);
  }

  TempDir dir_;
  FixtureServer server_;
  RunConfig config_;
};

std::vector<std::pair<std::string, std::string>> ids_and_texts(const fs::path& manifest) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& u : read_manifest(manifest).records) out.emplace_back(u.id, u.text);
  return out;
}

TEST_F(EndToEnd, FullRunThenRerun) {
  const auto report = run_stages("ingest,cleanup,align,segment,concat,g2p,stats,emit");
  ASSERT_TRUE(report.ok());
  ASSERT_EQ(report.stages.size(), 8u);
  EXPECT_EQ(report.stages[0].records_out, 20u);
  ASSERT_TRUE(report.retention_pct);
  EXPECT_GT(*report.retention_pct, 0.0);
  EXPECT_LE(*report.retention_pct, 100.0);
  const auto out = config_.paths.output_dir;
  for (const char* f : {"scraped.jsonl", "cleaned.jsonl", "aligned.jsonl", "segmented.jsonl",
                        "concatenated.jsonl", "phonemized.jsonl", "final.jsonl", "stats.txt",
                        "stats.csv", "run_report.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto final_manifest = read_manifest(out / "final.jsonl");
  for (const auto& u : final_manifest.records) {
    EXPECT_EQ(u.stage, Stage::kFinal);
    EXPECT_TRUE(u.phonemes && !u.phonemes->empty());
    EXPECT_TRUE(fs::exists(u.audio_path));
  }
  const auto j = nlohmann::json::parse(read_file(out / "run_report.json"));
  EXPECT_EQ(j.at("status"), "ok");
  EXPECT_EQ(j.at("stages").size(), 8u);

  // Pages and audio now come from the cache, and the output is unchanged.
  const auto requests = server_.request_count();
  const auto first = ids_and_texts(out / "final.jsonl");
  const auto again = run_stages("ingest,cleanup,align,segment,concat,g2p,stats,emit");
  EXPECT_EQ(server_.request_count(), requests);
  EXPECT_EQ(ids_and_texts(out / "final.jsonl"), first);
  EXPECT_EQ(again.retention_pct, report.retention_pct);

  // Re-running later stages alone leaves the hours alone.
  const double hours = compute_stats(read_manifest(out / "concatenated.jsonl")).grand_total().hours();
  const auto partial = run_stages("g2p,stats");
  EXPECT_DOUBLE_EQ(partial.stages[0].hours_out, hours);
}

TEST_F(EndToEnd, CleanupCorrectsRadioTranscripts) {
  run_stages("ingest,cleanup");
  const auto scraped = read_manifest(config_.paths.output_dir / "scraped.jsonl");
  const auto cleaned = read_manifest(config_.paths.output_dir / "cleaned.jsonl");
  ASSERT_EQ(scraped.records.size(), cleaned.records.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < scraped.records.size(); ++i) {
    EXPECT_EQ(cleaned.records[i].stage, Stage::kCleaned);
    if (scraped.records[i].text != cleaned.records[i].text) {
      ++changed;
      EXPECT_EQ(scraped.records[i].quality, Quality::kIllTranscribed);
    }
  }
  EXPECT_GT(changed, 0u);
}

TEST_F(EndToEnd, MissingInputsAreStageOrderErrors) {
  EXPECT_THROW(run_stages("cleanup"), StageOrderError);
  const auto j =
      nlohmann::json::parse(read_file(config_.paths.output_dir / "run_report.json"));
  EXPECT_EQ(j.at("status"), "failed");
  config_.energy_fallback = false;
  try {
    run_stages("segment");
    FAIL() << "segment ran without alignments";
  } catch (const StageOrderError& e) {
    EXPECT_NE(std::string(e.what()).find("energy fallback is disabled"), std::string::npos);
  }
  EXPECT_THROW(run_stages("align,concat"), StageOrderError);
  RunOptions o;
  o.stages = {StageName::kStats};
  o.input = config_.paths.output_dir / "nope.jsonl";
  EXPECT_THROW(run(config_, o), StageOrderError);
}

}  // namespace
}  // namespace forge::pipeline
