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

#include "forge/corpus.hpp"
#include "support/fixtures.hpp"

namespace forge {
namespace {

using testing::make_utterance;

TEST(Dialect, SixValuesRoundTrip) {
  EXPECT_EQ(kAllDialects.size(), 6u);
  for (auto d : kAllDialects) {
    EXPECT_EQ(parse_dialect(dialect_name(d)), d);
    EXPECT_EQ(parse_dialect(dialect_display_name(d)), d);
  }
  EXPECT_EQ(parse_dialect("sixian"), Dialect::kSixian);
  EXPECT_EQ(parse_dialect("HAILU"), Dialect::kHailu);
  EXPECT_EQ(dialect_display_name(Dialect::kSixian), "四縣");
  EXPECT_EQ(dialect_display_name(Dialect::kNansixian), "南四縣");
}

TEST(Dialect, OtherLabelsAreErrors) {
  EXPECT_THROW(parse_dialect("Meixian"), UnknownDialectError);
  EXPECT_THROW(parse_dialect(""), UnknownDialectError);
  EXPECT_FALSE(try_parse_dialect("Meixian").has_value());
  try {
    parse_dialect("Meixian");
  } catch (const UnknownDialectError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown dialect"), std::string::npos);
  }
}

TEST(SourceKind, DefaultQualities) {
  EXPECT_EQ(SourceKind::dict().default_quality(), Quality::kWellTranscribed);
  EXPECT_EQ(SourceKind::exam().default_quality(), Quality::kWellTranscribed);
  EXPECT_EQ(SourceKind::radio().default_quality(), Quality::kIllTranscribed);
  EXPECT_EQ(SourceKind::other("tv").default_quality(), Quality::kWellTranscribed);
}

TEST(SourceKind, ParseAndOrder) {
  EXPECT_EQ(SourceKind::parse("DICT"), SourceKind::dict());
  EXPECT_EQ(SourceKind::parse("RADIO"), SourceKind::radio());
  EXPECT_EQ(SourceKind::parse("podcast"), SourceKind::other("podcast"));
  EXPECT_EQ(SourceKind::parse("EXAM").label(), "EXAM");
  EXPECT_LT(SourceKind::dict(), SourceKind::exam());
  EXPECT_LT(SourceKind::exam(), SourceKind::radio());
  EXPECT_LT(SourceKind::radio(), SourceKind::other("a"));
  EXPECT_LT(SourceKind::other("a"), SourceKind::other("b"));
}

TEST(Stage, NamesRoundTrip) {
  for (auto s : {Stage::kScraped, Stage::kCleaned, Stage::kAligned, Stage::kSegmented,
                 Stage::kFinal})
    EXPECT_EQ(parse_stage(stage_name(s)), s);
  EXPECT_THROW(parse_stage("Done"), Error);
}

TEST(Utterance, AdvanceAppendsProvenance) {
  auto u = make_utterance("u1");
  ASSERT_EQ(u.provenance.size(), 1u);
  u.advance(Stage::kCleaned);
  EXPECT_EQ(u.stage, Stage::kCleaned);
  ASSERT_EQ(u.provenance.size(), 2u);
  EXPECT_EQ(u.provenance[1].stage, Stage::kCleaned);
  EXPECT_EQ(u.provenance[1].tool_version, kToolVersion);
  EXPECT_EQ(u.provenance[1].timestamp.size(), 20u);  // 2026-01-01T00:00:00Z
  EXPECT_EQ(u.provenance[1].timestamp.back(), 'Z');
}

TEST(Phonemes, SyllableParsing) {
  const auto s = Syllable::parse("ho3");
  EXPECT_EQ(s.onset_rime, "ho");
  EXPECT_EQ(s.tone, 3);
  EXPECT_EQ(s.str(), "ho3");
  EXPECT_THROW(Syllable::parse("ho"), Error);
  EXPECT_THROW(Syllable::parse("3"), Error);
  EXPECT_THROW(Syllable::parse("Ho3"), Error);
  EXPECT_THROW(Syllable::parse("ho3a"), Error);
}

TEST(Phonemes, SequenceStringAndSlice) {
  const auto p = PhonemeSequence::parse("tien1 gong1 , log8 i3");
  EXPECT_EQ(p.size(), 4u);
  EXPECT_EQ(p.pause_positions, (std::set<std::size_t>{2}));
  EXPECT_EQ(p.str(), "tien1 gong1 , log8 i3");
  EXPECT_TRUE(p.pauses_valid());
  const auto tail = p.slice(1, 4);
  EXPECT_EQ(tail.str(), "gong1 , log8 i3");
  EXPECT_TRUE(p.slice(2, 4).pause_positions.empty());
  PhonemeSequence bad = p;
  bad.pause_positions.insert(0);
  EXPECT_FALSE(bad.pauses_valid());
}

CorpusManifest two_records() {
  CorpusManifest m;
  m.records.push_back(make_utterance("a"));
  m.records.push_back(make_utterance("b", Dialect::kHailu, SourceKind::radio()));
  return m;
}

TEST(Validation, ValidManifestHasNoViolations) {
  EXPECT_TRUE(validate_manifest(two_records()).ok());
}

TEST(Validation, DuplicateIdNamed) {
  auto m = two_records();
  m.records[1].id = "a";
  const auto r = validate_manifest(m);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].record_id, "a");
  EXPECT_NE(r.summary().find("duplicate id 'a'"), std::string::npos);
}

TEST(Validation, AlignedWithoutPhonemes) {
  auto m = two_records();
  m.records[0].stage = Stage::kAligned;
  const auto r = validate_manifest(m);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].record_id, "a");
}

TEST(Validation, NegativeOrZeroDurations) {
  auto m = two_records();
  m.records[0].duration_s = -1;
  m.records[0].stage = Stage::kFinal;
  m.records[0].phonemes = PhonemeSequence::parse("tien1 gong1");
  EXPECT_EQ(validate_manifest(m).violations.size(), 1u);
  m.records[0].duration_s = 0;
  EXPECT_EQ(validate_manifest(m).violations.size(), 1u);
  m.records[0].stage = Stage::kScraped;
  m.records[0].phonemes.reset();
  EXPECT_TRUE(validate_manifest(m).ok());
}

TEST(Validation, StrictModeNamesMissingAudio) {
  testing::TempDir dir;
  auto m = two_records();
  m.records[0].audio_path = (dir / "a.wav").string();
  m.records[1].audio_path = (dir / "b.wav").string();
  testing::write_text(dir / "a.wav", "x");
  EXPECT_TRUE(validate_manifest(m).ok());
  const auto r = validate_manifest(m, ValidationMode::kStrict);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].record_id, "b");
  EXPECT_NE(r.violations[0].message.find((dir / "b.wav").string()), std::string::npos);
}

TEST(Validation, PureAndIdempotent) {
  auto m = two_records();
  m.records[1].id = "a";
  const auto before = m;
  const auto r1 = validate_manifest(m);
  const auto r2 = validate_manifest(m);
  EXPECT_EQ(m, before);
  EXPECT_EQ(r1.summary(), r2.summary());
}

TEST(PipelineConfigTest, DefaultsAndConstraints) {
  PipelineConfig c;
  EXPECT_DOUBLE_EQ(c.silence_split_threshold_s, 0.05);
  EXPECT_DOUBLE_EQ(c.silence_pad_s, 0.025);
  EXPECT_DOUBLE_EQ(c.concat_pause_s, 0.05);
  EXPECT_EQ(c.lm_order, 3);
  EXPECT_EQ(c.tones(Dialect::kZhaoan), (std::set<int>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.concat_pause_s = 0.06;
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.discount_d = 1.0;
  EXPECT_THROW(bad.validate(), Error);
  bad.discount_d = -0.1;
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.lm_weight_lambda = -1;
  EXPECT_THROW(bad.validate(), Error);
}

}  // namespace
}  // namespace forge
