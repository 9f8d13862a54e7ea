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

#include <algorithm>
#include <random>

#include "forge/manifest_io.hpp"
#include "forge/stats.hpp"
#include "support/fixtures.hpp"

namespace forge {
namespace {

using testing::make_utterance;

const std::filesystem::path kData = FORGE_DATA_DIR;

TEST(Stats, TableOneTotals) {
  const auto t = compute_stats(read_manifest(kData / "table1.jsonl"));
  const std::vector<std::pair<Dialect, double>> want = {
      {Dialect::kSixian, 65.15}, {Dialect::kHailu, 54.77},  {Dialect::kDapu, 26.44},
      {Dialect::kRaoping, 15.19}, {Dialect::kZhaoan, 13.16}, {Dialect::kNansixian, 5.72}};
  for (const auto& [d, h] : want) {
    EXPECT_NEAR(t.dialect_total(d).hours(), h, 0.005) << dialect_name(d);
    EXPECT_EQ(format_fixed(t.dialect_total(d).hours(), 2), format_fixed(h, 2));
  }
  EXPECT_EQ(format_fixed(t.grand_total().hours(), 2), "180.43");
  EXPECT_EQ(format_fixed(t.source_total(SourceKind::dict()).hours(), 2), "29.81");
  EXPECT_EQ(format_fixed(t.source_total(SourceKind::exam()).hours(), 2), "32.34");
  EXPECT_EQ(format_fixed(t.source_total(SourceKind::radio()).hours(), 2), "118.28");
  // No EXAM or RADIO rows for Nansixian.
  EXPECT_EQ(t.find(Dialect::kNansixian, SourceKind::exam()), nullptr);
}

TEST(Stats, TableTwoTotals) {
  const auto t = compute_stats(read_manifest(kData / "table2.jsonl"));
  EXPECT_EQ(format_fixed(t.grand_total().hours(), 2), "140.31");
  EXPECT_EQ(format_fixed(t.dialect_total(Dialect::kSixian).hours(), 2), "51.01");
}

TEST(Stats, RetentionFormatting) {
  auto table = [](double hours) {
    CorpusManifest m;
    m.records.push_back(make_utterance("x", Dialect::kSixian, SourceKind::radio(), hours * 3600));
    return compute_stats(m);
  };
  EXPECT_EQ(format_percent(retention(table(180.53), table(140.31))), "77.72%");
  EXPECT_EQ(format_percent(retention(table(180.43), table(140.31))), "77.76%");
  EXPECT_EQ(format_percent(retention(table(2), table(2))), "100.00%");
  EXPECT_EQ(format_percent(retention(table(2), table(1))), "50.00%");
  EXPECT_THROW(retention(compute_stats({}), table(1)), Error);
}

TEST(Stats, CharsPerSecondCountsSpokenCharacters) {
  CorpusManifest m;
  m.records.push_back(make_utterance("a", Dialect::kHailu, SourceKind::exam(), 2.0, "天光，落雨。"));
  m.records.push_back(make_utterance("b", Dialect::kHailu, SourceKind::exam(), 2.0, "食飯"));
  const auto t = compute_stats(m);
  const auto* r = t.find(Dialect::kHailu, SourceKind::exam());
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->n_utts, 2u);
  EXPECT_EQ(r->chars, 6u);
  EXPECT_DOUBLE_EQ(*r->chars_per_sec(), 1.5);
  EXPECT_FALSE(StatsRow{}.chars_per_sec());
}

TEST(Stats, AdditiveAndOrderIndependent) {
  CorpusManifest m;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dur(0.1, 30.0);
  const std::vector<SourceKind> srcs = {SourceKind::dict(), SourceKind::exam(),
                                        SourceKind::radio()};
  for (int i = 0; i < 200; ++i)
    m.records.push_back(make_utterance("u" + std::to_string(i),
                                       kAllDialects[static_cast<std::size_t>(i % 6)],
                                       srcs[static_cast<std::size_t>(i % 3)], dur(rng), "天光"));
  const auto t = compute_stats(m);
  StatsRow by_rows, by_dialect, by_source;
  for (const auto& r : t.rows) by_rows += r.stats;
  for (auto d : kAllDialects) by_dialect += t.dialect_total(d);
  for (const auto& s : t.sources()) by_source += t.source_total(s);
  EXPECT_EQ(by_rows.n_utts, 200u);
  EXPECT_NEAR(by_rows.seconds, t.grand_total().seconds, 1e-9);
  EXPECT_NEAR(by_dialect.seconds, t.grand_total().seconds, 1e-9);
  EXPECT_NEAR(by_source.seconds, t.grand_total().seconds, 1e-9);
  EXPECT_EQ(by_dialect.chars, 400u);

  auto shuffled = m;
  std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);
  const auto t2 = compute_stats(shuffled);
  EXPECT_EQ(t2.render_csv(), t.render_csv());
  EXPECT_EQ(t2.grand_total().seconds, t.grand_total().seconds);
}

TEST(Stats, EmptyManifest) {
  const auto t = compute_stats({});
  EXPECT_TRUE(t.rows.empty());
  EXPECT_EQ(t.grand_total().n_utts, 0u);
  EXPECT_EQ(t.render_csv(), "dialect,source,n_utts,hours,chars,chars_per_sec\nALL,ALL,0,0.000000,0,\n");
}

TEST(Stats, RowOrderAndRendering) {
  CorpusManifest m;
  m.records.push_back(make_utterance("r", Dialect::kDapu, SourceKind::radio(), 3600));
  m.records.push_back(make_utterance("d", Dialect::kDapu, SourceKind::dict(), 1800));
  m.records.push_back(make_utterance("s", Dialect::kSixian, SourceKind::exam(), 900));
  const auto t = compute_stats(m);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].dialect, Dialect::kSixian);
  EXPECT_EQ(t.rows[1].source, SourceKind::dict());
  EXPECT_EQ(t.rows[2].source, SourceKind::radio());
  const auto text = t.render_text();
  EXPECT_NE(text.find("Sixian"), std::string::npos);
  EXPECT_NE(text.find("1.50"), std::string::npos);  // Dapu total
  EXPECT_NE(text.find("1.75"), std::string::npos);  // grand total
  const auto csv = t.render_csv();
  EXPECT_NE(csv.find("Dapu,ALL,2,1.500000,4,"), std::string::npos);
  EXPECT_NE(csv.find("ALL,ALL,3,1.750000,6,"), std::string::npos);
}

TEST(Stats, FormatFixed) {
  EXPECT_EQ(format_fixed(180.4333, 2), "180.43");
  EXPECT_EQ(format_fixed(0.005, 0), "0");
  EXPECT_EQ(format_fixed(2.5, 3), "2.500");
  EXPECT_EQ(format_percent(77.7156), "77.72%");
}

}  // namespace
}  // namespace forge
