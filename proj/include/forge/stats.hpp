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

#include <optional>
#include <string>
#include <vector>

#include "forge/corpus.hpp"

namespace forge {

struct StatsRow {
  std::size_t n_utts = 0;
  double seconds = 0;
  std::size_t chars = 0;

  double hours() const { return seconds / 3600.0; }
  // Undefined for rows without audio.
  std::optional<double> chars_per_sec() const;

  StatsRow& operator+=(const StatsRow& o);
};

// Counts, hours and characters per second per (dialect, source), with
// per-dialect, per-source and grand totals. Rows are ordered by dialect
// (Sixian .. Nansixian) then source (DICT, EXAM, RADIO, others by name).
struct StatsTable {
  struct Row {
    Dialect dialect;
    SourceKind source;
    StatsRow stats;
  };
  std::vector<Row> rows;

  const StatsRow* find(Dialect d, const SourceKind& s) const;
  StatsRow dialect_total(Dialect d) const;
  StatsRow source_total(const SourceKind& s) const;
  StatsRow grand_total() const;
  std::vector<SourceKind> sources() const;

  // Aligned text table: one line per dialect, one column group per source.
  std::string render_text() const;
  std::string render_csv() const;
};

// Characters exclude punctuation and whitespace. Per-row sums are
// accumulated in manifest-independent order, so record order never changes
// the result.
StatsTable compute_stats(const CorpusManifest& manifest);

// 100 * after / before on grand-total hours. Throws forge::Error when
// `before` has no audio.
double retention(const StatsTable& before, const StatsTable& after);
// "77.72%"
std::string format_percent(double pct);
// Fixed-point with `digits` decimals, e.g. format_fixed(180.4333, 2) == "180.43".
std::string format_fixed(double v, int digits);

}  // namespace forge
