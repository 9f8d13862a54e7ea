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

#include "forge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace forge {

std::optional<double> StatsRow::chars_per_sec() const {
  if (seconds <= 0) return std::nullopt;
  return static_cast<double>(chars) / seconds;
}

StatsRow& StatsRow::operator+=(const StatsRow& o) {
  n_utts += o.n_utts;
  seconds += o.seconds;
  chars += o.chars;
  return *this;
}

const StatsRow* StatsTable::find(Dialect d, const SourceKind& s) const {
  for (const auto& r : rows)
    if (r.dialect == d && r.source == s) return &r.stats;
  return nullptr;
}

StatsRow StatsTable::dialect_total(Dialect d) const {
  StatsRow t;
  for (const auto& r : rows)
    if (r.dialect == d) t += r.stats;
  return t;
}

StatsRow StatsTable::source_total(const SourceKind& s) const {
  StatsRow t;
  for (const auto& r : rows)
    if (r.source == s) t += r.stats;
  return t;
}

StatsRow StatsTable::grand_total() const {
  StatsRow t;
  for (const auto& r : rows) t += r.stats;
  return t;
}

std::vector<SourceKind> StatsTable::sources() const {
  std::vector<SourceKind> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.source) == out.end()) out.push_back(r.source);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Neumaier summation over the values in ascending order.
double stable_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double sum = 0, comp = 0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string cps_cell(const StatsRow& r) {
  auto c = r.chars_per_sec();
  return c ? fixed(*c, 2) : "-";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? " " + s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

StatsTable compute_stats(const CorpusManifest& manifest) {
  struct Acc {
    std::size_t n = 0;
    std::vector<double> durations;
    std::size_t chars = 0;
  };
  std::map<std::pair<Dialect, SourceKind>, Acc> acc;
  for (const auto& u : manifest.records) {
    auto& a = acc[{u.dialect, u.source}];
    ++a.n;
    a.durations.push_back(u.duration_s);
    a.chars += text::count_spoken_chars(u.text);
  }
  StatsTable table;
  for (auto& [key, a] : acc)
    table.rows.push_back({key.first, key.second,
                          StatsRow{a.n, stable_sum(std::move(a.durations)), a.chars}});
  return table;
}

std::string StatsTable::render_text() const {
  const auto srcs = sources();
  std::ostringstream os;
  os << pad("Dialect", 12);
  for (const auto& s : srcs) os << pad(s.label(), 28);
  os << "Total\n" << pad("", 12);
  for (std::size_t i = 0; i < srcs.size(); ++i)
    os << lpad("#Utt.", 8) << lpad("Hours", 9) << lpad("#Char/Sec", 10) << " ";
  os << lpad("Hours", 8) << "\n";

  auto line = [&](const std::string& label, auto&& cell, const StatsRow& total) {
    os << pad(label, 12);
    for (const auto& s : srcs) {
      const StatsRow r = cell(s);
      if (r.n_utts == 0) {
        os << lpad("-", 8) << lpad("-", 9) << lpad("-", 10) << " ";
      } else {
        os << lpad(std::to_string(r.n_utts), 8) << lpad(fixed(r.hours(), 2), 9)
           << lpad(cps_cell(r), 10) << " ";
      }
    }
    os << lpad(fixed(total.hours(), 2), 8) << "\n";
  };
  for (auto d : kAllDialects) {
    const auto total = dialect_total(d);
    if (total.n_utts == 0) continue;
    line(std::string(dialect_name(d)),
         [&](const SourceKind& s) {
           const auto* r = find(d, s);
           return r ? *r : StatsRow{};
         },
         total);
  }
  line("Total", [&](const SourceKind& s) { return source_total(s); }, grand_total());
  return os.str();
}

std::string StatsTable::render_csv() const {
  std::ostringstream os;
  os << "dialect,source,n_utts,hours,chars,chars_per_sec\n";
  auto row = [&](const std::string& d, const std::string& s, const StatsRow& r) {
    const auto cps = r.chars_per_sec();
    os << d << ',' << s << ',' << r.n_utts << ',' << fixed(r.hours(), 6) << ','
       << r.chars << ',' << (cps ? fixed(*cps, 6) : "") << "\n";
  };
  for (const auto& r : rows)
    row(std::string(dialect_name(r.dialect)), r.source.label(), r.stats);
  for (auto d : kAllDialects) {
    const auto t = dialect_total(d);
    if (t.n_utts) row(std::string(dialect_name(d)), "ALL", t);
  }
  for (const auto& s : sources()) row("ALL", s.label(), source_total(s));
  row("ALL", "ALL", grand_total());
  return os.str();
}

double retention(const StatsTable& before, const StatsTable& after) {
  const double b = before.grand_total().seconds;
  if (!(b > 0)) throw Error("retention needs a non-empty 'before' table");
  return 100.0 * after.grand_total().seconds / b;
}

std::string format_percent(double pct) { return fixed(pct, 2) + "%"; }

std::string format_fixed(double v, int digits) { return fixed(v, digits); }

}  // namespace forge
