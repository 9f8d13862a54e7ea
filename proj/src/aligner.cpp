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

#include "forge/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "forge/manifest_io.hpp"

namespace forge {

AcousticScores::AcousticScores(double frame_period_s,
                               std::vector<std::string> symbols,
                               std::vector<double> row_major)
    : frame_period_s_(frame_period_s),
      symbols_(std::move(symbols)),
      scores_(std::move(row_major)),
      frames_(0) {
  if (!(frame_period_s_ > 0)) throw Error("frame period must be positive");
  if (symbols_.empty()) throw Error("score inventory is empty");
  std::unordered_set<std::string> uniq(symbols_.begin(), symbols_.end());
  if (uniq.size() != symbols_.size()) throw Error("duplicate symbol in inventory");
  if (scores_.empty() || scores_.size() % symbols_.size() != 0)
    throw Error("score matrix does not match the inventory size");
  for (double v : scores_)
    if (!std::isfinite(v)) throw Error("non-finite acoustic score");
  frames_ = scores_.size() / symbols_.size();
}

int AcousticScores::symbol_index(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return static_cast<int>(i);
  return -1;
}

AcousticScores AcousticScores::parse(std::string_view file) {
  std::istringstream in{std::string(file)};
  std::string line;
  std::size_t lineno = 0;
  double period = 0;
  std::vector<std::string> symbols;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (period == 0) {
      const std::string prefix = "frame_period_s=";
      if (t.rfind(prefix, 0) != 0)
        throw Error("score file must start with frame_period_s=<seconds>");
      period = std::stod(t.substr(prefix.size()));
      continue;
    }
    if (symbols.empty()) {
      if (t.rfind("symbols=", 0) == 0) t = t.substr(8);
      symbols = text::split_ws(t);
      continue;
    }
    const auto fields = text::split_ws(t);
    if (fields.size() != symbols.size())
      throw Error("score file line " + std::to_string(lineno) + ": expected " +
                  std::to_string(symbols.size()) + " scores");
    for (const auto& f : fields) {
      try {
        values.push_back(std::stod(f));
      } catch (const std::logic_error&) {
        throw Error("score file line " + std::to_string(lineno) +
                    ": malformed score '" + f + "'");
      }
    }
  }
  return AcousticScores(period, std::move(symbols), std::move(values));
}

AcousticScores AcousticScores::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

std::string AcousticScores::dump() const {
  std::ostringstream os;
  os << "frame_period_s=" << text::format_decimal(frame_period_s_, 3) << "\n";
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    os << (i ? " " : "") << symbols_[i];
  os << "\n";
  os.precision(17);
  for (std::size_t t = 0; t < frames_; ++t) {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      os << (i ? " " : "") << at(t, i);
    os << "\n";
  }
  return os.str();
}

bool Alignment::partitions(std::size_t n_frames) const {
  std::size_t expect = 0;
  for (const auto& s : segments) {
    if (s.start_frame != expect || s.end_frame <= s.start_frame) return false;
    expect = s.end_frame;
  }
  return expect == n_frames && n_frames > 0;
}

namespace {

struct State {
  std::size_t column;
  bool optional;
};

}  // namespace

Alignment force_align(const AcousticScores& scores,
                      std::span<const std::string> phones,
                      bool allow_optional_silence) {
  std::vector<State> states;
  int sil = -1;
  if (allow_optional_silence) {
    sil = scores.symbol_index(kSilence);
    if (sil < 0) throw Error("optional silence needs a SIL column");
  }
  auto column = [&](const std::string& p) {
    const int c = scores.symbol_index(p);
    if (c < 0) throw Error("unknown phone symbol '" + p + "'");
    return static_cast<std::size_t>(c);
  };
  if (phones.empty()) {
    if (!allow_optional_silence) throw Error("nothing to align");
    states.push_back({static_cast<std::size_t>(sil), false});
  } else {
    for (const auto& p : phones) {
      if (allow_optional_silence)
        states.push_back({static_cast<std::size_t>(sil), true});
      states.push_back({column(p), false});
    }
    if (allow_optional_silence)
      states.push_back({static_cast<std::size_t>(sil), true});
  }

  const std::size_t n = scores.num_frames();
  if (n < phones.size())
    throw Error("cannot align " + std::to_string(phones.size()) +
                " phones to " + std::to_string(n) + " frames");

  const std::size_t ns = states.size();
  constexpr double kNeg = -std::numeric_limits<double>::infinity();
  std::vector<double> prev(ns, kNeg), cur(ns, kNeg);
  std::vector<std::uint8_t> back(n * ns, 0);

  prev[0] = scores.at(0, states[0].column);
  if (ns > 1 && states[0].optional) prev[1] = scores.at(0, states[1].column);

  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t s = 0; s < ns; ++s) {
      double best = prev[s];
      std::uint8_t step = 0;
      if (s >= 1 && prev[s - 1] > best) {
        best = prev[s - 1];
        step = 1;
      }
      if (s >= 2 && states[s - 1].optional && prev[s - 2] > best) {
        best = prev[s - 2];
        step = 2;
      }
      cur[s] = scores.at(t, states[s].column) + best;
      back[t * ns + s] = step;
    }
    std::swap(prev, cur);
  }

  std::size_t end = ns - 1;
  if (ns > 1 && states[ns - 1].optional && prev[ns - 2] >= prev[ns - 1])
    end = ns - 2;
  if (prev[end] == kNeg) throw Error("no admissible alignment");

  Alignment out;
  out.total_score = prev[end];
  std::vector<std::size_t> path(n);
  std::size_t s = end;
  for (std::size_t t = n; t-- > 0;) {
    path[t] = s;
    if (t > 0) s -= back[t * ns + s];
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (out.segments.empty() || path[t] != path[t - 1]) {
      out.segments.push_back(
          {scores.symbols()[states[path[t]].column], t, t + 1});
    } else {
      out.segments.back().end_frame = t + 1;
    }
  }
  if (!out.partitions(n)) throw Error("internal: alignment does not partition frames");
  return out;
}

std::vector<std::pair<double, double>> silence_intervals(const Alignment& alignment,
                                                         double frame_period_s) {
  std::vector<std::pair<double, double>> out;
  std::size_t run_start = 0, run_end = 0;
  bool in_run = false;
  for (const auto& seg : alignment.segments) {
    if (seg.symbol == kSilence) {
      if (in_run && seg.start_frame == run_end) {
        run_end = seg.end_frame;
      } else {
        if (in_run)
          out.emplace_back(static_cast<double>(run_start) * frame_period_s,
                           static_cast<double>(run_end) * frame_period_s);
        run_start = seg.start_frame;
        run_end = seg.end_frame;
        in_run = true;
      }
    } else if (in_run) {
      out.emplace_back(static_cast<double>(run_start) * frame_period_s,
                       static_cast<double>(run_end) * frame_period_s);
      in_run = false;
    }
  }
  if (in_run)
    out.emplace_back(static_cast<double>(run_start) * frame_period_s,
                     static_cast<double>(run_end) * frame_period_s);
  return out;
}

AcousticScores energy_scores(std::span<const float> samples, int sample_rate,
                             std::span<const std::string> phones,
                             double frame_period_s, double energy_floor) {
  if (sample_rate <= 0) throw Error("sample rate must be positive");
  const auto frame_len = static_cast<std::size_t>(
      std::max<long>(1, std::lround(frame_period_s * sample_rate)));
  const std::size_t n = std::max<std::size_t>(
      1, (samples.size() + frame_len - 1) / frame_len);

  std::vector<std::string> symbols{kSilence};
  for (const auto& p : phones)
    if (std::find(symbols.begin(), symbols.end(), p) == symbols.end())
      symbols.push_back(p);

  std::vector<bool> speech(n, false);
  std::size_t speech_frames = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t a = t * frame_len;
    const std::size_t b = std::min(samples.size(), a + frame_len);
    double e = 0;
    for (std::size_t i = a; i < b; ++i) e += double(samples[i]) * samples[i];
    const double rms = b > a ? std::sqrt(e / static_cast<double>(b - a)) : 0.0;
    speech[t] = rms >= energy_floor;
    speech_frames += speech[t];
  }

  std::vector<double> m(n * symbols.size());
  std::size_t j = 0;
  for (std::size_t t = 0; t < n; ++t) {
    double* row = &m[t * symbols.size()];
    if (!speech[t]) {
      row[0] = 0;
      for (std::size_t c = 1; c < symbols.size(); ++c) row[c] = -10;
      continue;
    }
    row[0] = -10;
    for (std::size_t c = 1; c < symbols.size(); ++c) row[c] = -2;
    if (!phones.empty()) {
      const auto k = j * phones.size() / speech_frames;
      const auto col = std::find(symbols.begin(), symbols.end(), phones[k]) -
                       symbols.begin();
      row[col] = 0;
    }
    ++j;
  }
  return AcousticScores(frame_period_s, std::move(symbols), std::move(m));
}

}  // namespace forge
