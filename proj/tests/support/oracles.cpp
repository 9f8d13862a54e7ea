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

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace forge::testing {

namespace {

void enumerate(const std::u32string& text, std::size_t pos,
               const std::vector<std::u32string>& words, std::vector<std::u32string>& current,
               const std::function<void(const std::vector<std::u32string>&)>& visit) {
  if (pos == text.size()) {
    visit(current);
    return;
  }
  std::set<std::u32string> seen;
  for (const auto& w : words) {
    if (w.empty() || !seen.insert(w).second) continue;
    if (text.compare(pos, w.size(), w) != 0) continue;
    current.push_back(w);
    enumerate(text, pos + w.size(), words, current, visit);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::u32string> brute_force_leftmost_longest(
    const std::u32string& text, const std::vector<std::u32string>& words) {
  std::vector<std::u32string> best, current;
  bool found = false;
  auto lengths = [](const std::vector<std::u32string>& seg) {
    std::vector<std::size_t> out;
    for (const auto& w : seg) out.push_back(w.size());
    return out;
  };
  enumerate(text, 0, words, current, [&](const std::vector<std::u32string>& seg) {
    if (!found || lengths(seg) > lengths(best)) {
      best = seg;
      found = true;
    }
  });
  return best;
}

std::size_t count_segmentations(const std::u32string& text,
                                const std::vector<std::u32string>& words) {
  std::size_t n = 0;
  std::vector<std::u32string> current;
  enumerate(text, 0, words, current, [&](const auto&) { ++n; });
  return n;
}

AlignOracleResult brute_force_align(const AcousticScores& scores,
                                    const std::vector<std::string>& phones,
                                    bool optional_silence) {
  struct Slot {
    std::size_t column;
    std::size_t min_frames;
  };
  std::vector<Slot> slots;
  const auto col = [&](const std::string& s) {
    return static_cast<std::size_t>(scores.symbol_index(s));
  };
  if (phones.empty()) {
    if (optional_silence) slots.push_back({col(kSilence), 1});
  } else {
    for (const auto& p : phones) {
      if (optional_silence) slots.push_back({col(kSilence), 0});
      slots.push_back({col(p), 1});
    }
    if (optional_silence) slots.push_back({col(kSilence), 0});
  }
  const std::size_t n = scores.num_frames();
  AlignOracleResult result;
  if (slots.empty()) return result;

  std::function<void(std::size_t, std::size_t, double)> go = [&](std::size_t slot,
                                                                  std::size_t t, double acc) {
    if (slot == slots.size()) {
      if (t != n) return;
      if (!result.feasible || acc > result.best) {
        result.best = acc;
        result.paths = 1;
        result.feasible = true;
      } else if (acc == result.best) {
        ++result.paths;
      }
      return;
    }
    // Frames still owed to later phones.
    std::size_t owed = 0;
    for (std::size_t k = slot + 1; k < slots.size(); ++k) owed += slots[k].min_frames;
    if (t + owed > n) return;
    const std::size_t max_len = n - t - owed;
    double sum = acc;
    for (std::size_t len = 0; len <= max_len; ++len) {
      if (len > 0) sum += scores.at(t + len - 1, slots[slot].column);
      if (len >= slots[slot].min_frames) go(slot + 1, t + len, sum);
    }
  };
  go(0, 0, 0.0);
  return result;
}

double path_score(const AcousticScores& scores, const Alignment& alignment) {
  double acc = 0;
  for (const auto& seg : alignment.segments) {
    const auto c = static_cast<std::size_t>(scores.symbol_index(seg.symbol));
    for (std::size_t t = seg.start_frame; t < seg.end_frame; ++t) acc += scores.at(t, c);
  }
  return acc;
}

DirectLM::DirectLM(std::vector<TokenSeq> sentences, int order, double discount,
                   std::vector<std::string> extra_vocab)
    : order_(order), d_(discount) {
  std::set<std::string> v(extra_vocab.begin(), extra_vocab.end());
  for (auto& s : sentences) {
    TokenSeq p(static_cast<std::size_t>(order - 1), NGramLM::kBos);
    p.insert(p.end(), s.begin(), s.end());
    v.insert(s.begin(), s.end());
    padded_.push_back(std::move(p));
  }
  vocab_.assign(v.begin(), v.end());
}

long DirectLM::count(const TokenSeq& ngram) const {
  // Occurrences of `ngram` ending at a real (non-padding) token.
  long n = 0;
  const std::size_t pad = static_cast<std::size_t>(order_ - 1);
  for (const auto& s : padded_) {
    for (std::size_t i = pad; i < s.size(); ++i) {
      if (i + 1 < ngram.size()) continue;
      const std::size_t start = i + 1 - ngram.size();
      if (std::equal(ngram.begin(), ngram.end(), s.begin() + static_cast<std::ptrdiff_t>(start)))
        ++n;
    }
  }
  return n;
}

double DirectLM::conditional(const std::string& w, const TokenSeq& context) const {
  if (std::find(vocab_.begin(), vocab_.end(), w) == vocab_.end())
    return 1.0 / (10.0 * static_cast<double>(vocab_.size()));
  double lower = 1.0 / static_cast<double>(vocab_.size());
  for (std::size_t k = 0; k <= context.size(); ++k) {
    const TokenSeq ctx(context.end() - static_cast<std::ptrdiff_t>(k), context.end());
    long total = 0, distinct = 0;
    for (const auto& x : vocab_) {
      TokenSeq g = ctx;
      g.push_back(x);
      const long c = count(g);
      total += c;
      if (c > 0) ++distinct;
    }
    if (total == 0) continue;
    TokenSeq g = ctx;
    g.push_back(w);
    const double c = static_cast<double>(count(g));
    lower = std::max(c - d_, 0.0) / static_cast<double>(total) +
            d_ * static_cast<double>(distinct) / static_cast<double>(total) * lower;
  }
  return lower;
}

double DirectLM::prob(const std::string& w, const TokenSeq& history) const {
  TokenSeq full(static_cast<std::size_t>(order_ - 1), NGramLM::kBos);
  full.insert(full.end(), history.begin(), history.end());
  const TokenSeq ctx(full.end() - (order_ - 1), full.end());
  return conditional(w, ctx);
}

double DirectLM::logprob(const TokenSeq& tokens) const {
  const double floor = 1.0 / (10.0 * static_cast<double>(vocab_.size()));
  double acc = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TokenSeq hist(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(i));
    const double p = prob(tokens[i], hist);
    acc += std::log(p > 0 ? p : floor);
  }
  return acc;
}

}  // namespace forge::testing
