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
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/text.hpp"

namespace forge {

using TokenSeq = std::vector<std::string>;

// Character tokens of Hakka text: one token per code point, punctuation and
// whitespace dropped.
TokenSeq char_tokens(std::string_view text);

// Count-based n-gram model with interpolated absolute discounting:
//
//   P(w | c) = max(N(c, w) - D, 0) / N(c) + D * N1+(c) / N(c) * P(w | c')
//
// where c' drops the oldest token of c. Unseen contexts defer to c'. Below
// unigrams sits the uniform distribution over the vocabulary, so every
// context normalizes over the vocabulary. Sentences are left-padded with
// order-1 "<s>" tokens; there is no end-of-sentence event. Tokens outside
// the vocabulary get the fixed floor 1 / (10 |V|).
class NGramLM {
 public:
  static constexpr const char* kBos = "<s>";

  NGramLM() = default;

  // Throws forge::Error on an empty corpus, order < 1, or D outside [0, 1).
  // `extra_vocab` joins the vocabulary with zero counts.
  static NGramLM train(std::span<const TokenSeq> sentences, int order,
                       double discount, std::span<const std::string> extra_vocab = {});

  int order() const { return order_; }
  // Per order, index 0 is unigrams.
  const std::vector<double>& discounts() const { return discounts_; }
  const std::set<std::string>& vocabulary() const { return vocab_; }
  bool in_vocabulary(const std::string& w) const { return vocab_.count(w) > 0; }
  double unk_floor() const;

  // P(w | context) using exactly `context.size() + 1` as the n-gram order.
  double conditional(const std::string& w, std::span<const std::string> context) const;
  // P(w | history), padding/truncating history to order-1 tokens.
  double prob(const std::string& w, std::span<const std::string> history) const;

  // Observed contexts of every order (the empty context for unigrams).
  std::vector<TokenSeq> observed_contexts() const;

  // Plain-text count dump; parse(dump()) reproduces the model.
  std::string dump() const;
  static NGramLM parse(std::string_view dump);
  void save(const std::filesystem::path& path) const;
  static NGramLM load(const std::filesystem::path& path);

 private:
  struct ContextCounts {
    long total = 0;
    std::map<std::string, long> next;
  };
  using Table = std::map<TokenSeq, ContextCounts>;

  void add_count(const TokenSeq& context, const std::string& w, long n);

  int order_ = 0;
  std::vector<double> discounts_;
  std::set<std::string> vocab_;
  // tables_[k] holds contexts of length k.
  std::vector<Table> tables_;
};

// Per-phrase model biased towards one transcript:
//
//   P(w | c) = w_bias * P_transcript(w | c) + (1 - w_bias) * P_background(w | c)
//
// with w_bias = 1 - D. The transcript model has the background's order and
// is the unsmoothed (D = 0) estimate over the union vocabulary, so the
// transcript is the most likely sentence under it. Background
// probabilities are carried onto the union vocabulary by giving each new
// token the background's floor and renormalizing. Holds a reference to
// `background`, which must outlive this object.
class BiasedLM {
 public:
  BiasedLM(const NGramLM& background, const TokenSeq& transcript, double discount);

  double bias_weight() const { return w_bias_; }
  const NGramLM& background() const { return *background_; }
  const NGramLM& transcript_model() const { return transcript_; }
  const std::set<std::string>& vocabulary() const { return transcript_.vocabulary(); }
  double unk_floor() const { return transcript_.unk_floor(); }

  double prob(const std::string& w, std::span<const std::string> history) const;
  // Background probability on the union vocabulary (the w_bias = 0 limit).
  double background_prob(const std::string& w,
                         std::span<const std::string> history) const;

 private:
  const NGramLM* background_;
  NGramLM transcript_;
  double w_bias_;
  double background_scale_;
};

BiasedLM build_biased_lm(const NGramLM& background, const TokenSeq& transcript,
                         double discount);

// Natural-log sentence probability with "<s>" padding. Zero-probability
// events score the model's unknown-token floor, so the result is finite.
double lm_logprob(const NGramLM& lm, std::span<const std::string> tokens);
double lm_logprob(const BiasedLM& lm, std::span<const std::string> tokens);

// log P_biased - log P_background summed over the sentence. Zero for every
// sentence as w_bias -> 0.
double bias_gain(const BiasedLM& lm, std::span<const std::string> tokens);

}  // namespace forge
