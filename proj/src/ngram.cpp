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

#include "forge/ngram.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "forge/manifest_io.hpp"

namespace forge {

TokenSeq char_tokens(std::string_view s) {
  TokenSeq out;
  for (const auto& cp : text::decode_utf8(s))
    if (!text::is_punctuation(cp.value) && !text::is_space(cp.value))
      out.push_back(text::to_utf8(cp.value));
  return out;
}

// ---------------------------------------------------------------- NGramLM

void NGramLM::add_count(const TokenSeq& context, const std::string& w, long n) {
  auto& cc = tables_[context.size()][context];
  cc.total += n;
  cc.next[w] += n;
}

NGramLM NGramLM::train(std::span<const TokenSeq> sentences, int order,
                       double discount, std::span<const std::string> extra_vocab) {
  if (order < 1) throw Error("n-gram order must be at least 1");
  if (!(discount >= 0 && discount < 1))
    throw Error("discount must lie in [0, 1)");
  NGramLM lm;
  lm.order_ = order;
  lm.discounts_.assign(static_cast<std::size_t>(order), discount);
  lm.tables_.resize(static_cast<std::size_t>(order));
  const std::size_t pad = static_cast<std::size_t>(order - 1);
  std::size_t tokens = 0;
  for (const auto& sentence : sentences) {
    TokenSeq padded(pad, kBos);
    padded.insert(padded.end(), sentence.begin(), sentence.end());
    for (std::size_t p = pad; p < padded.size(); ++p) {
      const auto& w = padded[p];
      if (w == kBos) throw Error("training data contains the reserved token <s>");
      lm.vocab_.insert(w);
      for (std::size_t k = 0; k <= pad; ++k) {
        TokenSeq ctx(padded.begin() + static_cast<std::ptrdiff_t>(p - k),
                     padded.begin() + static_cast<std::ptrdiff_t>(p));
        lm.add_count(ctx, w, 1);
      }
      ++tokens;
    }
  }
  if (tokens == 0) throw Error("cannot train an n-gram model on an empty corpus");
  for (const auto& w : extra_vocab)
    if (w != kBos) lm.vocab_.insert(w);
  return lm;
}

double NGramLM::unk_floor() const {
  return 1.0 / (10.0 * static_cast<double>(vocab_.size()));
}

double NGramLM::conditional(const std::string& w,
                            std::span<const std::string> context) const {
  if (context.size() >= static_cast<std::size_t>(order_))
    throw Error("context longer than model order - 1");
  if (!in_vocabulary(w)) return unk_floor();
  double p = 1.0 / static_cast<double>(vocab_.size());
  for (std::size_t k = 0; k <= context.size(); ++k) {
    TokenSeq ctx(context.end() - static_cast<std::ptrdiff_t>(k), context.end());
    auto it = tables_[k].find(ctx);
    if (it == tables_[k].end() || it->second.total == 0) continue;
    const auto& cc = it->second;
    const double d = discounts_[k];
    const double total = static_cast<double>(cc.total);
    auto nit = cc.next.find(w);
    const double c = nit == cc.next.end() ? 0.0 : static_cast<double>(nit->second);
    const double alpha = d * static_cast<double>(cc.next.size()) / total;
    p = std::max(c - d, 0.0) / total + alpha * p;
  }
  return p;
}

double NGramLM::prob(const std::string& w,
                     std::span<const std::string> history) const {
  const std::size_t need = static_cast<std::size_t>(order_ - 1);
  TokenSeq ctx;
  ctx.reserve(need);
  if (history.size() < need) ctx.assign(need - history.size(), kBos);
  const std::size_t take = std::min(need, history.size());
  ctx.insert(ctx.end(), history.end() - static_cast<std::ptrdiff_t>(take),
             history.end());
  return conditional(w, ctx);
}

std::vector<TokenSeq> NGramLM::observed_contexts() const {
  std::vector<TokenSeq> out;
  for (const auto& table : tables_)
    for (const auto& [ctx, cc] : table) out.push_back(ctx);
  return out;
}

namespace {

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_token(const std::string& t) {
  for (char c : t)
    if (std::isspace(static_cast<unsigned char>(c)))
      throw Error("token '" + t + "' contains whitespace and cannot be dumped");
}

}  // namespace

std::string NGramLM::dump() const {
  std::ostringstream os;
  os << "# forge ngram v1\n";
  os << "order " << order_ << "\n";
  os << "discounts";
  for (double d : discounts_) os << ' ' << exact(d);
  os << "\nvocab";
  for (const auto& w : vocab_) {
    check_token(w);
    os << ' ' << w;
  }
  os << "\n";
  for (std::size_t k = 0; k < tables_.size(); ++k) {
    for (const auto& [ctx, cc] : tables_[k]) {
      for (const auto& [w, n] : cc.next) {
        os << "ngram " << k;
        for (const auto& t : ctx) os << ' ' << t;
        os << ' ' << w << ' ' << n << "\n";
      }
    }
  }
  return os.str();
}

NGramLM NGramLM::parse(std::string_view dump) {
  NGramLM lm;
  std::istringstream in{std::string(dump)};
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error("n-gram dump line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto f = text::split_ws(line);
    if (f.empty() || f[0][0] == '#') continue;
    if (f[0] == "order") {
      if (f.size() != 2) fail("malformed order line");
      lm.order_ = std::stoi(f[1]);
      if (lm.order_ < 1) fail("order must be at least 1");
      lm.tables_.assign(static_cast<std::size_t>(lm.order_), {});
    } else if (f[0] == "discounts") {
      for (std::size_t i = 1; i < f.size(); ++i) lm.discounts_.push_back(std::stod(f[i]));
    } else if (f[0] == "vocab") {
      lm.vocab_.insert(f.begin() + 1, f.end());
    } else if (f[0] == "ngram") {
      if (lm.order_ == 0) fail("ngram before order");
      const auto k = static_cast<std::size_t>(std::stoul(f.at(1)));
      if (k >= lm.tables_.size() || f.size() != k + 4) fail("malformed ngram line");
      TokenSeq ctx(f.begin() + 2, f.begin() + 2 + static_cast<std::ptrdiff_t>(k));
      lm.add_count(ctx, f[k + 2], std::stol(f[k + 3]));
    } else {
      fail("unknown record '" + f[0] + "'");
    }
  }
  if (lm.order_ == 0) throw Error("n-gram dump has no order line");
  if (lm.discounts_.size() != static_cast<std::size_t>(lm.order_))
    throw Error("n-gram dump needs one discount per order");
  for (double d : lm.discounts_)
    if (!(d >= 0 && d < 1)) throw Error("discount must lie in [0, 1)");
  if (lm.vocab_.empty()) throw Error("n-gram dump has an empty vocabulary");
  return lm;
}

void NGramLM::save(const std::filesystem::path& path) const {
  write_file_atomic(path, dump());
}

NGramLM NGramLM::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

// ---------------------------------------------------------------- BiasedLM

BiasedLM::BiasedLM(const NGramLM& background, const TokenSeq& transcript,
                   double discount)
    : background_(&background) {
  if (!(discount >= 0 && discount < 1))
    throw Error("discount must lie in [0, 1)");
  if (transcript.empty()) throw Error("cannot bias towards an empty transcript");
  const std::vector<std::string> bg_vocab(background.vocabulary().begin(),
                                          background.vocabulary().end());
  const TokenSeq* one = &transcript;
  transcript_ = NGramLM::train(std::span(one, 1), background.order(), 0.0, bg_vocab);
  w_bias_ = 1.0 - discount;
  const double added = static_cast<double>(transcript_.vocabulary().size() -
                                           background.vocabulary().size());
  background_scale_ = 1.0 / (1.0 + added * background.unk_floor());
}

double BiasedLM::background_prob(const std::string& w,
                                 std::span<const std::string> history) const {
  if (!transcript_.in_vocabulary(w)) return unk_floor();
  const double p = background_->in_vocabulary(w) ? background_->prob(w, history)
                                                 : background_->unk_floor();
  return p * background_scale_;
}

double BiasedLM::prob(const std::string& w,
                      std::span<const std::string> history) const {
  if (!transcript_.in_vocabulary(w)) return unk_floor();
  return w_bias_ * transcript_.prob(w, history) +
         (1.0 - w_bias_) * background_prob(w, history);
}

BiasedLM build_biased_lm(const NGramLM& background, const TokenSeq& transcript,
                         double discount) {
  return BiasedLM(background, transcript, discount);
}

namespace {

template <typename ProbFn>
double sentence_logprob(std::span<const std::string> tokens, double floor,
                        ProbFn&& prob) {
  double total = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double p = prob(tokens[i], tokens.first(i));
    total += std::log(p > 0 ? p : floor);
  }
  return total;
}

}  // namespace

double lm_logprob(const NGramLM& lm, std::span<const std::string> tokens) {
  return sentence_logprob(tokens, lm.unk_floor(),
                          [&](const std::string& w, auto h) { return lm.prob(w, h); });
}

double lm_logprob(const BiasedLM& lm, std::span<const std::string> tokens) {
  return sentence_logprob(tokens, lm.unk_floor(),
                          [&](const std::string& w, auto h) { return lm.prob(w, h); });
}

double bias_gain(const BiasedLM& lm, std::span<const std::string> tokens) {
  const double biased = lm_logprob(lm, tokens);
  const double bg = sentence_logprob(
      tokens, lm.unk_floor(),
      [&](const std::string& w, auto h) { return lm.background_prob(w, h); });
  return biased - bg;
}

}  // namespace forge
