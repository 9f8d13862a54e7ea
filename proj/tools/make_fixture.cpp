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

// forge-mkfixture: writes the deterministic 20-utterance fixture corpus used
// by the end-to-end tests: a small static web site (pages and WAVs), a
// lexicon, a background text corpus, n-best lists, acoustic score files and
// a pipeline config pointing at the site.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "forge/aligner.hpp"
#include "forge/audio.hpp"
#include "forge/corpus.hpp"
#include "forge/manifest_io.hpp"

namespace fs = std::filesystem;
using namespace forge;

namespace {

constexpr int kRate = 16000;
constexpr double kFrame = 0.01;
constexpr double kSyllable = 0.20;
constexpr double kShortGap = 0.03;
constexpr double kCommaPause = 0.30;
constexpr double kLead = 0.25;
constexpr double kTrail = 0.35;

struct Word {
  const char* surface;
  const char* syllables;
};

// First pronunciation wins for audio; 好 also gets a rare reading.
const std::vector<Word> kWords = {
    {"天光", "tien1 gong1"}, {"落雨", "log8 i3"},     {"食飯", "siid8 fan5"},
    {"屋家", "vug7 ka1"},    {"阿姆", "a1 me1"},      {"學堂", "hog8 tong2"},
    {"讀書", "tug8 su1"},    {"今晡日", "gim1 bu1 ngid7"}, {"天時", "tien1 sii2"},
    {"細人", "se5 ngin2"},   {"客話", "hag7 fa5"},    {"好", "ho3"},
    {"人", "ngin2"},         {"當", "dong1"},         {"冷", "lang1"},
    {"熱", "ngiad8"},        {"去", "hi5"},           {"來", "loi2"},
    {"我", "ngai2"},         {"佢", "gi2"},           {"講", "gong3"},
    {"水", "sui3"},          {"山", "san1"},          {"茶", "ca2"},
    {"天", "tien1"},         {"光", "gong1"},         {"落", "log8"},
    {"雨", "i3"},            {"食", "siid8"},         {"飯", "fan5"},
    {"屋", "vug7"},          {"家", "ka1"},           {"學", "hog8"},
    {"堂", "tong2"},         {"讀", "tug8"},          {"書", "su1"},
    {"客", "hag7"},          {"話", "fa5"},           {"時", "sii2"},
    {"細", "se5"},           {"阿", "a1"},            {"姆", "me1"},
};

struct Spec {
  std::string source;  // dict, exam, radio
  Dialect dialect;
  // Clauses separated by '|', words by ' '.
  std::string clauses;
  // RADIO only: the page transcript swaps `wrong_from` for `wrong_to`.
  std::string wrong_from, wrong_to;
};

const std::vector<Spec> kSpecs = {
    {"dict", Dialect::kSixian, "今晡日 天光|我 去 學堂 讀書", "", ""},
    {"dict", Dialect::kHailu, "天時 當 冷|阿姆 來 屋家", "", ""},
    {"dict", Dialect::kDapu, "佢 講 客話|細人 好 讀書", "", ""},
    {"dict", Dialect::kRaoping, "落雨 天|我 食飯", "", ""},
    {"dict", Dialect::kZhaoan, "山 水 好|人 來 食 茶", "", ""},
    {"dict", Dialect::kNansixian, "天光 來|佢 去 山", "", ""},
    {"dict", Dialect::kSixian, "天時 熱|我 食 茶", "", ""},
    {"exam", Dialect::kSixian, "阿姆 講|細人 去 學堂", "", ""},
    {"exam", Dialect::kHailu, "今晡日 落雨|佢 來 屋家 食飯", "", ""},
    {"exam", Dialect::kDapu, "我 好 冷|天時 當 冷", "", ""},
    {"exam", Dialect::kRaoping, "客話 好 講|人 好", "", ""},
    {"exam", Dialect::kZhaoan, "佢 讀書|我 食飯", "", ""},
    {"exam", Dialect::kHailu, "天光 去 山|落雨 來", "", ""},
    {"radio", Dialect::kSixian, "今晡日 天時 好|我 去 山 食 茶", "山", "水"},
    {"radio", Dialect::kHailu, "細人 去 學堂|阿姆 來 屋家", "學", "客"},
    {"radio", Dialect::kDapu, "天光 落雨|人 來 食飯", "雨", "水"},
    {"radio", Dialect::kRaoping, "我 講 客話|佢 讀書", "讀", "食"},
    {"radio", Dialect::kZhaoan, "天時 熱|細人 食 茶", "熱", "冷"},
    {"radio", Dialect::kSixian, "阿姆 讀書|我 食飯", "書", "茶"},
    {"radio", Dialect::kHailu, "今晡日 熱|佢 去 學堂", "熱", "冷"},
};

const Word& word(const std::string& surface) {
  for (const auto& w : kWords)
    if (surface == w.surface) return w;
  throw Error("fixture word missing from the table: " + surface);
}

struct Built {
  std::string id;
  Dialect dialect;
  std::string text;       // true text
  std::string page_text;  // what the site shows
  AudioBuffer audio;
  std::vector<std::pair<std::string, std::size_t>> frames;  // (symbol, n_frames)
};

std::size_t frames_of(double s) { return static_cast<std::size_t>(std::llround(s / kFrame)); }

Built build(const Spec& spec, const std::string& id, std::size_t index) {
  Built b;
  b.id = id;
  b.dialect = spec.dialect;
  b.audio.sample_rate = kRate;
  auto silence = [&](double s) {
    b.audio.samples.insert(b.audio.samples.end(), frames_of(s) * (kRate / 100), 0.0f);
    if (!b.frames.empty() && b.frames.back().first == kSilence)
      b.frames.back().second += frames_of(s);
    else
      b.frames.emplace_back(kSilence, frames_of(s));
  };
  std::size_t syl_count = 0;
  auto syllable = [&](const std::string& syl) {
    const double f = 140.0 + 15.0 * static_cast<double>((syl_count++ + index) % 9);
    const std::size_t n = frames_of(kSyllable) * (kRate / 100);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / kRate;
      const double env = std::min(1.0, std::min(i, n - 1 - i) / 80.0);
      b.audio.samples.push_back(
          static_cast<float>(0.3 * env * std::sin(2 * std::numbers::pi * f * t) + 0.15 * env));
    }
    b.frames.emplace_back(syl, frames_of(kSyllable));
  };

  silence(kLead);
  const auto clauses = text::split(spec.clauses, '|');
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    if (c > 0) {
      b.text += "，";
      silence(kCommaPause);
    }
    const auto words = text::split_ws(clauses[c]);
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (w > 0 && w % 2 == 0) silence(kShortGap);
      b.text += words[w];
      for (const auto& s : text::split_ws(word(words[w]).syllables)) syllable(s);
    }
  }
  b.text += "。";
  silence(kTrail);

  b.page_text = b.text;
  if (!spec.wrong_from.empty()) {
    const auto at = b.page_text.find(spec.wrong_from);
    if (at == std::string::npos) throw Error("fixture error target missing in " + id);
    b.page_text.replace(at, spec.wrong_from.size(), spec.wrong_to);
  }
  return b;
}

std::string score_file(const Built& b) {
  std::vector<std::string> symbols{kSilence};
  for (const auto& [s, n] : b.frames)
    if (std::find(symbols.begin(), symbols.end(), s) == symbols.end()) symbols.push_back(s);
  std::vector<double> rows;
  for (const auto& [s, n] : b.frames) {
    for (std::size_t f = 0; f < n; ++f)
      for (const auto& sym : symbols) rows.push_back(sym == s ? 0.0 : -10.0);
  }
  return AcousticScores(kFrame, symbols, rows).dump();
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out.push_back(c);
  }
  return out;
}

void write(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  write_file_atomic(path, body);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write the forge fixture corpus"};
  std::string out_dir, base_url = "http://127.0.0.1:8080";
  app.add_option("out_dir", out_dir, "Destination directory")->required();
  app.add_option("--base-url", base_url, "Where the site/ directory will be served");
  CLI11_PARSE(app, argc, argv);
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();

  try {
    const fs::path root(out_dir);
    const fs::path site = root / "site";
    fs::create_directories(site);

    // Lexicon: every word for every dialect, plus the rare reading of 好.
    std::ostringstream lex;
    lex << "# surface\tdialect\tsyllables\tfrequency\n";
    for (auto d : kAllDialects) {
      for (const auto& w : kWords)
        lex << w.surface << '\t' << dialect_name(d) << '\t' << w.syllables << '\t'
            << (std::string(w.surface) == "好" ? 100 : 10) << '\n';
      lex << "好\t" << dialect_name(d) << "\thau5\t5\n";
    }
    write(root / "lexicon.tsv", lex.str());

    std::map<std::string, std::vector<Built>> by_source;
    std::map<std::string, int> counters;
    std::size_t index = 0;
    std::ostringstream background;
    for (const auto& spec : kSpecs) {
      char id[32];
      std::snprintf(id, sizeof(id), "%s-%02d", spec.source.c_str(), ++counters[spec.source]);
      auto b = build(spec, id, index);
      encode_wav(b.audio, site / "audio" / (b.id + ".wav"));
      // Two utterances have no score file and exercise the energy fallback.
      if (index % 9 != 4) write(root / "scores" / (b.id + ".scores"), score_file(b));
      if (spec.source == "radio") {
        auto other = b.text;
        const auto first_word = text::split_ws(text::split(spec.clauses, '|')[0])[0];
        other.replace(other.find(first_word), first_word.size(),
                      first_word == "天時" ? "山" : "天時");
        std::ostringstream nb;
        nb << b.page_text << "\n"
           << "-62.5\t" << b.page_text << "\n"
           << "-50.0\t" << b.text << "\n"
           << "-65.25\t" << other << "\n";
        write(root / "nbest" / (b.id + ".nbest"), nb.str());
      } else {
        background << b.text << "\n";
      }
      by_source[spec.source].push_back(std::move(b));
      ++index;
    }
    background << "天光落雨，細人去學堂。\n"
               << "阿姆講客話，我好食茶。\n"
               << "今晡日天時冷，佢來屋家食飯。\n"
               << "山好水好，人好。\n";
    write(root / "background.txt", background.str());

    // Three pages per source, linked by "next" anchors.
    for (const auto& [source, items] : by_source) {
      const std::size_t pages = 3;
      for (std::size_t p = 0; p < pages; ++p) {
        std::ostringstream html;
        html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
             << "<title>" << source << " page " << p + 1 << "</title>"
             << "<style>div.entry > p { margin: 0 }</style></head>\n<body>\n"
             << "<!-- fixture -->\n<ul class=\"nav\"><li><a href=\"index.html\">home</a></li></ul>\n";
        for (std::size_t i = p; i < items.size(); i += pages) {
          const auto& b = items[i];
          const std::string src =
              i % 2 == 0 ? "../audio/" + b.id + ".wav" : "/audio/" + b.id + ".wav";
          html << "<div class=\"entry\" data-n=" << i << ">\n"
               << "  <span class=\"id\">" << b.id << "</span>\n"
               << "  <span class=\"dialect\">" << dialect_name(b.dialect) << "</span>\n"
               << "  <p class=\"text\">" << html_escape(b.page_text) << "</p>\n"
               << "  <audio controls src=\"" << src << "\"></audio>\n"
               << "</div>\n";
        }
        if (p + 1 < pages)
          html << "<a class=\"next\" href=\"page" << p + 2 << ".html\">next</a>\n";
        html << "</body></html>\n";
        write(site / source / (p == 0 ? "index.html" : "page" + std::to_string(p + 1) + ".html"),
              html.str());
      }
    }

    std::ostringstream cfg;
    cfg << "# Fixture pipeline config. Paths are relative to this file.\n"
        << "[pipeline]\noutput_dir = \"out\"\njobs = 2\nlog_level = \"info\"\n\n"
        << "[paths]\nlexicon = \"lexicon.tsv\"\nbackground_corpus = \"background.txt\"\n"
        << "nbest_dir = \"nbest\"\nscores_dir = \"scores\"\ncache_dir = \"cache\"\n\n"
        << "[segment]\nthreshold = 0.05\npad = 0.025\nenergy_fallback = true\n\n"
        << "[concat]\npause = 0.05\n\n"
        << "[lm]\norder = 3\ndiscount = 0.5\nlambda = 1.0\n\n"
        << "[g2p]\nmode = \"strict\"\n";
    for (const auto& [source, label] :
         std::vector<std::pair<std::string, std::string>>{
             {"dict", "DICT"}, {"exam", "EXAM"}, {"radio", "RADIO"}}) {
      cfg << "\n[[source]]\nname = \"" << source << "\"\nkind = \"" << label << "\"\n"
          << "seed_urls = [\"" << base_url << "/" << source << "/index.html\"]\n"
          << "rate_limit = 0.02\nmax_pages = 10\n"
          << "rules = { record = \"div.entry\", text = \"p.text\", audio = \"audio@src\", "
             "dialect = \"span.dialect\", id = \"span.id\", link = \"a.next@href\" }\n";
    }
    write(root / "forge.toml", cfg.str());
    std::cout << "wrote " << kSpecs.size() << " utterances to " << root.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "forge-mkfixture: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
