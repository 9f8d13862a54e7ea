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

#include "forge/ingest.hpp"

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include "forge/audio.hpp"
#include "forge/html.hpp"
#include "forge/manifest_io.hpp"
#include "httplib.h"

namespace forge::ingest {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- URLs

bool is_absolute_url(std::string_view url) {
  return url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0;
}

Url Url::parse(std::string_view s) {
  Url u;
  const auto sep = s.find("://");
  if (sep == std::string_view::npos) throw FetchError("not an absolute URL: " + std::string(s));
  u.scheme = std::string(s.substr(0, sep));
  std::transform(u.scheme.begin(), u.scheme.end(), u.scheme.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (u.scheme != "http" && u.scheme != "https")
    throw FetchError("unsupported URL scheme: " + std::string(s));
  auto rest = s.substr(sep + 3);
  const auto slash = rest.find_first_of("/?#");
  auto authority = rest.substr(0, slash);
  u.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (const auto hash = u.path.find('#'); hash != std::string::npos) u.path.resize(hash);
  if (u.path.empty() || u.path[0] != '/') u.path.insert(0, "/");
  u.port = u.scheme == "https" ? 443 : 80;
  if (const auto colon = authority.rfind(':');
      colon != std::string_view::npos && authority.find(']', colon) == std::string_view::npos) {
    try {
      u.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw FetchError("bad port in URL: " + std::string(s));
    }
    authority = authority.substr(0, colon);
  }
  u.host = std::string(authority);
  if (u.host.empty()) throw FetchError("URL without host: " + std::string(s));
  return u;
}

std::string Url::origin() const {
  const bool default_port = (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  return scheme + "://" + host + (default_port ? "" : ":" + std::to_string(port));
}

std::string Url::str() const { return origin() + path; }

namespace {

// Collapses "." and ".." segments of an absolute path.
std::string normalize_path(const std::string& path) {
  const auto q = path.find('?');
  const std::string p = path.substr(0, q);
  const std::string query = q == std::string::npos ? "" : path.substr(q);
  std::vector<std::string> parts;
  for (const auto& seg : text::split(p, '/')) {
    if (seg == "." || seg.empty()) continue;
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
      continue;
    }
    parts.push_back(seg);
  }
  std::string out;
  for (const auto& seg : parts) out += "/" + seg;
  if (out.empty() || (!p.empty() && p.back() == '/')) out += "/";
  return out + query;
}

}  // namespace

std::string resolve_url(std::string_view base, std::string_view ref_in) {
  std::string ref = text::trim(ref_in);
  if (const auto hash = ref.find('#'); hash != std::string::npos) ref.resize(hash);
  if (is_absolute_url(ref)) return Url::parse(ref).str();
  Url b = Url::parse(base);
  if (ref.rfind("//", 0) == 0) return Url::parse(b.scheme + ":" + ref).str();
  if (ref.empty()) return b.str();
  if (ref[0] == '/') {
    b.path = normalize_path(ref);
  } else if (ref[0] == '?') {
    b.path = b.path.substr(0, b.path.find('?')) + ref;
  } else {
    const auto dir = b.path.substr(0, b.path.find('?'));
    b.path = normalize_path(dir.substr(0, dir.rfind('/') + 1) + ref);
  }
  return b.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  static const char* const kHex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

// ---------------------------------------------------------------- config

namespace {

const std::set<std::string>& known_fields() {
  static const std::set<std::string> k = {"record",  "text", "audio", "dialect",
                                          "speaker", "id",   "link"};
  return k;
}

}  // namespace

const ExtractionRule* SourceConfig::rule(std::string_view field) const {
  for (const auto& r : rules)
    if (r.field == field) return &r;
  return nullptr;
}

void SourceConfig::validate() const {
  const std::string where = "source '" + name + "': ";
  if (name.empty()) throw Error("source without a name");
  if (!(rate_limit_s > 0)) throw Error(where + "rate_limit must be > 0");
  if (max_pages == 0) throw Error(where + "max_pages must be >= 1");
  if (seed_urls.empty()) throw Error(where + "no seed_urls");
  for (const auto& u : seed_urls)
    if (!is_absolute_url(u)) throw Error(where + "seed URL is not absolute: " + u);
  if (!rule("text")) throw Error(where + "extraction rules need a 'text' selector");
  if (!rule("audio")) throw Error(where + "extraction rules need an 'audio' selector");
  for (const auto& r : rules) {
    if (!known_fields().count(r.field))
      throw Error(where + "unknown extraction field '" + r.field + "'");
    html::Selector::parse(r.selector);
  }
}

SourceConfig SourceConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  SourceConfig s;
  try {
    s.name = j.at("name").get<std::string>();
    s.kind = SourceKind::parse(j.value("kind", s.name));
    for (const auto& u : j.at("seed_urls")) s.seed_urls.push_back(u.get<std::string>());
    if (j.contains("rules")) {
      for (const auto& [field, sel] : j.at("rules").items())
        s.rules.push_back({field, sel.get<std::string>()});
    }
    if (j.contains("rate_limit")) s.rate_limit_s = j.at("rate_limit").get<double>();
    if (j.contains("max_pages")) {
      const auto m = j.at("max_pages").get<long long>();
      if (m <= 0) throw Error("source '" + s.name + "': max_pages must be >= 1");
      s.max_pages = static_cast<std::size_t>(m);
    }
    if (j.contains("cache_dir")) s.cache_dir = j.at("cache_dir").get<std::string>();
    if (j.contains("dialect")) s.dialect = parse_dialect(j.at("dialect").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error("source config: " + std::string(e.what()));
  }
  if (s.cache_dir.is_relative()) s.cache_dir = base_dir / s.cache_dir;
  s.validate();
  return s;
}

// ---------------------------------------------------------------- fetchers

std::string HttpFetcher::fetch(const std::string& url) {
  const Url u = Url::parse(url);
  httplib::Client cli(u.origin());
  const auto secs = static_cast<time_t>(timeout_s_);
  const auto usecs = static_cast<time_t>((timeout_s_ - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_follow_location(true);
  auto res = cli.Get(u.path);
  if (!res) throw FetchError(url + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw FetchError(url + ": HTTP " + std::to_string(res->status));
  return std::move(res->body);
}

PoliteFetcher::Host& PoliteFetcher::host(const std::string& name) {
  static std::mutex registry_mu;
  static std::map<std::string, std::unique_ptr<Host>> registry;
  std::lock_guard lock(registry_mu);
  auto& h = registry[name];
  if (!h) h = std::make_unique<Host>();
  return *h;
}

std::string PoliteFetcher::fetch(const std::string& url) {
  const Url u = Url::parse(url);
  const std::string key = u.host + ":" + std::to_string(u.port);
  Host& h = host(key);
  std::lock_guard lock(h.mu);
  const auto gap = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(gap_));
  if (h.last) std::this_thread::sleep_until(*h.last + gap);
  const auto now = std::chrono::steady_clock::now();
  h.last = now;
  {
    std::lock_guard log_lock(mu_);
    log_.push_back({url, key, now});
  }
  return inner_.fetch(url);
}

std::vector<RequestLogEntry> PoliteFetcher::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

// ---------------------------------------------------------------- cache

fs::path Cache::page_path(const std::string& url) const {
  return dir_ / "pages" / sha256_hex(url);
}

fs::path Cache::audio_path(const std::string& url) const {
  return dir_ / "audio" / (sha256_hex(url) + ".wav");
}

std::optional<Cache::Page> Cache::load_page(const std::string& url) const {
  const auto path = page_path(url);
  if (!fs::exists(path)) return std::nullopt;
  Page p;
  p.body = read_file(path);
  auto meta_path = path;
  meta_path += ".meta";
  if (fs::exists(meta_path)) {
    const auto meta = nlohmann::json::parse(read_file(meta_path), nullptr, false);
    if (meta.is_object()) p.fetched_at = meta.value("fetched_at", "");
  }
  return p;
}

Cache::Page Cache::store_page(const std::string& url, std::string body) const {
  const auto path = page_path(url);
  fs::create_directories(path.parent_path());
  Page p{std::move(body), utc_timestamp()};
  write_file_atomic(path, p.body);
  auto meta_path = path;
  meta_path += ".meta";
  write_file_atomic(meta_path,
                    nlohmann::json{{"url", url}, {"fetched_at", p.fetched_at}}.dump() + "\n");
  return p;
}

bool Cache::has_audio(const std::string& url) const { return fs::exists(audio_path(url)); }

void Cache::store_audio(const std::string& url, std::string_view bytes) const {
  const auto path = audio_path(url);
  fs::create_directories(path.parent_path());
  write_file_atomic(path, bytes);
}

// ---------------------------------------------------------------- crawl

namespace {

std::optional<std::string> first(const html::Selector& sel, const html::Node& scope) {
  auto v = sel.extract(scope);
  if (v.empty()) return std::nullopt;
  return v.front();
}

}  // namespace

CrawlResult crawl(const SourceConfig& source, Fetcher& fetcher) {
  source.validate();
  const Cache cache(source.cache_dir);
  PoliteFetcher polite(fetcher, source.rate_limit_s);

  std::map<std::string, html::Selector> sel;
  for (const auto& r : source.rules) sel.emplace(r.field, html::Selector::parse(r.selector));
  auto get = [&](const char* f) -> const html::Selector* {
    auto it = sel.find(f);
    return it == sel.end() ? nullptr : &it->second;
  };

  CrawlResult out;
  std::deque<std::string> queue;
  std::set<std::string> seen;
  for (const auto& s : source.seed_urls) {
    auto u = resolve_url(s, s);
    if (seen.insert(u).second) queue.push_back(u);
  }
  std::set<std::pair<std::string, std::string>> keys;

  while (!queue.empty() && out.pages_visited < source.max_pages) {
    const std::string url = queue.front();
    queue.pop_front();
    ++out.pages_visited;
    Cache::Page page;
    if (auto cached = cache.load_page(url)) {
      page = std::move(*cached);
    } else {
      try {
        ++out.network_requests;
        page = cache.store_page(url, polite.fetch(url));
      } catch (const Error& e) {
        spdlog::warn("[{}] fetch failed: {}", source.name, e.what());
        out.failures.push_back(e.what());
        continue;
      }
    }

    const auto doc = html::Document::parse(page.body);
    std::vector<const html::Node*> scopes;
    if (const auto* r = get("record")) scopes = r->select(doc.root());
    else scopes.push_back(&doc.root());

    for (const auto* scope : scopes) {
      auto txt = first(*get("text"), *scope);
      auto audio = first(*get("audio"), *scope);
      if (!txt || !audio) {
        spdlog::debug("[{}] {}: record without text or audio skipped", source.name, url);
        continue;
      }
      RawRecord rec;
      rec.source_url = url;
      rec.text = text::nfc(*txt);
      try {
        rec.audio_url = resolve_url(url, *audio);
      } catch (const Error& e) {
        spdlog::warn("[{}] {}: bad audio URL '{}'", source.name, url, *audio);
        continue;
      }
      std::optional<Dialect> d;
      if (const auto* ds = get("dialect")) {
        if (auto v = first(*ds, *scope)) {
          d = try_parse_dialect(*v);
          if (!d) spdlog::warn("[{}] {}: unknown dialect '{}'", source.name, url, *v);
        }
      }
      if (!d) d = source.dialect;
      if (!d) {
        spdlog::warn("[{}] {}: record without dialect skipped", source.name, url);
        continue;
      }
      rec.dialect = *d;
      if (const auto* s = get("speaker")) rec.speaker_id = first(*s, *scope);
      if (const auto* s = get("id")) rec.record_id = first(*s, *scope);
      rec.fetched_at = page.fetched_at;
      if (keys.emplace(rec.source_url, rec.audio_url).second) out.records.push_back(std::move(rec));
    }

    if (const auto* l = get("link")) {
      for (const auto& href : l->extract(doc.root())) {
        std::string next;
        try {
          next = resolve_url(url, href);
        } catch (const Error&) {
          continue;
        }
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
  }
  if (out.records.empty())
    throw FetchError("source '" + source.name + "': crawl produced no records (" +
                     std::to_string(out.failures.size()) + " fetch failures)");
  return out;
}

// ---------------------------------------------------------------- materialize

MaterializeResult materialize(const std::vector<RawRecord>& records,
                              const SourceConfig& source, Fetcher& fetcher) {
  const Cache cache(source.cache_dir);
  PoliteFetcher polite(fetcher, source.rate_limit_s);
  MaterializeResult out;
  std::map<std::string, std::optional<AudioBuffer>> decoded;
  std::map<std::string, std::string> failure;
  std::set<std::string> ids;

  for (const auto& rec : records) {
    auto it = decoded.find(rec.audio_url);
    if (it == decoded.end()) {
      std::optional<AudioBuffer> buf;
      try {
        if (!cache.has_audio(rec.audio_url)) {
          const auto bytes = polite.fetch(rec.audio_url);
          ++out.downloads;
          cache.store_audio(rec.audio_url, bytes);
        }
        buf = decode_wav(cache.audio_path(rec.audio_url));
        if (buf->samples.empty()) throw WavError(0, "no samples");
      } catch (const Error& e) {
        buf.reset();
        failure[rec.audio_url] = e.what();
      }
      it = decoded.emplace(rec.audio_url, std::move(buf)).first;
    }
    if (!it->second) {
      spdlog::warn("[{}] skipping {}: {}", source.name, rec.audio_url, failure[rec.audio_url]);
      out.skipped.push_back({rec.audio_url, failure[rec.audio_url]});
      continue;
    }
    const AudioBuffer& audio = *it->second;

    Utterance u;
    const std::string base = rec.record_id.value_or(
        source.name + "-" + sha256_hex(rec.source_url + "\n" + rec.audio_url).substr(0, 12));
    std::string id = base;
    for (int k = 2; !ids.insert(id).second; ++k) id = base + "-" + std::to_string(k);
    u.id = id;
    u.dialect = rec.dialect;
    u.source = source.kind;
    u.quality = source.kind.default_quality();
    u.audio_path = cache.audio_path(rec.audio_url).string();
    u.sample_rate = audio.sample_rate;
    u.duration_s = audio.duration_s();
    u.text = rec.text;
    u.speaker_id = rec.speaker_id;
    u.extra["source_url"] = rec.source_url;
    u.extra["audio_url"] = rec.audio_url;
    u.extra["fetched_at"] = rec.fetched_at;
    u.advance(Stage::kScraped);
    out.utterances.push_back(std::move(u));
  }
  return out;
}

}  // namespace forge::ingest
