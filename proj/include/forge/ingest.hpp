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

#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "forge/corpus.hpp"
#include "json.hpp"

namespace forge::ingest {

class FetchError : public Error {
 public:
  using Error::Error;
};

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // starts with '/', includes any query

  static Url parse(std::string_view url);
  // scheme://host[:port]
  std::string origin() const;
  std::string str() const;
};

bool is_absolute_url(std::string_view url);
// Resolves `ref` against `base` (absolute, root-relative, relative, or
// protocol-relative references; fragments dropped).
std::string resolve_url(std::string_view base, std::string_view ref);

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

struct ExtractionRule {
  // record, text, audio, dialect, speaker, id or link.
  std::string field;
  std::string selector;
};

struct SourceConfig {
  std::string name;
  SourceKind kind;
  std::vector<std::string> seed_urls;
  std::vector<ExtractionRule> rules;
  double rate_limit_s = 1.0;
  std::size_t max_pages = 100;
  std::filesystem::path cache_dir = "cache";
  // Used when no dialect rule matches.
  std::optional<Dialect> dialect;

  const ExtractionRule* rule(std::string_view field) const;
  void validate() const;

  // One [[source]] table. Relative cache_dir is taken against `base_dir`.
  static SourceConfig from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);
};

struct RawRecord {
  std::string source_url;
  std::string text;
  std::string audio_url;
  Dialect dialect = Dialect::kSixian;
  std::string fetched_at;
  std::optional<std::string> speaker_id;
  std::optional<std::string> record_id;

  bool operator==(const RawRecord&) const = default;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // Body of a 200 response; throws FetchError otherwise.
  virtual std::string fetch(const std::string& url) = 0;
};

class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(double timeout_s = 30.0) : timeout_s_(timeout_s) {}
  std::string fetch(const std::string& url) override;

 private:
  double timeout_s_;
};

struct RequestLogEntry {
  std::string url;
  std::string host;
  std::chrono::steady_clock::time_point at;
};

// Serializes requests per host and keeps consecutive requests to one host
// at least `min_gap_s` apart. Host state is shared by every instance in the
// process, so separate crawls and downloads stay spaced too. Thread-safe.
class PoliteFetcher final : public Fetcher {
 public:
  PoliteFetcher(Fetcher& inner, double min_gap_s) : inner_(inner), gap_(min_gap_s) {}
  std::string fetch(const std::string& url) override;
  std::vector<RequestLogEntry> log() const;

 private:
  struct Host {
    std::mutex mu;
    std::optional<std::chrono::steady_clock::time_point> last;
  };
  static Host& host(const std::string& name);

  Fetcher& inner_;
  double gap_;
  mutable std::mutex mu_;
  std::vector<RequestLogEntry> log_;
};

// <dir>/pages/<sha256(url)> and <dir>/audio/<sha256(url)>.wav, written
// atomically. Each page has a <hash>.meta sidecar holding its URL and
// fetch time.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path page_path(const std::string& url) const;
  std::filesystem::path audio_path(const std::string& url) const;

  struct Page {
    std::string body;
    std::string fetched_at;
  };
  std::optional<Page> load_page(const std::string& url) const;
  Page store_page(const std::string& url, std::string body) const;
  bool has_audio(const std::string& url) const;
  void store_audio(const std::string& url, std::string_view bytes) const;

 private:
  std::filesystem::path dir_;
};

struct CrawlResult {
  std::vector<RawRecord> records;
  std::size_t pages_visited = 0;
  std::size_t network_requests = 0;
  std::vector<std::string> failures;
};

// Breadth-first from the seed URLs, following `link` rule matches. Pages
// come from the cache when present. Throws FetchError when no record was
// extracted.
CrawlResult crawl(const SourceConfig& source, Fetcher& fetcher);

struct SkippedRecord {
  std::string audio_url;
  std::string reason;
};

struct MaterializeResult {
  std::vector<Utterance> utterances;
  std::vector<SkippedRecord> skipped;
  std::size_t downloads = 0;
};

// Downloads each distinct audio URL once into the cache and builds Scraped
// utterances. Records whose audio cannot be fetched or decoded are skipped.
MaterializeResult materialize(const std::vector<RawRecord>& records,
                              const SourceConfig& source, Fetcher& fetcher);

}  // namespace forge::ingest
