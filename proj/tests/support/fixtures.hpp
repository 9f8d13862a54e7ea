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
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "forge/audio.hpp"
#include "forge/corpus.hpp"

namespace forge::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& body);

// Sine tone of constant amplitude.
AudioBuffer tone(double seconds, int rate = 16000, double freq = 220.0, double amp = 0.5);
AudioBuffer silence(double seconds, int rate = 16000);
// Appends b to a in place.
void append(AudioBuffer& a, const AudioBuffer& b);

// A Scraped record with sane defaults.
Utterance make_utterance(const std::string& id, Dialect d = Dialect::kSixian,
                         SourceKind source = SourceKind::dict(), double duration_s = 1.0,
                         const std::string& text = "天光");

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs `argv` through /bin/sh with stdout/stderr captured; `stdin_text`
// is fed on standard input. Extra environment assignments may be prefixed
// via `env` ("NAME=value").
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& stdin_text = {},
                          const std::vector<std::string>& env = {});

// Local HTTP server for fetch tests. Serves a directory and/or custom
// routes on 127.0.0.1 at a free port and records every request.
class FixtureServer {
 public:
  struct Request {
    std::string path;
    std::chrono::steady_clock::time_point at;
  };
  using Handler = std::function<std::pair<int, std::string>(const std::string& path)>;

  FixtureServer();
  ~FixtureServer();

  void mount(const std::filesystem::path& dir);
  // Exact-path route returning (status, body).
  void route(const std::string& path, Handler handler);
  void start();
  void stop();

  int port() const { return port_; }
  std::string base_url() const;
  std::vector<Request> requests() const;
  std::size_t request_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace forge::testing
