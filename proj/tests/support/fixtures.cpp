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

#include "support/fixtures.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>

#include "forge/manifest_io.hpp"
#include "httplib.h"

namespace fs = std::filesystem;

namespace forge::testing {

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::ostringstream name;
    name << "forge-test-" << std::hex << rd() << rd();
    auto p = fs::temp_directory_path() / name.str();
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("could not create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

AudioBuffer tone(double seconds, int rate, double freq, double amp) {
  AudioBuffer b;
  b.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  b.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Offset by a quarter period so no sample of the tone is exactly zero.
    const double t = static_cast<double>(i) / rate;
    b.samples.push_back(
        static_cast<float>(amp * (0.6 + 0.4 * std::sin(2 * std::numbers::pi * freq * t))));
  }
  return b;
}

AudioBuffer silence(double seconds, int rate) {
  AudioBuffer b;
  b.sample_rate = rate;
  b.samples.assign(static_cast<std::size_t>(std::llround(seconds * rate)), 0.0f);
  return b;
}

void append(AudioBuffer& a, const AudioBuffer& b) {
  a.samples.insert(a.samples.end(), b.samples.begin(), b.samples.end());
}

Utterance make_utterance(const std::string& id, Dialect d, SourceKind source,
                         double duration_s, const std::string& text) {
  Utterance u;
  u.id = id;
  u.dialect = d;
  u.quality = source.default_quality();
  u.source = std::move(source);
  u.audio_path = "audio/" + id + ".wav";
  u.sample_rate = 16000;
  u.duration_s = duration_s;
  u.text = text;
  u.advance(Stage::kScraped);
  return u;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  return out + "'";
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& stdin_text,
                          const std::vector<std::string>& env) {
  TempDir io;
  const auto in = io / "stdin", out = io / "stdout", err = io / "stderr";
  write_text(in, stdin_text);
  std::string cmd;
  for (const auto& e : env) cmd += e + " ";
  for (const auto& a : argv) cmd += shell_quote(a) + " ";
  cmd += "<" + shell_quote(in.string()) + " >" + shell_quote(out.string()) + " 2>" +
         shell_quote(err.string());
  const int status = std::system(cmd.c_str());
  ProcessResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

struct FixtureServer::Impl {
  httplib::Server server;
  std::thread thread;
  mutable std::mutex mu;
  std::vector<Request> requests;
};

FixtureServer::FixtureServer() : impl_(std::make_unique<Impl>()) {
  impl_->server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response&) {
    std::lock_guard lock(impl_->mu);
    impl_->requests.push_back({req.path, std::chrono::steady_clock::now()});
    return httplib::Server::HandlerResponse::Unhandled;
  });
}

FixtureServer::~FixtureServer() { stop(); }

void FixtureServer::mount(const fs::path& dir) {
  if (!impl_->server.set_mount_point("/", dir.string()))
    throw std::runtime_error("cannot mount " + dir.string());
}

void FixtureServer::route(const std::string& path, Handler handler) {
  impl_->server.Get(path, [handler](const httplib::Request& req, httplib::Response& res) {
    auto [status, body] = handler(req.path);
    res.status = status;
    res.set_content(body, "application/octet-stream");
  });
}

void FixtureServer::start() {
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("cannot bind the fixture server");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void FixtureServer::stop() {
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

std::string FixtureServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

std::vector<FixtureServer::Request> FixtureServer::requests() const {
  std::lock_guard lock(impl_->mu);
  return impl_->requests;
}

std::size_t FixtureServer::request_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->requests.size();
}

}  // namespace forge::testing
