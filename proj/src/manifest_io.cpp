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

#include "forge/manifest_io.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace forge {

using nlohmann::json;

ManifestParseError::ManifestParseError(std::size_t line, const std::string& what)
    : Error("manifest line " + std::to_string(line) + ": " + what),
      line_(line) {}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const char* const kKnownKeys[] = {
    "id",       "dialect",    "source",     "quality", "audio_path",
    "sample_rate", "duration_s", "text",    "phonemes", "speaker_id",
    "stage",    "provenance", "alignment",  "segment"};

bool is_known_key(const std::string& k) {
  for (const char* known : kKnownKeys)
    if (k == known) return true;
  return false;
}

std::string quote(std::string_view s) { return json(std::string(s)).dump(); }

std::string seconds(double v) { return text::format_decimal(v, 3); }

class LineWriter {
 public:
  void key(std::string_view k) {
    out_ += first_ ? "" : ",";
    first_ = false;
    out_ += quote(k);
    out_ += ':';
  }
  void raw(std::string_view k, std::string_view v) {
    key(k);
    out_ += v;
  }
  void str(std::string_view k, std::string_view v) { raw(k, quote(v)); }
  std::string finish() { return "{" + out_ + "}"; }

 private:
  std::string out_;
  bool first_ = true;
};

std::string phonemes_json(const PhonemeSequence& p) {
  std::string out = "{\"syllables\":[";
  for (std::size_t i = 0; i < p.syllables.size(); ++i) {
    if (i) out += ',';
    out += quote(p.syllables[i].str());
  }
  out += "],\"pauses\":[";
  bool first = true;
  for (auto pos : p.pause_positions) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(pos);
  }
  return out + "]}";
}

template <typename T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw Error(std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace

std::string to_json_line(const Utterance& u) {
  LineWriter w;
  w.str("id", u.id);
  w.str("dialect", dialect_name(u.dialect));
  w.str("source", u.source.label());
  w.str("quality", quality_name(u.quality));
  w.str("audio_path", u.audio_path);
  w.raw("sample_rate", std::to_string(u.sample_rate));
  w.raw("duration_s", seconds(u.duration_s));
  w.str("text", text::nfc(u.text));
  if (u.phonemes) w.raw("phonemes", phonemes_json(*u.phonemes));
  if (u.speaker_id) w.str("speaker_id", *u.speaker_id);
  w.str("stage", stage_name(u.stage));
  std::string prov = "[";
  for (std::size_t i = 0; i < u.provenance.size(); ++i) {
    const auto& p = u.provenance[i];
    if (i) prov += ',';
    prov += "{\"stage\":" + quote(stage_name(p.stage)) +
            ",\"timestamp\":" + quote(p.timestamp) +
            ",\"tool_version\":" + quote(p.tool_version) + "}";
  }
  w.raw("provenance", prov + "]");
  if (u.alignment) {
    std::string a = "[";
    for (std::size_t i = 0; i < u.alignment->size(); ++i) {
      const auto& iv = (*u.alignment)[i];
      if (i) a += ',';
      a += "{\"symbol\":" + quote(iv.symbol) +
           ",\"start_s\":" + seconds(iv.start_s) +
           ",\"end_s\":" + seconds(iv.end_s) + "}";
    }
    w.raw("alignment", a + "]");
  }
  if (u.segment) {
    const auto& s = *u.segment;
    w.raw("segment", "{\"source_id\":" + quote(s.source_id) +
                         ",\"offset_s\":" + seconds(s.offset_s) +
                         ",\"lead_silence_s\":" + seconds(s.lead_silence_s) +
                         ",\"trail_silence_s\":" + seconds(s.trail_silence_s) +
                         "}");
  }
  for (const auto& [k, v] : u.extra.items())
    if (!is_known_key(k)) w.raw(k, v.dump());
  return w.finish();
}

Utterance utterance_from_json(const json& j) {
  if (!j.is_object()) throw Error("record is not a JSON object");
  Utterance u;
  u.id = field<std::string>(j, "id");
  u.dialect = parse_dialect(field<std::string>(j, "dialect"));
  u.source = SourceKind::parse(field<std::string>(j, "source"));
  u.quality = j.contains("quality")
                  ? parse_quality(field<std::string>(j, "quality"))
                  : u.source.default_quality();
  u.audio_path = field<std::string>(j, "audio_path");
  u.sample_rate = field<int>(j, "sample_rate");
  u.duration_s = field<double>(j, "duration_s");
  u.text = text::nfc(field<std::string>(j, "text"));
  if (j.contains("phonemes") && !j["phonemes"].is_null()) {
    const auto& p = j["phonemes"];
    PhonemeSequence seq;
    for (const auto& s : field<std::vector<std::string>>(p, "syllables"))
      seq.syllables.push_back(Syllable::parse(s));
    if (p.contains("pauses"))
      for (auto pos : field<std::vector<std::size_t>>(p, "pauses"))
        seq.pause_positions.insert(pos);
    u.phonemes = std::move(seq);
  }
  if (j.contains("speaker_id") && !j["speaker_id"].is_null())
    u.speaker_id = field<std::string>(j, "speaker_id");
  u.stage = parse_stage(field<std::string>(j, "stage"));
  if (j.contains("provenance")) {
    for (const auto& p : j["provenance"]) {
      u.provenance.push_back({parse_stage(field<std::string>(p, "stage")),
                              field<std::string>(p, "timestamp"),
                              field<std::string>(p, "tool_version")});
    }
  }
  if (j.contains("alignment") && !j["alignment"].is_null()) {
    std::vector<AlignedInterval> a;
    for (const auto& iv : j["alignment"])
      a.push_back({field<std::string>(iv, "symbol"), field<double>(iv, "start_s"),
                   field<double>(iv, "end_s")});
    u.alignment = std::move(a);
  }
  if (j.contains("segment") && !j["segment"].is_null()) {
    const auto& s = j["segment"];
    u.segment = SegmentOrigin{field<std::string>(s, "source_id"),
                              field<double>(s, "offset_s"),
                              field<double>(s, "lead_silence_s"),
                              field<double>(s, "trail_silence_s")};
  }
  for (const auto& [k, v] : j.items())
    if (!is_known_key(k)) u.extra[k] = v;
  return u;
}

void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path) {
  auto report = validate_manifest(manifest);
  if (!report.ok()) throw ValidationError(std::move(report));
  std::string out = "# forge manifest schema_version=" +
                    std::to_string(manifest.schema_version) + "\n";
  for (const auto& u : manifest.records) {
    out += to_json_line(u);
    out += '\n';
  }
  write_file_atomic(path, out);
}

CorpusManifest read_manifest(const std::filesystem::path& path, bool validate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  CorpusManifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto pos = t.find("schema_version=");
      if (pos != std::string::npos)
        m.schema_version = std::stoi(t.substr(pos + 15));
      continue;
    }
    try {
      m.records.push_back(utterance_from_json(json::parse(t)));
    } catch (const json::exception& e) {
      throw ManifestParseError(lineno, std::string("malformed JSON: ") + e.what());
    } catch (const Error& e) {
      throw ManifestParseError(lineno, e.what());
    }
  }
  if (validate) {
    auto report = validate_manifest(m);
    if (!report.ok()) throw ValidationError(std::move(report));
  }
  return m;
}

}  // namespace forge
