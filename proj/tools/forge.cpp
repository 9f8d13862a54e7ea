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

// forge: corpus construction command-line front-end.
//
// Exit status: 0 success, 1 hard failure, 2 usage error.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "forge/corpus.hpp"
#include "forge/g2p.hpp"
#include "forge/manifest_io.hpp"
#include "forge/pipeline.hpp"
#include "forge/stats.hpp"

namespace fs = std::filesystem;
using namespace forge;

namespace {

constexpr int kUsage = 2;

struct Globals {
  std::string config;
  unsigned jobs = 0;
  std::string log_level;
};

pipeline::RunConfig load_config(const Globals& g) {
  if (g.config.empty()) throw CLI::RequiredError("--config");
  auto cfg = pipeline::RunConfig::load(g.config);
  if (g.jobs > 0) cfg.jobs = g.jobs;
  return cfg;
}

void set_log_level(const std::string& level) {
  const auto l = spdlog::level::from_str(level);
  if (l == spdlog::level::off && level != "off")
    throw CLI::ValidationError("--log-level", "unknown level '" + level + "'");
  spdlog::set_level(l);
}

int run_stages(const Globals& g, const std::vector<pipeline::StageName>& stages,
               const std::optional<std::string>& input) {
  auto cfg = load_config(g);
  if (g.log_level.empty()) set_log_level(cfg.log_level);
  pipeline::RunOptions opts;
  opts.stages = stages;
  if (input) opts.input = fs::path(*input);
  const auto report = pipeline::run(cfg, opts);
  for (const auto& s : report.stages) {
    std::cout << pipeline::stage_label(s.stage) << ": " << s.records_in << " -> "
              << s.records_out << " records";
    if (!s.dropped.empty()) std::cout << ", " << s.dropped.size() << " dropped";
    if (!s.output.empty()) std::cout << " (" << s.output.string() << ")";
    std::cout << "\n";
  }
  if (report.retention_pct)
    std::cout << "retention: " << format_percent(*report.retention_pct) << "\n";
  return 0;
}

int g2p_command(const std::string& dialect_label, const std::string& lexicon_path,
                bool lenient, const Globals& g) {
  const auto dialect = parse_dialect(dialect_label);
  const auto lexicon = load_lexicon(lexicon_path);
  PipelineConfig params;
  if (!g.config.empty()) params = load_config(g).params;
  const auto mode = lenient ? G2PMode::kLenient : G2PMode::kStrict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(std::cin, line)) {
    ++lineno;
    try {
      std::vector<TextToken> unknown;
      std::cout << g2p_convert(line, dialect, lexicon, params, mode, &unknown).str() << "\n";
      for (const auto& t : unknown)
        spdlog::warn("line {}: '{}' not in the lexicon, dropped", lineno, t.surface);
    } catch (const Error& e) {
      throw Error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return 0;
}

int stats_command(const std::string& manifest, const std::optional<std::string>& csv) {
  const auto table = compute_stats(read_manifest(manifest));
  std::cout << table.render_text();
  std::cout << "Total hours: " << format_fixed(table.grand_total().hours(), 2) << "\n";
  if (csv) write_file_atomic(*csv, table.render_csv());
  return 0;
}

int retention_command(const std::string& before, const std::string& after) {
  const auto b = compute_stats(read_manifest(before));
  const auto a = compute_stats(read_manifest(after));
  std::cout << "before: " << format_fixed(b.grand_total().hours(), 2) << " h\n"
            << "after: " << format_fixed(a.grand_total().hours(), 2) << " h\n"
            << "retention: " << format_percent(retention(b, a)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("forge"));
  spdlog::set_pattern("%^[%l]%$ %v");

  CLI::App app{"Hakka speech corpus construction toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Pipeline config (TOML)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

  std::optional<std::string> input;
  std::map<std::string, pipeline::StageName> single = {
      {"ingest", pipeline::StageName::kIngest},   {"cleanup", pipeline::StageName::kCleanup},
      {"align", pipeline::StageName::kAlign},     {"segment", pipeline::StageName::kSegment},
      {"concat", pipeline::StageName::kConcat}};
  std::map<std::string, CLI::App*> single_cmds;
  for (const auto& [name, stage] : single) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " stage");
    if (stage != pipeline::StageName::kIngest)
      sub->add_option("--input", input, "Input manifest instead of the default");
    single_cmds[name] = sub;
  }

  auto* g2p = app.add_subcommand("g2p", "Convert text lines on stdin to phonemes on stdout");
  std::string dialect, lexicon;
  bool lenient = false, strict = false;
  g2p->add_option("--dialect", dialect, "Dialect name")->required();
  g2p->add_option("--lexicon", lexicon, "Lexicon TSV")->required()->check(CLI::ExistingFile);
  auto* strict_flag = g2p->add_flag("--strict", strict, "Fail on unknown characters (default)");
  g2p->add_flag("--lenient", lenient, "Drop unknown characters")->excludes(strict_flag);

  auto* stats = app.add_subcommand("stats", "Per-dialect, per-source statistics");
  std::string stats_manifest;
  std::optional<std::string> csv;
  stats->add_option("manifest", stats_manifest, "Manifest (JSON Lines)")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--csv", csv, "Also write CSV here");

  auto* ret = app.add_subcommand("retention", "Hours retained from one manifest to another");
  std::string before, after;
  ret->add_option("before", before, "Earlier manifest")->required()->check(CLI::ExistingFile);
  ret->add_option("after", after, "Later manifest")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run several stages in order");
  std::string stages = "ingest,cleanup,align,segment,concat,g2p,stats,emit";
  run->add_option("--stages", stages, "Comma-separated stages")->capture_default_str();
  run->add_option("--input", input, "Input manifest for the first stage");

  try {
    app.parse(argc, argv);
    if (!g.log_level.empty()) set_log_level(g.log_level);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    for (const auto& [name, sub] : single_cmds)
      if (sub->parsed()) return run_stages(g, {single.at(name)}, input);
    if (g2p->parsed()) return g2p_command(dialect, lexicon, lenient, g);
    if (stats->parsed()) return stats_command(stats_manifest, csv);
    if (ret->parsed()) return retention_command(before, after);
    if (run->parsed()) return run_stages(g, pipeline::parse_stage_list(stages), input);
  } catch (const CLI::Error& e) {
    std::cerr << "forge: " << e.what() << "\n";
    return kUsage;
  } catch (const pipeline::StageOrderError& e) {
    std::cerr << "forge: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "forge: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
