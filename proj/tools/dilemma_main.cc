// Copyright 2026 The Dilemma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run, sweep, analyze, curate, report.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dilemma/curation.h"
#include "dilemma/error.h"
#include "dilemma/harness.h"
#include "dilemma/llm_client.h"

namespace fs = std::filesystem;

namespace {

constexpr char kDefaultKeyEnv[] = "DILEMMA_API_KEY";

struct EndpointFlags {
  std::string url;
  std::string key_env;
};

void AddEndpointFlags(CLI::App* cmd, EndpointFlags& flags) {
  cmd->add_option("--endpoint", flags.url,
                  "Chat-completions base URL; overrides the config's endpoint.base_url");
  cmd->add_option("--api-key-env", flags.key_env,
                  "Environment variable holding the API key (default: from config, else " +
                      std::string(kDefaultKeyEnv) + ")");
}

// Builds a client only when some seat needs one.
std::unique_ptr<dilemma::HttpChatClient> MakeClient(std::optional<dilemma::EndpointConfig> cfg,
                                                    const EndpointFlags& flags, bool needed) {
  if (!needed) return nullptr;
  if (!flags.url.empty()) {
    if (!cfg) cfg.emplace();
    cfg->base_url = flags.url;
  }
  if (!flags.key_env.empty() && cfg) cfg->api_key_env = flags.key_env;
  if (!cfg) {
    throw dilemma::Error(dilemma::ErrorCode::kConfigError,
                         "LLM seats need an endpoint (config 'endpoint' or --endpoint)");
  }
  if (cfg->api_key_env.empty()) cfg->api_key_env = kDefaultKeyEnv;
  return std::make_unique<dilemma::HttpChatClient>(
      *cfg, [](std::string_view line) { std::cerr << line << '\n'; });
}

int ReportExecution(const dilemma::ExecuteSummary& s, const fs::path& out) {
  std::cout << "planned " << s.planned << ", executed " << s.executed << ", skipped "
            << s.skipped << ", failed " << s.failures.size() << " -> " << out.string() << '\n';
  for (const auto& [id, reason] : s.failures) std::cout << "FAILED " << id << ": " << reason << '\n';
  return s.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated social dilemma tournaments for memory-bounded agents"};
  app.require_subcommand(1);

  EndpointFlags endpoint;
  int parallelism = 1;
  bool resume = false;
  std::optional<std::uint64_t> seed_base;
  std::string out_dir;
  bool capture = false;

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one match from a match config");
  run->add_option("config", config_path, "Match config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default: from config)");
  run->add_option("--seed-base", seed_base, "Override the match seed");
  run->add_flag("--resume", resume, "Skip the match if its log already exists");
  run->add_flag("--capture-prompts", capture, "Also write every prompt to prompts/");
  AddEndpointFlags(run, endpoint);

  auto* sweep = app.add_subcommand("sweep", "Expand and execute an experiment plan");
  sweep->add_option("config", config_path, "Experiment plan (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--parallelism", parallelism, "Concurrent matches")->check(CLI::PositiveNumber);
  sweep->add_option("--seed-base", seed_base, "Override the plan's seed_base");
  sweep->add_option("--out", out_dir, "Output directory (default: plan output_dir)");
  sweep->add_flag("--resume", resume, "Skip cells whose log already exists");
  sweep->add_flag("--capture-prompts", capture, "Also write every prompt to prompts/");
  AddEndpointFlags(sweep, endpoint);

  std::string run_dir;
  auto* analyze = app.add_subcommand("analyze", "Lexical analysis of reasoning traces");
  analyze->add_option("run_dir", run_dir, "Directory of run logs")->required()->check(CLI::ExistingDirectory);

  auto* report = app.add_subcommand("report", "Cooperation and reward tables");
  report->add_option("run_dir", run_dir, "Directory of run logs")->required()->check(CLI::ExistingDirectory);

  std::string trace_dir;
  dilemma::CurationOptions curation;
  dilemma::ExportOptions export_opts;
  auto* curate = app.add_subcommand("curate", "Build a fine-tuning set from reasoning traces");
  curate->add_option("trace_dir", trace_dir, "Directory of run logs or curation records")
      ->required()
      ->check(CLI::ExistingDirectory);
  curate->add_option("--out", out_dir, "Output directory (default: <trace_dir>/curated)");
  curate->add_option("--judge-model", curation.judge_model, "Judge model for unscored records");
  curate->add_option("--parallelism", curation.judge_parallelism, "Concurrent judge calls")
      ->check(CLI::PositiveNumber);
  curate->add_option("--seed-base", curation.seed, "Seed for family capping and the split");
  curate->add_option("--train-frac", curation.train_frac, "Target train share")
      ->check(CLI::Range(0.0, 1.0));
  curate->add_option("--family-cap", curation.family_cap, "Members kept per prefix family")
      ->check(CLI::PositiveNumber);
  curate->add_option("--prompt-chars", export_opts.prompt_char_budget,
                     "Keep only the last N prompt characters (0 keeps all)");
  AddEndpointFlags(curate, endpoint);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const fs::path path(config_path);
      dilemma::SingleRun single =
          dilemma::ParseSingleRun(dilemma::ReadFile(path), path.stem().string());
      if (seed_base) single.run.config.seed = *seed_base;
      const fs::path out = out_dir.empty() ? fs::path(single.output_dir) : fs::path(out_dir);
      auto client = MakeClient(single.endpoint, endpoint, single.run.config.HasLlm());
      dilemma::ExecuteOptions opts;
      opts.resume = resume;
      opts.capture_prompts = capture || single.capture_prompts;
      opts.client = client.get();
      return ReportExecution(dilemma::Execute({single.run}, out, opts), out);
    }
    if (sweep->parsed()) {
      dilemma::ExperimentPlan plan = dilemma::LoadPlan(config_path);
      if (seed_base) plan.seed_base = *seed_base;
      const std::vector<dilemma::PlannedRun> runs = dilemma::Expand(plan);
      bool needs_llm = false;
      for (const auto& r : runs) needs_llm = needs_llm || r.config.HasLlm();
      const fs::path out = out_dir.empty() ? fs::path(plan.output_dir) : fs::path(out_dir);
      auto client = MakeClient(plan.endpoint, endpoint, needs_llm);
      dilemma::ExecuteOptions opts;
      opts.parallelism = parallelism;
      opts.resume = resume;
      opts.capture_prompts = capture || plan.capture_prompts;
      opts.client = client.get();
      return ReportExecution(dilemma::Execute(runs, out, opts), out);
    }
    if (analyze->parsed()) {
      dilemma::Analyze(run_dir);
      std::cout << "wrote " << (fs::path(run_dir) / "lexical.csv").string() << '\n';
      return 0;
    }
    if (report->parsed()) {
      std::cout << dilemma::Report(run_dir).summary_md;
      return 0;
    }
    if (curate->parsed()) {
      const fs::path out = out_dir.empty() ? fs::path(trace_dir) / "curated" : fs::path(out_dir);
      std::unique_ptr<dilemma::HttpChatClient> client;
      if (!curation.judge_model.empty()) {
        std::optional<dilemma::EndpointConfig> cfg;
        client = MakeClient(cfg, endpoint, true);
        curation.judge_client = client.get();
      }
      const dilemma::CurateOutputs result = dilemma::Curate(trace_dir, out, curation, export_opts);
      std::cout << dilemma::RetentionReportCsv(result.result.retention);
      std::cout << "wrote " << result.training.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
