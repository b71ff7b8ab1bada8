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

#ifndef DILEMMA_HARNESS_H_
#define DILEMMA_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dilemma/curation.h"
#include "dilemma/engine.h"
#include "dilemma/llm_client.h"

namespace dilemma {

// A named agent matrix entry: one binding shared by every seat, or one per
// seat.
struct Setting {
  std::string name;
  std::vector<AgentBinding> bindings;
};

struct SanitizationSweep {
  SanitizeMode mode = SanitizeMode::kPolar;
  std::vector<int> x_values;
  int window = 80;
};

struct ExperimentPlan {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  std::vector<GameKind> games;
  std::vector<Setting> settings;
  std::vector<int> hl_values = {0, 1, 2, 3, 5, 10, 20, 40, 80};
  // Per-seat HL vectors. When present they replace hl_values.
  std::vector<std::vector<int>> asymmetric;
  // When present, the memory axis is the X values and every seat is
  // sanitized with hl equal to the window.
  std::optional<SanitizationSweep> sanitization;
  std::vector<PromptMode> prompt_modes = {PromptMode::kReasoning};
  int seeds = 3;
  Horizon horizon;
  double continuation_pct = 0.99;
  std::uint64_t seed_base = 0;
  std::string output_dir = "runs";
  std::optional<EndpointConfig> endpoint;
  bool capture_prompts = false;
};

// Parses the JSON plan document. Unknown keys are ConfigError.
ExperimentPlan ParsePlan(std::string_view text);
ExperimentPlan LoadPlan(const std::filesystem::path& path);

struct PlannedRun {
  RunMeta meta;
  MatchConfig config;
};

// A single match: {"run_id", "output_dir", "endpoint", "capture_prompts",
// "match": <match config>}. A bare match config is also accepted; its run
// id then defaults to `fallback_id`.
struct SingleRun {
  PlannedRun run;
  std::string output_dir = "runs";
  std::optional<EndpointConfig> endpoint;
  bool capture_prompts = false;
};

SingleRun ParseSingleRun(std::string_view text, std::string_view fallback_id = "match");

// games x settings x memory axis x modes x seeds, in that nesting order.
// Throws EmptyPlan when any axis is empty.
std::vector<PlannedRun> Expand(const ExperimentPlan& plan);

struct ExecuteOptions {
  int parallelism = 1;
  // Skip cells whose log already exists and did not abort.
  bool resume = false;
  bool capture_prompts = false;
  // Required only by plans with LLM seats. Shared by all workers.
  ChatClient* client = nullptr;
};

struct ExecuteSummary {
  std::size_t planned = 0;
  std::size_t executed = 0;
  std::size_t skipped = 0;
  // (run id, reason). Aborted matches are written and also listed here.
  std::vector<std::pair<std::string, std::string>> failures;
};

// Runs every cell with a bounded worker pool and writes {run_id}.jsonl
// into out_dir via a temporary file and rename. Per-cell failures do not
// stop the run. Captured prompts go to out_dir/prompts/{run_id}.jsonl.
ExecuteSummary Execute(const std::vector<PlannedRun>& runs, const std::filesystem::path& out_dir,
                       const ExecuteOptions& opts);

// Writes `contents` to `path` through a sibling temporary file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);
std::string ReadFile(const std::filesystem::path& path);

// Every *.jsonl run log directly inside `dir`, sorted by file name.
std::vector<RunLog> LoadRunDir(const std::filesystem::path& dir);

struct ReportTables {
  std::string runs_csv;
  std::string summary_csv;
  std::string summary_md;
};

// Per-run and per-cell tables. Aborted and empty runs are left out of the
// metrics and listed in the markdown. Throws NoRuns without usable logs.
ReportTables BuildReport(const std::vector<RunLog>& logs);
// Reads run_dir and writes runs.csv, summary.csv and summary.md into it.
ReportTables Report(const std::filesystem::path& run_dir);

// One row per run with traces. Throws NoTraces when no run has any.
std::string BuildLexicalCsv(const std::vector<RunLog>& logs);
// Writes run_dir/lexical.csv.
std::string Analyze(const std::filesystem::path& run_dir);

// Reads run logs and flat curation records (*.jsonl) from trace_dir.
std::vector<CurationRecord> LoadCurationInputs(const std::filesystem::path& trace_dir);

struct CurateOutputs {
  std::filesystem::path training;   // curated.jsonl
  std::filesystem::path retention;  // retention.csv
  CurationResult result;
};

CurateOutputs Curate(const std::filesystem::path& trace_dir, const std::filesystem::path& out_dir,
                     const CurationOptions& opts, ExportOptions export_opts = {});

// Labels used in run ids and report keys.
std::string MemoryLabel(const MatchConfig& cfg);

}  // namespace dilemma

#endif  // DILEMMA_HARNESS_H_
