// Copyright 2026 The subbench Authors
//
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "subbench/corpus.hpp"
#include "subbench/embedding.hpp"
#include "subbench/ngram.hpp"

namespace subbench {

inline constexpr const char* kMetricAnalogy = "analogy_accuracy";
inline constexpr const char* kMetricPerplexity = "perplexity";

struct NGramSettings {
  int order = 3;
  std::vector<double> lambdas;  // empty = default_lambdas(order)
  std::uint32_t min_count = 1;
};

struct ExperimentConfig {
  std::string corpus_path;
  std::string questions_path;
  std::string out_dir = "out";
  std::vector<std::uint64_t> sizes;
  int replicates = 100;
  std::uint64_t master_seed = 1;
  std::uint64_t heldout_lines = 1000;
  bool metric_analogy = true;
  bool metric_perplexity = true;
  NGramSettings ngram;
  SgnsParams sgns;
  double alpha = 0.10;
  int workers = 1;

  /// Metric names in canonical (alphabetical) order.
  std::vector<std::string> metric_names() const;
  /// Throws ConfigError on any violated invariant.
  void validate(const Corpus& corpus) const;
};

/// Reads a flat "key = value" file (lists comma-separated, '#' comments)
/// into `config`, leaving untouched keys at their current values.
void load_config_file(const std::filesystem::path& path,
                      ExperimentConfig& config);

/// One point of the evaluation posterior. A missing value marks a failed
/// replicate.
struct EvalRecord {
  std::uint64_t size = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::string metric;
  std::optional<double> value;
};

/// Splits off a fixed held-out evaluation set (seeded with
/// derive_seed(master, 0, 0)) and writes pool.txt / heldout.txt under
/// out_dir. The pool is the corpus minus the held-out lines.
std::pair<Corpus, Corpus> split_heldout(const Corpus& corpus,
                                        std::uint64_t heldout_lines,
                                        std::uint64_t master_seed,
                                        const std::filesystem::path& out_dir);

struct RunResult {
  std::filesystem::path csv_path;
  int failed_replicates = 0;
};

/// Runs the full experiment: for every (size, replicate) draws a seeded
/// subset of the pool, trains and evaluates the requested metrics, and
/// writes results.csv (atomically; canonical row order, independent of the
/// worker count). Failed replicates are recorded with an empty value.
RunResult run_experiment(const ExperimentConfig& config);

/// Parses a results CSV back into records.
std::vector<EvalRecord> read_results_csv(const std::filesystem::path& path);

struct AnalyzeResult {
  std::filesystem::path summary_csv;
  std::filesystem::path summary_txt;
  std::filesystem::path scaling_csv;
  std::vector<std::filesystem::path> scatter_csv;
  std::vector<std::filesystem::path> scatter_svg;
  int warnings = 0;
};

/// Summarizes a results CSV: per-(metric, size) moments and normality tests,
/// per-metric variance scaling, scatter data and a minimal SVG per metric.
/// Pure function of the CSV contents; rerunning writes identical bytes.
AnalyzeResult analyze(const std::filesystem::path& results_csv, double alpha,
                      const std::filesystem::path& out_dir);

}  // namespace subbench
