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

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "subbench/corpus.hpp"
#include "subbench/embedding.hpp"
#include "subbench/error.hpp"
#include "subbench/experiment.hpp"
#include "subbench/ngram.hpp"
#include "subbench/sampler.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

int exit_code_for(const subbench::Error& e) {
  return e.kind() == subbench::errkind::kConfigError ? kExitUsage
                                                     : kExitRuntime;
}

void print_error(const std::string& kind, const std::string& detail) {
  std::cerr << "error: " << kind << ": " << detail << "\n";
}

std::string strip_kind_prefix(const subbench::Error& e) {
  const std::string what = e.what();
  const std::string prefix = e.kind() + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

struct EvalFlags {
  std::string corpus;
  std::string metric;
  std::string questions;
  std::string heldout;
  std::uint64_t seed = 1;
  subbench::SgnsParams sgns;
  subbench::NGramSettings ngram;
};

void add_model_flags(CLI::App* cmd, subbench::SgnsParams& sgns,
                     subbench::NGramSettings& ngram,
                     std::vector<double>& lambdas) {
  cmd->add_option("--dim", sgns.dim, "embedding dimension");
  cmd->add_option("--window", sgns.window, "maximum context window");
  cmd->add_option("--negatives", sgns.negatives,
                  "noise samples per positive pair");
  cmd->add_option("--epochs", sgns.epochs, "training epochs");
  cmd->add_option("--lr", sgns.initial_lr, "initial learning rate");
  cmd->add_option("--subsample", sgns.subsample_t,
                  "frequent-word subsampling threshold (0 disables)");
  cmd->add_option("--sgns-min-count", sgns.min_count,
                  "embedding vocabulary count threshold");
  cmd->add_option("--order", ngram.order, "n-gram order");
  cmd->add_option("--ngram-min-count", ngram.min_count,
                  "n-gram vocabulary count threshold");
  cmd->add_option("--lambdas", lambdas,
                  "interpolation weights lambda_n..lambda_1,lambda_0")
      ->delimiter(',');
}

int cmd_synth(const subbench::SyntheticSpec& spec, const std::string& corpus,
              const std::string& questions) {
  const subbench::Corpus out =
      subbench::generate_synthetic(spec, corpus, questions);
  std::cout << "wrote " << corpus << " (" << out.line_count << " lines), "
            << questions << " ("
            << static_cast<std::uint64_t>(spec.n_families) *
                   (spec.n_families - 1)
            << " questions)\n";
  return kExitOk;
}

int cmd_sample(const std::string& corpus_path, std::uint64_t k,
               std::uint64_t seed, const std::string& out,
               const std::string& manifest) {
  const subbench::Corpus corpus = subbench::open_corpus(corpus_path);
  const subbench::Subset subset = subbench::sample_lines(corpus, k, seed);
  const subbench::Corpus written = subbench::materialize(subset, out);
  if (!manifest.empty()) subbench::write_manifest(subset, manifest);
  std::cout << "wrote " << out << " (" << written.line_count << " lines)\n";
  return kExitOk;
}

int cmd_eval(const EvalFlags& flags, bool lambdas_given,
             std::vector<double> lambdas) {
  const subbench::Corpus corpus = subbench::open_corpus(flags.corpus);
  double value = 0.0;
  if (flags.metric == "analogy") {
    if (flags.questions.empty()) {
      subbench::raise(subbench::errkind::kConfigError,
                      "--questions is required for the analogy metric");
    }
    subbench::SgnsParams params = flags.sgns;
    params.seed = flags.seed;
    const subbench::EmbeddingModel model =
        subbench::train_sgns(corpus, params);
    const auto questions = subbench::load_questions(flags.questions);
    value = subbench::analogy_accuracy(model, questions).percent;
  } else if (flags.metric == "perplexity") {
    if (flags.heldout.empty()) {
      subbench::raise(subbench::errkind::kConfigError,
                      "--heldout is required for the perplexity metric");
    }
    const subbench::Corpus heldout = subbench::open_corpus(flags.heldout);
    subbench::Vocabulary vocab =
        subbench::build_vocab(corpus, flags.ngram.min_count);
    const subbench::NGramModel model = subbench::train_ngram(
        corpus, std::move(vocab), flags.ngram.order,
        lambdas_given ? std::move(lambdas)
                      : subbench::default_lambdas(flags.ngram.order));
    value = subbench::perplexity(model, heldout);
  } else {
    subbench::raise(subbench::errkind::kConfigError,
                    "metric must be 'analogy' or 'perplexity'");
  }
  const char* metric_name = flags.metric == "analogy"
                                ? subbench::kMetricAnalogy
                                : subbench::kMetricPerplexity;
  std::printf("size,replicate,seed,metric,value\n");
  std::printf("%" PRIu64 ",0,%016" PRIx64 ",%s,%.6g\n", corpus.line_count,
              flags.seed, metric_name, value);
  return kExitOk;
}

int cmd_analyze(const std::string& results, double alpha,
                const std::string& out_dir) {
  const subbench::AnalyzeResult res =
      subbench::analyze(results, alpha, out_dir);
  std::ifstream txt(res.summary_txt);
  std::cout << txt.rdbuf();
  std::cout << "\nwrote " << res.summary_csv.string() << ", "
            << res.scaling_csv.string();
  for (const auto& p : res.scatter_csv) std::cout << ", " << p.string();
  for (const auto& p : res.scatter_svg) std::cout << ", " << p.string();
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subbench: evaluation posteriors of random corpus subsets"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic corpus with planted analogies");
  subbench::SyntheticSpec spec;
  spec.n_families = 5;
  spec.n_filler = 100;
  spec.n_lines = 1000;
  std::string synth_corpus, synth_questions;
  synth->add_option("--families", spec.n_families, "analogy families (>= 2)");
  synth->add_option("--filler", spec.n_filler, "filler vocabulary size");
  synth->add_option("--lines", spec.n_lines, "corpus lines");
  synth->add_option("--seed", spec.seed, "generation seed");
  synth->add_option("--corpus", synth_corpus, "output corpus path")
      ->required();
  synth->add_option("--questions", synth_questions,
                    "output analogy question path")
      ->required();

  // sample
  auto* sample = app.add_subcommand(
      "sample", "draw a seeded random subset of corpus lines");
  std::string sample_corpus, sample_out, sample_manifest;
  std::uint64_t sample_k = 0, sample_seed = 0;
  sample->add_option("--corpus", sample_corpus, "input corpus")->required();
  sample->add_option("--k", sample_k, "subset size in lines")->required();
  sample->add_option("--seed", sample_seed, "sampling seed");
  sample->add_option("--out", sample_out, "output subset path")->required();
  sample->add_option("--manifest", sample_manifest,
                     "also write the selected line indices");

  // eval
  auto* eval = app.add_subcommand(
      "eval", "train on one corpus and print a single metric value");
  EvalFlags eval_flags;
  std::vector<double> eval_lambdas;
  eval->add_option("--corpus", eval_flags.corpus, "training corpus")
      ->required();
  eval->add_option("--metric", eval_flags.metric, "analogy | perplexity")
      ->required();
  eval->add_option("--questions", eval_flags.questions,
                   "analogy question file");
  eval->add_option("--heldout", eval_flags.heldout,
                   "held-out corpus for perplexity");
  eval->add_option("--seed", eval_flags.seed, "training seed");
  add_model_flags(eval, eval_flags.sgns, eval_flags.ngram, eval_lambdas);

  // run
  auto* run = app.add_subcommand(
      "run", "run the full subset-posterior experiment");
  std::string run_config, run_corpus, run_questions, run_out, run_metric;
  std::vector<std::uint64_t> run_sizes;
  int run_replicates = 0, run_workers = 0;
  std::uint64_t run_seed = 0, run_heldout = 0;
  double run_alpha = 0.0;
  subbench::SgnsParams run_sgns;
  subbench::NGramSettings run_ngram;
  std::vector<double> run_lambdas;
  run->add_option("--config", run_config, "key = value config file");
  run->add_option("--corpus", run_corpus, "input corpus");
  run->add_option("--questions", run_questions, "analogy question file");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--sizes", run_sizes, "subset sizes, strictly increasing")
      ->delimiter(',');
  run->add_option("--replicates", run_replicates, "replicates per size");
  run->add_option("--seed", run_seed, "master seed");
  run->add_option("--heldout-lines", run_heldout, "held-out line count");
  run->add_option("--alpha", run_alpha, "significance level");
  run->add_option("--workers", run_workers, "parallel workers");
  run->add_option("--metric", run_metric, "analogy | perplexity | both");
  add_model_flags(run, run_sgns, run_ngram, run_lambdas);

  // analyze
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "summarize a results CSV (normality, variance scaling)");
  std::string an_results, an_out;
  double an_alpha = 0.10;
  analyze_cmd->add_option("--results", an_results, "results CSV")->required();
  analyze_cmd->add_option("--out", an_out, "output directory")->required();
  analyze_cmd->add_option("--alpha", an_alpha, "significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(subbench::errkind::kConfigError, e.what());
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(spec, synth_corpus, synth_questions);
    }
    if (sample->parsed()) {
      return cmd_sample(sample_corpus, sample_k, sample_seed, sample_out,
                        sample_manifest);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_flags, eval->count("--lambdas") > 0,
                      std::move(eval_lambdas));
    }
    if (run->parsed()) {
      subbench::ExperimentConfig config;
      if (run->count("--config")) {
        subbench::load_config_file(run_config, config);
      }
      if (run->count("--corpus")) config.corpus_path = run_corpus;
      if (run->count("--questions")) config.questions_path = run_questions;
      if (run->count("--out")) config.out_dir = run_out;
      if (run->count("--sizes")) config.sizes = run_sizes;
      if (run->count("--replicates")) config.replicates = run_replicates;
      if (run->count("--seed")) config.master_seed = run_seed;
      if (run->count("--heldout-lines")) config.heldout_lines = run_heldout;
      if (run->count("--alpha")) config.alpha = run_alpha;
      if (run->count("--workers")) config.workers = run_workers;
      if (run->count("--metric")) {
        if (run_metric == "analogy") {
          config.metric_analogy = true;
          config.metric_perplexity = false;
        } else if (run_metric == "perplexity") {
          config.metric_analogy = false;
          config.metric_perplexity = true;
        } else if (run_metric == "both") {
          config.metric_analogy = config.metric_perplexity = true;
        } else {
          subbench::raise(subbench::errkind::kConfigError,
                          "metric must be analogy, perplexity, or both");
        }
      }
      if (run->count("--dim")) config.sgns.dim = run_sgns.dim;
      if (run->count("--window")) config.sgns.window = run_sgns.window;
      if (run->count("--negatives")) {
        config.sgns.negatives = run_sgns.negatives;
      }
      if (run->count("--epochs")) config.sgns.epochs = run_sgns.epochs;
      if (run->count("--lr")) config.sgns.initial_lr = run_sgns.initial_lr;
      if (run->count("--subsample")) {
        config.sgns.subsample_t = run_sgns.subsample_t;
      }
      if (run->count("--sgns-min-count")) {
        config.sgns.min_count = run_sgns.min_count;
      }
      if (run->count("--order")) config.ngram.order = run_ngram.order;
      if (run->count("--ngram-min-count")) {
        config.ngram.min_count = run_ngram.min_count;
      }
      if (run->count("--lambdas")) config.ngram.lambdas = run_lambdas;

      const subbench::RunResult res = subbench::run_experiment(config);
      std::cout << "wrote " << res.csv_path.string() << "\n";
      if (res.failed_replicates > 0) {
        std::cerr << res.failed_replicates
                  << " replicate evaluation(s) failed; their values are "
                     "missing\n";
        return kExitPartial;
      }
      return kExitOk;
    }
    if (analyze_cmd->parsed()) {
      return cmd_analyze(an_results, an_alpha, an_out);
    }
  } catch (const subbench::Error& e) {
    print_error(e.kind(), strip_kind_prefix(e));
    return exit_code_for(e);
  } catch (const std::exception& e) {
    print_error("RuntimeError", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
