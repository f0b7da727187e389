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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "subbench/corpus.hpp"

using namespace subbench;
namespace fs = std::filesystem;

namespace {

const char* cli = SUBBENCH_CLI_PATH;

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "subbench_cli_test";
  fs::create_directories(dir);
  return dir;
}

struct RunOutput {
  int exit_code;
  std::string stdout_text;
  std::string stderr_text;
};

RunOutput run_cli(const std::string& args) {
  const fs::path out = temp_dir() / "stdout.txt";
  const fs::path err = temp_dir() / "stderr.txt";
  const std::string cmd = std::string(cli) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("help exits 0 and unknown flags exit 1") {
  CHECK(run_cli("--help").exit_code == 0);
  for (const char* sub : {"synth", "sample", "eval", "run", "analyze"}) {
    const RunOutput r = run_cli(std::string(sub) + " --help");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("--") != std::string::npos);
  }
  const RunOutput bad = run_cli("sample --no-such-flag");
  CHECK(bad.exit_code == 1);
  CHECK(bad.stderr_text.rfind("error: ConfigError:", 0) == 0);
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
}

TEST_CASE("synth then sample, including k = 0") {
  const fs::path corpus = temp_dir() / "cli_corpus.txt";
  const fs::path questions = temp_dir() / "cli_questions.txt";
  const RunOutput synth = run_cli(
      "synth --families 4 --filler 40 --lines 400 --seed 3 --corpus " +
      corpus.string() + " --questions " + questions.string());
  CHECK(synth.exit_code == 0);
  CHECK(open_corpus(corpus).line_count == 400);

  const fs::path subset = temp_dir() / "cli_subset.txt";
  const fs::path manifest = temp_dir() / "cli_subset.manifest";
  const RunOutput sample =
      run_cli("sample --corpus " + corpus.string() + " --k 50 --seed 9 --out " +
              subset.string() + " --manifest " + manifest.string());
  CHECK(sample.exit_code == 0);
  CHECK(open_corpus(subset).line_count == 50);
  CHECK(fs::exists(manifest));

  const fs::path empty_subset = temp_dir() / "cli_empty.txt";
  const RunOutput zero = run_cli("sample --corpus " + corpus.string() +
                                 " --k 0 --out " + empty_subset.string());
  CHECK(zero.exit_code == 0);
  CHECK(fs::exists(empty_subset));
  CHECK(fs::file_size(empty_subset) == 0);

  const RunOutput too_big = run_cli("sample --corpus " + corpus.string() +
                                    " --k 4000 --out " + subset.string());
  CHECK(too_big.exit_code == 2);
  CHECK(too_big.stderr_text.rfind("error: SubsetTooLarge:", 0) == 0);
}

TEST_CASE("eval prints a one-record CSV for both metrics") {
  const fs::path corpus = temp_dir() / "eval_corpus.txt";
  const fs::path questions = temp_dir() / "eval_questions.txt";
  run_cli("synth --families 4 --filler 40 --lines 600 --seed 5 --corpus " +
          corpus.string() + " --questions " + questions.string());
  const fs::path heldout = temp_dir() / "eval_heldout.txt";
  run_cli("sample --corpus " + corpus.string() + " --k 100 --seed 1 --out " +
          heldout.string());

  const RunOutput pp = run_cli("eval --corpus " + corpus.string() +
                               " --metric perplexity --heldout " +
                               heldout.string() + " --order 3");
  CHECK(pp.exit_code == 0);
  CHECK(pp.stdout_text.rfind("size,replicate,seed,metric,value\n", 0) == 0);
  CHECK(pp.stdout_text.find("perplexity") != std::string::npos);

  const RunOutput an = run_cli(
      "eval --corpus " + corpus.string() + " --metric analogy --questions " +
      questions.string() +
      " --dim 8 --window 3 --negatives 2 --epochs 1 --sgns-min-count 1 "
      "--seed 4");
  CHECK(an.exit_code == 0);
  CHECK(an.stdout_text.find("analogy_accuracy") != std::string::npos);

  const RunOutput missing = run_cli("eval --corpus " + corpus.string() +
                                    " --metric perplexity");
  CHECK(missing.exit_code == 1);
  CHECK(missing.stderr_text.rfind("error: ConfigError:", 0) == 0);
}

TEST_CASE("run and analyze round trip") {
  const fs::path corpus = temp_dir() / "run_corpus.txt";
  const fs::path questions = temp_dir() / "run_questions.txt";
  run_cli("synth --families 5 --filler 50 --lines 1500 --seed 6 --corpus " +
          corpus.string() + " --questions " + questions.string());

  const fs::path out_dir = temp_dir() / "run_out";
  const RunOutput run = run_cli(
      "run --corpus " + corpus.string() + " --questions " +
      questions.string() + " --out " + out_dir.string() +
      " --sizes 80,160 --replicates 9 --seed 12 --heldout-lines 150 "
      "--workers 2 --metric both --dim 8 --window 3 --negatives 2 "
      "--epochs 1 --sgns-min-count 1 --subsample 0.001");
  CHECK(run.exit_code == 0);
  const fs::path results = out_dir / "results.csv";
  REQUIRE(fs::exists(results));

  const RunOutput analyze = run_cli("analyze --results " + results.string() +
                                    " --out " + out_dir.string() +
                                    " --alpha 0.1");
  CHECK(analyze.exit_code == 0);
  CHECK(fs::exists(out_dir / "summary.csv"));
  CHECK(fs::exists(out_dir / "summary.txt"));
  CHECK(fs::exists(out_dir / "variance_scaling.csv"));
  CHECK(fs::exists(out_dir / "scatter_analogy_accuracy.csv"));
  CHECK(fs::exists(out_dir / "scatter_perplexity.svg"));
  CHECK(analyze.stdout_text.find("metric") != std::string::npos);

  // Config exceeding the pool is a usage error.
  const RunOutput bad = run_cli(
      "run --corpus " + corpus.string() + " --questions " +
      questions.string() + " --out " + out_dir.string() +
      " --sizes 5000 --replicates 2 --heldout-lines 150");
  CHECK(bad.exit_code == 1);
  CHECK(bad.stderr_text.rfind("error: ConfigError:", 0) == 0);
}

TEST_CASE("config file with CLI overrides") {
  const fs::path corpus = temp_dir() / "cfg_corpus.txt";
  const fs::path questions = temp_dir() / "cfg_questions.txt";
  run_cli("synth --families 4 --filler 30 --lines 800 --seed 2 --corpus " +
          corpus.string() + " --questions " + questions.string());

  const fs::path cfg = temp_dir() / "exp.cfg";
  const fs::path out_dir = temp_dir() / "cfg_out";
  {
    std::ofstream os(cfg);
    os << "corpus = " << corpus.string() << "\n";
    os << "questions = " << questions.string() << "\n";
    os << "out_dir = " << out_dir.string() << "\n";
    os << "sizes = 50, 100\n";
    os << "replicates = 20\n";  // overridden below
    os << "heldout_lines = 100\n";
    os << "metrics = perplexity\n";
    os << "master_seed = 77\n";
  }
  const RunOutput run = run_cli("run --config " + cfg.string() +
                                " --replicates 5 --workers 2");
  CHECK(run.exit_code == 0);
  const auto csv = out_dir / "results.csv";
  REQUIRE(fs::exists(csv));
  std::ifstream in(csv);
  std::string line;
  int rows = -1;  // discount header
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 2 * 5);  // 2 sizes, 5 replicates, 1 metric
}
