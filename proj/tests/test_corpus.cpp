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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "subbench/corpus.hpp"
#include "subbench/error.hpp"
#include "subbench/rng.hpp"

using namespace subbench;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "subbench_corpus_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_lines(const std::string& name,
                     const std::vector<std::string>& lines) {
  const fs::path p = temp_dir() / name;
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) os << l << '\n';
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("tokenize basic rules") {
  CHECK(tokenize("The cat.") == std::vector<std::string>{"the", "cat"});
  CHECK(tokenize("   ") == std::vector<std::string>{});
  CHECK(tokenize("E-mail 42!") == std::vector<std::string>{"e-mail", "42"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("--- ***") == std::vector<std::string>{});
  CHECK(tokenize("a\tb c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
}

TEST_CASE("tokenize is idempotent on its own output") {
  const std::vector<std::string> lines{
      "The quick brown-fox; jumps!! (over) the lazy_dog 3.14",
      "Ünïcode wörds   and\ttabs, \"quotes\"...", "a.b.c 'x' --y-- 12:30"};
  for (const auto& line : lines) {
    for (const auto& tok : tokenize(line)) {
      const auto again = tokenize(tok);
      REQUIRE(again.size() == 1);
      CHECK(again[0] == tok);
    }
  }
}

TEST_CASE("open_corpus counts lines and bytes") {
  const auto p = write_lines("count.txt", {"a b a", "a c"});
  const Corpus c = open_corpus(p);
  CHECK(c.line_count == 2);
  CHECK(c.byte_len == 10);

  const auto empty = write_lines("empty.txt", {});
  const Corpus e = open_corpus(empty);
  CHECK(e.line_count == 0);
  CHECK(e.byte_len == 0);

  // Unterminated final record still counts.
  const fs::path unterminated = temp_dir() / "untermin.txt";
  std::ofstream(unterminated, std::ios::binary) << "x\ny";
  CHECK(open_corpus(unterminated).line_count == 2);

  CHECK_THROWS_AS(open_corpus(temp_dir() / "missing.txt"), Error);
}

TEST_CASE("build_vocab counting, threshold, and tie order") {
  {
    const auto p = write_lines("v1.txt", {"a b a", "a c"});
    const Vocabulary v = build_vocab(open_corpus(p), 2);
    REQUIRE(v.size() == 1);
    CHECK(v.tokens[0] == "a");
    CHECK(v.counts[0] == 3);
    CHECK(v.total_tokens == 3);
  }
  {
    const auto p = write_lines("v2.txt", {"a b", "b a"});
    const Vocabulary v = build_vocab(open_corpus(p), 1);
    REQUIRE(v.size() == 2);
    CHECK(v.tokens[0] == "a");  // tie on count 2, lexicographic
    CHECK(v.tokens[1] == "b");
    CHECK(v.id("a") == 0);
    CHECK(v.id("b") == 1);
    CHECK_FALSE(v.id("zz").has_value());
  }
  {
    const auto p = write_lines("v3.txt", {});
    const Vocabulary v = build_vocab(open_corpus(p), 1);
    CHECK(v.size() == 0);
    CHECK(v.total_tokens == 0);
  }
}

TEST_CASE("build_vocab total equals the sum of retained counts") {
  SplitMix64 rng(5);
  std::vector<std::string> lines;
  for (int i = 0; i < 200; ++i) {
    std::string line;
    const int len = 1 + static_cast<int>(rng.below(12));
    for (int t = 0; t < len; ++t) {
      if (t) line += ' ';
      line += "tok" + std::to_string(rng.below(40));
    }
    lines.push_back(line);
  }
  const auto p = write_lines("v4.txt", lines);
  for (const std::uint32_t mc : {1u, 2u, 5u}) {
    const Vocabulary v = build_vocab(open_corpus(p), mc);
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v.counts[i] >= mc);
      sum += v.counts[i];
    }
    CHECK(sum == v.total_tokens);
    // Ordering invariant: count desc, ties lexicographic.
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const bool ordered =
          v.counts[i] > v.counts[i + 1] ||
          (v.counts[i] == v.counts[i + 1] && v.tokens[i] < v.tokens[i + 1]);
      CHECK(ordered);
    }
  }
}

TEST_CASE("generate_synthetic shape and question count") {
  const fs::path corpus_path = temp_dir() / "syn.txt";
  const fs::path questions_path = temp_dir() / "syn_q.txt";
  SyntheticSpec spec;
  spec.n_families = 5;
  spec.n_filler = 100;
  spec.n_lines = 1000;
  spec.seed = 7;
  const Corpus c = generate_synthetic(spec, corpus_path, questions_path);
  CHECK(c.line_count == 1000);

  std::ifstream q(questions_path);
  std::string line;
  std::getline(q, line);
  CHECK(line == ": capital-country");
  int n_questions = 0;
  while (std::getline(q, line)) {
    if (line.empty()) continue;
    ++n_questions;
    std::stringstream ss(line);
    std::string w;
    int toks = 0;
    while (ss >> w) ++toks;
    CHECK(toks == 4);
  }
  CHECK(n_questions == 5 * 4);
}

TEST_CASE("generate_synthetic is byte-deterministic") {
  SyntheticSpec spec;
  spec.n_families = 4;
  spec.n_filler = 50;
  spec.n_lines = 300;
  spec.seed = 123;
  const fs::path c1 = temp_dir() / "det1.txt", q1 = temp_dir() / "det1_q.txt";
  const fs::path c2 = temp_dir() / "det2.txt", q2 = temp_dir() / "det2_q.txt";
  generate_synthetic(spec, c1, q1);
  generate_synthetic(spec, c2, q2);
  CHECK(slurp(c1) == slurp(c2));
  CHECK(slurp(q1) == slurp(q2));

  spec.seed = 124;
  const fs::path c3 = temp_dir() / "det3.txt", q3 = temp_dir() / "det3_q.txt";
  generate_synthetic(spec, c3, q3);
  CHECK(slurp(c1) != slurp(c3));
}

TEST_CASE("generate_synthetic plants every family token") {
  // Expected template lines per family are L/(2F); demand presence whenever
  // the 3-sigma binomial lower bound allows it, and always at L >= 10 F for
  // these fixed seeds.
  for (const std::uint64_t seed : {1ull, 77ull, 901ull}) {
    SyntheticSpec spec;
    spec.n_families = 8;
    spec.n_filler = 64;
    spec.n_lines = 10 * spec.n_families;
    spec.seed = seed;
    const fs::path cp = temp_dir() / ("plant_" + std::to_string(seed) + ".txt");
    const fs::path qp =
        temp_dir() / ("plant_q_" + std::to_string(seed) + ".txt");
    const Corpus c = generate_synthetic(spec, cp, qp);
    const Vocabulary v = build_vocab(c, 1);
    for (std::uint32_t f = 0; f < spec.n_families; ++f) {
      const auto cap = v.id("cap" + std::to_string(f));
      const auto cty = v.id("cty" + std::to_string(f));
      REQUIRE(cap.has_value());
      REQUIRE(cty.has_value());
      CHECK(v.counts[*cap] >= 1);
      CHECK(v.counts[*cty] >= 1);
      CHECK(v.counts[*cap] == v.counts[*cty]);
    }
  }
}

TEST_CASE("generate_synthetic validates its spec") {
  SyntheticSpec bad;
  bad.n_families = 1;
  CHECK_THROWS_AS(
      generate_synthetic(bad, temp_dir() / "x.txt", temp_dir() / "y.txt"),
      Error);
  SyntheticSpec unwritable;
  unwritable.n_families = 3;
  CHECK_THROWS_AS(generate_synthetic(unwritable,
                                     "/nonexistent_dir_zz/x.txt",
                                     temp_dir() / "y.txt"),
                  Error);
}

TEST_CASE("reopening a corpus yields identical properties") {
  const auto p = write_lines("reopen.txt", {"alpha beta", "gamma"});
  const Corpus a = open_corpus(p);
  const Corpus b = open_corpus(p);
  CHECK(a.line_count == b.line_count);
  CHECK(a.byte_len == b.byte_len);
  CHECK(slurp(a.path) == slurp(b.path));
}
