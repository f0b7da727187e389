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
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subbench {

/// Handle to a line-oriented UTF-8 text file with a cached line count.
/// Opening scans the file once; the count is reused by every later pass.
struct Corpus {
  std::filesystem::path path;
  std::uint64_t line_count = 0;
  std::uint64_t byte_len = 0;
};

/// Scans `path` once, counting newline-delimited records and bytes.
Corpus open_corpus(const std::filesystem::path& path);

/// Streams the lines of a corpus file without loading it into memory.
class LineReader {
 public:
  explicit LineReader(const Corpus& corpus);
  /// Reads the next line (without the trailing newline). False at EOF.
  bool next(std::string& line);

 private:
  std::ifstream in_;
};

/// Lowercases, splits on Unicode whitespace, and strips leading/trailing
/// characters that are neither letters nor digits. Empty pieces are dropped;
/// internal punctuation is kept ("e-mail" stays one token).
std::vector<std::string> tokenize(std::string_view line);

/// Token inventory with dense ids ordered by descending count, ties broken
/// lexicographically.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::uint32_t min_count = 1;
  std::uint64_t total_tokens = 0;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::uint32_t> id(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  void rebuild_index();

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Counts tokenize() output over every line, drops tokens below min_count.
Vocabulary build_vocab(const Corpus& corpus, std::uint32_t min_count);

/// Recipe for a deterministic synthetic corpus with planted analogy
/// structure: half the lines instantiate "the capQ is the capital of ctyQ"
/// for a uniformly drawn family q, the rest are Zipf(1.0) filler.
struct SyntheticSpec {
  std::uint32_t n_families = 2;  // F >= 2
  std::uint32_t n_filler = 100;  // filler vocabulary size
  std::uint64_t n_lines = 1;     // L >= 1
  std::uint64_t seed = 0;
};

/// Writes the corpus and the matching analogy question file (every ordered
/// family pair under section ": capital-country"). Byte-deterministic.
Corpus generate_synthetic(const SyntheticSpec& spec,
                          const std::filesystem::path& out_corpus,
                          const std::filesystem::path& out_questions);

}  // namespace subbench
