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
#include <vector>

#include "subbench/corpus.hpp"
#include "subbench/rng.hpp"

namespace subbench {

/// A seeded exact-size random selection of corpus lines. Indices are kept
/// sorted so materialization preserves corpus order.
struct Subset {
  Corpus corpus;
  std::uint64_t size_k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> indices;  // strictly increasing, < line_count
};

/// Pure mixing of (master seed, subset size, replicate) into a per-draw seed:
/// state = master + 0x9E3779B97F4A7C15 * (size_k + 1)
///              + 0xBF58476D1CE4E5B9 * (replicate + 1),
/// followed by one splitmix64 finalization.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t size_k,
                                    std::uint64_t replicate) noexcept {
  const std::uint64_t state = master +
                              0x9E3779B97F4A7C15ULL * (size_k + 1) +
                              0xBF58476D1CE4E5B9ULL * (replicate + 1);
  return splitmix64_finalize(state);
}

/// Draws k distinct line indices uniformly without replacement (Floyd's
/// algorithm over the cached line count), O(k) memory.
Subset sample_lines(const Corpus& corpus, std::uint64_t k, std::uint64_t seed);

/// Streams the source file once and writes exactly the selected lines in
/// corpus order. Returns a handle to the written file.
Corpus materialize(const Subset& subset, const std::filesystem::path& out);

/// Writes "# corpus=<path> k=<k> seed=<hex>" then one decimal index per line.
void write_manifest(const Subset& subset, const std::filesystem::path& out);

}  // namespace subbench
