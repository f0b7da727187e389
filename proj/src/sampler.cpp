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

#include "subbench/sampler.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "subbench/error.hpp"

namespace subbench {

Subset sample_lines(const Corpus& corpus, std::uint64_t k,
                    std::uint64_t seed) {
  const std::uint64_t n = corpus.line_count;
  if (k > n) {
    raise(errkind::kSubsetTooLarge,
          "requested " + std::to_string(k) + " lines from a corpus of " +
              std::to_string(n));
  }

  SplitMix64 rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k) * 2);
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }

  Subset s;
  s.corpus = corpus;
  s.size_k = k;
  s.seed = seed;
  s.indices.assign(chosen.begin(), chosen.end());
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

Corpus materialize(const Subset& subset, const std::filesystem::path& out) {
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) {
    raise(errkind::kIoError, "cannot write subset file: " + out.string());
  }
  LineReader reader(subset.corpus);
  std::string line;
  std::uint64_t line_no = 0;
  std::size_t next = 0;
  while (next < subset.indices.size() && reader.next(line)) {
    if (line_no == subset.indices[next]) {
      os << line << '\n';
      ++next;
    }
    ++line_no;
  }
  if (next < subset.indices.size()) {
    raise(errkind::kIoError,
          "subset index beyond end of corpus: " + subset.corpus.path.string());
  }
  os.flush();
  if (!os) {
    raise(errkind::kIoError, "write error on subset file: " + out.string());
  }
  os.close();
  return open_corpus(out);
}

void write_manifest(const Subset& subset, const std::filesystem::path& out) {
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) {
    raise(errkind::kIoError, "cannot write manifest: " + out.string());
  }
  char header[512];
  std::snprintf(header, sizeof(header), "# corpus=%s k=%" PRIu64 " seed=%016" PRIx64,
                subset.corpus.path.string().c_str(), subset.size_k,
                subset.seed);
  os << header << '\n';
  for (const std::uint64_t idx : subset.indices) os << idx << '\n';
  os.flush();
  if (!os) {
    raise(errkind::kIoError, "write error on manifest: " + out.string());
  }
}

}  // namespace subbench
