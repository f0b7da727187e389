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

#include "subbench/corpus.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "subbench/error.hpp"
#include "subbench/rng.hpp"

namespace subbench {
namespace {

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes the UTF-8 codepoint starting at `i`, advancing `i` past it.
// Invalid bytes are passed through one at a time.
char32_t next_codepoint(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  const unsigned char b0 = byte(i);
  std::size_t len = 1;
  char32_t cp = b0;
  if ((b0 & 0x80) == 0) {
    len = 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  }
  if (len > 1) {
    if (i + len > s.size()) len = 1, cp = b0;
    for (std::size_t k = 1; k < len; ++k) {
      if ((byte(i + k) & 0xC0) != 0x80) {
        len = 1;
        cp = b0;
        break;
      }
      cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
  }
  i += len;
  return cp;
}

// A piece edge is kept only for ASCII letters/digits; non-ASCII codepoints
// are treated as letters. ASCII punctuation at the edges is stripped.
bool is_word_char(std::string_view piece, std::size_t i, std::size_t* len) {
  const unsigned char b = static_cast<unsigned char>(piece[i]);
  if (b < 0x80) {
    *len = 1;
    return (b >= 'a' && b <= 'z') || (b >= '0' && b <= '9');
  }
  std::size_t j = i;
  next_codepoint(piece, j);
  *len = j - i;
  return true;
}

void flush_piece(std::string& piece, std::vector<std::string>& out) {
  if (piece.empty()) return;
  // Strip leading non-word characters.
  std::size_t begin = 0;
  while (begin < piece.size()) {
    std::size_t len = 0;
    if (is_word_char(piece, begin, &len)) break;
    begin += len;
  }
  // Strip trailing non-word characters (scan forward, remember last keeper).
  std::size_t end = begin;
  for (std::size_t i = begin; i < piece.size();) {
    std::size_t len = 0;
    const bool keep = is_word_char(piece, i, &len);
    i += len;
    if (keep) end = i;
  }
  if (end > begin) out.emplace_back(piece.substr(begin, end - begin));
  piece.clear();
}

}  // namespace

Corpus open_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errkind::kIoError, "cannot open corpus file: " + path.string());
  }
  Corpus c;
  c.path = path;
  std::array<char, 1 << 16> buf;
  char last = '\n';
  while (in) {
    in.read(buf.data(), buf.size());
    const std::streamsize got = in.gcount();
    if (got <= 0) break;
    c.byte_len += static_cast<std::uint64_t>(got);
    c.line_count += static_cast<std::uint64_t>(
        std::count(buf.data(), buf.data() + got, '\n'));
    last = buf[static_cast<std::size_t>(got) - 1];
  }
  if (in.bad()) {
    raise(errkind::kIoError, "read error on corpus file: " + path.string());
  }
  if (c.byte_len > 0 && last != '\n') ++c.line_count;  // unterminated record
  return c;
}

LineReader::LineReader(const Corpus& corpus)
    : in_(corpus.path, std::ios::binary) {
  if (!in_) {
    raise(errkind::kIoError,
          "cannot open corpus file: " + corpus.path.string());
  }
}

bool LineReader::next(std::string& line) {
  return static_cast<bool>(std::getline(in_, line));
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string piece;
  std::size_t i = 0;
  while (i < line.size()) {
    const std::size_t start = i;
    const char32_t cp = next_codepoint(line, i);
    if (is_unicode_space(cp)) {
      flush_piece(piece, out);
      continue;
    }
    if (cp < 0x80) {
      char ch = static_cast<char>(cp);
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      piece.push_back(ch);
    } else {
      piece.append(line.substr(start, i - start));
    }
  }
  flush_piece(piece, out);
  return out;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(tokens.size());
  for (std::uint32_t i = 0; i < tokens.size(); ++i) index_[tokens[i]] = i;
}

Vocabulary build_vocab(const Corpus& corpus, std::uint32_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  LineReader reader(corpus);
  std::string line;
  while (reader.next(line)) {
    for (auto& tok : tokenize(line)) ++counts[tok];
  }

  Vocabulary v;
  v.min_count = min_count;
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  kept.reserve(counts.size());
  for (auto& [tok, cnt] : counts) {
    if (cnt >= min_count) kept.emplace_back(tok, cnt);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  v.tokens.reserve(kept.size());
  v.counts.reserve(kept.size());
  for (auto& [tok, cnt] : kept) {
    v.tokens.push_back(std::move(tok));
    v.counts.push_back(cnt);
    v.total_tokens += cnt;
  }
  v.rebuild_index();
  return v;
}

Corpus generate_synthetic(const SyntheticSpec& spec,
                          const std::filesystem::path& out_corpus,
                          const std::filesystem::path& out_questions) {
  if (spec.n_families < 2) {
    raise(errkind::kConfigError, "synthetic spec needs >= 2 families");
  }
  if (spec.n_lines < 1) {
    raise(errkind::kConfigError, "synthetic spec needs >= 1 line");
  }
  if (spec.n_filler < 1) {
    raise(errkind::kConfigError, "synthetic spec needs >= 1 filler token");
  }

  std::ofstream corpus_out(out_corpus, std::ios::binary | std::ios::trunc);
  if (!corpus_out) {
    raise(errkind::kIoError, "cannot write corpus: " + out_corpus.string());
  }

  // Zipf(1.0) cumulative weights over the filler vocabulary.
  std::vector<double> cdf(spec.n_filler);
  double total = 0.0;
  for (std::uint32_t r = 0; r < spec.n_filler; ++r) {
    total += 1.0 / static_cast<double>(r + 1);
    cdf[r] = total;
  }
  for (double& w : cdf) w /= total;

  SplitMix64 rng(spec.seed);
  std::string line;
  for (std::uint64_t i = 0; i < spec.n_lines; ++i) {
    line.clear();
    if (rng.below(2) == 0) {
      const std::uint64_t q = rng.below(spec.n_families);
      line = "the cap" + std::to_string(q) + " is the capital of cty" +
             std::to_string(q);
    } else {
      const std::uint64_t len = 8 + rng.below(8);  // 8..15 tokens
      for (std::uint64_t t = 0; t < len; ++t) {
        const double u = rng.real01();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto rank = static_cast<std::size_t>(it - cdf.begin());
        if (t > 0) line += ' ';
        line += 'w';
        line += std::to_string(std::min<std::size_t>(rank, spec.n_filler - 1));
      }
    }
    line += '\n';
    corpus_out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  corpus_out.flush();
  if (!corpus_out) {
    raise(errkind::kIoError, "write error on corpus: " + out_corpus.string());
  }
  corpus_out.close();

  std::ofstream q_out(out_questions, std::ios::binary | std::ios::trunc);
  if (!q_out) {
    raise(errkind::kIoError,
          "cannot write questions: " + out_questions.string());
  }
  q_out << ": capital-country\n";
  for (std::uint32_t i = 0; i < spec.n_families; ++i) {
    for (std::uint32_t j = 0; j < spec.n_families; ++j) {
      if (i == j) continue;
      q_out << "cap" << i << " cty" << i << " cap" << j << " cty" << j
            << "\n";
    }
  }
  q_out.flush();
  if (!q_out) {
    raise(errkind::kIoError,
          "write error on questions: " + out_questions.string());
  }
  return open_corpus(out_corpus);
}

}  // namespace subbench
