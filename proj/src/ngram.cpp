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

#include "subbench/ngram.hpp"

#include <cmath>
#include <numeric>

#include "subbench/error.hpp"
#include "subbench/rng.hpp"

namespace subbench {

std::size_t NGramModel::GramHash::operator()(const Gram& g) const noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ g.len;
  for (int i = 0; i < g.len; ++i) {
    h = splitmix64_finalize(h ^ (g.ids[i] + 0x632BE59BD9B4E019ULL * (i + 1)));
  }
  return static_cast<std::size_t>(h);
}

NGramModel::Gram NGramModel::make_gram(std::span<const std::uint32_t> ids) {
  Gram g;
  g.len = static_cast<std::uint8_t>(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) g.ids[i] = ids[i];
  return g;
}

NGramModel::NGramModel(Vocabulary vocab, int order,
                       std::vector<double> lambdas)
    : vocab_(std::move(vocab)), order_(order), lambdas_(std::move(lambdas)) {
  if (order_ < 1 || order_ > kMaxOrder) {
    raise(errkind::kConfigError,
          "ngram order must be in [1, " + std::to_string(kMaxOrder) +
              "], got " + std::to_string(order_));
  }
  if (vocab_.size() == 0) {
    raise(errkind::kEmptyVocab, "ngram model needs a nonempty vocabulary");
  }
  if (lambdas_.size() != static_cast<std::size_t>(order_) + 1) {
    raise(errkind::kConfigError,
          "expected " + std::to_string(order_ + 1) +
              " interpolation weights, got " + std::to_string(lambdas_.size()));
  }
  double sum = 0.0;
  for (double l : lambdas_) {
    if (l < 0.0) {
      raise(errkind::kConfigError, "interpolation weights must be >= 0");
    }
    sum += l;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    raise(errkind::kConfigError, "interpolation weights must sum to 1");
  }
}

std::uint32_t NGramModel::token_id(const std::string& token) const {
  const auto id = vocab_.id(token);
  return id ? *id : unk_id();
}

void NGramModel::add_line(std::span<const std::uint32_t> real_ids) {
  if (real_ids.empty()) return;
  std::vector<std::uint32_t> padded(real_ids.size() + order_ - 1, bos_id());
  std::copy(real_ids.begin(), real_ids.end(), padded.begin() + (order_ - 1));
  for (std::size_t pos = static_cast<std::size_t>(order_) - 1;
       pos < padded.size(); ++pos) {
    for (int j = 1; j <= order_; ++j) {
      const std::span<const std::uint32_t> gram(&padded[pos - j + 1],
                                                static_cast<std::size_t>(j));
      ++counts_[make_gram(gram)];
      ++context_totals_[make_gram(gram.first(j - 1))];
    }
  }
}

double NGramModel::prob(std::span<const std::uint32_t> context,
                        std::uint32_t word) const {
  if (word == bos_id()) {
    raise(errkind::kInvalidQuery, "the line-start marker is never predicted");
  }
  if (context.size() != static_cast<std::size_t>(order_) - 1) {
    raise(errkind::kInvalidQuery,
          "context must hold order-1 = " + std::to_string(order_ - 1) +
              " ids, got " + std::to_string(context.size()));
  }

  // lambdas_[i] belongs to order (order_ - i); lambdas_[order_] is the floor.
  double live_weight = lambdas_[order_];
  std::array<double, kMaxOrder> mle{};
  std::array<double, kMaxOrder> weight{};
  std::array<bool, kMaxOrder> live{};
  std::array<std::uint32_t, kMaxOrder> gram_buf{};
  for (int j = order_; j >= 1; --j) {
    const double lambda_j = lambdas_[order_ - j];
    const std::span<const std::uint32_t> ctx =
        context.subspan(context.size() - (j - 1), j - 1);
    const auto tot = context_totals_.find(make_gram(ctx));
    const int slot = j - 1;
    if (tot == context_totals_.end() || tot->second == 0) {
      live[slot] = false;
      continue;
    }
    live[slot] = true;
    weight[slot] = lambda_j;
    live_weight += lambda_j;
    for (std::size_t i = 0; i < ctx.size(); ++i) gram_buf[i] = ctx[i];
    gram_buf[ctx.size()] = word;
    const auto cnt = counts_.find(
        make_gram({gram_buf.data(), ctx.size() + 1}));
    mle[slot] = cnt == counts_.end()
                    ? 0.0
                    : static_cast<double>(cnt->second) /
                          static_cast<double>(tot->second);
  }

  double p = lambdas_[order_] / static_cast<double>(pred_vocab_size());
  for (int slot = 0; slot < order_; ++slot) {
    if (live[slot]) p += weight[slot] * mle[slot];
  }
  return live_weight > 0.0 ? p / live_weight : 0.0;
}

std::uint64_t NGramModel::count(std::span<const std::uint32_t> gram) const {
  const auto it = counts_.find(make_gram(gram));
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t NGramModel::context_total(
    std::span<const std::uint32_t> context) const {
  const auto it = context_totals_.find(make_gram(context));
  return it == context_totals_.end() ? 0 : it->second;
}

std::string NGramModel::id_to_token(std::uint32_t id) const {
  if (id == unk_id()) return "<unk>";
  if (id == bos_id()) return "<s>";
  return vocab_.tokens[id];
}

void NGramModel::dump(std::ostream& os) const {
  for (const auto& [gram, cnt] : counts_) {
    os << static_cast<int>(gram.len) << '\t';
    for (int i = 0; i < gram.len; ++i) {
      if (i > 0) os << ' ';
      os << id_to_token(gram.ids[i]);
    }
    os << '\t' << cnt << '\n';
  }
}

std::vector<double> default_lambdas(int order) {
  if (order == 3) return {0.5, 0.3, 0.15, 0.05};
  std::vector<double> l(order + 1, 0.95 / order);
  l[order] = 0.05;
  // Make the weights sum to exactly 1 despite rounding.
  double sum = std::accumulate(l.begin(), l.end(), 0.0);
  l[0] += 1.0 - sum;
  return l;
}

NGramModel train_ngram(const Corpus& corpus, Vocabulary vocab, int order,
                       std::vector<double> lambdas) {
  NGramModel model(std::move(vocab), order, std::move(lambdas));
  LineReader reader(corpus);
  std::string line;
  std::vector<std::uint32_t> ids;
  while (reader.next(line)) {
    ids.clear();
    for (const auto& tok : tokenize(line)) ids.push_back(model.token_id(tok));
    model.add_line(ids);
  }
  return model;
}

double perplexity(const NGramModel& model, const Corpus& eval_corpus) {
  LineReader reader(eval_corpus);
  std::string line;
  const int order = model.order();
  std::vector<std::uint32_t> padded;
  double sum_log = 0.0;
  std::uint64_t n_tokens = 0;
  while (reader.next(line)) {
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    padded.assign(static_cast<std::size_t>(order) - 1, model.bos_id());
    for (const auto& tok : tokens) padded.push_back(model.token_id(tok));
    for (std::size_t pos = static_cast<std::size_t>(order) - 1;
         pos < padded.size(); ++pos) {
      const std::span<const std::uint32_t> ctx(&padded[pos - order + 1],
                                               static_cast<std::size_t>(order) - 1);
      const double p = model.prob(ctx, padded[pos]);
      if (p <= 0.0) {
        raise(errkind::kZeroProbabilityEvent,
              "zero probability event with a zero uniform floor");
      }
      sum_log += std::log(p);
      ++n_tokens;
    }
  }
  if (n_tokens == 0) {
    raise(errkind::kEmptyEvalSet, "evaluation corpus has no tokens");
  }
  return std::exp(-sum_log / static_cast<double>(n_tokens));
}

}  // namespace subbench
