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

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "subbench/corpus.hpp"

namespace subbench {

/// Count-based language model of order n with fixed-weight (Jelinek-Mercer
/// style) interpolation across orders plus a uniform floor.
///
/// Ids: vocabulary ids are 0..|V|-1; |V| is the reserved UNK id and |V|+1 the
/// line-start marker <s>. Every line is padded with (order-1) <s> tokens and
/// nothing ever predicts <s>, so the prediction support is V plus UNK.
class NGramModel {
 public:
  static constexpr int kMaxOrder = 8;

  /// lambdas = (lambda_n, ..., lambda_1, lambda_0); must sum to 1, all >= 0.
  /// lambda_0 weights the uniform floor over the prediction support.
  NGramModel(Vocabulary vocab, int order, std::vector<double> lambdas);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<double>& lambdas() const { return lambdas_; }

  std::uint32_t unk_id() const {
    return static_cast<std::uint32_t>(vocab_.size());
  }
  std::uint32_t bos_id() const {
    return static_cast<std::uint32_t>(vocab_.size()) + 1;
  }
  /// |V_pred| = |V| + 1 (UNK included, <s> excluded).
  std::size_t pred_vocab_size() const { return vocab_.size() + 1; }

  /// Vocabulary id for a token, mapping out-of-vocabulary tokens to UNK.
  std::uint32_t token_id(const std::string& token) const;

  /// Accumulates all j-gram counts (j = 1..order) for one line of real token
  /// ids; the line is padded with (order-1) <s> tokens internally.
  void add_line(std::span<const std::uint32_t> real_ids);

  /// Interpolated probability of `word` given the preceding (order-1) ids.
  /// Components whose context was never observed are dropped and the
  /// remaining weights renormalized; the uniform floor is always live.
  double prob(std::span<const std::uint32_t> context,
              std::uint32_t word) const;

  std::uint64_t count(std::span<const std::uint32_t> gram) const;
  std::uint64_t context_total(std::span<const std::uint32_t> context) const;

  /// Diagnostic text dump: "j<TAB>gram tokens<TAB>count".
  void dump(std::ostream& os) const;

 private:
  struct Gram {
    std::array<std::uint32_t, kMaxOrder> ids{};
    std::uint8_t len = 0;
    bool operator==(const Gram&) const = default;
  };
  struct GramHash {
    std::size_t operator()(const Gram& g) const noexcept;
  };

  static Gram make_gram(std::span<const std::uint32_t> ids);
  std::string id_to_token(std::uint32_t id) const;

  Vocabulary vocab_;
  int order_;
  std::vector<double> lambdas_;
  std::unordered_map<Gram, std::uint64_t, GramHash> counts_;
  std::unordered_map<Gram, std::uint64_t, GramHash> context_totals_;
};

/// Conventional fixed interpolation weights: (0.5, 0.3, 0.15, 0.05) for
/// trigrams, otherwise equal weight 0.95/n per order with a 0.05 floor.
std::vector<double> default_lambdas(int order);

/// Counts all j-grams of the corpus under `vocab` (OOV mapped to UNK).
NGramModel train_ngram(const Corpus& corpus, Vocabulary vocab, int order,
                       std::vector<double> lambdas);

/// exp of the mean negative log probability per real token of the padded
/// evaluation stream; OOV tokens are mapped to UNK.
double perplexity(const NGramModel& model, const Corpus& eval_corpus);

}  // namespace subbench
