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

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "subbench/corpus.hpp"
#include "subbench/rng.hpp"

namespace subbench {

using EmbeddingMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SgnsParams {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double initial_lr = 0.025;
  double subsample_t = 1e-4;  // 0 disables frequent-word subsampling
  std::uint32_t min_count = 5;
  std::uint64_t seed = 1;
  bool exact_sigmoid = false;  // lookup table by default, exact for checks

  void validate() const;  // throws ConfigError
};

/// Skip-gram embedding tables: one input and one output vector per
/// vocabulary word, row-major |V| x dim.
struct EmbeddingModel {
  Vocabulary vocab;
  EmbeddingMatrix input_vectors;
  EmbeddingMatrix output_vectors;
};

/// Noise distribution P(w) proportional to count(w)^0.75, sampled in O(1)
/// via the alias method.
class NoiseTable {
 public:
  explicit NoiseTable(const Vocabulary& vocab);

  std::uint32_t sample(SplitMix64& rng) const;
  double probability(std::uint32_t id) const { return prob_exact_[id]; }

 private:
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
  std::vector<double> prob_exact_;
};

/// Logistic sigmoid, either exact or via the conventional 1000-bin lookup
/// over [-6, 6] (clamped to 0/1 outside).
class Sigmoid {
 public:
  explicit Sigmoid(bool exact = false);
  double operator()(double x) const;

 private:
  static constexpr int kBins = 1000;
  static constexpr double kMaxArg = 6.0;
  bool exact_;
  std::vector<double> table_;
};

/// One SGD step on a (center, context-or-noise) pair with target `label`:
///   s = sigmoid(u . v), g = label - s,
///   u += lr * g * v_old,  v += lr * g * u_old.
void sgd_pair_update(Eigen::Ref<Eigen::RowVectorXd> center_vec,
                     Eigen::Ref<Eigen::RowVectorXd> ctx_vec, double label,
                     double lr, const Sigmoid& sigmoid);

/// Same step addressed by vocabulary ids on a model's tables.
void sgd_pair_update(EmbeddingModel& model, std::uint32_t center,
                     std::uint32_t context_or_noise, double label, double lr,
                     const Sigmoid& sigmoid);

/// Full skip-gram-with-negative-sampling training pass over the corpus.
/// Deterministic given params.seed; single-threaded.
EmbeddingModel train_sgns(const Corpus& corpus, const SgnsParams& params);

/// u . v / (|u| |v|), clamped to [-1, 1].
double cosine(const Eigen::Ref<const Eigen::RowVectorXd>& u,
              const Eigen::Ref<const Eigen::RowVectorXd>& v);

struct AnalogyQuestion {
  std::string a, b, c, d;
  std::string section;
};

/// Reads the 4-token-per-line analogy format; lines starting with ": " open
/// a new section. Tokens are lowercased to match the tokenizer.
std::vector<AnalogyQuestion> load_questions(const std::filesystem::path& path);

struct SectionStats {
  std::string name;
  std::uint64_t answered = 0;
  std::uint64_t correct = 0;
  std::uint64_t skipped = 0;
};

struct AccuracyReport {
  double percent = 0.0;
  std::uint64_t answered = 0;
  std::uint64_t correct = 0;
  std::uint64_t skipped = 0;
  std::vector<SectionStats> sections;
};

/// 3CosAdd evaluation: for each fully in-vocabulary question a:b :: c:?,
/// the answer is the vocabulary word (excluding a, b, c) whose input vector
/// has the highest cosine similarity to b - a + c. Questions with any
/// out-of-vocabulary word are skipped.
AccuracyReport analogy_accuracy(const EmbeddingModel& model,
                                const std::vector<AnalogyQuestion>& questions);

/// Text dump in the common word-vector format: "<|V|> <dim>" then one
/// "token v1 .. vdim" line per word (input vectors).
void save_embedding_text(const EmbeddingModel& model,
                         const std::filesystem::path& path);

}  // namespace subbench
