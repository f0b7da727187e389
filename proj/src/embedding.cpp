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

#include "subbench/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "subbench/error.hpp"

namespace subbench {

void SgnsParams::validate() const {
  if (dim < 1) raise(errkind::kConfigError, "dim must be >= 1");
  if (window < 1) raise(errkind::kConfigError, "window must be >= 1");
  if (negatives < 1) raise(errkind::kConfigError, "negatives must be >= 1");
  if (epochs < 1) raise(errkind::kConfigError, "epochs must be >= 1");
  if (!(initial_lr > 0.0)) {
    raise(errkind::kConfigError, "initial_lr must be > 0");
  }
  if (subsample_t < 0.0) {
    raise(errkind::kConfigError, "subsample_t must be >= 0");
  }
  if (min_count < 1) raise(errkind::kConfigError, "min_count must be >= 1");
}

NoiseTable::NoiseTable(const Vocabulary& vocab) {
  const std::size_t n = vocab.size();
  if (n == 0) {
    raise(errkind::kEmptyVocab, "noise table needs a nonempty vocabulary");
  }
  std::vector<double> weights(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = std::pow(static_cast<double>(vocab.counts[i]), 0.75);
    total += weights[i];
  }
  prob_exact_.resize(n);
  for (std::size_t i = 0; i < n; ++i) prob_exact_[i] = weights[i] / total;

  // Vose alias construction.
  accept_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = prob_exact_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    const std::uint32_t l = large.back();
    small.pop_back();
    large.pop_back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = scaled[l] + scaled[s] - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (const std::uint32_t i : large) accept_[i] = 1.0;
  for (const std::uint32_t i : small) accept_[i] = 1.0;
}

std::uint32_t NoiseTable::sample(SplitMix64& rng) const {
  const auto i =
      static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(accept_.size())));
  return rng.real01() < accept_[i] ? i : alias_[i];
}

Sigmoid::Sigmoid(bool exact) : exact_(exact) {
  if (exact_) return;
  table_.resize(kBins);
  for (int i = 0; i < kBins; ++i) {
    const double x = (static_cast<double>(i) / kBins * 2.0 - 1.0) * kMaxArg;
    table_[i] = 1.0 / (1.0 + std::exp(-x));
  }
}

double Sigmoid::operator()(double x) const {
  if (exact_) return 1.0 / (1.0 + std::exp(-x));
  if (x >= kMaxArg) return 1.0;
  if (x <= -kMaxArg) return 0.0;
  const int i =
      static_cast<int>((x + kMaxArg) * (kBins / (2.0 * kMaxArg)));
  return table_[std::clamp(i, 0, kBins - 1)];
}

void sgd_pair_update(Eigen::Ref<Eigen::RowVectorXd> center_vec,
                     Eigen::Ref<Eigen::RowVectorXd> ctx_vec, double label,
                     double lr, const Sigmoid& sigmoid) {
  const double s = sigmoid(center_vec.dot(ctx_vec));
  const double g = label - s;
  const Eigen::RowVectorXd center_old = center_vec;
  center_vec += lr * g * ctx_vec;
  ctx_vec += lr * g * center_old;
}

void sgd_pair_update(EmbeddingModel& model, std::uint32_t center,
                     std::uint32_t context_or_noise, double label, double lr,
                     const Sigmoid& sigmoid) {
  sgd_pair_update(model.input_vectors.row(center),
                  model.output_vectors.row(context_or_noise), label, lr,
                  sigmoid);
}

EmbeddingModel train_sgns(const Corpus& corpus, const SgnsParams& params) {
  params.validate();

  EmbeddingModel model;
  model.vocab = build_vocab(corpus, params.min_count);
  const std::size_t v = model.vocab.size();
  if (v == 0 || model.vocab.total_tokens == 0) {
    raise(errkind::kEmptyTrainingStream,
          "corpus yields no in-vocabulary tokens at min_count " +
              std::to_string(params.min_count));
  }

  SplitMix64 rng(params.seed);
  model.input_vectors.resize(static_cast<Eigen::Index>(v), params.dim);
  for (Eigen::Index r = 0; r < model.input_vectors.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.input_vectors.cols(); ++c) {
      model.input_vectors(r, c) = (rng.real01() - 0.5) / params.dim;
    }
  }
  model.output_vectors =
      EmbeddingMatrix::Zero(static_cast<Eigen::Index>(v), params.dim);

  const NoiseTable noise(model.vocab);
  const Sigmoid sigmoid(params.exact_sigmoid);
  const double total_tokens = static_cast<double>(model.vocab.total_tokens);
  const double schedule_span =
      static_cast<double>(params.epochs) * total_tokens;

  std::uint64_t processed = 0;
  double lr = params.initial_lr;
  std::vector<std::uint32_t> sent;
  std::string line;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    LineReader reader(corpus);
    while (reader.next(line)) {
      sent.clear();
      for (const auto& tok : tokenize(line)) {
        const auto id = model.vocab.id(tok);
        if (!id) continue;
        ++processed;
        if (params.subsample_t > 0.0) {
          const double f =
              static_cast<double>(model.vocab.counts[*id]) / total_tokens;
          const double keep = std::min(
              1.0, (std::sqrt(f / params.subsample_t) + 1.0) *
                       params.subsample_t / f);
          if (keep < 1.0 && rng.real01() >= keep) continue;
        }
        sent.push_back(*id);
      }
      if (sent.empty()) continue;

      lr = std::max(params.initial_lr *
                        (1.0 - static_cast<double>(processed) / schedule_span),
                    params.initial_lr * 1e-4);

      const auto len = static_cast<std::ptrdiff_t>(sent.size());
      for (std::ptrdiff_t i = 0; i < len; ++i) {
        const std::uint32_t center = sent[static_cast<std::size_t>(i)];
        const auto b = static_cast<std::ptrdiff_t>(
            1 + rng.below(static_cast<std::uint64_t>(params.window)));
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - b);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + b);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const std::uint32_t ctx = sent[static_cast<std::size_t>(j)];
          sgd_pair_update(model, center, ctx, 1.0, lr, sigmoid);
          for (int k = 0; k < params.negatives; ++k) {
            sgd_pair_update(model, center, noise.sample(rng), 0.0, lr,
                            sigmoid);
          }
        }
      }
    }
  }
  if (processed == 0) {
    raise(errkind::kEmptyTrainingStream,
          "corpus yields no in-vocabulary tokens");
  }
  return model;
}

double cosine(const Eigen::Ref<const Eigen::RowVectorXd>& u,
              const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    raise(errkind::kZeroVector, "cosine of a zero-norm vector is undefined");
  }
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

std::vector<AnalogyQuestion> load_questions(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errkind::kIoError, "cannot open question file: " + path.string());
  }
  std::vector<AnalogyQuestion> questions;
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    if (line.rfind(": ", 0) == 0) {
      section = line.substr(2);
      continue;
    }
    const auto toks = tokenize(line);
    if (toks.size() != 4) continue;  // blank or malformed line
    questions.push_back({toks[0], toks[1], toks[2], toks[3], section});
  }
  return questions;
}

AccuracyReport analogy_accuracy(
    const EmbeddingModel& model,
    const std::vector<AnalogyQuestion>& questions) {
  const auto v = static_cast<Eigen::Index>(model.vocab.size());
  const Eigen::Index dim = model.input_vectors.cols();

  // Rows normalized once; zero-norm rows score 0 everywhere.
  EmbeddingMatrix normalized(v, dim);
  for (Eigen::Index r = 0; r < v; ++r) {
    const double n = model.input_vectors.row(r).norm();
    if (n > 0.0) {
      normalized.row(r) = model.input_vectors.row(r) / n;
    } else {
      normalized.row(r).setZero();
    }
  }

  AccuracyReport report;
  auto section_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < report.sections.size(); ++i) {
      if (report.sections[i].name == name) return i;
    }
    report.sections.push_back({name, 0, 0, 0});
    return report.sections.size() - 1;
  };

  struct Pending {
    Eigen::Index a, b, c, d;
    std::size_t section;
  };
  std::vector<Pending> pending;
  pending.reserve(questions.size());
  for (const auto& q : questions) {
    const std::size_t sec = section_index(q.section);
    const auto ia = model.vocab.id(q.a);
    const auto ib = model.vocab.id(q.b);
    const auto ic = model.vocab.id(q.c);
    const auto id = model.vocab.id(q.d);
    if (!ia || !ib || !ic || !id) {
      ++report.skipped;
      ++report.sections[sec].skipped;
      continue;
    }
    pending.push_back({static_cast<Eigen::Index>(*ia),
                       static_cast<Eigen::Index>(*ib),
                       static_cast<Eigen::Index>(*ic),
                       static_cast<Eigen::Index>(*id), sec});
  }
  if (pending.empty()) {
    raise(errkind::kNoApplicableQuestions,
          "no analogy question has all four words in the vocabulary");
  }

  // Batched scoring: chunk the query vectors and take one matrix product
  // per chunk against the normalized vocabulary.
  constexpr std::size_t kChunk = 512;
  EmbeddingMatrix queries(std::min(pending.size(), kChunk), dim);
  for (std::size_t base = 0; base < pending.size(); base += kChunk) {
    const std::size_t m = std::min(kChunk, pending.size() - base);
    for (std::size_t r = 0; r < m; ++r) {
      const Pending& p = pending[base + r];
      Eigen::RowVectorXd target = model.input_vectors.row(p.b) -
                                  model.input_vectors.row(p.a) +
                                  model.input_vectors.row(p.c);
      const double n = target.norm();
      queries.row(static_cast<Eigen::Index>(r)) =
          n > 0.0 ? target / n : target;
    }
    const EmbeddingMatrix scores =
        queries.topRows(static_cast<Eigen::Index>(m)) * normalized.transpose();
    for (std::size_t r = 0; r < m; ++r) {
      const Pending& p = pending[base + r];
      Eigen::Index best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (Eigen::Index w = 0; w < v; ++w) {
        if (w == p.a || w == p.b || w == p.c) continue;
        const double sc = scores(static_cast<Eigen::Index>(r), w);
        if (sc > best_score) {
          best_score = sc;
          best = w;
        }
      }
      ++report.answered;
      ++report.sections[p.section].answered;
      if (best == p.d) {
        ++report.correct;
        ++report.sections[p.section].correct;
      }
    }
  }
  report.percent = 100.0 * static_cast<double>(report.correct) /
                   static_cast<double>(report.answered);
  return report;
}

void save_embedding_text(const EmbeddingModel& model,
                         const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    raise(errkind::kIoError, "cannot write embedding file: " + path.string());
  }
  os << model.vocab.size() << ' ' << model.input_vectors.cols() << '\n';
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    os << model.vocab.tokens[i];
    for (Eigen::Index c = 0; c < model.input_vectors.cols(); ++c) {
      os << ' ' << model.input_vectors(static_cast<Eigen::Index>(i), c);
    }
    os << '\n';
  }
  os.flush();
  if (!os) {
    raise(errkind::kIoError, "write error on embedding file: " + path.string());
  }
}

}  // namespace subbench
