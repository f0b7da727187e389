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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "subbench/corpus.hpp"
#include "subbench/embedding.hpp"
#include "subbench/experiment.hpp"
#include "subbench/ngram.hpp"
#include "subbench/rng.hpp"
#include "subbench/sampler.hpp"
#include "subbench/stats.hpp"

using namespace subbench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------- oracles

// Adaptive-Simpson quadrature of the normalized upper gamma integrand;
// independent route for checking chi2_sf.
double gamma_integrand(double a, double t) {
  return std::exp((a - 1.0) * std::log(t) - t - std::lgamma(a));
}

double simpson_rec(double a, double lo, double hi, double flo, double fmid,
                   double fhi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid);
  const double rm = 0.5 * (mid + hi);
  const double flm = gamma_integrand(a, lm);
  const double frm = gamma_integrand(a, rm);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_rec(a, lo, mid, flo, flm, fmid, left, tol / 2, depth - 1) +
         simpson_rec(a, mid, hi, fmid, frm, fhi, right, tol / 2, depth - 1);
}

double gamma_q_oracle(double a, double x) {
  if (x <= 0.0) return 1.0;
  double hi = std::max(x, a) + 10.0;
  while (gamma_integrand(a, hi) > 1e-22 && hi < 1e6) hi *= 1.5;
  if (hi <= x) return 0.0;
  const double mid = 0.5 * (x + hi);
  const double flo = gamma_integrand(a, x);
  const double fmid = gamma_integrand(a, mid);
  const double fhi = gamma_integrand(a, hi);
  const double whole = (hi - x) / 6.0 * (flo + 4.0 * fmid + fhi);
  return simpson_rec(a, x, hi, flo, fmid, fhi, whole, 1e-13, 40);
}

double pair_loss(const Eigen::RowVectorXd& center,
                 const Eigen::RowVectorXd& ctx, double label) {
  const double s = 1.0 / (1.0 + std::exp(-center.dot(ctx)));
  return -(label * std::log(s) + (1.0 - label) * std::log(1.0 - s));
}

// ------------------------------------------------------------- criteria

void criterion_1_calibration() {
  const auto start = Clock::now();
  SplitMix64 rng(0xCA11B7A7E5EEDULL);
  const int sims = 100000;
  const int n = 100;
  int rej_chi2 = 0, rej_ad = 0;
  stats::SampleSet s;
  s.values.resize(n);
  for (int i = 0; i < sims; ++i) {
    for (auto& v : s.values) v = rng.normal();
    const auto [chi2, ad] = stats::normality_report(s, 0.10);
    rej_chi2 += chi2.h;
    rej_ad += ad.h;
  }
  const double rate_chi2 = static_cast<double>(rej_chi2) / sims;
  const double rate_ad = static_cast<double>(rej_ad) / sims;
  const double elapsed = seconds_since(start);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "statistical-engine calibration: chi2 size %.4f, A-D size "
                "%.4f over %d N(0,1) samples of n=100 (bounds [0.08, 0.12]); "
                "%.1f s (< 120 s)",
                rate_chi2, rate_ad, sims, elapsed);
  const bool pass = rate_chi2 >= 0.08 && rate_chi2 <= 0.12 &&
                    rate_ad >= 0.08 && rate_ad <= 0.12 && elapsed < 120.0;
  report(1, pass, buf);
}

void criterion_2_special_functions() {
  bool pass = true;
  std::string detail;

  const double e_inv = std::exp(-1.0);
  if (std::fabs(stats::chi2_sf(2.0, 2) - e_inv) > 1e-12) {
    pass = false;
    detail += " chi2_sf(2,2) != exp(-1);";
  }

  double worst_gamma = 0.0;
  for (int dof = 1; dof <= 30; ++dof) {
    for (double x = 0.1; x <= 50.0; x += 0.5) {
      const double got = stats::chi2_sf(x, dof);
      const double want = gamma_q_oracle(0.5 * dof, 0.5 * x);
      worst_gamma = std::max(worst_gamma, std::fabs(got - want));
    }
  }
  if (worst_gamma >= 1e-8) pass = false;

  double worst_phi = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.0625) {
    worst_phi = std::max(
        worst_phi,
        std::fabs(stats::std_normal_cdf(-x) - (1.0 - stats::std_normal_cdf(x))));
  }
  if (worst_phi >= 1e-14) pass = false;

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "special functions: chi2_sf(2,2)-exp(-1) = %.2e (<1e-12), "
                "max |chi2_sf - quadrature| = %.2e (<1e-8), max Phi symmetry "
                "defect = %.2e (<1e-14)%s",
                std::fabs(stats::chi2_sf(2.0, 2) - e_inv), worst_gamma,
                worst_phi, detail.c_str());
  report(2, pass, buf);
}

void criterion_3_perplexity() {
  const fs::path dir = fs::temp_directory_path() / "subbench_acceptance";
  fs::create_directories(dir);
  const auto write_corpus = [&](const char* name,
                                const std::vector<std::string>& lines) {
    const fs::path p = dir / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    for (const auto& l : lines) os << l << '\n';
    os.close();
    return open_corpus(p);
  };

  bool pass = true;
  std::string detail;

  // Uniform floor only: PP equals |V_pred| exactly.
  {
    const Corpus train = write_corpus("pp_train.txt", {"a b c", "d e f g h"});
    const NGramModel m =
        train_ngram(train, build_vocab(train, 1), 3, {0, 0, 0, 1});
    const Corpus eval = write_corpus("pp_eval.txt", {"c d", "h a b"});
    const double pp = perplexity(m, eval);
    const double want = static_cast<double>(m.pred_vocab_size());
    if (std::fabs(pp - want) > 1e-9) {
      pass = false;
      detail += " uniform-floor PP off;";
    }
  }

  // Hand-derived closed form: training ["a b", "a a"], unigram-only
  // weights, eval "a a a b" gives PP = ((3/4)^3 * (1/4))^(-1/4).
  double hand_pp = 0.0, hand_want = 0.0;
  {
    const Corpus train = write_corpus("pp_hand_train.txt", {"a b", "a a"});
    const NGramModel m =
        train_ngram(train, build_vocab(train, 1), 3, {0, 0, 1, 0});
    const Corpus eval = write_corpus("pp_hand_eval.txt", {"a a a b"});
    hand_pp = perplexity(m, eval);
    hand_want = std::pow(0.75 * 0.75 * 0.75 * 0.25, -0.25);
    if (std::fabs(hand_pp - hand_want) > 1e-4) {
      pass = false;
      detail += " hand example off;";
    }
  }

  // Normalization over randomized models, 1000 contexts total.
  double worst_sum = 0.0;
  {
    SplitMix64 rng(314159);
    int contexts_done = 0;
    while (contexts_done < 1000) {
      std::vector<std::string> lines;
      const int n_lines = 2 + static_cast<int>(rng.below(12));
      const int vocab_size = 2 + static_cast<int>(rng.below(8));
      for (int l = 0; l < n_lines; ++l) {
        std::string line;
        const int len = 1 + static_cast<int>(rng.below(8));
        for (int t = 0; t < len; ++t) {
          if (t) line += ' ';
          line += static_cast<char>('a' + rng.below(vocab_size));
        }
        lines.push_back(line);
      }
      const Corpus c = write_corpus("pp_rand.txt", lines);
      const int order = 1 + static_cast<int>(rng.below(4));
      std::vector<double> lambdas(order + 1);
      double sum = 0.0;
      for (auto& l : lambdas) {
        l = rng.real01() + 0.01;
        sum += l;
      }
      for (auto& l : lambdas) l /= sum;
      double resid = 1.0;
      for (std::size_t i = 1; i < lambdas.size(); ++i) resid -= lambdas[i];
      lambdas[0] = resid;
      const NGramModel m = train_ngram(c, build_vocab(c, 1), order, lambdas);
      for (int k = 0; k < 25 && contexts_done < 1000; ++k, ++contexts_done) {
        std::vector<std::uint32_t> ctx(order - 1);
        for (auto& id : ctx) {
          id = static_cast<std::uint32_t>(rng.below(m.bos_id() + 1));
        }
        double total = 0.0;
        for (std::uint32_t w = 0;
             w < static_cast<std::uint32_t>(m.pred_vocab_size()); ++w) {
          total += m.prob(ctx, w);
        }
        worst_sum = std::max(worst_sum, std::fabs(total - 1.0));
      }
    }
    if (worst_sum >= 1e-9) {
      pass = false;
      detail += " normalization off;";
    }
  }

  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "perplexity closed forms: uniform floor exact, hand example "
                "%.6f vs ((3/4)^3 (1/4))^(-1/4) = %.6f (tol 1e-4), max "
                "|sum p - 1| = %.2e over 1000 contexts%s",
                hand_pp, hand_want, worst_sum, detail.c_str());
  report(3, pass, buf);
}

void criterion_4_gradient() {
  const Sigmoid sigmoid(true);  // exact mode
  SplitMix64 rng(777);
  const int dim = 10;
  const double lr = 1e-3, h = 1e-5;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::RowVectorXd u(dim), v(dim);
    for (int i = 0; i < dim; ++i) {
      u(i) = (rng.real01() - 0.5) * 3.0;
      v(i) = (rng.real01() - 0.5) * 3.0;
    }
    const double label = rng.below(2) ? 1.0 : 0.0;
    Eigen::RowVectorXd uu = u, vv = v;
    sgd_pair_update(vv, uu, label, lr, sigmoid);
    const Eigen::RowVectorXd grad_u = -(uu - u) / lr;
    const Eigen::RowVectorXd grad_v = -(vv - v) / lr;
    for (int i = 0; i < dim; ++i) {
      Eigen::RowVectorXd up = u, um = u;
      up(i) += h;
      um(i) -= h;
      const double fd_u =
          (pair_loss(v, up, label) - pair_loss(v, um, label)) / (2 * h);
      Eigen::RowVectorXd vp = v, vm = v;
      vp(i) += h;
      vm(i) -= h;
      const double fd_v =
          (pair_loss(vp, u, label) - pair_loss(vm, u, label)) / (2 * h);
      worst_rel = std::max(worst_rel, std::fabs(grad_u(i) - fd_u) /
                                          std::max(std::fabs(fd_u), 1e-8));
      worst_rel = std::max(worst_rel, std::fabs(grad_v(i) - fd_v) /
                                          std::max(std::fabs(fd_v), 1e-8));
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "SGNS gradient check: max relative error vs central finite "
                "differences = %.2e over 100 random configurations (< 1e-4)",
                worst_rel);
  report(4, worst_rel < 1e-4, buf);
}

void criterion_5_sampler_uniformity() {
  const fs::path dir = fs::temp_directory_path() / "subbench_acceptance";
  fs::create_directories(dir);
  const fs::path p = dir / "uniform_corpus.txt";
  {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    for (int i = 0; i < 10; ++i) os << "line " << i << '\n';
  }
  const Corpus corpus = open_corpus(p);
  const std::uint64_t n = 10, k = 3, trials = 100000;
  std::vector<std::uint64_t> inclusion(n, 0);
  bool size_ok = true;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Subset s = sample_lines(corpus, k, derive_seed(0xACCE55, k, t));
    if (s.indices.size() != k) size_ok = false;
    for (const std::uint64_t idx : s.indices) ++inclusion[idx];
  }
  const double expected = static_cast<double>(trials * k) / n;
  double stat = 0.0;
  for (const std::uint64_t c : inclusion) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  // Inclusion counts from exact-k draws are negatively correlated; the
  // Pearson statistic follows (n-k)/(n-1) chi2_{n-1} under uniformity.
  const double corrected =
      stat * static_cast<double>(n - 1) / static_cast<double>(n - k);
  const double p_value = stats::chi2_sf(corrected, static_cast<int>(n - 1));
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "sampler uniformity: N=10 k=3, 1e5 seeds, corrected chi2 = "
                "%.3f, p = %.4f (alpha 0.01), size always exactly k: %s",
                corrected, p_value, size_ok ? "yes" : "NO");
  report(5, size_ok && p_value > 0.01, buf);
}

// Shared state between criteria 6 and 7.
struct MirrorRun {
  fs::path csv_workers8;
  fs::path csv_workers1;
  double elapsed8 = 0.0;
};

ExperimentConfig mirror_config(const fs::path& corpus, const fs::path& questions,
                               const fs::path& out_dir, int workers) {
  ExperimentConfig config;
  config.corpus_path = corpus.string();
  config.questions_path = questions.string();
  config.out_dir = out_dir.string();
  config.sizes = {2000, 10000, 20000};
  config.replicates = 100;
  config.master_seed = 2026;
  config.heldout_lines = 1000;
  config.metric_analogy = true;
  config.metric_perplexity = true;
  config.alpha = 0.10;
  config.workers = workers;
  config.sgns.dim = 32;
  config.sgns.window = 3;
  config.sgns.negatives = 4;
  config.sgns.epochs = 2;
  config.sgns.initial_lr = 0.025;
  config.sgns.subsample_t = 1e-3;
  config.sgns.min_count = 5;
  config.ngram.order = 3;
  config.ngram.min_count = 1;
  return config;
}

MirrorRun criterion_6_mirror_experiment() {
  const fs::path dir = fs::temp_directory_path() / "subbench_acceptance";
  fs::create_directories(dir);
  const fs::path corpus_path = dir / "mirror_corpus.txt";
  const fs::path questions_path = dir / "mirror_questions.txt";

  SyntheticSpec spec;
  spec.n_families = 50;
  spec.n_filler = 2000;
  spec.n_lines = 200000;
  spec.seed = 20260810;
  generate_synthetic(spec, corpus_path, questions_path);

  MirrorRun out;
  const auto start = Clock::now();
  const ExperimentConfig config =
      mirror_config(corpus_path, questions_path, dir / "mirror8", 8);
  const RunResult run = run_experiment(config);
  out.elapsed8 = seconds_since(start);
  out.csv_workers8 = run.csv_path;

  // Group the posterior cells.
  const auto records = read_results_csv(run.csv_path);
  std::map<std::string, std::map<std::uint64_t, std::vector<double>>> cells;
  for (const auto& rec : records) {
    if (rec.value) cells[rec.metric][rec.size].push_back(*rec.value);
  }

  // (a) Normality non-rejection in at least 10 of the 12 cells.
  int h_zero = 0, total_tests = 0;
  std::string cell_report;
  for (const auto& [metric, by_size] : cells) {
    for (const auto& [size, values] : by_size) {
      stats::SampleSet s{values, metric, size};
      const auto [chi2, ad] = stats::normality_report(s, config.alpha);
      h_zero += (chi2.h == 0) + (ad.h == 0);
      total_tests += 2;
      char b[128];
      std::snprintf(b, sizeof(b), " [%s@%llu chi2 p=%.3f ad p=%.3f]",
                    metric.c_str(), static_cast<unsigned long long>(size),
                    chi2.p_value, ad.p_value);
      cell_report += b;
    }
  }

  // (b) Unbiased variance strictly decreasing with size for both metrics.
  bool variances_decreasing = true;
  std::string var_report;
  for (const auto& [metric, by_size] : cells) {
    double prev = 1e300;
    for (const auto& [size, values] : by_size) {
      const auto [mean, var] = stats::mean_variance(values);
      if (!(var < prev)) variances_decreasing = false;
      prev = var;
      char b[96];
      std::snprintf(b, sizeof(b), " [%s@%llu var=%.4g]", metric.c_str(),
                    static_cast<unsigned long long>(size), var);
      var_report += b;
    }
  }

  // (c) Mean analogy accuracy at the smallest size retains >= 50% of the
  // largest-size mean.
  const auto& acc = cells[kMetricAnalogy];
  const auto [mean_small, var_small] = stats::mean_variance(acc.begin()->second);
  const auto [mean_large, var_large] = stats::mean_variance(acc.rbegin()->second);
  const double retention = mean_small / mean_large;

  const bool pass_a = h_zero >= 10;
  const bool pass_b = variances_decreasing;
  const bool pass_c = retention >= 0.5;
  const bool pass_time = out.elapsed8 < 1800.0;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "paper-mirror experiment: h=0 in %d/%d cells (need >= 10);%s "
                "variances strictly decreasing: %s;%s accuracy retention "
                "%.3f (need >= 0.5, means %.2f%% -> %.2f%%); %.0f s (< 1800)",
                h_zero, total_tests, cell_report.c_str(),
                pass_b ? "yes" : "NO", var_report.c_str(), retention,
                mean_small, mean_large, out.elapsed8);
  report(6, pass_a && pass_b && pass_c && pass_time, buf);

  // Artifacts for inspection.
  analyze(run.csv_path, config.alpha, dir / "mirror8" / "analysis");
  return out;
}

void criterion_7_determinism(MirrorRun& mirror) {
  const fs::path dir = fs::temp_directory_path() / "subbench_acceptance";
  const ExperimentConfig config =
      mirror_config(dir / "mirror_corpus.txt", dir / "mirror_questions.txt",
                    dir / "mirror1", 1);
  const RunResult run = run_experiment(config);
  mirror.csv_workers1 = run.csv_path;

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(mirror.csv_workers8);
  const std::string b = slurp(mirror.csv_workers1);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "determinism: workers=1 and workers=8 results CSVs are %s "
                "(%zu bytes)",
                a == b ? "byte-identical" : "DIFFERENT", a.size());
  report(7, !a.empty() && a == b, buf);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion_1_calibration();
  criterion_2_special_functions();
  criterion_3_perplexity();
  criterion_4_gradient();
  criterion_5_sampler_uniformity();
  MirrorRun mirror = criterion_6_mirror_experiment();
  criterion_7_determinism(mirror);
  std::printf("acceptance finished in %.0f s: %s\n", seconds_since(start),
              g_failures == 0 ? "all criteria passed"
                              : (std::to_string(g_failures) +
                                 " criterion(s) failed")
                                    .c_str());
  return g_failures == 0 ? 0 : 1;
}
