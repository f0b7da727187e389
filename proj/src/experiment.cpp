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

#include "subbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "subbench/error.hpp"
#include "subbench/sampler.hpp"
#include "subbench/stats.hpp"

namespace subbench {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos, 0);  // accepts 0x.. too
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise(errkind::kConfigError,
          std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise(errkind::kConfigError,
          std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_seed(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, seed);
  return buf;
}

void write_atomic(const std::filesystem::path& path,
                  const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) raise(errkind::kIoError, "cannot write: " + tmp.string());
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    os.flush();
    if (!os) raise(errkind::kIoError, "write error: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    raise(errkind::kIoError,
          "cannot rename " + tmp.string() + " to " + path.string());
  }
}

struct CellKey {
  std::string metric;
  std::uint64_t size;
  bool operator<(const CellKey& o) const {
    if (metric != o.metric) return metric < o.metric;
    return size < o.size;
  }
};

}  // namespace

std::vector<std::string> ExperimentConfig::metric_names() const {
  std::vector<std::string> names;
  if (metric_analogy) names.push_back(kMetricAnalogy);
  if (metric_perplexity) names.push_back(kMetricPerplexity);
  return names;
}

void ExperimentConfig::validate(const Corpus& corpus) const {
  if (sizes.empty()) raise(errkind::kConfigError, "no subset sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) raise(errkind::kConfigError, "sizes must be positive");
    if (i + 1 < sizes.size() && sizes[i] >= sizes[i + 1]) {
      raise(errkind::kConfigError, "sizes must be strictly increasing");
    }
  }
  if (replicates < 1) raise(errkind::kConfigError, "replicates must be >= 1");
  if (heldout_lines < 1) {
    raise(errkind::kConfigError, "heldout_lines must be >= 1");
  }
  if (sizes.back() + heldout_lines > corpus.line_count) {
    raise(errkind::kConfigError,
          "max size + heldout_lines = " +
              std::to_string(sizes.back() + heldout_lines) +
              " exceeds corpus line count " +
              std::to_string(corpus.line_count));
  }
  if (!metric_analogy && !metric_perplexity) {
    raise(errkind::kConfigError, "no metric requested");
  }
  if (metric_analogy && questions_path.empty()) {
    raise(errkind::kConfigError,
          "analogy metric requested but no question file given");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    raise(errkind::kConfigError, "alpha must be in (0,1)");
  }
  if (workers < 1) raise(errkind::kConfigError, "workers must be >= 1");
  sgns.validate();
  if (ngram.order < 1 || ngram.order > NGramModel::kMaxOrder) {
    raise(errkind::kConfigError, "ngram order out of range");
  }
  if (ngram.min_count < 1) {
    raise(errkind::kConfigError, "ngram min_count must be >= 1");
  }
  if (!ngram.lambdas.empty() &&
      ngram.lambdas.size() != static_cast<std::size_t>(ngram.order) + 1) {
    raise(errkind::kConfigError,
          "ngram lambdas must have order+1 entries");
  }
}

void load_config_file(const std::filesystem::path& path,
                      ExperimentConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errkind::kIoError, "cannot open config file: " + path.string());
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      raise(errkind::kConfigError, "config line " + std::to_string(line_no) +
                                       " is not 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    if (key == "corpus") {
      config.corpus_path = value;
    } else if (key == "questions") {
      config.questions_path = value;
    } else if (key == "out_dir") {
      config.out_dir = value;
    } else if (key == "sizes") {
      config.sizes.clear();
      for (const auto& item : split_list(value)) {
        config.sizes.push_back(parse_u64(item, "sizes"));
      }
    } else if (key == "replicates") {
      config.replicates = static_cast<int>(parse_u64(value, "replicates"));
    } else if (key == "master_seed") {
      config.master_seed = parse_u64(value, "master_seed");
    } else if (key == "heldout_lines") {
      config.heldout_lines = parse_u64(value, "heldout_lines");
    } else if (key == "metrics") {
      config.metric_analogy = false;
      config.metric_perplexity = false;
      for (const auto& item : split_list(value)) {
        if (item == kMetricAnalogy || item == "analogy") {
          config.metric_analogy = true;
        } else if (item == kMetricPerplexity) {
          config.metric_perplexity = true;
        } else if (item == "both") {
          config.metric_analogy = config.metric_perplexity = true;
        } else {
          raise(errkind::kConfigError, "unknown metric '" + item + "'");
        }
      }
    } else if (key == "alpha") {
      config.alpha = parse_double(value, "alpha");
    } else if (key == "workers") {
      config.workers = static_cast<int>(parse_u64(value, "workers"));
    } else if (key == "ngram_order") {
      config.ngram.order = static_cast<int>(parse_u64(value, "ngram_order"));
    } else if (key == "ngram_min_count") {
      config.ngram.min_count =
          static_cast<std::uint32_t>(parse_u64(value, "ngram_min_count"));
    } else if (key == "ngram_lambdas") {
      config.ngram.lambdas.clear();
      for (const auto& item : split_list(value)) {
        config.ngram.lambdas.push_back(parse_double(item, "ngram_lambdas"));
      }
    } else if (key == "sgns_dim") {
      config.sgns.dim = static_cast<int>(parse_u64(value, "sgns_dim"));
    } else if (key == "sgns_window") {
      config.sgns.window = static_cast<int>(parse_u64(value, "sgns_window"));
    } else if (key == "sgns_negatives") {
      config.sgns.negatives =
          static_cast<int>(parse_u64(value, "sgns_negatives"));
    } else if (key == "sgns_epochs") {
      config.sgns.epochs = static_cast<int>(parse_u64(value, "sgns_epochs"));
    } else if (key == "sgns_lr") {
      config.sgns.initial_lr = parse_double(value, "sgns_lr");
    } else if (key == "sgns_subsample") {
      config.sgns.subsample_t = parse_double(value, "sgns_subsample");
    } else if (key == "sgns_min_count") {
      config.sgns.min_count =
          static_cast<std::uint32_t>(parse_u64(value, "sgns_min_count"));
    } else {
      raise(errkind::kConfigError, "unknown config key '" + key + "'");
    }
  }
}

std::pair<Corpus, Corpus> split_heldout(const Corpus& corpus,
                                        std::uint64_t heldout_lines,
                                        std::uint64_t master_seed,
                                        const std::filesystem::path& out_dir) {
  if (heldout_lines >= corpus.line_count) {
    raise(errkind::kSubsetTooLarge,
          "held-out size " + std::to_string(heldout_lines) +
              " must be smaller than the corpus (" +
              std::to_string(corpus.line_count) + " lines)");
  }
  std::filesystem::create_directories(out_dir);
  const Subset held =
      sample_lines(corpus, heldout_lines, derive_seed(master_seed, 0, 0));

  const std::filesystem::path pool_path = out_dir / "pool.txt";
  const std::filesystem::path held_path = out_dir / "heldout.txt";
  std::ofstream pool_os(pool_path, std::ios::binary | std::ios::trunc);
  std::ofstream held_os(held_path, std::ios::binary | std::ios::trunc);
  if (!pool_os || !held_os) {
    raise(errkind::kIoError, "cannot write split files under " +
                                 out_dir.string());
  }
  LineReader reader(corpus);
  std::string line;
  std::uint64_t line_no = 0;
  std::size_t next = 0;
  while (reader.next(line)) {
    if (next < held.indices.size() && line_no == held.indices[next]) {
      held_os << line << '\n';
      ++next;
    } else {
      pool_os << line << '\n';
    }
    ++line_no;
  }
  pool_os.flush();
  held_os.flush();
  if (!pool_os || !held_os) {
    raise(errkind::kIoError, "write error on split files under " +
                                 out_dir.string());
  }
  pool_os.close();
  held_os.close();
  return {open_corpus(pool_path), open_corpus(held_path)};
}

RunResult run_experiment(const ExperimentConfig& config) {
  const Corpus corpus = open_corpus(config.corpus_path);
  config.validate(corpus);
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path out_dir(config.out_dir);

  const auto [pool, heldout] =
      split_heldout(corpus, config.heldout_lines, config.master_seed, out_dir);

  std::vector<AnalogyQuestion> questions;
  if (config.metric_analogy) {
    questions = load_questions(config.questions_path);
    if (questions.empty()) {
      raise(errkind::kConfigError,
            "question file has no questions: " + config.questions_path);
    }
  }

  const std::filesystem::path tmp_dir = out_dir / "tmp";
  std::filesystem::create_directories(tmp_dir);

  struct Task {
    std::uint64_t size;
    int replicate;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(config.sizes.size() *
                static_cast<std::size_t>(config.replicates));
  for (const std::uint64_t size : config.sizes) {
    for (int r = 0; r < config.replicates; ++r) {
      tasks.push_back({size, r, derive_seed(config.master_seed, size, r)});
    }
  }

  struct TaskResult {
    std::optional<double> analogy;
    std::optional<double> perplexity_value;
    std::string error;
  };
  std::vector<TaskResult> results(tasks.size());

  std::atomic<std::size_t> cursor{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t t = cursor.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      TaskResult& out = results[t];
      const std::filesystem::path subset_path =
          tmp_dir / ("subset_" + std::to_string(task.size) + "_" +
                     std::to_string(task.replicate) + ".txt");
      try {
        const Subset subset = sample_lines(pool, task.size, task.seed);
        const Corpus sub_corpus = materialize(subset, subset_path);

        if (config.metric_analogy) {
          try {
            SgnsParams params = config.sgns;
            params.seed = task.seed;
            const EmbeddingModel model = train_sgns(sub_corpus, params);
            out.analogy = analogy_accuracy(model, questions).percent;
          } catch (const Error& e) {
            out.error = e.what();
          }
        }
        if (config.metric_perplexity) {
          try {
            Vocabulary vocab = build_vocab(sub_corpus, config.ngram.min_count);
            const NGramModel model = train_ngram(
                sub_corpus, std::move(vocab), config.ngram.order,
                config.ngram.lambdas.empty() ? default_lambdas(config.ngram.order)
                                             : config.ngram.lambdas);
            out.perplexity_value = perplexity(model, heldout);
          } catch (const Error& e) {
            if (!out.error.empty()) out.error += "; ";
            out.error += e.what();
          }
        }
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      std::error_code ec;
      std::filesystem::remove(subset_path, ec);

      const std::size_t finished = done.fetch_add(1) + 1;
      if (finished % 25 == 0 || finished == tasks.size()) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "[run] " << finished << "/" << tasks.size()
                  << " replicates evaluated\n";
      }
    }
  };

  const int n_threads =
      std::min<int>(config.workers, static_cast<int>(tasks.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  std::error_code ec;
  std::filesystem::remove_all(tmp_dir, ec);

  // Canonical row order: (size, replicate, metric alphabetical).
  const auto metric_list = config.metric_names();
  std::string csv = "size,replicate,seed,metric,value\n";
  int failed = 0;
  std::map<CellKey, int> cell_ok;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Task& task = tasks[t];
    const TaskResult& res = results[t];
    if (!res.error.empty()) {
      std::cerr << "[run] size=" << task.size
                << " replicate=" << task.replicate << " failed: " << res.error
                << "\n";
    }
    for (const auto& metric : metric_list) {
      const std::optional<double>& value =
          metric == kMetricAnalogy ? res.analogy : res.perplexity_value;
      const bool ok = value.has_value() && std::isfinite(*value);
      char row[160];
      std::snprintf(row, sizeof(row), "%" PRIu64 ",%d,%s,%s,%s\n", task.size,
                    task.replicate, format_seed(task.seed).c_str(),
                    metric.c_str(), ok ? format_value(*value).c_str() : "");
      csv += row;
      if (ok) {
        ++cell_ok[{metric, task.size}];
      } else {
        ++failed;
      }
    }
  }

  for (const auto& metric : metric_list) {
    for (const std::uint64_t size : config.sizes) {
      if (cell_ok[{metric, size}] == 0) {
        raise(errkind::kCellFailed,
              "every replicate failed for metric " + metric + " at size " +
                  std::to_string(size));
      }
    }
  }

  const std::filesystem::path csv_path = out_dir / "results.csv";
  write_atomic(csv_path, csv);
  return {csv_path, failed};
}

std::vector<EvalRecord> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errkind::kIoError, "cannot open results CSV: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) != "size,replicate,seed,metric,value") {
    raise(errkind::kConfigError,
          "results CSV missing the expected header: " + path.string());
  }
  std::vector<EvalRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 5) {
      raise(errkind::kConfigError, "results CSV line " +
                                       std::to_string(line_no) +
                                       " does not have 5 fields");
    }
    EvalRecord rec;
    rec.size = parse_u64(trim(fields[0]), "size");
    rec.replicate = static_cast<int>(parse_u64(trim(fields[1]), "replicate"));
    rec.seed = parse_u64("0x" + trim(fields[2]), "seed");
    rec.metric = trim(fields[3]);
    const std::string value = trim(fields[4]);
    if (!value.empty()) rec.value = parse_double(value, "value");
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

struct CellSummary {
  std::string metric;
  std::uint64_t size = 0;
  std::size_t n = 0;
  std::size_t missing = 0;
  std::optional<double> mean;
  std::optional<double> variance;
  std::optional<stats::NormalityTestResult> chi2;
  std::optional<stats::NormalityTestResult> ad;
  std::string warning;
};

std::string svg_scatter(const std::string& metric,
                        const std::vector<std::pair<std::uint64_t, double>>&
                            points) {
  constexpr double kWidth = 640, kHeight = 440;
  constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [s, v] : points) {
    xmin = std::min(xmin, static_cast<double>(s));
    xmax = std::max(xmax, static_cast<double>(s));
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (xmin >= xmax) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymin >= ymax) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  const auto sx = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  const auto sy = [&](double y) {
    return kHeight - kBottom -
           (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };
  char buf[256];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"440\" viewBox=\"0 0 640 440\">\n";
  svg += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                kLeft, kTop, kLeft, kHeight - kBottom);
  svg += buf;
  // Distinct sizes as x ticks, y range labels at both ends.
  std::vector<std::uint64_t> sizes;
  for (const auto& [s, v] : points) {
    if (sizes.empty() || sizes.back() != s) sizes.push_back(s);
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (const std::uint64_t s : sizes) {
    const double x = sx(static_cast<double>(s));
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                  "stroke=\"black\"/>\n",
                  x, kHeight - kBottom, x, kHeight - kBottom + 5);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                  "text-anchor=\"middle\">%" PRIu64 "</text>\n",
                  x, kHeight - kBottom + 20, s);
    svg += buf;
  }
  for (const double y : {ymin + ypad, ymax - ypad}) {
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                  "text-anchor=\"end\">%.6g</text>\n",
                  kLeft - 8, sy(y) + 4, y);
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"13\" "
                "text-anchor=\"middle\">subset size</text>\n",
                (kLeft + kWidth - kRight) / 2, kHeight - 10);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"15\" y=\"%.2f\" font-size=\"13\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 15 %.2f)\">"
                "%s</text>\n",
                (kTop + kHeight - kBottom) / 2, (kTop + kHeight - kBottom) / 2,
                metric.c_str());
  svg += buf;
  for (const auto& [s, v] : points) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" "
                  "fill=\"steelblue\" fill-opacity=\"0.55\"/>\n",
                  sx(static_cast<double>(s)), sy(v));
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

AnalyzeResult analyze(const std::filesystem::path& results_csv, double alpha,
                      const std::filesystem::path& out_dir) {
  const auto records = read_results_csv(results_csv);
  if (records.empty()) {
    raise(errkind::kConfigError, "results CSV has no data rows");
  }
  std::filesystem::create_directories(out_dir);

  // Group records into (metric, size) cells, canonical order.
  std::map<CellKey, std::vector<double>> cells;
  std::map<CellKey, std::size_t> missing;
  std::map<CellKey, std::vector<std::pair<int, double>>> scatter;
  for (const auto& rec : records) {
    const CellKey key{rec.metric, rec.size};
    if (rec.value && std::isfinite(*rec.value)) {
      cells[key].push_back(*rec.value);
      scatter[key].emplace_back(rec.replicate, *rec.value);
    } else {
      ++missing[key];
      cells.try_emplace(key);
    }
  }

  AnalyzeResult result;
  std::vector<CellSummary> summaries;
  for (const auto& [key, values] : cells) {
    CellSummary cell;
    cell.metric = key.metric;
    cell.size = key.size;
    cell.n = values.size();
    cell.missing = missing.count(key) ? missing.at(key) : 0;
    if (cell.missing > 0) {
      cell.warning = std::to_string(cell.missing) + " missing replicate(s)";
      ++result.warnings;
    }
    if (values.size() >= 2) {
      const auto [mean, var] = stats::mean_variance(values);
      cell.mean = mean;
      cell.variance = var;
    } else if (values.size() == 1) {
      cell.mean = values.front();
    }
    if (values.size() >= 8) {
      try {
        stats::SampleSet set{values, key.metric, key.size};
        const auto [chi2, ad] = stats::normality_report(set, alpha);
        cell.chi2 = chi2;
        cell.ad = ad;
      } catch (const Error& e) {
        if (!cell.warning.empty()) cell.warning += "; ";
        cell.warning += std::string("normality skipped: ") + e.what();
        ++result.warnings;
      }
    } else {
      if (!cell.warning.empty()) cell.warning += "; ";
      cell.warning += "normality skipped: n < 8";
      ++result.warnings;
    }
    summaries.push_back(std::move(cell));
  }

  // ---- summary.csv ----
  std::string csv =
      "metric,size,n,mean,variance,chi2_stat,chi2_p,chi2_h,ad_stat,ad_p,"
      "ad_h\n";
  for (const auto& cell : summaries) {
    csv += cell.metric + "," + std::to_string(cell.size) + "," +
           std::to_string(cell.n) + ",";
    csv += (cell.mean ? format_value(*cell.mean) : "") + std::string(",");
    csv += (cell.variance ? format_value(*cell.variance) : "") +
           std::string(",");
    if (cell.chi2) {
      csv += format_value(cell.chi2->statistic) + "," +
             format_value(cell.chi2->p_value) + "," +
             std::to_string(cell.chi2->h) + ",";
    } else {
      csv += ",,,";
    }
    if (cell.ad) {
      csv += format_value(cell.ad->statistic) + "," +
             format_value(cell.ad->p_value) + "," + std::to_string(cell.ad->h);
    } else {
      csv += ",,";
    }
    csv += "\n";
  }
  result.summary_csv = out_dir / "summary.csv";
  write_atomic(result.summary_csv, csv);

  // ---- variance scaling per metric ----
  std::vector<std::string> metrics;
  for (const auto& cell : summaries) {
    if (metrics.empty() || metrics.back() != cell.metric) {
      metrics.push_back(cell.metric);
    }
  }
  std::string scaling_csv =
      "metric,size,variance,inverse_fit_c,inverse_fit_r2,"
      "monotone_decreasing\n";
  std::string scaling_text;
  for (const auto& metric : metrics) {
    std::vector<std::uint64_t> sizes;
    std::vector<double> variances;
    for (const auto& cell : summaries) {
      if (cell.metric == metric && cell.variance && *cell.variance > 0.0) {
        sizes.push_back(cell.size);
        variances.push_back(*cell.variance);
      }
    }
    if (sizes.size() < 2) {
      scaling_text +=
          metric + ": variance scaling skipped (fewer than 2 usable cells)\n";
      ++result.warnings;
      continue;
    }
    const auto rep = stats::variance_scaling(sizes, variances);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      scaling_csv += metric + "," + std::to_string(sizes[i]) + "," +
                     format_value(variances[i]) + "," +
                     format_value(rep.inverse_fit_c) + "," +
                     format_value(rep.inverse_fit_r2) + "," +
                     (rep.monotone_decreasing ? "1" : "0") + "\n";
    }
    scaling_text += metric + ": variance " +
                    (rep.monotone_decreasing ? "strictly decreases" :
                                               "does NOT strictly decrease") +
                    " with size; fit v ~ " + format_value(rep.inverse_fit_c) +
                    "/s, R^2 = " + format_value(rep.inverse_fit_r2) + "\n";
  }
  result.scaling_csv = out_dir / "variance_scaling.csv";
  write_atomic(result.scaling_csv, scaling_csv);

  // ---- scatter CSV + SVG per metric ----
  for (const auto& metric : metrics) {
    std::vector<std::pair<std::uint64_t, double>> points;
    std::string pcsv = "size,value\n";
    for (const auto& [key, reps] : scatter) {
      if (key.metric != metric) continue;
      for (const auto& [rep, value] : reps) {
        points.emplace_back(key.size, value);
        pcsv += std::to_string(key.size) + "," + format_value(value) + "\n";
      }
    }
    const std::filesystem::path pcsv_path =
        out_dir / ("scatter_" + metric + ".csv");
    write_atomic(pcsv_path, pcsv);
    result.scatter_csv.push_back(pcsv_path);
    const std::filesystem::path svg_path =
        out_dir / ("scatter_" + metric + ".svg");
    write_atomic(svg_path, svg_scatter(metric, points));
    result.scatter_svg.push_back(svg_path);
  }

  // ---- human-readable summary ----
  std::string text;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-18s %10s %6s %12s %12s %9s %8s %3s %9s %8s %3s\n", "metric",
                "size", "n", "mean", "variance", "chi2", "chi2_p", "h",
                "ad", "ad_p", "h");
  text += buf;
  for (const auto& cell : summaries) {
    std::snprintf(buf, sizeof(buf), "%-18s %10" PRIu64 " %6zu",
                  cell.metric.c_str(), cell.size, cell.n);
    text += buf;
    const auto opt = [&](const std::optional<double>& v, int width) {
      char tmp[64];
      if (v) {
        std::snprintf(tmp, sizeof(tmp), " %*.6g", width, *v);
      } else {
        std::snprintf(tmp, sizeof(tmp), " %*s", width, "-");
      }
      text += tmp;
    };
    opt(cell.mean, 12);
    opt(cell.variance, 12);
    if (cell.chi2) {
      std::snprintf(buf, sizeof(buf), " %9.4g %8.4g %3d",
                    cell.chi2->statistic, cell.chi2->p_value, cell.chi2->h);
    } else {
      std::snprintf(buf, sizeof(buf), " %9s %8s %3s", "-", "-", "-");
    }
    text += buf;
    if (cell.ad) {
      std::snprintf(buf, sizeof(buf), " %9.4g %8.4g %3d\n",
                    cell.ad->statistic, cell.ad->p_value, cell.ad->h);
    } else {
      std::snprintf(buf, sizeof(buf), " %9s %8s %3s\n", "-", "-", "-");
    }
    text += buf;
  }
  text += "\n" + scaling_text;

  // Quality retention relative to the largest size (accuracy metrics only).
  for (const auto& metric : metrics) {
    if (metric != kMetricAnalogy) continue;
    std::optional<double> best;
    std::uint64_t best_size = 0;
    for (const auto& cell : summaries) {
      if (cell.metric == metric && cell.mean && cell.size > best_size) {
        best = *cell.mean;
        best_size = cell.size;
      }
    }
    if (!best || *best == 0.0) continue;
    text += "\n";
    for (const auto& cell : summaries) {
      if (cell.metric != metric || !cell.mean) continue;
      std::snprintf(buf, sizeof(buf),
                    "quality_ratio %s size=%" PRIu64 ": %.4f (mean %.6g / "
                    "max-size mean %.6g)\n",
                    metric.c_str(), cell.size, *cell.mean / *best, *cell.mean,
                    *best);
      text += buf;
    }
  }

  bool any_warning = false;
  for (const auto& cell : summaries) {
    if (cell.warning.empty()) continue;
    if (!any_warning) {
      text += "\nwarnings:\n";
      any_warning = true;
    }
    std::snprintf(buf, sizeof(buf), "  %s size=%" PRIu64 ": %s\n",
                  cell.metric.c_str(), cell.size, cell.warning.c_str());
    text += buf;
  }

  result.summary_txt = out_dir / "summary.txt";
  write_atomic(result.summary_txt, text);
  return result;
}

}  // namespace subbench
