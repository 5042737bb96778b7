#pragma once

// Binary-classification metrics and the stratified k-fold cross-validation
// harness, with plain-text and CSV result rendering.

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hrnn/errors.hpp"
#include "hrnn/model.hpp"
#include "hrnn/rng.hpp"

namespace hrnn {

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> roc_auc;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Threshold rule: predicted positive iff prob >= threshold. Conventions for
// empty denominators: precision is 0 with no positive predictions, recall is
// 0 with no positives, f1 is 0 when precision + recall is 0.
inline MetricsReport confusion_metrics(const std::vector<real_t>& probs,
                                       const std::vector<int>& labels,
                                       double threshold = 0.5) {
  if (probs.size() != labels.size() || probs.empty()) {
    throw config_error("confusion_metrics: " + std::to_string(probs.size()) +
                       " probabilities vs " + std::to_string(labels.size()) +
                       " labels");
  }
  MetricsReport r;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++r.tp : ++r.fn;
    } else {
      predicted ? ++r.fp : ++r.tn;
    }
  }
  const double n = static_cast<double>(probs.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / n;
  r.precision = (r.tp + r.fp) ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

// Rank-based (Mann-Whitney) AUC: the fraction of (positive, negative) pairs
// scored in the right order, ties counting one half.
inline double roc_auc(const std::vector<real_t>& probs, const std::vector<int>& labels) {
  if (probs.size() != labels.size()) {
    throw config_error("roc_auc: size mismatch");
  }
  std::size_t positives = 0, negatives = 0;
  for (int y : labels) (y == 1 ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0) {
    throw config_error("roc_auc: undefined for single-class labels");
  }

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&probs](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  // average ranks across tie groups, then sum the positives' ranks
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && probs[order[j + 1]] == probs[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]] == 1) positive_rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

// k disjoint index sets covering [0, N): a seeded shuffle within each class
// followed by round-robin assignment, so per-fold class counts differ by at
// most one from perfect stratification.
struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;
  std::vector<std::array<std::size_t, 2>> class_counts;  // [fold][label]

  std::size_t k() const { return folds.size(); }
};

inline FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t k,
                                 std::uint64_t seed) {
  if (k < 2) throw config_error("stratified_kfold: k must be at least 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw config_error("stratified_kfold: label at index " + std::to_string(i) +
                         " is not binary");
    }
    by_class[labels[i]].push_back(i);
  }
  for (int cls = 0; cls < 2; ++cls) {
    if (by_class[cls].size() < k) {
      throw config_error("stratified_kfold: class " + std::to_string(cls) + " has " +
                         std::to_string(by_class[cls].size()) + " members, needs " +
                         std::to_string(k));
    }
  }
  Rng rng(seed);
  FoldPlan plan;
  plan.folds.resize(k);
  plan.class_counts.assign(k, {0, 0});
  for (int cls = 0; cls < 2; ++cls) {
    auto& members = by_class[cls];
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j) {
      plan.folds[j % k].push_back(members[j]);
      plan.class_counts[j % k][cls] += 1;
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

struct CrossvalSpec {
  CellKind arch;
  FeatureMode features;
};

// Rows in the canonical comparison order: each architecture with CE, WE, and
// CE+WE features.
inline std::vector<CrossvalSpec> full_grid() {
  std::vector<CrossvalSpec> grid;
  for (auto arch : {CellKind::rnn, CellKind::gru, CellKind::lstm}) {
    for (auto features : {FeatureMode::ce, FeatureMode::we, FeatureMode::ce_we}) {
      grid.push_back({arch, features});
    }
  }
  return grid;
}

struct CrossvalConfigResult {
  CrossvalSpec spec;
  std::vector<MetricsReport> folds;
  MetricsReport aggregate;
};

struct CrossvalResult {
  std::vector<CrossvalConfigResult> configs;
  std::size_t k = 0;
  bool pooled = false;
};

namespace detail {
inline MetricsReport mean_of(const std::vector<MetricsReport>& folds) {
  MetricsReport m;
  double auc = 0.0;
  for (const auto& f : folds) {
    m.accuracy += f.accuracy;
    m.precision += f.precision;
    m.recall += f.recall;
    m.f1 += f.f1;
    auc += f.roc_auc.value_or(0.0);
    m.tp += f.tp;
    m.fp += f.fp;
    m.tn += f.tn;
    m.fn += f.fn;
  }
  const double k = static_cast<double>(folds.size());
  m.accuracy /= k;
  m.precision /= k;
  m.recall /= k;
  m.f1 /= k;
  m.roc_auc = auc / k;
  return m;
}
}  // namespace detail

// Trains and scores every (spec, fold) pair: the model is fit on the other
// k-1 folds (vocabulary included, so held-out words are genuinely unseen) and
// evaluated on the held-out fold. Aggregation is the arithmetic mean of fold
// metrics, or pooled predictions when `pooled` is set. Tasks are independent
// and may run on `jobs` worker threads; results do not depend on scheduling.
inline CrossvalResult crossval_run(const std::vector<HeadlineExample>& data,
                                   const std::vector<CrossvalSpec>& grid,
                                   std::size_t k, std::uint64_t seed,
                                   const ModelConfig& base,
                                   const EmbeddingTable* table, std::size_t jobs = 1,
                                   bool pooled = false,
                                   std::ostream* progress = nullptr) {
  if (grid.empty()) throw config_error("crossval_run: empty configuration grid");
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& ex : data) labels.push_back(ex.label);
  const FoldPlan plan = stratified_kfold(labels, k, seed);

  struct Task {
    std::size_t config_index;
    std::size_t fold_index;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (std::size_t f = 0; f < k; ++f) tasks.push_back({c, f});
  }

  struct FoldOutcome {
    MetricsReport report;
    std::vector<real_t> probs;
    std::vector<int> labels;
  };
  std::vector<FoldOutcome> outcomes(tasks.size());
  std::mutex progress_mutex;

  auto run_task = [&](std::size_t task_index) {
    const auto& task = tasks[task_index];
    const auto& spec = grid[task.config_index];
    ModelConfig config = base;
    config.arch = spec.arch;
    config.features = spec.features;
    config.seed = mix_seed(seed, task_index);

    std::vector<HeadlineExample> train_split;
    std::vector<const HeadlineExample*> held_out;
    for (std::size_t f = 0; f < k; ++f) {
      for (std::size_t i : plan.folds[f]) {
        if (f == task.fold_index) held_out.push_back(&data[i]);
        else train_split.push_back(data[i]);
      }
    }
    auto trained = train(train_split, config,
                         config.features == FeatureMode::ce ? nullptr : table);

    auto& out = outcomes[task_index];
    out.probs = predict_probabilities(held_out, trained.vocab, trained.params, config);
    out.labels.reserve(held_out.size());
    for (const auto* ex : held_out) out.labels.push_back(ex->label);
    out.report = confusion_metrics(out.probs, out.labels);
    out.report.roc_auc = roc_auc(out.probs, out.labels);
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      *progress << "Bi" << to_string(spec.arch) << " (" << to_string(spec.features)
                << ") fold " << task.fold_index << ": accuracy "
                << out.report.accuracy << '\n';
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      try {
        run_task(i);
      } catch (const std::exception& e) {
        throw numeric_error("crossval Bi" + to_string(grid[tasks[i].config_index].arch) +
                            " (" + to_string(grid[tasks[i].config_index].features) +
                            ") fold " + std::to_string(tasks[i].fold_index) + ": " +
                            e.what());
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          run_task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  CrossvalResult result;
  result.k = k;
  result.pooled = pooled;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    CrossvalConfigResult config_result;
    config_result.spec = grid[c];
    std::vector<real_t> pooled_probs;
    std::vector<int> pooled_labels;
    for (std::size_t f = 0; f < k; ++f) {
      auto& out = outcomes[c * k + f];
      config_result.folds.push_back(out.report);
      if (pooled) {
        pooled_probs.insert(pooled_probs.end(), out.probs.begin(), out.probs.end());
        pooled_labels.insert(pooled_labels.end(), out.labels.begin(), out.labels.end());
      }
    }
    if (pooled) {
      config_result.aggregate = confusion_metrics(pooled_probs, pooled_labels);
      config_result.aggregate.roc_auc = roc_auc(pooled_probs, pooled_labels);
    } else {
      config_result.aggregate = detail::mean_of(config_result.folds);
    }
    result.configs.push_back(std::move(config_result));
  }
  return result;
}

// --- rendering ----------------------------------------------------------------

inline std::string model_name(const CrossvalSpec& spec) {
  std::string arch = to_string(spec.arch);
  for (auto& c : arch) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  std::string features = to_string(spec.features);
  for (auto& c : features) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return "Bi" + arch + " (" + features + ")";
}

namespace detail {
inline std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}
}  // namespace detail

inline std::string render_table(const CrossvalResult& result) {
  std::string out;
  out += "Model            Accuracy  Precision  Recall    F1-Score  ROC-AUC\n";
  for (const auto& config : result.configs) {
    std::string name = model_name(config.spec);
    name.resize(17, ' ');
    const auto& m = config.aggregate;
    out += name;
    out += detail::fixed(m.accuracy, 4) + "    ";
    out += detail::fixed(m.precision, 4) + "     ";
    out += detail::fixed(m.recall, 4) + "    ";
    out += detail::fixed(m.f1, 4) + "    ";
    out += detail::fixed(m.roc_auc.value_or(0.0), 4) + "\n";
  }
  return out;
}

inline std::string render_csv(const CrossvalResult& result) {
  std::string out = "arch,features,fold,accuracy,precision,recall,f1,roc_auc\n";
  auto row = [&out](const CrossvalSpec& spec, const std::string& fold,
                    const MetricsReport& m) {
    out += to_string(spec.arch) + "," + to_string(spec.features) + "," + fold + "," +
           detail::fixed(m.accuracy, 6) + "," + detail::fixed(m.precision, 6) + "," +
           detail::fixed(m.recall, 6) + "," + detail::fixed(m.f1, 6) + "," +
           detail::fixed(m.roc_auc.value_or(0.0), 6) + "\n";
  };
  for (const auto& config : result.configs) {
    for (std::size_t f = 0; f < config.folds.size(); ++f) {
      row(config.spec, std::to_string(f), config.folds[f]);
    }
    row(config.spec, "mean", config.aggregate);
  }
  return out;
}

// Full metric set for a labeled dataset under a trained model.
inline MetricsReport evaluate_headlines(const std::vector<HeadlineExample>& examples,
                                        const Vocabulary& vocab,
                                        const ModelParams& params,
                                        const ModelConfig& config,
                                        double threshold = 0.5) {
  std::vector<const HeadlineExample*> ptrs;
  ptrs.reserve(examples.size());
  for (const auto& ex : examples) ptrs.push_back(&ex);
  auto probs = predict_probabilities(ptrs, vocab, params, config);
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& ex : examples) labels.push_back(ex.label);
  auto report = confusion_metrics(probs, labels, threshold);
  report.roc_auc = roc_auc(probs, labels);
  return report;
}

}  // namespace hrnn
