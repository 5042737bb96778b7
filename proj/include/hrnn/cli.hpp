#pragma once

// Command-line front end: train / crossval / evaluate / predict.
//
// Option precedence: command-line flag > config-file entry > built-in
// default. The config file is line-based `key = value` with `#` comment
// lines, and its keys are exactly the model-configuration keys; unknown keys
// are fatal so typos cannot silently train the wrong model.
//
// Human-readable progress goes to the error stream, machine-readable results
// to the output stream. Exit codes: 0 success, 1 usage, 2 data or
// configuration error, 3 numeric failure.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <list>
#include <ostream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "hrnn/checkpoint.hpp"
#include "hrnn/errors.hpp"
#include "hrnn/evaluation.hpp"
#include "hrnn/model.hpp"
#include "hrnn/text.hpp"

namespace hrnn {

struct RunConfig {
  ModelConfig model;
  std::string data_path;
  std::string embeddings_path;
  std::string checkpoint_path;  // model to load
  std::string out_path;         // checkpoint to write
  std::string csv_path;
  std::string input_path;
  std::vector<std::string> texts;
  std::size_t folds = 10;
  bool grid_all = false;
  std::size_t jobs = 1;
  bool pooled = false;
  double threshold = 0.5;
  bool seed_given = false;
};

namespace detail {
inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}
}  // namespace detail

// Applies a `key = value` configuration file onto `config` and returns the
// keys that were set. Unknown keys and unparsable values are fatal, naming
// the offending line.
inline std::vector<std::string> apply_config_file(ModelConfig& config,
                                                  const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::vector<std::string> keys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = detail::trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected 'key = value'");
    }
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected 'key = value'");
    }
    apply_config_entry(config, key, value, path + ":" + std::to_string(line_no));
    keys.push_back(key);
  }
  return keys;
}

// A frozen stand-in word table when no pretrained file is supplied: seeded
// random vectors for every vocabulary word.
inline EmbeddingTable synthesize_word_table(const Vocabulary& vocab, std::size_t dim,
                                            std::uint64_t seed) {
  EmbeddingTable table;
  table.dim = dim;
  table.coverage = 1.0;
  Rng rng(seed);
  for (std::size_t id = 2; id < vocab.word_count(); ++id) {
    std::vector<real_t> row(dim);
    for (auto& v : row) v = static_cast<real_t>(rng.uniform(-0.5, 0.5));
    table.rows[vocab.id_to_word[id]] = std::move(row);
  }
  return table;
}

namespace detail {

// Binds CLI flags to model-configuration keys so flags and config-file
// entries share one parser and one set of range checks.
struct ModelFlagSet {
  std::list<std::string> storage;
  std::vector<std::pair<CLI::Option*, std::pair<std::string, std::string*>>> bound;
  CLI::Option* fine_tune = nullptr;
  CLI::Option* diag_peep = nullptr;
  CLI::Option* config_opt = nullptr;
  std::string config_path;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    storage.emplace_back();
    auto* opt = cmd->add_option(flag, storage.back(), help);
    bound.push_back({opt, {key, &storage.back()}});
  }

  void attach(CLI::App* cmd) {
    config_opt = cmd->add_option("--config", config_path,
                                 "configuration file (key = value lines)");
    add(cmd, "--arch", "arch", "recurrent cell: rnn, gru, or lstm");
    add(cmd, "--features", "features", "feature set: ce, we, or ce+we");
    add(cmd, "--hidden", "hidden", "recurrent hidden size");
    add(cmd, "--char-dim", "char_dim", "character embedding width");
    add(cmd, "--char-channels", "char_channels", "char-CNN channels per layer");
    add(cmd, "--kernel", "kernel", "char-CNN kernel width (odd)");
    add(cmd, "--dropout", "dropout", "dropout rate in [0, 1)");
    add(cmd, "--batch-size", "batch_size", "mini-batch size");
    add(cmd, "--lr", "learning_rate", "Adam learning rate");
    add(cmd, "--beta1", "beta1", "Adam beta1");
    add(cmd, "--beta2", "beta2", "Adam beta2");
    add(cmd, "--epsilon", "epsilon", "Adam epsilon");
    add(cmd, "--epochs", "epochs", "training epochs");
    add(cmd, "--seed", "seed", "random seed (random if omitted)");
    add(cmd, "--word-dim", "word_dim", "width of the synthesized word table");
    add(cmd, "--grad-clip", "grad_clip", "global gradient-norm limit");
    add(cmd, "--patience", "patience", "early-stopping patience (0 = off)");
    add(cmd, "--val-fraction", "val_fraction", "validation split for early stopping");
    fine_tune = cmd->add_flag("--fine-tune-words", "update word vectors during training");
    diag_peep = cmd->add_flag("--diagonal-peepholes", "diagonal LSTM peephole weights");
  }

  // defaults -> config file -> explicit flags; reports whether a seed was set
  bool resolve(ModelConfig& model) {
    bool seed_given = false;
    if (config_opt->count()) {
      for (const auto& key : apply_config_file(model, config_path)) {
        if (key == "seed") seed_given = true;
      }
    }
    for (auto& [opt, entry] : bound) {
      if (!opt->count()) continue;
      apply_config_entry(model, entry.first, *entry.second,
                         "option " + opt->get_name());
      if (entry.first == "seed") seed_given = true;
    }
    if (fine_tune->count()) model.fine_tune_words = true;
    if (diag_peep->count()) model.diagonal_peepholes = true;
    return seed_given;
  }
};

inline void ensure_seed(RunConfig& run, std::ostream& err) {
  if (!run.seed_given) {
    std::random_device rd;
    run.model.seed =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  }
  err << "seed " << run.model.seed << "\n";
}

// Loads or synthesizes the word table a WE-bearing configuration needs.
inline EmbeddingTable prepare_word_table(const RunConfig& run,
                                         const std::vector<HeadlineExample>& data,
                                         std::ostream& err) {
  const auto vocab = build_vocab(data);
  if (!run.embeddings_path.empty()) {
    auto table = load_pretrained_embeddings(run.embeddings_path, vocab);
    err << "loaded " << table.rows.size() << " word vectors (dim " << table.dim
        << ", coverage " << table.coverage << ")\n";
    return table;
  }
  err << "no --embeddings given; using a random frozen word table (dim "
      << run.model.word_dim << ")\n";
  return synthesize_word_table(vocab, run.model.word_dim,
                               mix_seed(run.model.seed, 3));
}

inline std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline int run_train(RunConfig& run, std::ostream& out, std::ostream& err) {
  ensure_seed(run, err);
  run.model.validate();
  auto data = load_dataset(run.data_path);
  err << "loaded " << data.size() << " headlines from " << run.data_path << "\n";

  EmbeddingTable table;
  const bool wants_words = run.model.features != FeatureMode::ce;
  if (wants_words) table = prepare_word_table(run, data, err);

  auto result = train(data, run.model, wants_words ? &table : nullptr, &out);
  save_checkpoint(run.out_path, run.model, result.vocab, result.params);
  err << "saved checkpoint to " << run.out_path << "\n";
  return 0;
}

inline int run_crossval(RunConfig& run, std::ostream& out, std::ostream& err) {
  ensure_seed(run, err);
  run.model.validate();
  auto data = load_dataset(run.data_path);
  err << "loaded " << data.size() << " headlines from " << run.data_path << "\n";

  const auto grid = run.grid_all
                        ? full_grid()
                        : std::vector<CrossvalSpec>{{run.model.arch, run.model.features}};
  bool wants_words = false;
  for (const auto& spec : grid) wants_words |= spec.features != FeatureMode::ce;

  EmbeddingTable table;
  if (wants_words) table = prepare_word_table(run, data, err);

  auto result = crossval_run(data, grid, run.folds, run.model.seed, run.model,
                             wants_words ? &table : nullptr, run.jobs, run.pooled,
                             &err);
  out << render_table(result) << "\n" << render_csv(result);
  if (!run.csv_path.empty()) {
    std::ofstream csv(run.csv_path);
    if (!csv) throw config_error("cannot write CSV to " + run.csv_path);
    csv << render_csv(result);
    err << "wrote CSV to " << run.csv_path << "\n";
  }
  return 0;
}

inline int run_evaluate(RunConfig& run, std::ostream& out, std::ostream& err) {
  auto ckpt = load_checkpoint(run.checkpoint_path);
  auto data = load_dataset(run.data_path);
  err << "evaluating " << data.size() << " headlines\n";
  auto report =
      evaluate_headlines(data, ckpt.vocab, ckpt.params, ckpt.config, run.threshold);
  out << "accuracy " << fixed6(report.accuracy) << "\n"
      << "precision " << fixed6(report.precision) << "\n"
      << "recall " << fixed6(report.recall) << "\n"
      << "f1 " << fixed6(report.f1) << "\n"
      << "roc_auc " << fixed6(report.roc_auc.value_or(0.0)) << "\n"
      << "confusion tp=" << report.tp << " fp=" << report.fp << " tn=" << report.tn
      << " fn=" << report.fn << "\n";
  return 0;
}

inline int run_predict(RunConfig& run, std::ostream& out, std::ostream& err) {
  std::vector<std::string> texts = run.texts;
  if (!run.input_path.empty()) {
    std::ifstream in(run.input_path);
    if (!in) throw parse_error("cannot open input file: " + run.input_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) texts.push_back(line);
    }
  }
  if (texts.empty()) {
    err << "predict needs --text or --input\n";
    return 1;
  }
  auto ckpt = load_checkpoint(run.checkpoint_path);
  auto predictions = predict(texts, ckpt, static_cast<real_t>(run.threshold));
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    if (p.ok) {
      out << p.label << " " << fixed6(p.probability) << "\n";
    } else {
      out << "NA NA\n";
      err << "headline " << i << ": " << p.error << "\n";
    }
  }
  return 0;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"bidirectional RNN clickbait headline classifier"};
  app.require_subcommand(1);

  RunConfig run;
  detail::ModelFlagSet train_flags, crossval_flags;

  auto* train_cmd = app.add_subcommand("train", "train a model and save a checkpoint");
  train_cmd->add_option("--data", run.data_path, "dataset TSV: <label>\\t<headline>")
      ->required();
  train_cmd->add_option("--out", run.out_path, "checkpoint file to write")->required();
  train_cmd->add_option("--embeddings", run.embeddings_path,
                        "pretrained word vectors (text format)");
  train_flags.attach(train_cmd);

  auto* crossval_cmd =
      app.add_subcommand("crossval", "stratified k-fold cross-validation");
  crossval_cmd->add_option("--data", run.data_path, "dataset TSV")->required();
  crossval_cmd->add_option("--folds", run.folds, "number of folds")
      ->default_val(std::size_t{10});
  crossval_cmd->add_option("--embeddings", run.embeddings_path,
                           "pretrained word vectors (text format)");
  crossval_cmd
      ->add_option_function<std::string>(
          "--grid",
          [&run](const std::string& value) {
            if (value == "all") run.grid_all = true;
            else if (value == "single") run.grid_all = false;
            else throw CLI::ValidationError("--grid", "expected 'all' or 'single'");
          },
          "'all' for every arch x feature combination, 'single' for --arch/--features")
      ->default_str("single");
  crossval_cmd->add_option("--jobs", run.jobs, "worker threads over folds")
      ->default_val(std::size_t{1});
  crossval_cmd->add_flag("--pooled", run.pooled,
                         "aggregate by pooling fold predictions instead of averaging");
  crossval_cmd->add_option("--out-csv", run.csv_path, "also write the CSV here");
  crossval_flags.attach(crossval_cmd);

  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "score a checkpoint on a labeled dataset");
  evaluate_cmd->add_option("--model", run.checkpoint_path, "checkpoint file")
      ->required();
  evaluate_cmd->add_option("--data", run.data_path, "dataset TSV")->required();
  evaluate_cmd->add_option("--threshold", run.threshold, "decision threshold")
      ->default_val(0.5);
  evaluate_cmd->add_option("--seed", run.model.seed,
                           "accepted for interface uniformity; evaluation is "
                           "deterministic");

  auto* predict_cmd = app.add_subcommand("predict", "classify raw headlines");
  predict_cmd->add_option("--model", run.checkpoint_path, "checkpoint file")
      ->required();
  predict_cmd->add_option("--text", run.texts, "headline to classify (repeatable)");
  predict_cmd->add_option("--input", run.input_path, "file with one headline per line");
  predict_cmd->add_option("--threshold", run.threshold, "decision threshold")
      ->default_val(0.5);
  predict_cmd->add_option("--seed", run.model.seed,
                          "accepted for interface uniformity; prediction is "
                          "deterministic");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (train_cmd->parsed()) {
      run.seed_given = train_flags.resolve(run.model);
      return detail::run_train(run, out, err);
    }
    if (crossval_cmd->parsed()) {
      run.seed_given = crossval_flags.resolve(run.model);
      return detail::run_crossval(run, out, err);
    }
    if (evaluate_cmd->parsed()) return detail::run_evaluate(run, out, err);
    return detail::run_predict(run, out, err);
  } catch (const numeric_error& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const parse_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const shape_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hrnn
