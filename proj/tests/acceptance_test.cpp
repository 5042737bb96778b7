// Acceptance suite. Each test is one release criterion; a listener prints a
// single PASS/FAIL/SKIP line per criterion so the outcome is scannable.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hrnn/hrnn.hpp"
#include "oracles.hpp"

using hrnn::CellKind;
using hrnn::FeatureMode;
using hrnn::make_example;
using hrnn::make_tensor;
using hrnn::ModelConfig;
using hrnn::Rng;
using hrnn::RunMode;
using hrnn::Tape;
using hrnn::TensorPtr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

TensorPtr random_tensor(hrnn::Shape shape, Rng& rng, bool requires_grad = true,
                        double lo = -2.0, double hi = 2.0) {
  auto t = make_tensor(std::move(shape), 0.0, requires_grad);
  for (auto& v : t->data) v = rng.uniform(lo, hi);
  return t;
}

void randomize(const TensorPtr& t, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (auto& v : t->data) v = rng.uniform(lo, hi);
}

std::vector<double> to_vec(const TensorPtr& t) {
  return std::vector<double>(t->data.begin(), t->data.end());
}

std::vector<TensorPtr> cell_tensors(const hrnn::CellParams& cell) {
  std::vector<TensorPtr> out;
  if (const auto* r = std::get_if<hrnn::RnnCellParams>(&cell)) {
    out = {r->U, r->W_x, r->b};
  } else if (const auto* g = std::get_if<hrnn::GruCellParams>(&cell)) {
    out = {g->W_z, g->U_z, g->W_r, g->U_r, g->W_h, g->U};
  } else {
    const auto& l = std::get<hrnn::LstmCellParams>(cell);
    out = {l.W_xi, l.W_hi, l.W_ci, l.b_i, l.W_xf, l.W_hf, l.W_cf, l.b_f,
           l.W_xc, l.W_hc, l.b_c,  l.W_xo, l.W_ho, l.W_co, l.b_o};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criterion: finite-difference gradient checks for every primitive op, each
// cell unrolled three steps, the char-CNN encoder, and the full model
// (H=4, d_c=4, B=2, T<=4), all at relative error <= 1e-4 in double precision,
// in under two minutes.
TEST(Acceptance, GradientSuite) {
  const auto start = Clock::now();
  Rng rng(2024);

  {  // primitive ops
    auto a = random_tensor({3, 4}, rng);
    auto b = random_tensor({3, 4}, rng);
    auto m2 = random_tensor({4, 2}, rng);
    auto bias = random_tensor({4}, rng);
    auto r = random_tensor({3, 4}, rng);
    for (auto& v : r->data) {
      if (std::abs(v) < 1e-2) v = 0.5;  // keep relu off its kink
    }
    auto conv_x = random_tensor({2, 5, 3}, rng);
    auto conv_w = random_tensor({3, 3, 2}, rng);
    auto conv_b = random_tensor({2}, rng);
    const std::vector<std::size_t> conv_lens{5, 3};
    auto table = random_tensor({6, 3}, rng);

    struct Case {
      const char* name;
      std::vector<TensorPtr> params;
      std::function<TensorPtr(Tape&)> build;
    };
    const std::vector<Case> cases = {
        {"matmul", {a, m2}, [&](Tape& t) { return t.matmul(a, m2); }},
        {"sigmoid", {a}, [&](Tape& t) { return t.sigmoid(a); }},
        {"tanh", {a}, [&](Tape& t) { return t.tanh(a); }},
        {"relu", {r}, [&](Tape& t) { return t.relu(r); }},
        {"add", {a, b}, [&](Tape& t) { return t.add(a, b); }},
        {"sub", {a, b}, [&](Tape& t) { return t.sub(a, b); }},
        {"mul", {a, b}, [&](Tape& t) { return t.mul(a, b); }},
        {"add_row_bias", {a, bias}, [&](Tape& t) { return t.add_row_bias(a, bias); }},
        {"concat", {a, b}, [&](Tape& t) { return t.concat({a, b}, 1); }},
        {"max_over_time", {a}, [&](Tape& t) { return t.max_over_time(a, 2); }},
        {"max_over_time_batch",
         {conv_x},
         [&](Tape& t) { return t.max_over_time_batch(conv_x, conv_lens); }},
        {"conv1d_same",
         {conv_x, conv_w, conv_b},
         [&](Tape& t) { return t.conv1d_same(conv_x, conv_w, conv_b, conv_lens); }},
        {"gather_rows", {table}, [&](Tape& t) { return t.gather_rows(table, {4, 0, 4, 2}); }},
        {"reshape", {a}, [&](Tape& t) { return t.reshape(a, {4, 3}); }},
    };
    for (const auto& c : cases) {
      for (auto& p : c.params) p->grad.clear();
      auto forward = [&]() {
        Tape t;
        return t.sum(c.build(t))->data[0];
      };
      Tape t;
      t.backward(t.sum(c.build(t)));
      EXPECT_TRUE(oracles::gradients_match(c.params, forward)) << c.name;
    }
  }

  {  // each cell, three steps
    const std::size_t H = 3, D = 2, T = 3;
    std::vector<hrnn::CellParams> cells{hrnn::init_rnn_cell(H, D, rng),
                                        hrnn::init_gru_cell(H, D, rng),
                                        hrnn::init_lstm_cell(H, D, false, rng)};
    for (auto& cell : cells) {
      std::vector<TensorPtr> xs;
      for (std::size_t i = 0; i < T; ++i) xs.push_back(random_tensor({2, D}, rng, false));
      auto forward = [&]() {
        Tape t;
        auto state = hrnn::initial_state(cell, 2);
        for (std::size_t i = 0; i < T; ++i) state = hrnn::cell_step(t, cell, xs[i], state);
        return t.sum(state.h)->data[0];
      };
      Tape t;
      auto state = hrnn::initial_state(cell, 2);
      for (std::size_t i = 0; i < T; ++i) state = hrnn::cell_step(t, cell, xs[i], state);
      t.backward(t.sum(state.h));
      EXPECT_TRUE(oracles::gradients_match(cell_tensors(cell), forward));
    }
  }

  {  // char-CNN encoder
    auto params = hrnn::init_char_cnn(7, 4, 3, {4, 4, 4}, rng);
    const std::vector<std::int32_t> word{2, 5, 3, 6, 2};
    auto forward = [&]() {
      Tape t;
      return t.sum(hrnn::char_cnn_encode(t, params, word))->data[0];
    };
    std::vector<TensorPtr> trainable{params.char_embed};
    for (auto& layer : params.layers) {
      trainable.push_back(layer.weight);
      trainable.push_back(layer.bias);
    }
    Tape t;
    t.backward(t.sum(hrnn::char_cnn_encode(t, params, word)));
    EXPECT_TRUE(oracles::gradients_match(trainable, forward));
  }

  {  // full model, every architecture: H=4, d_c=4, B=2, T<=4
    std::vector<hrnn::HeadlineExample> corpus{make_example("ab cd ab", 1),
                                              make_example("ba dc", 0)};
    auto vocab = hrnn::build_vocab(corpus);
    hrnn::EmbeddingTable table;
    table.dim = 3;
    Rng table_rng(5);
    for (std::size_t id = 2; id < vocab.word_count(); ++id) {
      std::vector<hrnn::real_t> row(3);
      for (auto& v : row) v = table_rng.uniform(-0.5, 0.5);
      table.rows[vocab.id_to_word[id]] = row;
    }
    for (auto arch : {CellKind::rnn, CellKind::gru, CellKind::lstm}) {
      ModelConfig config;
      config.arch = arch;
      config.features = FeatureMode::ce_we;
      config.hidden = 4;
      config.char_dim = 4;
      config.char_channels = 4;
      config.dropout = 0.0;
      config.word_dim = 3;
      auto params = hrnn::init_model(config, vocab, &table);
      auto batch = hrnn::encode_batch(corpus, vocab);
      auto trainable = hrnn::trainable_tensors(params);

      auto forward = [&]() {
        Tape t;
        Rng unused(0);
        auto probs =
            hrnn::forward_headline(t, batch, params, config, RunMode::eval, unused);
        return hrnn::bce_loss(t, probs, batch.labels)->data[0];
      };
      hrnn::zero_gradients(trainable);
      Tape t;
      Rng unused(0);
      auto probs =
          hrnn::forward_headline(t, batch, params, config, RunMode::eval, unused);
      t.backward(hrnn::bce_loss(t, probs, batch.labels));
      std::vector<TensorPtr> tensors;
      for (auto& [name, tensor] : trainable) tensors.push_back(tensor);
      EXPECT_TRUE(oracles::gradients_match(tensors, forward))
          << "arch " << hrnn::to_string(arch);
    }
  }

  EXPECT_LT(seconds_since(start), 120.0) << "gradient suite must stay under 2 minutes";
}

// ---------------------------------------------------------------------------
// Criterion: cell steps and the Adam update match independent straight-line
// transcriptions on 100 random draws each, |delta| <= 1e-12.
TEST(Acceptance, EquationOracles) {
  Rng rng(77);
  const double tol = 1e-12;

  for (int draw = 0; draw < 100; ++draw) {  // plain RNN
    const std::size_t H = 3, D = 3;
    auto p = hrnn::init_rnn_cell(H, D, rng);
    randomize(p.U, rng);
    randomize(p.W_x, rng);
    randomize(p.b, rng);
    auto x = random_tensor({1, D}, rng, false);
    auto h = random_tensor({1, H}, rng, false, -1, 1);
    Tape t;
    auto next = hrnn::rnn_step(t, x, {h, nullptr}, p);
    auto expected = oracles::rnn_step(to_vec(x), to_vec(h), to_vec(p.U), to_vec(p.W_x),
                                      to_vec(p.b), H, D);
    for (std::size_t i = 0; i < H; ++i) ASSERT_NEAR(next.h->data[i], expected[i], tol);
  }

  for (int draw = 0; draw < 100; ++draw) {  // LSTM with peepholes
    const std::size_t H = 2, D = 3;
    auto p = hrnn::init_lstm_cell(H, D, false, rng);
    for (auto& w : cell_tensors(hrnn::CellParams{p})) randomize(w, rng);
    auto x = random_tensor({1, D}, rng, false);
    auto h = random_tensor({1, H}, rng, false, -1, 1);
    auto c = random_tensor({1, H}, rng, false, -1, 1);
    Tape t;
    auto next = hrnn::lstm_step(t, x, {h, c}, p);
    auto ho = to_vec(h);
    auto co = to_vec(c);
    oracles::lstm_step(to_vec(x), ho, co,
                       {to_vec(p.W_xi), to_vec(p.W_hi), to_vec(p.W_ci), to_vec(p.b_i),
                        to_vec(p.W_xf), to_vec(p.W_hf), to_vec(p.W_cf), to_vec(p.b_f),
                        to_vec(p.W_xc), to_vec(p.W_hc), to_vec(p.b_c), to_vec(p.W_xo),
                        to_vec(p.W_ho), to_vec(p.W_co), to_vec(p.b_o)},
                       H, D);
    for (std::size_t i = 0; i < H; ++i) {
      ASSERT_NEAR(next.h->data[i], ho[i], tol);
      ASSERT_NEAR(next.c->data[i], co[i], tol);
    }
  }

  for (int draw = 0; draw < 100; ++draw) {  // GRU
    const std::size_t H = 2, D = 3;
    auto p = hrnn::init_gru_cell(H, D, rng);
    for (auto& w : cell_tensors(hrnn::CellParams{p})) randomize(w, rng);
    auto x = random_tensor({1, D}, rng, false);
    auto h = random_tensor({1, H}, rng, false, -1, 1);
    Tape t;
    auto next = hrnn::gru_step(t, x, {h, nullptr}, p);
    auto expected = oracles::gru_step(to_vec(x), to_vec(h),
                                      {to_vec(p.W_z), to_vec(p.U_z), to_vec(p.W_r),
                                       to_vec(p.U_r), to_vec(p.W_h), to_vec(p.U)},
                                      H, D);
    for (std::size_t i = 0; i < H; ++i) ASSERT_NEAR(next.h->data[i], expected[i], tol);
  }

  for (int draw = 0; draw < 100; ++draw) {  // Adam
    const double lr = rng.uniform(1e-4, 1e-1);
    const double b1 = rng.uniform(0.5, 0.99);
    const double b2 = rng.uniform(0.9, 0.9999);
    const double eps = 1e-8;
    auto theta = random_tensor({4}, rng, true);
    std::vector<double> oracle_theta = to_vec(theta);
    hrnn::AdamState state;
    oracles::AdamOracleState oracle_state;
    for (int step = 0; step < 5; ++step) {
      std::vector<double> g(4);
      for (auto& v : g) v = rng.uniform(-2, 2);
      theta->grad.assign(g.begin(), g.end());
      hrnn::adam_update({{"theta", theta}}, state, lr, b1, b2, eps);
      oracles::adam_step(oracle_theta, g, oracle_state, lr, b1, b2, eps);
      for (std::size_t i = 0; i < 4; ++i) {
        ASSERT_NEAR(theta->data[i], oracle_theta[i], tol);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion: the rank-based AUC equals exhaustive pair counting on 1,000
// random instances with N <= 200 (exact equality); confusion metrics match
// the hand-worked cases exactly; an all-zero model scores exactly 0.5.
TEST(Acceptance, MetricOracles) {
  Rng rng(99);
  std::size_t checked = 0;
  while (checked < 1000) {
    const std::size_t n = 2 + rng.index(199);
    std::vector<hrnn::real_t> probs(n);
    std::vector<int> labels(n);
    bool has[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = rng.bernoulli(0.3) ? std::round(rng.uniform(0, 1) * 10.0) / 10.0
                                    : rng.uniform(0, 1);
      labels[i] = static_cast<int>(rng.index(2));
      has[labels[i]] = true;
    }
    if (!has[0] || !has[1]) continue;
    ++checked;
    const std::vector<double> as_double(probs.begin(), probs.end());
    ASSERT_EQ(hrnn::roc_auc(probs, labels),
              oracles::brute_force_auc(as_double, labels))
        << "instance " << checked << " with n " << n;
  }

  auto hand = hrnn::confusion_metrics(
      {0.9, 0.8, 0.7, 0.2, 0.1, 0.1, 0.2, 0.3, 0.1, 0.4},
      {1, 1, 0, 1, 0, 0, 0, 0, 0, 0});
  ASSERT_DOUBLE_EQ(hand.precision, 2.0 / 3.0);
  ASSERT_DOUBLE_EQ(hand.recall, 2.0 / 3.0);
  ASSERT_DOUBLE_EQ(hand.f1, 2.0 / 3.0);
  ASSERT_DOUBLE_EQ(hand.accuracy, 0.8);
  ASSERT_DOUBLE_EQ(hrnn::roc_auc({0.9, 0.8, 0.3}, {1, 0, 1}), 0.5);

  // all-zero parameters emit sigma(0) = 0.5 exactly
  std::vector<hrnn::HeadlineExample> corpus{make_example("some headline here", 1),
                                            make_example("another one", 0)};
  auto vocab = hrnn::build_vocab(corpus);
  ModelConfig config;
  config.features = FeatureMode::ce;
  config.hidden = 4;
  config.char_dim = 4;
  config.char_channels = 4;
  auto params = hrnn::init_model(config, vocab, nullptr);
  for (auto& [name, tensor] : hrnn::named_tensors(params)) {
    std::fill(tensor->data.begin(), tensor->data.end(), 0.0);
  }
  auto batch = hrnn::encode_batch(corpus, vocab);
  Tape t;
  Rng unused(0);
  auto probs = hrnn::forward_headline(t, batch, params, config, RunMode::eval, unused);
  for (auto p : probs->data) ASSERT_EQ(p, 0.5);
}

// ---------------------------------------------------------------------------
// Synthetic marker-token task shared by the learnability criterion and the
// persistence criterion.
std::vector<hrnn::HeadlineExample> marker_task_corpus(std::size_t n, Rng& rng) {
  const std::vector<std::string> markers{"tok007", "tok042", "tok111", "tok158",
                                         "tok193"};
  auto is_marker = [&](std::size_t id) {
    return id == 7 || id == 42 || id == 111 || id == 158 || id == 193;
  };
  std::vector<hrnn::HeadlineExample> corpus;
  corpus.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : 0;
    const std::size_t len = 4 + rng.index(6);
    std::vector<std::string> tokens(len);
    for (auto& tok : tokens) {
      std::size_t id = rng.index(200);
      while (is_marker(id)) id = rng.index(200);
      char buf[16];
      std::snprintf(buf, sizeof(buf), "tok%03zu", id);
      tok = buf;
    }
    if (label == 1) tokens[rng.index(len)] = markers[rng.index(markers.size())];
    std::string text;
    for (const auto& tok : tokens) {
      if (!text.empty()) text += ' ';
      text += tok;
    }
    corpus.push_back(make_example(text, label));
  }
  return corpus;
}

hrnn::EmbeddingTable marker_task_table(std::uint64_t seed) {
  hrnn::EmbeddingTable table;
  table.dim = 16;
  Rng rng(seed);
  for (std::size_t id = 0; id < 200; ++id) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "tok%03zu", id);
    std::vector<hrnn::real_t> row(16);
    for (auto& v : row) v = rng.uniform(-0.5, 0.5);
    table.rows[buf] = std::move(row);
  }
  return table;
}

// Criterion: on 2,000 generated headlines over a 200-token vocabulary where
// label 1 means "contains one of 5 marker tokens", a BiLSTM over CE plus
// random frozen 16-d word vectors reaches held-out (20%) accuracy >= 0.97
// within 10 epochs; BiGRU and BiRNN reach >= 0.95. Under 5 minutes each.
TEST(Acceptance, SyntheticLearnability) {
  Rng data_rng(4242);
  auto corpus = marker_task_corpus(2000, data_rng);
  auto table = marker_task_table(31337);

  // stratified 80/20 split
  std::vector<hrnn::HeadlineExample> train_split, held_out;
  std::size_t taken[2] = {0, 0};
  for (const auto& ex : corpus) {
    if (taken[ex.label] < 200) {
      held_out.push_back(ex);
      ++taken[ex.label];
    } else {
      train_split.push_back(ex);
    }
  }
  ASSERT_EQ(train_split.size(), 1600u);
  ASSERT_EQ(held_out.size(), 400u);

  const struct {
    CellKind arch;
    double floor;
  } rows[] = {{CellKind::lstm, 0.97}, {CellKind::gru, 0.95}, {CellKind::rnn, 0.95}};

  for (const auto& row : rows) {
    const auto start = Clock::now();
    ModelConfig config;
    config.arch = row.arch;
    config.features = FeatureMode::ce_we;
    config.hidden = 32;
    config.char_dim = 8;
    config.char_channels = 16;
    config.dropout = 0.3;
    config.batch_size = 64;
    config.learning_rate = 5e-3;
    config.epochs = 10;
    config.seed = 1234;

    auto result = hrnn::train(train_split, config, &table);
    auto report = hrnn::evaluate_headlines(held_out, result.vocab, result.params,
                                           config);
    std::cout << "[info] " << hrnn::model_name({row.arch, FeatureMode::ce_we}) << " held-out accuracy "
              << report.accuracy << " in " << seconds_since(start) << "s\n";
    EXPECT_GE(report.accuracy, row.floor)
        << "Bi" << hrnn::to_string(row.arch) << " held-out accuracy";
    EXPECT_LT(seconds_since(start), 300.0)
        << "Bi" << hrnn::to_string(row.arch) << " must finish within 5 minutes";
  }
}

// ---------------------------------------------------------------------------
// Criterion (conditional): on the public 15,000-headline corpus, CE-only
// 10-fold CV reaches mean accuracy >= 0.93; with pretrained 300-d vectors,
// BiLSTM CE+WE lands within +-0.02 of 0.9819 accuracy with ROC-AUC >= 0.99
// and beats the strongest feature-engineered baseline on all five metrics.
// Set HRNN_DATASET (and optionally HRNN_EMBEDDINGS) to run it.
TEST(Acceptance, DatasetReproduction) {
  const char* dataset_path = std::getenv("HRNN_DATASET");
  if (dataset_path == nullptr) {
    GTEST_SKIP() << "HRNN_DATASET not set; supply the 15,000-headline TSV to run "
                    "the dataset-level criterion";
  }
  auto data = hrnn::load_dataset(dataset_path);
  ASSERT_GE(data.size(), 1000u);

  ModelConfig base;
  base.hidden = 128;
  base.epochs = 10;
  base.seed = 7;

  const auto ce_start = Clock::now();
  auto ce_result = hrnn::crossval_run(
      data, {{CellKind::lstm, FeatureMode::ce}}, 10, 7, base, nullptr, 2);
  const double ce_seconds = seconds_since(ce_start);
  EXPECT_GE(ce_result.configs[0].aggregate.accuracy, 0.93);
  EXPECT_LT(ce_seconds / 10.0, 30.0 * 60.0) << "per-fold runtime bound";

  const char* embeddings_path = std::getenv("HRNN_EMBEDDINGS");
  if (embeddings_path == nullptr) {
    std::cout << "[criterion] DatasetReproduction: CE-only portion complete; set "
                 "HRNN_EMBEDDINGS for the CE+WE portion\n";
    return;
  }
  auto vocab = hrnn::build_vocab(data);
  auto table = hrnn::load_pretrained_embeddings(embeddings_path, vocab);
  auto we_result = hrnn::crossval_run(
      data, {{CellKind::lstm, FeatureMode::ce_we}}, 10, 7, base, &table, 2);
  const auto& m = we_result.configs[0].aggregate;
  EXPECT_NEAR(m.accuracy, 0.9819, 0.02);
  EXPECT_GE(m.roc_auc.value_or(0.0), 0.99);
  // strongest reference baseline: accuracy .93, precision .95, recall .90,
  // f1 .93, roc-auc .97
  EXPECT_GE(m.accuracy, 0.93);
  EXPECT_GE(m.precision, 0.95);
  EXPECT_GE(m.recall, 0.90);
  EXPECT_GE(m.f1, 0.93);
  EXPECT_GE(m.roc_auc.value_or(0.0), 0.97);
}

// ---------------------------------------------------------------------------
// Criterion: two crossval CLI runs with the same seed produce byte-identical
// CSV results.
TEST(Acceptance, Determinism) {
  Rng data_rng(55);
  auto corpus = marker_task_corpus(60, data_rng);
  const auto dir = std::filesystem::temp_directory_path();
  const auto data_path = (dir / "hrnn_accept_det.tsv").string();
  {
    std::ofstream out(data_path);
    for (const auto& ex : corpus) out << ex.label << '\t' << ex.raw_text << '\n';
  }
  const std::vector<std::string> args{
      "crossval", "--data", data_path, "--folds", "2",  "--grid", "all",
      "--seed",   "7",      "--epochs", "1",      "--hidden", "4",
      "--char-dim", "4",    "--char-channels", "4", "--word-dim", "8",
      "--batch-size", "16"};
  auto parallel = args;
  parallel.push_back("--jobs");
  parallel.push_back("2");
  std::ostringstream out1, err1, out2, err2;
  ASSERT_EQ(hrnn::run_cli(args, out1, err1), 0) << err1.str();
  ASSERT_EQ(hrnn::run_cli(parallel, out2, err2), 0) << err2.str();
  EXPECT_EQ(out1.str(), out2.str());  // identical even across worker counts
  EXPECT_NE(out1.str().find("arch,features,fold"), std::string::npos);
  std::remove(data_path.c_str());
}

// ---------------------------------------------------------------------------
// Criterion: a checkpoint round-trip reproduces every parameter bit for bit
// and yields identical predictions on 100 headlines.
TEST(Acceptance, Persistence) {
  Rng data_rng(66);
  auto corpus = marker_task_corpus(100, data_rng);
  auto table = marker_task_table(77);

  ModelConfig config;
  config.arch = CellKind::lstm;
  config.features = FeatureMode::ce_we;
  config.hidden = 8;
  config.char_dim = 4;
  config.char_channels = 8;
  config.epochs = 2;
  config.batch_size = 16;
  config.seed = 11;

  auto result = hrnn::train(corpus, config, &table);
  const auto path =
      (std::filesystem::temp_directory_path() / "hrnn_accept_persist.ckpt").string();
  hrnn::save_checkpoint(path, config, result.vocab, result.params);
  auto loaded = hrnn::load_checkpoint(path);

  auto before = hrnn::named_tensors(result.params);
  auto after = hrnn::named_tensors(loaded.params);
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    ASSERT_EQ(before[i].first, after[i].first);
    ASSERT_EQ(before[i].second->data, after[i].second->data) << before[i].first;
  }

  std::vector<std::string> texts;
  texts.reserve(100);
  for (const auto& ex : corpus) texts.push_back(ex.raw_text);
  auto p1 = hrnn::predict(texts, result.vocab, result.params, config);
  auto p2 = hrnn::predict(texts, loaded);
  ASSERT_EQ(p1.size(), 100u);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    ASSERT_EQ(p1[i].ok, p2[i].ok);
    ASSERT_EQ(p1[i].probability, p2[i].probability) << "headline " << i;
    ASSERT_EQ(p1[i].label, p2[i].label);
  }
  std::remove(path.c_str());
}

// ---------------------------------------------------------------------------

class CriterionPrinter : public ::testing::EmptyTestEventListener {
  void OnTestEnd(const ::testing::TestInfo& info) override {
    const char* verdict = info.result()->Skipped()
                              ? "SKIP"
                              : (info.result()->Passed() ? "PASS" : "FAIL");
    std::cout << "[criterion] " << info.name() << ": " << verdict << std::endl;
  }
};

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::UnitTest::GetInstance()->listeners().Append(new CriterionPrinter);
  return RUN_ALL_TESTS();
}
