#include <doctest.h>

#include <cstdio>
#include <cstring>

#include "oracles.hpp"
#include "war/data.hpp"
#include "war/trainer.hpp"

using war::Dataset;
using war::MlpModel;
using war::TrainConfig;

TEST_CASE("adam matches a hand-stepped reference on a 3-parameter quadratic") {
  // minimize sum of 0.5*k*(x - t)^2 with distinct curvatures
  std::vector<double> x = {5.0, -3.0, 0.5};
  const double curv[3] = {1.0, 4.0, 0.25}, target[3] = {1.0, 2.0, -1.0};

  std::vector<double> ref_x = x;
  oracle::RefAdam ref[3];

  std::vector<std::vector<double>> params = {{x[0]}, {x[1]}, {x[2]}};
  std::vector<std::vector<double>*> bufs = {&params[0], &params[1], &params[2]};
  war::AdamState state;

  for (int step = 0; step < 100; ++step) {
    std::vector<war::Tensor> grads;
    for (int k = 0; k < 3; ++k) {
      double g = curv[k] * (params[static_cast<size_t>(k)][0] - target[k]);
      grads.push_back(war::Tensor({1}, {g}));
    }
    war::adam_step(bufs, grads, state, 0.01, 0.9, 0.999);
    for (int k = 0; k < 3; ++k) {
      double g = curv[k] * (ref_x[static_cast<size_t>(k)] - target[k]);
      ref_x[static_cast<size_t>(k)] += ref[k].step(g, 0.01, 0.9, 0.999);
    }
    // grads computed from the same params, so the trajectories must agree
    for (int k = 0; k < 3; ++k)
      CHECK(params[static_cast<size_t>(k)][0] == doctest::Approx(ref_x[static_cast<size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  std::vector<std::vector<double>> params = {{1.5, -2.5}};
  std::vector<std::vector<double>*> bufs = {&params[0]};
  war::AdamState state;
  for (int s = 0; s < 5; ++s)
    war::adam_step(bufs, {war::Tensor({2}, {0.0, 0.0})}, state, 0.1, 0.9, 0.999);
  CHECK(params[0][0] == 1.5);
  CHECK(params[0][1] == -2.5);
}

TEST_CASE("adam: constant gradient moves at -sign(g)*lr asymptotically") {
  std::vector<std::vector<double>> params = {{0.0}};
  std::vector<std::vector<double>*> bufs = {&params[0]};
  war::AdamState state;
  double lr = 0.01, prev = 0.0;
  for (int s = 0; s < 300; ++s) {
    prev = params[0][0];
    war::adam_step(bufs, {war::Tensor({1}, {3.7})}, state, lr, 0.9, 0.999);
  }
  CHECK(params[0][0] - prev == doctest::Approx(-lr).epsilon(1e-6));
}

TEST_CASE("adam rejects NaN gradients with a diagnostic") {
  std::vector<std::vector<double>> params = {{1.0}};
  std::vector<std::vector<double>*> bufs = {&params[0]};
  war::AdamState state;
  CHECK_THROWS_AS(
      war::adam_step(bufs, {war::Tensor({1}, {std::nan("")})}, state, 0.1, 0.9, 0.999),
      war::numeric_error);
}

TEST_CASE("evaluate: perfect predictions and the single-class predictor") {
  // model that always predicts class 0: zero weights, bias pushing class 0
  auto m = MlpModel::init({2, 2}, 1);
  for (auto& v : m.weights[0]) v = 0.0;
  m.biases[0] = {5.0, 0.0};

  Dataset ds;
  ds.n = 10;
  ds.d = 2;
  ds.features.assign(20, 0.3);
  ds.labels = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  ds.class_names = {"a", "b"};
  auto ev = war::evaluate(m, ds);
  CHECK(ev.accuracy == doctest::Approx(0.5));
  CHECK(ev.per_class_f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(ev.per_class_f1[1] == doctest::Approx(0.0));

  // perfect predictor via bias on the true class of a single-class set
  Dataset one;
  one.n = 4;
  one.d = 2;
  one.features.assign(8, 0.1);
  one.labels = {0, 0, 0, 0};
  one.class_names = {"a", "b"};
  auto ev2 = war::evaluate(m, one);
  CHECK(ev2.accuracy == doctest::Approx(1.0));
  CHECK(ev2.per_class_f1[0] == doctest::Approx(1.0));
}

TEST_CASE("evaluate matches the confusion-matrix recomputation on random models") {
  std::mt19937_64 rng(5);
  auto toy = war::toy_three_class(60, 0.0, 8);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = MlpModel::init({2, 8, 3}, 50 + trial);
    auto pred = m.predict(toy.train.features.data(), toy.train.n);
    auto want = oracle::confusion_stats(toy.train.labels, pred, 3);
    auto got = war::evaluate(m, toy.train);
    CHECK(got.accuracy == doctest::Approx(want.accuracy).epsilon(1e-12));
    CHECK(got.macro_f1 == doctest::Approx(want.macro_f1).epsilon(1e-12));
    for (int c = 0; c < 3; ++c)
      CHECK(got.per_class_f1[static_cast<size_t>(c)] ==
            doctest::Approx(want.f1[static_cast<size_t>(c)]).epsilon(1e-12));
  }
}

TEST_CASE("clean toy training approaches the Bayes rate") {
  // red and orange means are 1.2 apart at sigma 0.5, so the Bayes accuracy is
  // (1 + 2*Phi(1.2))/3 ~ 0.923; a well-trained model should land within ~2
  // points of it.
  auto train_data = war::toy_three_class(150, 0.0, 11);
  auto test_data = war::toy_three_class(200, 0.0, 1211);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 64;
  cfg.hidden = {32, 32};
  cfg.learning_rate = 0.005;
  cfg.metric_window = 10;
  cfg.seed = 5;
  auto result = war::train(train_data.train, test_data.train, cfg);
  CHECK(result.metrics.summary.mean_accuracy >= 0.90);
}

TEST_CASE("training is bit-deterministic given config and seed") {
  auto toy = war::toy_three_class(50, 0.2, 13);
  auto test_data = war::toy_three_class(50, 0.0, 14);
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 32;
  cfg.hidden = {16};
  cfg.metric_window = 3;
  cfg.seed = 21;
  cfg.loss.method = war::LossMethod::war_c;
  cfg.loss.beta = 5.0;
  cfg.loss.warmup_epochs = 2;
  cfg.adv.epsilon = 0.3;
  cfg.cost = war::CostMatrix::checked(3, {0, 1, 1, 1, 0, 5, 1, 5, 0});

  auto a = war::train(toy.train, test_data.train, cfg, &toy.clean_labels, &toy.flip_mask);
  auto b = war::train(toy.train, test_data.train, cfg, &toy.clean_labels, &toy.flip_mask);
  REQUIRE(a.metrics.per_epoch.size() == b.metrics.per_epoch.size());
  for (size_t e = 0; e < a.metrics.per_epoch.size(); ++e) {
    const auto &ea = a.metrics.per_epoch[e], &eb = b.metrics.per_epoch[e];
    CHECK(std::memcmp(&ea.train_loss, &eb.train_loss, sizeof(double)) == 0);
    CHECK(std::memcmp(&ea.test_accuracy, &eb.test_accuracy, sizeof(double)) == 0);
    CHECK(std::memcmp(&ea.flip_accuracy, &eb.flip_accuracy, sizeof(double)) == 0);
  }
  for (size_t l = 0; l < a.model.weights.size(); ++l)
    CHECK(std::memcmp(a.model.weights[l].data(), b.model.weights[l].data(),
                      a.model.weights[l].size() * sizeof(double)) == 0);
}

TEST_CASE("warm-up: effective beta is zero before the boundary") {
  auto toy = war::toy_three_class(30, 0.1, 17);
  auto test_data = war::toy_three_class(30, 0.0, 18);
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 32;
  cfg.hidden = {8};
  cfg.metric_window = 2;
  cfg.loss.method = war::LossMethod::ar_kl;
  cfg.loss.beta = 5.0;
  cfg.loss.warmup_epochs = 4;
  cfg.adv.epsilon = 0.2;
  auto result = war::train(toy.train, test_data.train, cfg);
  for (const auto& e : result.metrics.per_epoch) {
    if (e.epoch < 4) CHECK(e.beta_effective == 0.0);
    else CHECK(e.beta_effective == 5.0);
  }
}

TEST_CASE("learning-rate drops divide by 10 from the drop epoch on") {
  auto toy = war::toy_three_class(30, 0.0, 19);
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 64;
  cfg.hidden = {8};
  cfg.metric_window = 2;
  cfg.learning_rate = 0.01;
  cfg.lr_drop_epochs = {2, 4};
  auto result = war::train(toy.train, toy.train, cfg);
  CHECK(result.metrics.per_epoch[0].learning_rate == doctest::Approx(0.01));
  CHECK(result.metrics.per_epoch[2].learning_rate == doctest::Approx(0.001));
  CHECK(result.metrics.per_epoch[4].learning_rate == doctest::Approx(0.0001));
}

TEST_CASE("trailing-window train loss at the end is below epoch 1") {
  auto toy = war::toy_three_class(100, 0.1, 23);
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.batch_size = 64;
  cfg.hidden = {16, 16};
  cfg.metric_window = 5;
  cfg.learning_rate = 0.003;
  auto result = war::train(toy.train, toy.train, cfg);
  CHECK(result.metrics.summary.mean_train_loss < result.metrics.per_epoch[0].train_loss);
}

TEST_CASE("checkpoint round-trip reproduces evaluation exactly") {
  auto toy = war::toy_three_class(60, 0.1, 29);
  auto test_data = war::toy_three_class(60, 0.0, 30);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 32;
  cfg.hidden = {12};
  cfg.metric_window = 2;
  auto result = war::train(toy.train, test_data.train, cfg);

  std::string path = "test_checkpoint.bin";
  nlohmann::json extra;
  extra["seed"] = 1;
  war::save_checkpoint(result.model, path, extra);
  nlohmann::json header;
  auto loaded = war::load_checkpoint(path, &header);
  CHECK(header["seed"] == 1);
  CHECK(loaded.widths == result.model.widths);
  for (size_t l = 0; l < loaded.weights.size(); ++l)
    CHECK(loaded.weights[l] == result.model.weights[l]);

  auto ev1 = war::evaluate(result.model, test_data.train);
  auto ev2 = war::evaluate(loaded, test_data.train);
  CHECK(std::memcmp(&ev1.accuracy, &ev2.accuracy, sizeof(double)) == 0);
  std::remove(path.c_str());
}

TEST_CASE("flip accuracy tracks corrupted samples against hidden clean labels") {
  auto toy = war::toy_three_class(80, 0.25, 31);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 64;
  cfg.hidden = {16};
  cfg.metric_window = 3;
  auto result = war::train(toy.train, toy.train, cfg, &toy.clean_labels, &toy.flip_mask);
  for (const auto& e : result.metrics.per_epoch) {
    CHECK(std::isfinite(e.flip_accuracy));
    CHECK(e.flip_accuracy >= 0.0);
    CHECK(e.flip_accuracy <= 1.0);
  }
}

TEST_CASE("evaluate: a perfect two-class predictor has accuracy 1 and all F1 = 1") {
  // logits = [x0, -x0]: predicts class 0 iff x0 > 0
  auto m = MlpModel::init({2, 2}, 1);
  m.weights[0] = {1.0, -1.0, 0.0, 0.0};
  m.biases[0] = {0.0, 0.0};
  Dataset ds;
  ds.n = 8;
  ds.d = 2;
  ds.class_names = {"a", "b"};
  for (int i = 0; i < 8; ++i) {
    ds.features.push_back(i % 2 == 0 ? 1.0 : -1.0);
    ds.features.push_back(0.25);
    ds.labels.push_back(i % 2);
  }
  auto ev = war::evaluate(m, ds);
  CHECK(ev.accuracy == 1.0);
  for (double f : ev.per_class_f1) CHECK(f == 1.0);
  CHECK(ev.macro_f1 == 1.0);
}
