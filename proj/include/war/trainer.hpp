#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "war/data.hpp"
#include "war/losses.hpp"

namespace war {

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamState {
  std::vector<std::vector<double>> m, v;
  int64_t step = 0;
};

/// Standard Adam update with bias correction. Parameter buffers and gradient
/// tensors must line up one-to-one.
inline void adam_step(std::vector<std::vector<double>*>& params, const std::vector<Tensor>& grads,
                      AdamState& state, double lr, double beta1, double beta2,
                      double eps = 1e-8) {
  if (params.size() != grads.size())
    throw config_error("adam_step: " + std::to_string(grads.size()) + " gradients for " +
                       std::to_string(params.size()) + " parameters");
  if (state.m.empty()) {
    for (auto* p : params) {
      state.m.push_back(std::vector<double>(p->size(), 0.0));
      state.v.push_back(std::vector<double>(p->size(), 0.0));
    }
  }
  ++state.step;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    const auto& g = grads[k].values();
    if (p.size() != g.size()) throw config_error("adam_step: gradient shape mismatch");
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (size_t i = 0; i < p.size(); ++i) {
      if (std::isnan(g[i])) throw numeric_error("adam_step: NaN gradient in parameter " +
                                                std::to_string(k));
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
  }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct EvalMetrics {
  double accuracy = 0;
  std::vector<double> per_class_f1;
  double macro_f1 = 0;
};

/// Accuracy, per-class F1 and macro-average F1 from argmax predictions.
inline EvalMetrics evaluate(const MlpModel& model, const Dataset& ds) {
  EvalMetrics out;
  int c = model.output_dim();
  std::vector<int64_t> tp(static_cast<size_t>(c), 0), fp(static_cast<size_t>(c), 0),
      fn(static_cast<size_t>(c), 0);
  int64_t correct = 0;
  const int chunk = 1024;
  for (int lo = 0; lo < ds.n; lo += chunk) {
    int nb = std::min(chunk, ds.n - lo);
    auto pred = model.predict(ds.row(lo), nb);
    for (int i = 0; i < nb; ++i) {
      int y = ds.labels[static_cast<size_t>(lo + i)];
      int yhat = pred[static_cast<size_t>(i)];
      if (y == yhat) {
        ++correct;
        ++tp[static_cast<size_t>(y)];
      } else {
        ++fp[static_cast<size_t>(yhat)];
        ++fn[static_cast<size_t>(y)];
      }
    }
  }
  out.accuracy = ds.n > 0 ? static_cast<double>(correct) / ds.n : 0.0;
  out.per_class_f1.resize(static_cast<size_t>(c));
  for (int k = 0; k < c; ++k) {
    double denom = 2.0 * tp[static_cast<size_t>(k)] + fp[static_cast<size_t>(k)] +
                   fn[static_cast<size_t>(k)];
    out.per_class_f1[static_cast<size_t>(k)] =
        denom > 0 ? 2.0 * tp[static_cast<size_t>(k)] / denom : 0.0;
    out.macro_f1 += out.per_class_f1[static_cast<size_t>(k)];
  }
  out.macro_f1 /= c;
  return out;
}

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0;
  double test_accuracy = 0;
  std::vector<double> per_class_f1;
  double macro_f1 = 0;
  double flip_accuracy = std::nan("");  // accuracy on corrupted samples vs clean labels
  double beta_effective = 0;
  double learning_rate = 0;
};

struct WindowSummary {
  int window = 0;
  double mean_accuracy = 0, std_accuracy = 0;
  double mean_train_loss = 0;
  double mean_macro_f1 = 0;
};

struct Metrics {
  std::vector<EpochMetrics> per_epoch;
  WindowSummary summary;
};

inline WindowSummary summarize_window(const std::vector<EpochMetrics>& epochs, int window) {
  WindowSummary s;
  if (epochs.empty()) return s;
  s.window = std::min<int>(window, static_cast<int>(epochs.size()));
  double sum = 0, sum_sq = 0, loss = 0, f1 = 0;
  for (int k = 0; k < s.window; ++k) {
    const auto& e = epochs[epochs.size() - 1 - static_cast<size_t>(k)];
    sum += e.test_accuracy;
    sum_sq += e.test_accuracy * e.test_accuracy;
    loss += e.train_loss;
    f1 += e.macro_f1;
  }
  s.mean_accuracy = sum / s.window;
  s.std_accuracy = std::sqrt(std::max(0.0, sum_sq / s.window - s.mean_accuracy * s.mean_accuracy));
  s.mean_train_loss = loss / s.window;
  s.mean_macro_f1 = f1 / s.window;
  return s;
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct TrainConfig {
  int epochs = 60;
  int batch_size = 256;
  double learning_rate = 1e-3;
  std::vector<int> lr_drop_epochs;  // divide lr by 10 from these epochs on
  double adam_beta1 = 0.9, adam_beta2 = 0.999;
  uint64_t seed = 1;
  int metric_window = 10;
  std::vector<int> hidden = {128, 128};
  LossConfig loss;
  AdvConfig adv;
  SinkhornConfig sinkhorn;
  std::optional<CostMatrix> cost;  // ground cost for WAR-C

  void validate() const {
    if (epochs < 1) throw config_error("TrainConfig: epochs must be >= 1");
    if (metric_window < 1 || metric_window > epochs)
      throw config_error("TrainConfig: metric_window must be in [1, epochs]");
    if (batch_size < 1) throw config_error("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate > 0)) throw config_error("TrainConfig: learning_rate must be > 0");
    loss.validate();
  }
};

struct TrainResult {
  MlpModel model;
  Metrics metrics;
};

/// Full training run: per-epoch seeded shuffle, lr drops, warm-up gating of
/// beta, per-epoch metrics and the trailing-window summary. clean_labels and
/// flip_mask, when supplied, drive the corrupted-sample accuracy metric.
inline TrainResult train(const Dataset& train_ds, const Dataset& test_ds, const TrainConfig& cfg,
                         const std::vector<int>* clean_labels = nullptr,
                         const std::vector<uint8_t>* flip_mask = nullptr) {
  cfg.validate();
  train_ds.validate();
  test_ds.validate();
  int num_classes = std::max(train_ds.num_classes(), test_ds.num_classes());

  std::vector<int> widths;
  widths.push_back(train_ds.d);
  for (int h : cfg.hidden) widths.push_back(h);
  widths.push_back(num_classes);
  MlpModel model = MlpModel::init(widths, mix_seed(cfg.seed, 0x6d6f64656cULL));

  std::vector<std::vector<double>*> param_bufs;
  for (int l = 0; l < model.layers(); ++l) {
    param_bufs.push_back(&model.weights[static_cast<size_t>(l)]);
    param_bufs.push_back(&model.biases[static_cast<size_t>(l)]);
  }
  AdamState adam;

  // Corrupted-sample bookkeeping for the flip-accuracy metric.
  std::vector<int> flipped_idx;
  if (clean_labels && flip_mask) {
    for (int i = 0; i < train_ds.n; ++i)
      if ((*flip_mask)[static_cast<size_t>(i)]) flipped_idx.push_back(i);
  }

  Metrics metrics;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    int drops = 0;
    for (int d : cfg.lr_drop_epochs)
      if (epoch >= d) ++drops;
    double lr = cfg.learning_rate / std::pow(10.0, drops);

    Batches batches(train_ds, cfg.batch_size, mix_seed(cfg.seed, static_cast<uint64_t>(epoch)));
    double loss_sum = 0;
    int64_t seen = 0;
    for (size_t k = 0; k < batches.count(); ++k) {
      Batch b = batches.get(k);
      Tape tape;
      BoundMlp bm(tape, model, /*trainable=*/true);
      std::mt19937_64 adv_rng(
          mix_seed(mix_seed(cfg.seed, static_cast<uint64_t>(epoch)), 0x10000ULL + k));
      Tensor loss = total_loss(tape, bm, b.features, b.one_hot, epoch, cfg.loss, cfg.adv,
                               cfg.sinkhorn, cfg.cost ? &*cfg.cost : nullptr, adv_rng);
      double lval = loss.item();
      if (std::isnan(lval) || std::isinf(lval))
        throw numeric_error("train: loss diverged at epoch " + std::to_string(epoch) +
                            " batch " + std::to_string(k));
      auto grads = tape.gradient(loss, bm.params());
      try {
        adam_step(param_bufs, grads, adam, lr, cfg.adam_beta1, cfg.adam_beta2);
      } catch (const numeric_error& e) {
        throw numeric_error("train: epoch " + std::to_string(epoch) + " batch " +
                            std::to_string(k) + ": " + e.what());
      }
      loss_sum += lval * b.features.dim(0);
      seen += b.features.dim(0);
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = loss_sum / static_cast<double>(seen);
    em.learning_rate = lr;
    em.beta_effective = effective_beta(cfg.loss, epoch);
    EvalMetrics ev = evaluate(model, test_ds);
    em.test_accuracy = ev.accuracy;
    em.per_class_f1 = ev.per_class_f1;
    em.macro_f1 = ev.macro_f1;
    if (!flipped_idx.empty()) {
      int64_t good = 0;
      std::vector<double> x(static_cast<size_t>(flipped_idx.size()) * train_ds.d);
      for (size_t i = 0; i < flipped_idx.size(); ++i)
        std::copy(train_ds.row(flipped_idx[i]), train_ds.row(flipped_idx[i]) + train_ds.d,
                  x.begin() + static_cast<int64_t>(i) * train_ds.d);
      auto pred = model.predict(x.data(), static_cast<int>(flipped_idx.size()));
      for (size_t i = 0; i < flipped_idx.size(); ++i)
        if (pred[i] == (*clean_labels)[static_cast<size_t>(flipped_idx[i])]) ++good;
      em.flip_accuracy = static_cast<double>(good) / static_cast<double>(flipped_idx.size());
    }
    metrics.per_epoch.push_back(std::move(em));
  }
  metrics.summary = summarize_window(metrics.per_epoch, cfg.metric_window);
  return TrainResult{std::move(model), std::move(metrics)};
}

}  // namespace war
