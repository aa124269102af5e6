// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Training-based criteria run the shipped configurations;
// WAR_FASHION_DIR switches criterion 6/7/8 onto real Fashion-MNIST IDX files
// when they are available, otherwise the synthetic surrogate benchmark with
// the same class-group structure is used.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "war/experiment.hpp"

using namespace war;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string accept_dir(const std::string& leaf) {
  return (fs::temp_directory_path() / "war_acceptance_data" / leaf).string();
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: sharp Sinkhorn loss vs the exact LP on random instances.
// ---------------------------------------------------------------------------

void criterion1() {
  double t0 = now_seconds();
  std::mt19937_64 rng(20250801);
  SinkhornConfig cfg = SinkhornConfig::oracle();  // lambda 1e-3, 2000 iterations
  int ok = 0;
  double worst = 0;
  const int instances = 200;
  for (int trial = 0; trial < instances; ++trial) {
    int n = 3 + trial % 6;  // bins 3..8
    auto c = oracle::random_cost(n, rng, 0.1, 1.0);
    ProbVector a{oracle::random_simplex(n, rng)};
    ProbVector b{oracle::random_simplex(n, rng)};
    Tape tp;
    double sharp = sharp_ot_loss(tp, Tensor({n}, a.w), Tensor({n}, b.w), c, cfg).item();
    double exact = exact_ot(a, b, c);
    double rel = std::abs(sharp - exact) / c.max_entry();
    worst = std::max(worst, rel);
    if (rel <= 0.01) ++ok;
  }
  double dt = now_seconds() - t0;
  bool pass = ok == instances && dt < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "sinkhorn vs exact OT: %d/%d within 1%% of max(C) (worst %.3f%%), %.1f s (< 60 s)",
                ok, instances, worst * 100, dt);
  report(1, pass, buf);
}

// ---------------------------------------------------------------------------
// Criterion 2: the weighted-TV bound chain on 1000 random instances.
// ---------------------------------------------------------------------------

void criterion2() {
  std::mt19937_64 rng(20250802);
  int ok = 0, unscaled_violations = 0;
  const int instances = 1000;
  for (int trial = 0; trial < instances; ++trial) {
    int n = 3 + trial % 6;
    auto c = oracle::random_cost(n, rng, 0.05, 1.5);
    ProbVector p{oracle::random_simplex(n, rng)};
    ProbVector q{oracle::random_simplex(n, rng)};
    auto bounds = lemma2_bounds(p, q, c);
    double exact = exact_ot(p, q, c);
    // the bound compares against the converged entropic plan; raise the
    // fixed iteration count until the marginals are satisfied
    int iters = 2000;
    auto plan = sinkhorn_plan(p, q, c, {0.05, iters, true, false});
    while (plan.marginal_violation > 1e-9 && iters < 200000) {
      iters *= 4;
      plan = sinkhorn_plan(p, q, c, {0.05, iters, true, false});
    }
    Tape tp;
    double sharp =
        sharp_ot_loss(tp, Tensor({n}, p.w), Tensor({n}, q.w), c, {0.05, iters, true, false})
            .item();
    double slack = 1e-9 * (1.0 + c.max_entry());
    if (bounds.lower1 <= bounds.lower2 + slack && bounds.lower2 <= exact + slack &&
        exact <= sharp + slack)
      ++ok;
    if (2.0 * bounds.lower2 > exact + slack) ++unscaled_violations;
  }
  bool pass = ok == instances;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "weighted-TV chain c*TV <= 0.5*sum c_k|p-q| <= exact <= sharp: %d/%d "
                "(paper's unscaled middle term would fail on %d)",
                ok, instances, unscaled_violations);
  report(2, pass, buf);
}

// ---------------------------------------------------------------------------
// Criterion 3: the label-smoothing identity (derivation-corrected form).
// ---------------------------------------------------------------------------

void criterion3() {
  std::mt19937_64 rng(20250803);
  std::normal_distribution<double> gauss(0, 1);
  double worst_corrected = 0, min_paper = 1e300, max_paper = 0;
  const int configs = 100;
  for (int trial = 0; trial < configs; ++trial) {
    int in_dim = 3 + trial % 4;
    auto model = MlpModel::init({in_dim, 8, 3 + trial % 3}, 9000 + trial);
    std::vector<double> x(static_cast<size_t>(in_dim));
    for (auto& v : x) v = gauss(rng);
    int label = static_cast<int>(rng() % static_cast<uint64_t>(model.output_dim()));
    double beta = trial % 3 == 0 ? 1.0 : trial % 3 == 1 ? 5.0 : 10.0;
    AdvConfig cfg;
    cfg.epsilon = 0.05;
    auto r = lemma1_identity_check(model, x, label, beta, cfg, 500 + trial);
    worst_corrected = std::max(worst_corrected, r.corrected);
    min_paper = std::min(min_paper, r.paper_form);
    max_paper = std::max(max_paper, r.paper_form);
  }
  bool pass = worst_corrected <= 1e-8;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "label-smoothing identity: worst corrected residual %.2e <= 1e-8 over %d configs "
                "(printed form drifts %.3f..%.3f, recorded)",
                worst_corrected, configs, min_paper, max_paper);
  report(3, pass, buf);
}

// ---------------------------------------------------------------------------
// Criterion 4: gradient correctness against central finite differences.
// ---------------------------------------------------------------------------

void criterion4() {
  std::mt19937_64 rng(20250804);
  std::normal_distribution<double> gauss(0, 1);
  int ok = 0;
  double worst = 0;
  const int configs = 20;
  for (int trial = 0; trial < configs; ++trial) {
    double rel;
    if (trial % 2 == 0) {
      // sharp OT loss w.r.t. its input distribution (simplex tangent)
      int n = 3 + trial % 4;
      auto c = oracle::random_cost(n, rng, 0.2, 1.0);
      auto av = oracle::random_simplex(n, rng, 0.05);
      auto bv = oracle::random_simplex(n, rng, 0.05);
      SinkhornConfig cfg{0.05, 100, true, false};
      Tape tp;
      Tensor at = tp.leaf(Tensor({n}, av));
      Tensor loss = sharp_ot_loss(tp, at, Tensor({n}, bv), c, cfg);
      auto grad = tp.gradient(loss, {at})[0];
      double worst_dir = 0;
      for (int k = 0; k < 5; ++k) {
        std::vector<double> d(static_cast<size_t>(n));
        double mean = 0;
        for (auto& v : d) {
          v = gauss(rng);
          mean += v;
        }
        for (auto& v : d) v -= mean / n;
        double h = 1e-6;
        auto eval = [&](double t) {
          std::vector<double> shifted = av;
          for (int i = 0; i < n; ++i) shifted[static_cast<size_t>(i)] += t * d[static_cast<size_t>(i)];
          Tape tp2;
          return sharp_ot_loss(tp2, Tensor({n}, shifted), Tensor({n}, bv), c, cfg).item();
        };
        double fd = (eval(h) - eval(-h)) / (2 * h);
        double ad = 0;
        for (int i = 0; i < n; ++i) ad += grad[i] * d[static_cast<size_t>(i)];
        worst_dir = std::max(worst_dir, std::abs(ad - fd) / std::max(1.0, std::abs(fd)));
      }
      rel = worst_dir;
    } else {
      // full WAR training loss w.r.t. parameters, r and reference frozen
      int in_dim = 2 + trial % 3;
      auto model = MlpModel::init({in_dim, 6, 3}, 7000 + trial);
      int batch = 3;
      std::vector<double> xv(static_cast<size_t>(batch) * in_dim);
      for (auto& v : xv) v = gauss(rng);
      Tensor x({batch, in_dim}, xv);
      std::vector<double> yv(static_cast<size_t>(batch) * 3, 0.0);
      for (int i = 0; i < batch; ++i) yv[static_cast<size_t>(i) * 3 + (trial + i) % 3] = 1.0;
      Tensor y({batch, 3}, yv);

      auto cost = oracle::random_cost(3, rng, 0.3, 1.0);
      SinkhornConfig sink{0.05, 50, true, false};
      AdvConfig adv;
      adv.epsilon = 0.2;
      adv.divergence = DivKind::ot;
      adv.cost = cost;
      adv.sinkhorn = sink;
      std::mt19937_64 dir_rng(42 + trial);
      auto dir = adversarial_direction(model, x, adv, dir_rng);
      Tensor x_adv = adversarial_example(x, dir.dir, adv.epsilon);
      auto ref_vals = model.forward_values(x.values().data(), batch);
      Tensor ref({batch, 3}, ref_vals);
      double beta = 10.0;

      auto loss_with = [&](const MlpModel& m) {
        Tape tp;
        BoundMlp bm(tp, m, true);
        Tensor ce = cross_entropy(tp, bm.forward(x), y);
        Tensor reg = tp.scale(tp.sum(sharp_ot_loss_batch(tp, bm.forward(x_adv), ref, cost, sink)),
                              1.0 / batch);
        Tensor total = tp.add(ce, tp.scale(reg, beta));
        return std::make_pair(total, &bm);
      };

      Tape tp;
      BoundMlp bm(tp, model, true);
      Tensor ce = cross_entropy(tp, bm.forward(x), y);
      Tensor reg =
          tp.scale(tp.sum(sharp_ot_loss_batch(tp, bm.forward(x_adv), ref, cost, sink)), 1.0 / batch);
      Tensor total = tp.add(ce, tp.scale(reg, beta));
      auto grads = tp.gradient(total, bm.params());
      std::vector<double> flat;
      for (const auto& g : grads) flat.insert(flat.end(), g.values().begin(), g.values().end());

      auto loss_of_params = [&](const std::vector<double>& theta) {
        MlpModel pert = model;
        size_t off = 0;
        for (int l = 0; l < pert.layers(); ++l) {
          for (auto& v : pert.weights[static_cast<size_t>(l)]) v = theta[off++];
          for (auto& v : pert.biases[static_cast<size_t>(l)]) v = theta[off++];
        }
        Tape tp2;
        BoundMlp bm2(tp2, pert, false);
        Tensor ce2 = cross_entropy(tp2, bm2.forward(x), y);
        Tensor reg2 = tp2.scale(
            tp2.sum(sharp_ot_loss_batch(tp2, bm2.forward(x_adv), ref, cost, sink)), 1.0 / batch);
        return tp2.add(ce2, tp2.scale(reg2, beta)).item();
      };
      std::vector<double> theta;
      for (int l = 0; l < model.layers(); ++l) {
        theta.insert(theta.end(), model.weights[static_cast<size_t>(l)].begin(),
                     model.weights[static_cast<size_t>(l)].end());
        theta.insert(theta.end(), model.biases[static_cast<size_t>(l)].begin(),
                     model.biases[static_cast<size_t>(l)].end());
      }
      auto fd = oracle::fd_gradient(loss_of_params, theta, 1e-5);
      rel = oracle::rel_err(flat, fd);
    }
    worst = std::max(worst, rel);
    if (rel <= 1e-3) ++ok;
  }
  bool pass = ok == configs;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "gradients vs central finite differences: %d/%d at rel err <= 1e-3 (worst %.2e)",
                ok, configs, worst);
  report(4, pass, buf);
}

// ---------------------------------------------------------------------------
// Criterion 9: noise simulator statistics and determinism.
// ---------------------------------------------------------------------------

void criterion9() {
  bool pass = true;
  std::string detail;
  const int draws_per_class = 10000;  // 100k draws over the 10 classes
  for (double p : {0.2, 0.4}) {
    auto t = fashion_transition(p);
    std::vector<int> labels;
    for (int c = 0; c < 10; ++c)
      for (int k = 0; k < draws_per_class; ++k) labels.push_back(c);
    auto noisy = apply_noise(labels, t, 424242);
    auto again = apply_noise(labels, t, 424242);
    if (noisy.labels != again.labels) {
      pass = false;
      detail += " determinism broken;";
    }
    for (int c = 0; c < 10; ++c) {
      double flip_prob = 1.0 - t.at(c, c);
      int flips = 0;
      for (int k = 0; k < draws_per_class; ++k)
        flips += noisy.flip_mask[static_cast<size_t>(c * draws_per_class + k)];
      double sigma = std::sqrt(std::max(flip_prob * (1 - flip_prob), 1e-12) *
                               draws_per_class);
      double dev = std::abs(flips - flip_prob * draws_per_class);
      if (flip_prob == 0.0 ? flips != 0 : dev > 3 * sigma) {
        pass = false;
        detail += " row " + std::to_string(c) + " off by " + std::to_string(dev) + ";";
      }
    }
  }
  report(9, pass,
         "noise simulator: per-row flip frequencies within 3 sigma over 100k draws at p=0.2 and "
         "p=0.4; identical draws per seed" +
             detail);
}

// ---------------------------------------------------------------------------
// Training-based criteria (5-8). Shared task runner with a result cache so
// the beta sweep reuses the ranking runs.
// ---------------------------------------------------------------------------

struct TaskResult {
  double mean_accuracy = 0;
  std::vector<double> per_seed;
  double max_run_seconds = 0;
};

struct ToyOutcome {
  double acc_cce = 0, acc_ar = 0, acc_war = 0;
  double ro_ar = 0, ro_war = 0;
  int war_black_cells = 0, cce_min_black_cells = 1 << 30;
  double max_run_seconds = 0;
};

// Shipped toy protocol: epsilon shared by AR and WAR like the reference
// protocol shares it across regularizers; beta per method.
constexpr int kToyPerClass = 300;
constexpr int kToyEpochs = 120;
constexpr double kToyEps = 0.5;
constexpr double kToyBetaWar = 2.0;
constexpr double kToyBetaAr = 5.0;

ToyOutcome run_toy_criterion() {
  ToyOutcome out;
  auto test = toy_three_class(400, 0.0, 555);
  for (auto [method, beta] :
       {std::tuple{LossMethod::cce, 0.0}, {LossMethod::ar_kl, kToyBetaAr},
        {LossMethod::war_c, kToyBetaWar}}) {
    double acc = 0, ro = 0;
    for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      double t0 = now_seconds();
      auto toy = toy_three_class(kToyPerClass, 0.2, 1000 + seed);
      TrainConfig cfg;
      cfg.epochs = kToyEpochs;
      cfg.batch_size = 64;
      cfg.learning_rate = 1e-3;
      cfg.lr_drop_epochs = {kToyEpochs / 2, 3 * kToyEpochs / 4};
      cfg.seed = seed;
      cfg.metric_window = 10;
      cfg.hidden = {128, 128};
      cfg.loss.method = method;
      cfg.loss.beta = beta;
      cfg.loss.warmup_epochs = 15;
      cfg.adv.epsilon = kToyEps;
      cfg.cost = CostMatrix::checked(3, {0, 1, 1, 1, 0, 5, 1, 5, 0});
      auto res = train(toy.train, test.train, cfg, &toy.clean_labels, &toy.flip_mask);
      acc += res.metrics.summary.mean_accuracy / 3.0;

      // accuracy restricted to the red/orange pair of the clean test set
      std::vector<double> xs;
      std::vector<int> ys;
      for (int i = 0; i < test.train.n; ++i)
        if (test.train.labels[static_cast<size_t>(i)] != 0) {
          xs.push_back(test.train.row(i)[0]);
          xs.push_back(test.train.row(i)[1]);
          ys.push_back(test.train.labels[static_cast<size_t>(i)]);
        }
      auto pred = res.model.predict(xs.data(), static_cast<int>(ys.size()));
      int good = 0;
      for (size_t i = 0; i < ys.size(); ++i) good += pred[i] == ys[i];
      ro += static_cast<double>(good) / static_cast<double>(ys.size()) / 3.0;

      // black cells inside the red cluster core (within 1 sigma of the mean)
      auto grid = boundary_grid(res.model, -2, 3, -2, 6, 200);
      int black = 0;
      for (int iy = 0; iy < 200; ++iy)
        for (int ix = 0; ix < 200; ++ix) {
          double x = grid.cell_x(ix), y = grid.cell_y(iy);
          if (x * x + y * y <= 0.25 && grid.at(ix, iy) == 0) ++black;
        }
      if (method == LossMethod::war_c) out.war_black_cells += black;
      if (method == LossMethod::cce) out.cce_min_black_cells = std::min(out.cce_min_black_cells, black);
      out.max_run_seconds = std::max(out.max_run_seconds, now_seconds() - t0);
    }
    if (method == LossMethod::cce) out.acc_cce = acc;
    if (method == LossMethod::ar_kl) {
      out.acc_ar = acc;
      out.ro_ar = ro;
    }
    if (method == LossMethod::war_c) {
      out.acc_war = acc;
      out.ro_war = ro;
    }
  }
  return out;
}

void criterion5(const ToyOutcome& toy) {
  bool a = toy.acc_war >= toy.acc_cce + 0.05;
  bool b = toy.ro_war >= toy.ro_ar + 0.02;
  bool c = toy.war_black_cells == 0 && toy.cce_min_black_cells >= 1;
  bool runtime = toy.max_run_seconds < 300.0;
  char buf[300];
  std::snprintf(buf, sizeof buf,
                "toy ranking: WAR %s vs CCE %s (>= +5pt %s); red/orange WAR %s vs AR %s (>= +2pt "
                "%s); black-in-red cells WAR %d / CCE min %d (%s); slowest run %.0f s (< 300 %s)",
                pct(toy.acc_war).c_str(), pct(toy.acc_cce).c_str(), a ? "ok" : "FAIL",
                pct(toy.ro_war).c_str(), pct(toy.ro_ar).c_str(), b ? "ok" : "FAIL",
                toy.war_black_cells, toy.cce_min_black_cells, c ? "ok" : "FAIL",
                toy.max_run_seconds, runtime ? "ok" : "FAIL");
  report(5, a && b && c && runtime, buf);
}

// Desk-scale 10-class task: shipped protocol for the ranking and beta-sweep
// criteria. Real Fashion-MNIST via WAR_FASHION_DIR when present, surrogate
// otherwise.
constexpr int kFashionPerClass = 1000;  // 10k training samples
constexpr int kFashionEpochs = 60;
constexpr double kFashionEpsSurrogate = 0.4;
constexpr double kFashionEpsReal = 0.005;  // reference protocol value

struct DeskTask {
  Dataset train, test;
  CostMatrix cost;
  NoiseTransition transition;
  bool real_data = false;
};

DeskTask load_desk_task() {
  DeskTask task;
  const char* dir = std::getenv("WAR_FASHION_DIR");
  if (dir && *dir) {
    auto train_full = load_idx(std::string(dir) + "/train-images-idx3-ubyte",
                               std::string(dir) + "/train-labels-idx1-ubyte");
    task.test = load_idx(std::string(dir) + "/t10k-images-idx3-ubyte",
                         std::string(dir) + "/t10k-labels-idx1-ubyte");
    // first 1000 of each class
    std::vector<int> counts(10, 0);
    Dataset sub;
    sub.d = train_full.d;
    sub.class_names = fashion_class_names();
    for (int i = 0; i < train_full.n && sub.n < 10 * kFashionPerClass; ++i) {
      int y = train_full.labels[static_cast<size_t>(i)];
      if (counts[static_cast<size_t>(y)] >= kFashionPerClass) continue;
      ++counts[static_cast<size_t>(y)];
      sub.features.insert(sub.features.end(), train_full.row(i), train_full.row(i) + train_full.d);
      sub.labels.push_back(y);
      ++sub.n;
    }
    sub.normalized = train_full.normalized;
    sub.offset = train_full.offset;
    sub.scale = train_full.scale;
    task.train = std::move(sub);
    task.test.class_names = fashion_class_names();
    task.real_data = true;
    // without shipped word embeddings the informative cost comes from the
    // latent centers of the surrogate's groups; for real data an embeddings
    // file can be supplied next to the IDX files
    if (fs::exists(std::string(dir) + "/embeddings.csv"))
      task.cost = cost_from_embeddings(load_embeddings(std::string(dir) + "/embeddings.csv"));
    else
      task.cost = cost_from_embeddings(load_embeddings(
          fixtures::make_synthetic_fashion(10, 10, 4242, accept_dir("tiny")).embeddings_csv));
  } else {
    auto sf = fixtures::make_synthetic_fashion(kFashionPerClass, 500, 4242,
                                               accept_dir("surrogate"));
    task.train = std::move(sf.train);
    task.test = std::move(sf.test);
    task.cost = cost_from_embeddings(load_embeddings(sf.embeddings_csv));
  }
  task.transition = fashion_transition(0.4);
  return task;
}

struct DeskRunner {
  DeskTask task;
  std::map<std::string, TaskResult> cache;

  TaskResult run(LossMethod method, double beta) {
    std::string key = std::string(loss_method_name(method)) + "@" + std::to_string(beta);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    TaskResult result;
    for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      double t0 = now_seconds();
      auto noisy = apply_noise(task.train.labels, task.transition, 100 + seed);
      Dataset nds = task.train;
      nds.labels = noisy.labels;

      TrainConfig cfg;
      cfg.epochs = kFashionEpochs;
      cfg.batch_size = 256;
      cfg.learning_rate = 1e-3;
      cfg.lr_drop_epochs = {20, 40};
      cfg.seed = seed;
      cfg.metric_window = 10;
      cfg.hidden = {128, 128};
      cfg.loss.method = method;
      cfg.loss.beta = beta;
      cfg.loss.warmup_epochs = 15;
      if (method == LossMethod::forward || method == LossMethod::backward)
        cfg.loss.transition = task.transition;
      cfg.adv.epsilon = task.real_data ? kFashionEpsReal : kFashionEpsSurrogate;
      cfg.cost = task.cost;
      auto res = train(nds, task.test, cfg);
      result.per_seed.push_back(res.metrics.summary.mean_accuracy);
      result.max_run_seconds = std::max(result.max_run_seconds, now_seconds() - t0);
    }
    for (double a : result.per_seed) result.mean_accuracy += a / result.per_seed.size();
    cache[key] = result;
    return result;
  }
};

void criterion6(DeskRunner& runner) {
  auto war = runner.run(LossMethod::war_c, 10.0);
  auto ar = runner.run(LossMethod::ar_kl, 5.0);
  auto cce = runner.run(LossMethod::cce, 0.0);
  bool ordering = war.mean_accuracy > ar.mean_accuracy && ar.mean_accuracy > cce.mean_accuracy;
  bool margin = war.mean_accuracy - cce.mean_accuracy >= 0.03;
  double slowest =
      std::max({war.max_run_seconds, ar.max_run_seconds, cce.max_run_seconds});
  bool runtime = slowest < 1800.0;
  char buf[300];
  std::snprintf(buf, sizeof buf,
                "desk-scale ranking (%s): WAR-C %s > AR-KL %s > CCE %s (%s), WAR-CCE margin "
                "%.2fpt >= 3 (%s); slowest run %.0f s (< 1800 %s)",
                runner.task.real_data ? "fashion-mnist" : "surrogate",
                pct(war.mean_accuracy).c_str(), pct(ar.mean_accuracy).c_str(),
                pct(cce.mean_accuracy).c_str(), ordering ? "ok" : "FAIL",
                (war.mean_accuracy - cce.mean_accuracy) * 100, margin ? "ok" : "FAIL", slowest,
                runtime ? "ok" : "FAIL");
  report(6, ordering && margin && runtime, buf);
}

void criterion7(DeskRunner& runner) {
  auto ar5 = runner.run(LossMethod::ar_kl, 5.0);
  auto ar20 = runner.run(LossMethod::ar_kl, 20.0);
  auto war5 = runner.run(LossMethod::war_c, 5.0);
  auto war20 = runner.run(LossMethod::war_c, 20.0);
  bool ar_drops = ar20.mean_accuracy < ar5.mean_accuracy;
  bool war_holds = war20.mean_accuracy >= war5.mean_accuracy - 0.01;
  char buf[300];
  std::snprintf(buf, sizeof buf,
                "beta sweep trend: AR-KL %s@20 < %s@5 (%s); WAR-C %s@20 >= %s@5 - 1pt (%s)",
                pct(ar20.mean_accuracy).c_str(), pct(ar5.mean_accuracy).c_str(),
                ar_drops ? "ok" : "FAIL", pct(war20.mean_accuracy).c_str(),
                pct(war5.mean_accuracy).c_str(), war_holds ? "ok" : "FAIL");
  report(7, ar_drops && war_holds, buf);
}

void criterion8(DeskRunner& runner) {
  auto fwd = runner.run(LossMethod::forward, 0.0);
  auto cce = runner.run(LossMethod::cce, 0.0);
  bool margin = fwd.mean_accuracy - cce.mean_accuracy >= 0.02;

  // bit-for-bit: FORWARD/BACKWARD with the identity transition equal CCE on
  // a short run of the same task
  auto sf = fixtures::make_synthetic_fashion(100, 50, 777, accept_dir("identity"));
  auto run_short = [&](LossMethod method) {
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.batch_size = 128;
    cfg.metric_window = 2;
    cfg.seed = 11;
    cfg.hidden = {32};
    cfg.loss.method = method;
    if (method != LossMethod::cce) cfg.loss.transition = NoiseTransition::identity(10);
    return train(sf.train, sf.test, cfg);
  };
  auto c = run_short(LossMethod::cce);
  auto f = run_short(LossMethod::forward);
  auto b = run_short(LossMethod::backward);
  bool identity_bits = true;
  for (size_t e = 0; e < c.metrics.per_epoch.size(); ++e) {
    const auto &ec = c.metrics.per_epoch[e], &ef = f.metrics.per_epoch[e],
               &eb = b.metrics.per_epoch[e];
    if (std::memcmp(&ec.train_loss, &ef.train_loss, sizeof(double)) != 0 ||
        std::memcmp(&ec.train_loss, &eb.train_loss, sizeof(double)) != 0 ||
        ec.test_accuracy != ef.test_accuracy || ec.test_accuracy != eb.test_accuracy)
      identity_bits = false;
  }
  for (size_t l = 0; l < c.model.weights.size(); ++l)
    if (std::memcmp(c.model.weights[l].data(), f.model.weights[l].data(),
                    c.model.weights[l].size() * sizeof(double)) != 0 ||
        std::memcmp(c.model.weights[l].data(), b.model.weights[l].data(),
                    c.model.weights[l].size() * sizeof(double)) != 0)
      identity_bits = false;

  char buf[300];
  std::snprintf(buf, sizeof buf,
                "baselines: FORWARD with the true transition %s vs CCE %s (margin %.2fpt >= 2 "
                "%s); FORWARD/BACKWARD at T=identity bit-identical to CCE (%s)",
                pct(fwd.mean_accuracy).c_str(), pct(cce.mean_accuracy).c_str(),
                (fwd.mean_accuracy - cce.mean_accuracy) * 100, margin ? "ok" : "FAIL",
                identity_bits ? "ok" : "FAIL");
  report(8, margin && identity_bits, buf);
}

}  // namespace

int main() {
  std::printf("WAR acceptance suite\n");
  // WAR_ACCEPT_ONLY="1,5" narrows the run while debugging; the ctest entry
  // always runs everything.
  auto wanted = [](int k) {
    const char* only = std::getenv("WAR_ACCEPT_ONLY");
    if (!only || !*only) return true;
    std::string s = ",";
    s += only;
    s += ",";
    return s.find("," + std::to_string(k) + ",") != std::string::npos;
  };

  if (wanted(1)) criterion1();
  if (wanted(2)) criterion2();
  if (wanted(3)) criterion3();
  if (wanted(4)) criterion4();
  if (wanted(9)) criterion9();

  if (wanted(5)) criterion5(run_toy_criterion());

  if (wanted(6) || wanted(7) || wanted(8)) {
    DeskRunner runner{load_desk_task(), {}};
    if (wanted(6)) criterion6(runner);
    if (wanted(7)) criterion7(runner);
    if (wanted(8)) criterion8(runner);
  }

  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
