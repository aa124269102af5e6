#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "war/boundary.hpp"
#include "war/data.hpp"
#include "war/ground_cost.hpp"
#include "war/trainer.hpp"

#ifndef WAR_GIT_SHA
#define WAR_GIT_SHA "unknown"
#endif

namespace war {

using nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                                const std::string& context) {
  if (!j.is_object()) throw config_error(context + ": expected a JSON object");
  for (auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const auto& k : known)
      if (k == key) ok = true;
    if (!ok) throw config_error(context + ": unknown key '" + key + "'");
  }
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment configuration: one JSON document composing the dataset, noise,
// cost, loss, adversarial, sinkhorn and training blocks plus seeds and the
// output directory. Unknown keys are rejected everywhere.
// ---------------------------------------------------------------------------

struct DataSpec {
  std::string kind = "toy3";  // toy3 | manifest
  // toy3
  int n_per_class = 150;
  double noise_fraction = 0.2;
  uint64_t seed = 1;
  int test_per_class = 400;
  // manifest
  std::string train_manifest, test_manifest;
};

struct ExperimentConfig {
  DataSpec data;
  std::string noise_spec = "none";  // none | preset:fashion:P | symmetric:P | file:PATH
  uint64_t noise_seed = 7;
  std::string cost_kind = "none";  // none | zero_one | file | embeddings
  std::string cost_path;
  LossConfig loss;
  std::string transition_source;  // "", "true", or "file:PATH"
  AdvConfig adv;
  SinkhornConfig sinkhorn;
  TrainConfig train;  // loss/adv/sinkhorn/cost filled in by resolve()
  std::vector<uint64_t> seeds = {1};
  std::string output_dir;
  json canonical;  // the parsed document, for hashing and provenance
};

inline ExperimentConfig parse_experiment_config(const json& j) {
  detail::reject_unknown_keys(j, {"data", "noise", "cost", "loss", "adversarial", "sinkhorn",
                                  "train", "seeds", "output_dir"},
                              "config");
  ExperimentConfig cfg;
  cfg.canonical = j;

  if (!j.contains("data")) throw config_error("config: missing 'data' block");
  const json& jd = j["data"];
  detail::reject_unknown_keys(jd, {"kind", "n_per_class", "noise_fraction", "seed",
                                   "test_per_class", "train", "test"},
                              "config.data");
  cfg.data.kind = jd.value("kind", "toy3");
  if (cfg.data.kind == "toy3") {
    cfg.data.n_per_class = jd.value("n_per_class", 150);
    cfg.data.noise_fraction = jd.value("noise_fraction", 0.2);
    cfg.data.seed = jd.value("seed", 1ULL);
    cfg.data.test_per_class = jd.value("test_per_class", 400);
  } else if (cfg.data.kind == "manifest") {
    if (!jd.contains("train") || !jd.contains("test"))
      throw config_error("config.data: manifest kind needs 'train' and 'test'");
    cfg.data.train_manifest = jd["train"];
    cfg.data.test_manifest = jd["test"];
  } else {
    throw config_error("config.data: unknown kind '" + cfg.data.kind + "'");
  }

  if (j.contains("noise")) {
    detail::reject_unknown_keys(j["noise"], {"spec", "seed"}, "config.noise");
    cfg.noise_spec = j["noise"].value("spec", "none");
    cfg.noise_seed = j["noise"].value("seed", 7ULL);
  }

  if (j.contains("cost")) {
    detail::reject_unknown_keys(j["cost"], {"kind", "path"}, "config.cost");
    cfg.cost_kind = j["cost"].value("kind", "zero_one");
    cfg.cost_path = j["cost"].value("path", "");
    if ((cfg.cost_kind == "file" || cfg.cost_kind == "embeddings") && cfg.cost_path.empty())
      throw config_error("config.cost: kind '" + cfg.cost_kind + "' needs a path");
    if (cfg.cost_kind != "zero_one" && cfg.cost_kind != "file" && cfg.cost_kind != "embeddings")
      throw config_error("config.cost: unknown kind '" + cfg.cost_kind + "'");
  }

  if (j.contains("loss")) {
    detail::reject_unknown_keys(
        j["loss"], {"method", "beta", "warmup_epochs", "bootstrap_weight", "transition"},
        "config.loss");
    cfg.loss.method = loss_method_from_name(j["loss"].value("method", "CCE"));
    cfg.loss.beta = j["loss"].value("beta", 10.0);
    cfg.loss.warmup_epochs = j["loss"].value("warmup_epochs", 15);
    cfg.loss.bootstrap_weight = j["loss"].value("bootstrap_weight", 0.95);
    cfg.transition_source = j["loss"].value("transition", "");
  }

  if (j.contains("adversarial")) {
    detail::reject_unknown_keys(j["adversarial"], {"epsilon", "xi", "k_max"},
                                "config.adversarial");
    cfg.adv.epsilon = j["adversarial"].value("epsilon", 0.005);
    cfg.adv.xi = j["adversarial"].value("xi", 1e-6);
    cfg.adv.k_max = j["adversarial"].value("k_max", 1);
  }

  if (j.contains("sinkhorn")) {
    detail::reject_unknown_keys(j["sinkhorn"], {"lambda", "iterations", "log_domain", "warm_start"},
                                "config.sinkhorn");
    cfg.sinkhorn.lambda = j["sinkhorn"].value("lambda", 0.05);
    cfg.sinkhorn.iterations = j["sinkhorn"].value("iterations", 50);
    cfg.sinkhorn.log_domain = j["sinkhorn"].value("log_domain", true);
    cfg.sinkhorn.warm_start = j["sinkhorn"].value("warm_start", false);
    cfg.sinkhorn.validate();
  }

  if (j.contains("train")) {
    detail::reject_unknown_keys(j["train"],
                                {"epochs", "batch_size", "learning_rate", "lr_drop_epochs",
                                 "adam_beta1", "adam_beta2", "metric_window", "hidden"},
                                "config.train");
    const json& jt = j["train"];
    cfg.train.epochs = jt.value("epochs", 60);
    cfg.train.batch_size = jt.value("batch_size", 256);
    cfg.train.learning_rate = jt.value("learning_rate", 1e-3);
    if (jt.contains("lr_drop_epochs"))
      cfg.train.lr_drop_epochs = jt["lr_drop_epochs"].get<std::vector<int>>();
    cfg.train.adam_beta1 = jt.value("adam_beta1", 0.9);
    cfg.train.adam_beta2 = jt.value("adam_beta2", 0.999);
    cfg.train.metric_window = jt.value("metric_window", 10);
    if (jt.contains("hidden")) cfg.train.hidden = jt["hidden"].get<std::vector<int>>();
  }

  if (j.contains("seeds")) {
    cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (cfg.seeds.empty()) throw config_error("config.seeds: need at least one seed");
  }
  cfg.output_dir = j.value("output_dir", "");
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error(path + ": invalid JSON: " + e.what());
  }
  return parse_experiment_config(j);
}

inline std::string config_hash(const ExperimentConfig& cfg) {
  return detail::hex64(detail::fnv1a(cfg.canonical.dump()));
}

/// Output root override for scripting; prefixes relative output dirs.
inline std::string resolve_output_dir(const std::string& dir) {
  if (dir.empty()) return dir;
  std::filesystem::path p(dir);
  if (p.is_absolute()) return dir;
  const char* root = std::getenv("WAR_OUTPUT_ROOT");
  if (!root || !*root) return dir;
  return (std::filesystem::path(root) / p).string();
}

// ---------------------------------------------------------------------------
// Data, noise and cost resolution.
// ---------------------------------------------------------------------------

inline std::optional<NoiseTransition> parse_noise_spec(const std::string& spec, int num_classes) {
  if (spec == "none" || spec.empty()) return std::nullopt;
  if (spec.rfind("preset:", 0) == 0) {
    auto rest = spec.substr(7);
    auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw config_error("noise spec '" + spec + "': expected preset:NAME:p");
    std::string name = rest.substr(0, colon);
    double p = detail::parse_double(rest.substr(colon + 1), "noise spec " + spec);
    if (name == "fashion" || name == "fashion-mnist") {
      if (num_classes != 10)
        throw config_error("fashion preset needs 10 classes, dataset has " +
                           std::to_string(num_classes));
      return fashion_transition(p);
    }
    throw config_error("unknown noise preset '" + name + "'");
  }
  if (spec.rfind("symmetric:", 0) == 0) {
    double p = detail::parse_double(spec.substr(10), "noise spec " + spec);
    return symmetric_transition(p, num_classes);
  }
  if (spec.rfind("file:", 0) == 0) {
    auto t = load_transition(spec.substr(5));
    if (t.n != num_classes)
      throw config_error("transition file has " + std::to_string(t.n) + " classes, dataset has " +
                         std::to_string(num_classes));
    return t;
  }
  throw config_error("unknown noise spec '" + spec + "'");
}

struct ExperimentData {
  Dataset train, test;
  std::vector<int> clean_labels;   // empty when no corruption happened
  std::vector<uint8_t> flip_mask;
  std::optional<NoiseTransition> true_transition;
};

inline ExperimentData load_experiment_data(const ExperimentConfig& cfg) {
  ExperimentData out;
  if (cfg.data.kind == "toy3") {
    auto toy = toy_three_class(cfg.data.n_per_class, cfg.data.noise_fraction, cfg.data.seed);
    out.train = std::move(toy.train);
    out.clean_labels = std::move(toy.clean_labels);
    out.flip_mask = std::move(toy.flip_mask);
    auto clean_test = toy_three_class(cfg.data.test_per_class, 0.0, cfg.data.seed + 0x7e57ULL);
    out.test = std::move(clean_test.train);
    out.test.split_tag = "test";
  } else {
    out.train = load_manifest(cfg.data.train_manifest);
    out.test = load_manifest(cfg.data.test_manifest);
  }

  auto transition = parse_noise_spec(cfg.noise_spec, out.train.num_classes());
  if (transition) {
    out.true_transition = *transition;
    auto noisy = apply_noise(out.train.labels, *transition, cfg.noise_seed);
    out.clean_labels = out.train.labels;
    out.train.labels = std::move(noisy.labels);
    out.flip_mask = std::move(noisy.flip_mask);
  }
  return out;
}

inline std::optional<CostMatrix> resolve_cost(const ExperimentConfig& cfg, int num_classes) {
  if (cfg.cost_kind == "none") return std::nullopt;
  if (cfg.cost_kind == "zero_one") return cost_zero_one(num_classes);
  if (cfg.cost_kind == "file") {
    auto named = load_cost(cfg.cost_path);
    if (named.cost.dim() != num_classes)
      throw config_error("cost file has " + std::to_string(named.cost.dim()) +
                         " classes, dataset has " + std::to_string(num_classes));
    return named.cost;
  }
  auto c = cost_from_embeddings(load_embeddings(cfg.cost_path));
  if (c.dim() != num_classes)
    throw config_error("embeddings give " + std::to_string(c.dim()) + " classes, dataset has " +
                       std::to_string(num_classes));
  return c;
}

// ---------------------------------------------------------------------------
// Running experiments.
// ---------------------------------------------------------------------------

struct SeedRun {
  uint64_t seed = 0;
  Metrics metrics;
  MlpModel model;
};

struct ExperimentResult {
  std::vector<SeedRun> runs;
  double mean_accuracy = 0;  // across seeds, of the trailing-window means
  double std_accuracy = 0;
  double runtime_seconds = 0;
  std::string hash;
};

inline void write_metrics_csv(const Metrics& m, const std::vector<std::string>& class_names,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out.precision(12);
  out << "epoch,train_loss,test_accuracy,macro_f1,flip_accuracy,beta,learning_rate";
  for (size_t c = 0; c < class_names.size(); ++c) out << ",f1_" << c;
  out << "\n";
  for (const auto& e : m.per_epoch) {
    out << e.epoch << "," << e.train_loss << "," << e.test_accuracy << "," << e.macro_f1 << ",";
    if (std::isfinite(e.flip_accuracy)) out << e.flip_accuracy;
    out << "," << e.beta_effective << "," << e.learning_rate;
    for (double f : e.per_class_f1) out << "," << f;
    out << "\n";
  }
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_outputs = true) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentData data = load_experiment_data(cfg);
  data.train.validate();
  data.test.validate();

  TrainConfig tc = cfg.train;
  tc.loss = cfg.loss;
  tc.adv = cfg.adv;
  tc.sinkhorn = cfg.sinkhorn;
  tc.adv.sinkhorn = cfg.sinkhorn;
  tc.cost = resolve_cost(cfg, data.train.num_classes());
  if (cfg.loss.method == LossMethod::war_c && !tc.cost)
    throw config_error("WAR-C needs a 'cost' block in the config");

  if (!cfg.transition_source.empty()) {
    if (cfg.transition_source == "true") {
      if (!data.true_transition)
        throw config_error("loss.transition = 'true' needs a noise spec that defines a matrix");
      tc.loss.transition = data.true_transition;
    } else if (cfg.transition_source.rfind("file:", 0) == 0) {
      tc.loss.transition = load_transition(cfg.transition_source.substr(5));
    } else {
      throw config_error("loss.transition must be 'true' or 'file:PATH'");
    }
  }
  tc.loss.validate();

  std::string out_dir = resolve_output_dir(cfg.output_dir);
  if (write_outputs && !out_dir.empty()) std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  result.hash = config_hash(cfg);
  const std::vector<int>* clean = data.clean_labels.empty() ? nullptr : &data.clean_labels;
  const std::vector<uint8_t>* mask = data.flip_mask.empty() ? nullptr : &data.flip_mask;

  for (uint64_t seed : cfg.seeds) {
    TrainConfig seed_cfg = tc;
    seed_cfg.seed = seed;
    auto run = train(data.train, data.test, seed_cfg, clean, mask);
    SeedRun sr;
    sr.seed = seed;
    sr.metrics = std::move(run.metrics);
    sr.model = std::move(run.model);
    if (write_outputs && !out_dir.empty()) {
      auto base = std::filesystem::path(out_dir);
      write_metrics_csv(sr.metrics, data.train.class_names,
                        (base / ("metrics_seed" + std::to_string(seed) + ".csv")).string());
      json header;
      header["seed"] = seed;
      header["config_hash"] = result.hash;
      header["commit"] = WAR_GIT_SHA;
      header["class_names"] = data.train.class_names;
      save_checkpoint(sr.model,
                      (base / ("checkpoint_seed" + std::to_string(seed) + ".bin")).string(),
                      header);
    }
    result.runs.push_back(std::move(sr));
  }

  double sum = 0, sum_sq = 0;
  for (const auto& r : result.runs) {
    double a = r.metrics.summary.mean_accuracy;
    sum += a;
    sum_sq += a * a;
  }
  double n = static_cast<double>(result.runs.size());
  result.mean_accuracy = sum / n;
  result.std_accuracy = std::sqrt(std::max(0.0, sum_sq / n - result.mean_accuracy * result.mean_accuracy));
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (write_outputs && !out_dir.empty()) {
    json summary;
    summary["config_hash"] = result.hash;
    summary["commit"] = WAR_GIT_SHA;
    summary["method"] = loss_method_name(cfg.loss.method);
    summary["seeds"] = cfg.seeds;
    summary["mean_accuracy"] = result.mean_accuracy;
    summary["std_accuracy"] = result.std_accuracy;
    summary["runtime_seconds"] = result.runtime_seconds;
    summary["metric_window"] = cfg.train.metric_window;
    json per_seed = json::array();
    for (const auto& r : result.runs) {
      json s;
      s["seed"] = r.seed;
      s["window_mean_accuracy"] = r.metrics.summary.mean_accuracy;
      s["window_std_accuracy"] = r.metrics.summary.std_accuracy;
      s["window_mean_macro_f1"] = r.metrics.summary.mean_macro_f1;
      s["final_test_accuracy"] = r.metrics.per_epoch.back().test_accuracy;
      per_seed.push_back(std::move(s));
    }
    summary["per_seed"] = std::move(per_seed);
    std::ofstream out(std::filesystem::path(out_dir) / "summary.json");
    out << summary.dump(2) << "\n";
  }
  return result;
}

/// One experiment per beta value; returns the per-beta results in order.
inline std::vector<std::pair<double, ExperimentResult>> sweep_beta(
    const ExperimentConfig& base, const std::vector<double>& betas, bool write_outputs = true) {
  std::vector<std::pair<double, ExperimentResult>> out;
  for (double beta : betas) {
    ExperimentConfig cfg = base;
    cfg.loss.beta = beta;
    cfg.canonical["loss"]["beta"] = beta;
    if (!cfg.output_dir.empty()) {
      std::string tag = std::to_string(beta);
      while (!tag.empty() && (tag.back() == '0' || tag.back() == '.')) {
        bool dot = tag.back() == '.';
        tag.pop_back();
        if (dot) break;
      }
      cfg.output_dir += "/beta_" + tag;
    }
    out.push_back({beta, run_experiment(cfg, write_outputs)});
  }
  if (write_outputs && !base.output_dir.empty()) {
    std::string dir = resolve_output_dir(base.output_dir);
    std::filesystem::create_directories(dir);
    std::ofstream csv(std::filesystem::path(dir) / "sweep.csv");
    csv << "beta,mean_accuracy,std_accuracy\n";
    csv.precision(12);
    for (const auto& [beta, res] : out)
      csv << beta << "," << res.mean_accuracy << "," << res.std_accuracy << "\n";
  }
  return out;
}

}  // namespace war
