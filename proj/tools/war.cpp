// Experiment CLI: ground-cost construction, label-noise injection, training,
// evaluation, beta sweeps and decision-boundary grids.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "war/experiment.hpp"

namespace fs = std::filesystem;
using war::json;

namespace {

int cmd_cost_build(const std::string& embeddings, int zero_one, const std::string& manual,
                   const std::string& out) {
  int sources = (!embeddings.empty() ? 1 : 0) + (zero_one > 0 ? 1 : 0) + (!manual.empty() ? 1 : 0);
  if (sources != 1)
    throw war::config_error("cost-build: pass exactly one of --embeddings, --zero-one, --manual");

  war::CostMatrix cost;
  std::vector<std::string> names;
  if (!embeddings.empty()) {
    auto es = war::load_embeddings(embeddings);
    cost = war::cost_from_embeddings(es);
    for (const auto& e : es) names.push_back(e.class_name);
  } else if (zero_one > 0) {
    cost = war::cost_zero_one(zero_one);
    for (int i = 0; i < zero_one; ++i) names.push_back("c" + std::to_string(i));
  } else {
    auto named = war::load_cost(manual);  // validated pass-through
    cost = named.cost;
    names = named.class_names;
  }
  war::save_cost(cost, names, out);
  std::cout << "wrote " << cost.dim() << "x" << cost.dim() << " cost matrix to " << out << "\n";
  return 0;
}

int cmd_noise_apply(const std::string& manifest, const std::string& spec, uint64_t seed,
                    const std::string& out_dir_arg) {
  std::string out_dir = war::resolve_output_dir(out_dir_arg);
  auto ds = war::load_manifest(manifest);
  auto transition = war::parse_noise_spec(spec, ds.num_classes());
  if (!transition) throw war::config_error("noise-apply: spec '" + spec + "' defines no noise");
  auto noisy = war::apply_noise(ds.labels, *transition, seed);
  fs::create_directories(out_dir);

  // noisy labels + a manifest pointing back at the original images
  war::save_idx_labels((fs::path(out_dir) / "noisy-labels.idx").string(), noisy.labels);
  std::ifstream src_manifest(manifest);
  json jm;
  src_manifest >> jm;
  if (jm.value("format", "") != "idx")
    throw war::config_error("noise-apply: only idx manifests are supported");
  fs::path src_images(jm["images"].get<std::string>());
  if (!src_images.is_absolute())
    src_images = fs::absolute(fs::path(manifest).parent_path() / src_images);
  json out_manifest;
  out_manifest["format"] = "idx";
  out_manifest["images"] = src_images.string();
  out_manifest["labels"] = "noisy-labels.idx";
  if (jm.contains("class_names")) out_manifest["class_names"] = jm["class_names"];
  out_manifest["split"] = jm.value("split", "train");
  std::ofstream(fs::path(out_dir) / "manifest.json") << out_manifest.dump(2) << "\n";

  // flip mask and the empirical transition observed in this draw
  {
    std::ofstream mask_out(fs::path(out_dir) / "flip-mask.csv");
    mask_out << "index,clean,noisy\n";
    for (size_t i = 0; i < noisy.labels.size(); ++i)
      if (noisy.flip_mask[i])
        mask_out << i << "," << ds.labels[i] << "," << noisy.labels[i] << "\n";
  }
  int c = ds.num_classes();
  std::vector<double> counts(static_cast<size_t>(c) * c, 0.0);
  std::vector<double> row_total(static_cast<size_t>(c), 0.0);
  for (size_t i = 0; i < noisy.labels.size(); ++i) {
    counts[static_cast<size_t>(ds.labels[i]) * c + noisy.labels[i]] += 1.0;
    row_total[static_cast<size_t>(ds.labels[i])] += 1.0;
  }
  war::NoiseTransition empirical;
  empirical.n = c;
  empirical.class_names =
      transition->class_names.empty() ? ds.class_names : transition->class_names;
  empirical.p.assign(static_cast<size_t>(c) * c, 0.0);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      empirical.p[static_cast<size_t>(i) * c + j] =
          row_total[static_cast<size_t>(i)] > 0
              ? counts[static_cast<size_t>(i) * c + j] / row_total[static_cast<size_t>(i)]
              : (i == j ? 1.0 : 0.0);
  war::save_transition(empirical, (fs::path(out_dir) / "empirical-transition.csv").string());
  war::save_transition(*transition, (fs::path(out_dir) / "target-transition.csv").string());

  int64_t flips = 0;
  for (auto m : noisy.flip_mask) flips += m;
  json report;
  report["samples"] = ds.n;
  report["flipped"] = flips;
  report["flip_fraction"] = static_cast<double>(flips) / ds.n;
  report["noise_spec"] = spec;
  report["seed"] = seed;
  report["commit"] = WAR_GIT_SHA;
  std::ofstream(fs::path(out_dir) / "report.json") << report.dump(2) << "\n";
  std::cout << "flipped " << flips << " of " << ds.n << " labels; outputs in " << out_dir << "\n";
  return 0;
}

int cmd_train(const std::string& config_path) {
  auto cfg = war::load_experiment_config(config_path);
  auto result = war::run_experiment(cfg, true);
  std::cout << "method " << war::loss_method_name(cfg.loss.method) << ", " << result.runs.size()
            << " seed(s): accuracy " << result.mean_accuracy * 100 << " +- "
            << result.std_accuracy * 100 << " (trailing-window mean), " << result.runtime_seconds
            << " s\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& manifest,
             const std::string& out_path) {
  json header;
  auto model = war::load_checkpoint(checkpoint, &header);
  auto ds = war::load_manifest(manifest);
  auto ev = war::evaluate(model, ds);
  json out;
  out["checkpoint"] = checkpoint;
  out["config_hash"] = header.value("config_hash", "");
  out["accuracy"] = ev.accuracy;
  out["macro_f1"] = ev.macro_f1;
  out["per_class_f1"] = ev.per_class_f1;
  std::string dumped = out.dump(2);
  if (!out_path.empty()) std::ofstream(out_path) << dumped << "\n";
  std::cout << dumped << "\n";
  return 0;
}

int cmd_sweep_beta(const std::string& config_path, const std::string& betas_arg) {
  auto cfg = war::load_experiment_config(config_path);
  std::vector<double> betas;
  std::string token;
  std::istringstream ss(betas_arg);
  while (std::getline(ss, token, ','))
    betas.push_back(war::detail::parse_double(token, "--betas"));
  if (betas.empty()) throw war::config_error("sweep-beta: empty --betas list");
  auto results = war::sweep_beta(cfg, betas, true);
  std::cout << "beta,mean_accuracy,std_accuracy\n";
  for (const auto& [beta, res] : results)
    std::cout << beta << "," << res.mean_accuracy << "," << res.std_accuracy << "\n";
  return 0;
}

int cmd_boundary_grid(const std::string& checkpoint, std::vector<double> range, int resolution,
                      const std::string& out, const std::string& svg,
                      const std::string& points_manifest) {
  auto model = war::load_checkpoint(checkpoint);
  auto grid = war::boundary_grid(model, range[0], range[1], range[2], range[3], resolution);
  war::save_grid_csv(grid, out);
  if (!svg.empty()) {
    if (!points_manifest.empty()) {
      auto pts = war::load_manifest(points_manifest);
      war::save_grid_svg(grid, svg, &pts);
    } else {
      war::save_grid_svg(grid, svg);
    }
  }
  std::cout << "wrote " << resolution << "x" << resolution << " grid to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein adversarial regularization experiments"};
  app.require_subcommand(1);

  std::string embeddings, manual, out, manifest, spec, config_path, checkpoint, svg, points;
  std::string betas;
  int zero_one = 0, resolution = 200;
  uint64_t seed = 7;
  std::vector<double> range;

  auto* cost = app.add_subcommand("cost-build", "Build and validate a ground-cost matrix");
  cost->add_option("--embeddings", embeddings, "class embeddings CSV (name,v1,...,vd)");
  cost->add_option("--zero-one", zero_one, "build the 0-1 cost for N classes");
  cost->add_option("--manual", manual, "validate and pass through a cost CSV");
  cost->add_option("--out", out, "output cost CSV")->required();

  auto* noise = app.add_subcommand("noise-apply", "Corrupt dataset labels with a noise model");
  noise->add_option("--data", manifest, "dataset manifest JSON")->required();
  noise->add_option("--noise", spec, "none | preset:fashion:P | symmetric:P | file:PATH")
      ->required();
  noise->add_option("--seed", seed, "noise seed");
  noise->add_option("--out", out, "output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "Run a training experiment from a JSON config");
  train_cmd->add_option("--config", config_path, "experiment config JSON")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--data", manifest, "dataset manifest JSON")->required();
  eval_cmd->add_option("--out", out, "write metrics JSON here as well");

  auto* sweep = app.add_subcommand("sweep-beta", "Re-run an experiment over a list of betas");
  sweep->add_option("--config", config_path, "experiment config JSON")->required();
  sweep->add_option("--betas", betas, "comma-separated beta values")->required();

  auto* grid = app.add_subcommand("boundary-grid", "Export a decision-boundary grid (2-D models)");
  grid->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  grid->add_option("--range", range, "X0 X1 Y0 Y1")->expected(4)->required();
  grid->add_option("--resolution", resolution, "cells per axis");
  grid->add_option("--out", out, "output CSV")->required();
  grid->add_option("--svg", svg, "also render decision regions to this SVG");
  grid->add_option("--points", points, "overlay dataset points from this manifest (SVG only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cost->parsed()) return cmd_cost_build(embeddings, zero_one, manual, out);
    if (noise->parsed()) return cmd_noise_apply(manifest, spec, seed, out);
    if (train_cmd->parsed()) return cmd_train(config_path);
    if (eval_cmd->parsed()) return cmd_eval(checkpoint, manifest, out);
    if (sweep->parsed()) return cmd_sweep_beta(config_path, betas);
    if (grid->parsed()) return cmd_boundary_grid(checkpoint, range, resolution, out, svg, points);
  } catch (const war::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const war::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
