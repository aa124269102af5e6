#pragma once

// Shared test fixtures: a synthetic 10-class image benchmark with the same
// class-similarity group layout as the fashion preset, written through the
// IDX + manifest pipeline, plus small file helpers.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "war/data.hpp"
#include "war/ground_cost.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Latent class geometry (8-dim): five well-separated groups, in-group
// neighbors close enough to overlap. Groups mirror the fashion preset's
// flip structure: {0,3}, {2,4,6}, {5,7,9}, {1}, {8}.
inline std::vector<std::vector<double>> fashion_latent_centers(double group_dist,
                                                               double near_dist) {
  const int K = 8;
  std::vector<std::vector<double>> centers(10, std::vector<double>(K, 0.0));
  auto set_group = [&](int axis, std::vector<int> members) {
    for (size_t m = 0; m < members.size(); ++m) {
      auto& c = centers[static_cast<size_t>(members[m])];
      c[static_cast<size_t>(axis)] = group_dist;
      // place members on a simplex in the spare axes 5..7
      if (m == 1) c[5] = near_dist;
      if (m == 2) {
        c[5] = near_dist / 2;
        c[6] = near_dist * std::sqrt(3.0) / 2;
      }
    }
  };
  set_group(0, {0, 3});
  set_group(1, {2, 4, 6});
  set_group(2, {5, 7, 9});
  set_group(3, {1});
  set_group(4, {8});
  return centers;
}

struct SyntheticFashion {
  std::string dir;
  std::string train_manifest, test_manifest, embeddings_csv;
  war::Dataset train, test;  // as loaded back through the IDX pipeline
};

/// Generates the surrogate benchmark deterministically, writes IDX files,
/// manifests and the latent-center embeddings CSV, and loads the datasets
/// back through load_manifest so the whole file pipeline is exercised.
inline SyntheticFashion make_synthetic_fashion(int train_per_class, int test_per_class,
                                               uint64_t seed, const std::string& dir,
                                               int side = 14) {
  // In-group neighbors are separable but close (4.6 sigma), like the
  // visually similar yet learnable classes of the real benchmark; the label
  // noise then lands as islands of wrong labels inside foreign territory.
  const int K = 8, D = side * side;
  const double group_dist = 9.0, near_dist = 3.2, latent_sigma = 0.7, pixel_sigma = 0.04;
  auto centers = fashion_latent_centers(group_dist, near_dist);

  fs::create_directories(dir);
  SyntheticFashion out;
  out.dir = dir;

  // fixed random projection, scaled so images stay comfortably in [-1, 1]
  std::mt19937_64 proj_rng(seed ^ 0xabcdef12345ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> proj(static_cast<size_t>(K) * D);
  double proj_scale = 1.0 / (std::sqrt(static_cast<double>(K)) * (group_dist + 3.0));
  for (auto& v : proj) v = gauss(proj_rng) * proj_scale;

  auto sample_split = [&](int per_class, uint64_t split_seed, const std::string& stem) {
    std::mt19937_64 rng(split_seed);
    int n = 10 * per_class;
    std::vector<unsigned char> pixels(static_cast<size_t>(n) * D);
    std::vector<int> labels(static_cast<size_t>(n));
    std::vector<double> latent(static_cast<size_t>(K));
    for (int c = 0; c < 10; ++c)
      for (int k = 0; k < per_class; ++k) {
        int i = c * per_class + k;
        labels[static_cast<size_t>(i)] = c;
        for (int a = 0; a < K; ++a)
          latent[static_cast<size_t>(a)] =
              centers[static_cast<size_t>(c)][static_cast<size_t>(a)] + latent_sigma * gauss(rng);
        for (int p = 0; p < D; ++p) {
          double v = 0;
          for (int a = 0; a < K; ++a)
            v += latent[static_cast<size_t>(a)] * proj[static_cast<size_t>(a) * D + p];
          v = std::tanh(3.0 * v) + pixel_sigma * gauss(rng);
          v = std::clamp(v, -1.0, 1.0);
          pixels[static_cast<size_t>(i) * D + p] =
              static_cast<unsigned char>(std::lround((v + 1.0) * 127.5));
        }
      }
    war::save_idx_images(dir + "/" + stem + "-images.idx", pixels, n, side, side);
    war::save_idx_labels(dir + "/" + stem + "-labels.idx", labels);
    war::save_manifest(dir + "/" + stem + "-manifest.json", "idx", stem + "-images.idx",
                       stem + "-labels.idx", war::fashion_class_names(),
                       stem == "train" ? "train" : "test");
  };
  sample_split(train_per_class, seed, "train");
  sample_split(test_per_class, seed ^ 0x7e577e57ULL, "test");

  // Class embeddings carry the same grouping but on the scale word
  // embeddings give for related nouns: in-group pairs at distance 0.7
  // (cost e^{-0.7} ~ 0.50), distinct groups ~3.5 apart (cost ~ 0.03).
  {
    auto embed_centers = fashion_latent_centers(3.5 / std::sqrt(2.0), 0.7);
    std::ofstream e(dir + "/embeddings.csv");
    for (int c = 0; c < 10; ++c) {
      e << war::fashion_class_names()[static_cast<size_t>(c)];
      for (int a = 0; a < K; ++a)
        e << "," << embed_centers[static_cast<size_t>(c)][static_cast<size_t>(a)];
      e << "\n";
    }
  }

  out.train_manifest = dir + "/train-manifest.json";
  out.test_manifest = dir + "/test-manifest.json";
  out.embeddings_csv = dir + "/embeddings.csv";
  out.train = war::load_manifest(out.train_manifest);
  out.test = war::load_manifest(out.test_manifest);
  return out;
}

inline std::string write_figure1_cost(const std::string& path) {
  std::ofstream out(path);
  out << ",black,red,orange\nblack,0,1,1\nred,1,0,5\norange,1,5,0\n";
  return path;
}

}  // namespace fixtures
