#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "war/error.hpp"
#include "war/ground_cost.hpp"

namespace war {

/// Row-stochastic label-flip matrix: entry (i,j) is the probability that a
/// clean label i is recorded as j.
struct NoiseTransition {
  int n = 0;
  std::vector<double> p;  // row-major n*n
  double noise_level = 0;
  std::vector<std::string> class_names;

  double at(int i, int j) const { return p[static_cast<size_t>(i) * n + j]; }

  void validate(double tol = 1e-12) const {
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) {
        double v = at(i, j);
        if (!(v >= 0))
          throw config_error("NoiseTransition: negative entry at (" + std::to_string(i) + "," +
                             std::to_string(j) + ")");
        s += v;
      }
      if (std::abs(s - 1.0) > tol)
        throw config_error("NoiseTransition: row " + std::to_string(i) + " sums to " +
                           std::to_string(s));
    }
  }

  static NoiseTransition identity(int n) {
    NoiseTransition t;
    t.n = n;
    t.p.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) t.p[static_cast<size_t>(i) * n + i] = 1.0;
    return t;
  }
};

struct FlipPair {
  int source = 0;
  int target = 0;
  bool mutual = false;
};

/// Builds a transition from flip pairs: every declared direction moves
/// probability p from the source diagonal to the target. A source appearing
/// in several pairs sends p to each target, so the total leaving mass must
/// stay at most 1.
inline NoiseTransition transition_from_pairs(const std::vector<FlipPair>& pairs, double p,
                                             int num_classes) {
  if (!(p >= 0 && p < 1)) throw config_error("transition_from_pairs: p must be in [0,1)");
  auto t = NoiseTransition::identity(num_classes);
  t.noise_level = p;
  std::vector<std::pair<int, int>> seen;
  auto flip = [&](int s, int d) {
    if (s < 0 || s >= num_classes || d < 0 || d >= num_classes)
      throw config_error("transition_from_pairs: class index out of range");
    if (s == d) throw config_error("transition_from_pairs: source equals target");
    for (auto& e : seen)
      if (e.first == s && e.second == d)
        throw config_error("transition_from_pairs: duplicate pair " + std::to_string(s) + "->" +
                           std::to_string(d));
    seen.push_back({s, d});
    t.p[static_cast<size_t>(s) * num_classes + d] += p;
    t.p[static_cast<size_t>(s) * num_classes + s] -= p;
    if (t.p[static_cast<size_t>(s) * num_classes + s] < 0)
      throw config_error("transition_from_pairs: source " + std::to_string(s) +
                         " loses more than all its mass (too many targets for p=" +
                         std::to_string(p) + ")");
  };
  for (const auto& pr : pairs) {
    flip(pr.source, pr.target);
    if (pr.mutual) flip(pr.target, pr.source);
  }
  // Make each row sum exactly 1 by recomputing the diagonal as the
  // complement of the off-diagonal mass.
  for (int i = 0; i < num_classes; ++i) {
    double off = 0;
    for (int j = 0; j < num_classes; ++j)
      if (j != i) off += t.at(i, j);
    t.p[static_cast<size_t>(i) * num_classes + i] = 1.0 - off;
  }
  t.validate();
  return t;
}

/// Uniform flips: 1-p on the diagonal, p/(C-1) elsewhere.
inline NoiseTransition symmetric_transition(double p, int num_classes) {
  if (!(p >= 0 && p < 1)) throw config_error("symmetric_transition: p must be in [0,1)");
  if (num_classes < 2) throw config_error("symmetric_transition: need at least 2 classes");
  NoiseTransition t;
  t.n = num_classes;
  t.noise_level = p;
  t.p.assign(static_cast<size_t>(num_classes) * num_classes, p / (num_classes - 1));
  for (int i = 0; i < num_classes; ++i) t.p[static_cast<size_t>(i) * num_classes + i] = 1.0 - p;
  t.validate();
  return t;
}

inline const std::vector<std::string>& fashion_class_names() {
  static const std::vector<std::string> names = {
      "T-SHIRT/TOP", "TROUSER", "PULLOVER", "DRESS",   "COAT",
      "SANDAL",      "SHIRT",   "SNEAKER",  "BAG",     "ANKLE BOOT"};
  return names;
}

/// Fashion-MNIST flips between visually similar classes:
/// DRESS->T-SHIRT/TOP, COAT<->SHIRT, SANDAL->SNEAKER, SHIRT->PULLOVER,
/// ANKLE BOOT->SNEAKER. SHIRT feeds two targets (COAT and PULLOVER), each
/// with probability p, so the preset needs 2p <= 1.
inline NoiseTransition fashion_transition(double p) {
  std::vector<FlipPair> pairs = {
      {3, 0, false},  // DRESS -> T-SHIRT/TOP
      {4, 6, true},   // COAT <-> SHIRT
      {5, 7, false},  // SANDAL -> SNEAKER
      {6, 2, false},  // SHIRT -> PULLOVER
      {9, 7, false},  // ANKLE BOOT -> SNEAKER
  };
  auto t = transition_from_pairs(pairs, p, 10);
  t.class_names = fashion_class_names();
  return t;
}

struct NoisyLabels {
  std::vector<int> labels;
  std::vector<uint8_t> flip_mask;  // 1 where the label changed
};

/// Resamples each label from its transition row, independently, with the
/// seeded generator; deterministic per seed.
inline NoisyLabels apply_noise(const std::vector<int>& labels, const NoiseTransition& t,
                               uint64_t seed) {
  t.validate();
  NoisyLabels out;
  out.labels.resize(labels.size());
  out.flip_mask.assign(labels.size(), 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (size_t k = 0; k < labels.size(); ++k) {
    int y = labels[k];
    if (y < 0 || y >= t.n)
      throw config_error("apply_noise: label " + std::to_string(y) + " out of range [0," +
                         std::to_string(t.n) + ")");
    double u = unif(rng);
    double acc = 0;
    int drawn = t.n - 1;  // last interval absorbs rounding dust
    for (int j = 0; j < t.n; ++j) {
      acc += t.at(y, j);
      if (u < acc) {
        drawn = j;
        break;
      }
    }
    out.labels[k] = drawn;
    out.flip_mask[k] = drawn != y ? 1 : 0;
  }
  return out;
}

/// Transition matrices travel as headered CSV like cost matrices.
inline NoiseTransition load_transition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open transition file " + path);
  std::string line;
  if (!std::getline(in, line)) throw config_error(path + ": empty transition file");
  auto header = detail::split_csv_line(line);
  if (header.size() < 3 || !header[0].empty())
    throw config_error(path + ": header must be ',name0,name1,...'");
  std::vector<std::string> names(header.begin() + 1, header.end());
  int n = static_cast<int>(names.size());
  NoiseTransition t;
  t.n = n;
  t.class_names = names;
  t.p.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw config_error(path + ": expected " + std::to_string(n) + " rows");
    auto fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != n + 1)
      throw config_error(path + ": row " + std::to_string(i) + " has wrong width");
    if (fields[0] != names[static_cast<size_t>(i)])
      throw config_error(path + ": row name '" + fields[0] + "' mismatches header");
    for (int j = 0; j < n; ++j)
      t.p[static_cast<size_t>(i) * n + j] =
          detail::parse_double(fields[static_cast<size_t>(j) + 1], path);
  }
  t.validate(1e-9);
  return t;
}

inline void save_transition(const NoiseTransition& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out.precision(17);
  auto label = [&](int i) {
    return i < static_cast<int>(t.class_names.size()) ? t.class_names[static_cast<size_t>(i)]
                                                      : "c" + std::to_string(i);
  };
  for (int j = 0; j < t.n; ++j) out << "," << label(j);
  out << "\n";
  for (int i = 0; i < t.n; ++i) {
    out << label(i);
    for (int j = 0; j < t.n; ++j) out << "," << t.at(i, j);
    out << "\n";
  }
}

}  // namespace war
