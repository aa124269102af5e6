#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "war/mlp.hpp"
#include "war/ot.hpp"

namespace war {

enum class DivKind { kl, tv, ot };

/// Search configuration for the adversarial perturbation: Euclidean ball of
/// radius epsilon, finite power-iteration step xi, k_max repetitions.
struct AdvConfig {
  double epsilon = 0.005;
  double xi = 1e-6;
  int k_max = 1;
  DivKind divergence = DivKind::kl;
  std::optional<CostMatrix> cost;  // required for the OT divergence
  SinkhornConfig sinkhorn;         // shared with the loss for consistency

  void validate() const {
    if (!(epsilon >= 0)) throw config_error("AdvConfig: epsilon must be >= 0");
    if (!(xi > 0)) throw config_error("AdvConfig: xi must be > 0");
    if (k_max < 1) throw config_error("AdvConfig: k_max must be >= 1");
    if (divergence == DivKind::ot && !cost)
      throw config_error("AdvConfig: OT divergence needs a ground cost");
  }
};

struct DirectionResult {
  int n = 0, d = 0;
  std::vector<double> dir;          // n*d, unit rows
  std::vector<uint8_t> degenerate;  // 1 where a zero gradient was hit
};

namespace detail {

/// Sum over the batch of D(p, ref); per-sample gradients stay separable.
inline Tensor divergence_sum(Tape& tp, const Tensor& p, const Tensor& ref, const AdvConfig& cfg) {
  switch (cfg.divergence) {
    case DivKind::kl:
      return tp.sum(tp.mul(p, tp.sub(tp.log(p, 1e-12), tp.log(ref, 1e-12))));
    case DivKind::tv:
      return tp.scale(tp.sum(tp.abs(tp.sub(p, ref))), 0.5);
    case DivKind::ot:
      return tp.sum(sharp_ot_loss_batch(tp, p, ref, *cfg.cost, cfg.sinkhorn));
  }
  throw error("unreachable divergence");
}

/// D(p, ref) for one sample, plain doubles.
inline double divergence_value(const double* p, const double* ref, int c, const AdvConfig& cfg) {
  switch (cfg.divergence) {
    case DivKind::kl: {
      double s = 0;
      for (int k = 0; k < c; ++k)
        s += p[k] * (std::log(std::max(p[k], 1e-12)) - std::log(std::max(ref[k], 1e-12)));
      return s;
    }
    case DivKind::tv: {
      double s = 0;
      for (int k = 0; k < c; ++k) s += std::abs(p[k] - ref[k]);
      return 0.5 * s;
    }
    case DivKind::ot: {
      ProbVector a{std::vector<double>(p, p + c)};
      ProbVector b{std::vector<double>(ref, ref + c)};
      auto plan = sinkhorn_plan(a, b, *cfg.cost, cfg.sinkhorn);
      return plan.cost(*cfg.cost);
    }
  }
  throw error("unreachable divergence");
}

}  // namespace detail

/// Power iteration from a caller-supplied start: each step evaluates
/// grad_r D(p(x + xi*d), p(x)) with the model parameters frozen and
/// renormalizes per sample. Rows of d0 need not be unit length.
inline DirectionResult power_iterate(const MlpModel& model, const Tensor& x, const AdvConfig& cfg,
                                     std::vector<double> d0) {
  cfg.validate();
  if (x.rank() != 2) throw shape_error("power_iterate", {x.shape()});
  int n = x.dim(0), d = x.dim(1);
  if (d0.size() != static_cast<size_t>(n) * d)
    throw shape_error("power_iterate: start direction", {x.shape()});

  DirectionResult res;
  res.n = n;
  res.d = d;
  res.degenerate.assign(static_cast<size_t>(n), 0);

  auto normalize_rows = [&](std::vector<double>& v, bool flag_zero) {
    for (int i = 0; i < n; ++i) {
      double* row = v.data() + static_cast<size_t>(i) * d;
      double s = 0;
      for (int k = 0; k < d; ++k) s += row[k] * row[k];
      s = std::sqrt(s);
      if (s < 1e-300) {
        if (flag_zero) res.degenerate[static_cast<size_t>(i)] = 1;
        continue;  // keep the previous direction in this row
      }
      for (int k = 0; k < d; ++k) row[k] /= s;
    }
  };
  normalize_rows(d0, false);

  std::vector<double> ref = model.forward_values(x.values().data(), n);
  Tensor ref_t({n, model.output_dim()}, std::move(ref));

  std::vector<double> dir = std::move(d0);
  for (int it = 0; it < cfg.k_max; ++it) {
    Tape tp;
    BoundMlp frozen(tp, model, /*trainable=*/false);
    std::vector<double> step(dir.size());
    for (size_t k = 0; k < dir.size(); ++k) step[k] = cfg.xi * dir[k];
    Tensor r = tp.leaf(Tensor({n, d}, std::move(step)));
    Tensor p = frozen.forward(tp.add(x.detached(), r));
    Tensor dsum = detail::divergence_sum(tp, p, ref_t, cfg);
    Tensor grad = tp.gradient(dsum, {r})[0];

    std::vector<double> g = grad.values();
    // Zero-gradient rows keep the incoming direction and raise the flag.
    for (int i = 0; i < n; ++i) {
      double s = 0;
      const double* row = g.data() + static_cast<size_t>(i) * d;
      for (int k = 0; k < d; ++k) s += row[k] * row[k];
      if (std::sqrt(s) < 1e-300) {
        res.degenerate[static_cast<size_t>(i)] = 1;
        std::copy(dir.begin() + static_cast<int64_t>(i) * d,
                  dir.begin() + static_cast<int64_t>(i + 1) * d,
                  g.begin() + static_cast<int64_t>(i) * d);
      }
    }
    dir = std::move(g);
    normalize_rows(dir, false);
  }

  // The power iteration pins down the dominant curvature axis but not the
  // sign along it; the divergence is asymmetric at the ball radius, so pick
  // the side the maximization actually wants.
  if (cfg.epsilon > 0) {
    int c = model.output_dim();
    std::vector<double> xp = x.values(), xm = x.values();
    for (size_t k = 0; k < dir.size(); ++k) {
      xp[k] += cfg.epsilon * dir[k];
      xm[k] -= cfg.epsilon * dir[k];
    }
    auto pp = model.forward_values(xp.data(), n);
    auto pm = model.forward_values(xm.data(), n);
    const auto& rv = ref_t.values();
    for (int i = 0; i < n; ++i) {
      const double* r0 = rv.data() + static_cast<size_t>(i) * c;
      double dplus = detail::divergence_value(pp.data() + static_cast<size_t>(i) * c, r0, c, cfg);
      double dminus = detail::divergence_value(pm.data() + static_cast<size_t>(i) * c, r0, c, cfg);
      if (dminus > dplus)
        for (int k = 0; k < d; ++k) dir[static_cast<size_t>(i) * d + k] *= -1.0;
    }
  }
  res.dir = std::move(dir);
  return res;
}

/// Adversarial direction per sample: random unit start from the caller's
/// generator, then k_max power iterations. Deterministic given (model, x,
/// generator state).
inline DirectionResult adversarial_direction(const MlpModel& model, const Tensor& x,
                                             const AdvConfig& cfg, std::mt19937_64& rng) {
  if (x.rank() != 2) throw shape_error("adversarial_direction", {x.shape()});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> d0(static_cast<size_t>(x.dim(0)) * x.dim(1));
  for (double& v : d0) v = gauss(rng);
  return power_iterate(model, x, cfg, std::move(d0));
}

/// x_adv = x + epsilon * d/||d||, per row. The perturbation norm is exactly
/// epsilon by construction.
inline Tensor adversarial_example(const Tensor& x, const std::vector<double>& d, double epsilon) {
  if (x.rank() != 2) throw shape_error("adversarial_example", {x.shape()});
  int n = x.dim(0), dim = x.dim(1);
  if (d.size() != static_cast<size_t>(n) * dim)
    throw shape_error("adversarial_example: direction", {x.shape()});
  std::vector<double> out = x.values();
  for (int i = 0; i < n; ++i) {
    const double* row = d.data() + static_cast<size_t>(i) * dim;
    double s = 0;
    for (int k = 0; k < dim; ++k) s += row[k] * row[k];
    s = std::sqrt(s);
    if (!(s > 0)) throw numeric_error("adversarial_example: zero direction in row " +
                                      std::to_string(i));
    double f = epsilon / s;
    for (int k = 0; k < dim; ++k) out[static_cast<size_t>(i) * dim + k] += f * row[k];
  }
  return Tensor({n, dim}, std::move(out));
}

}  // namespace war
