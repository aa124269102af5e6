#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "war/adversarial.hpp"
#include "war/ground_cost.hpp"
#include "war/mlp.hpp"
#include "war/noise.hpp"

namespace war {

enum class LossMethod { cce, ar_kl, war_01, war_c, bootsoft, forward, backward };

inline const char* loss_method_name(LossMethod m) {
  switch (m) {
    case LossMethod::cce: return "CCE";
    case LossMethod::ar_kl: return "AR-KL";
    case LossMethod::war_01: return "WAR-01";
    case LossMethod::war_c: return "WAR-C";
    case LossMethod::bootsoft: return "BOOTSOFT";
    case LossMethod::forward: return "FORWARD";
    case LossMethod::backward: return "BACKWARD";
  }
  return "?";
}

inline LossMethod loss_method_from_name(const std::string& s) {
  for (LossMethod m : {LossMethod::cce, LossMethod::ar_kl, LossMethod::war_01, LossMethod::war_c,
                       LossMethod::bootsoft, LossMethod::forward, LossMethod::backward})
    if (s == loss_method_name(m)) return m;
  throw config_error("unknown loss method '" + s + "'");
}

struct LossConfig {
  LossMethod method = LossMethod::cce;
  double beta = 10.0;         // regularization trade-off
  int warmup_epochs = 15;     // beta forced to 0 before this epoch
  double bootstrap_weight = 0.95;
  std::optional<NoiseTransition> transition;  // FORWARD/BACKWARD

  void validate() const {
    if (!(beta >= 0)) throw config_error("LossConfig: beta must be >= 0");
    if (warmup_epochs < 0) throw config_error("LossConfig: warmup_epochs must be >= 0");
    if (!(bootstrap_weight >= 0 && bootstrap_weight <= 1))
      throw config_error("LossConfig: bootstrap_weight must be in [0,1]");
    if ((method == LossMethod::forward || method == LossMethod::backward) && !transition)
      throw config_error(std::string(loss_method_name(method)) +
                         " needs a noise transition matrix");
  }
};

// All batch losses are means over the rows of the prediction matrix.
// Probabilities are clamped at 1e-12 before every log.

inline constexpr double kProbClamp = 1e-12;

inline Tensor cross_entropy(Tape& tp, const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape() || pred.rank() != 2)
    throw shape_error("cross_entropy", {pred.shape(), target.shape()});
  double inv_n = 1.0 / pred.dim(0);
  return tp.scale(tp.negate(tp.sum(tp.mul(target, tp.log(pred, kProbClamp)))), inv_n);
}

inline Tensor kl_divergence(Tape& tp, const Tensor& p, const Tensor& q) {
  if (p.shape() != q.shape() || p.rank() != 2) throw shape_error("kl_divergence", {p.shape(), q.shape()});
  double inv_n = 1.0 / p.dim(0);
  Tensor diff = tp.sub(tp.log(p, kProbClamp), tp.log(q, kProbClamp));
  return tp.scale(tp.sum(tp.mul(p, diff)), inv_n);
}

inline Tensor entropy(Tape& tp, const Tensor& p) {
  if (p.rank() != 2) throw shape_error("entropy", {p.shape()});
  double inv_n = 1.0 / p.dim(0);
  return tp.scale(tp.negate(tp.sum(tp.mul(p, tp.log(p, kProbClamp)))), inv_n);
}

inline Tensor tv_divergence(Tape& tp, const Tensor& p, const Tensor& q) {
  if (p.shape() != q.shape() || p.rank() != 2) throw shape_error("tv_divergence", {p.shape(), q.shape()});
  return tp.scale(tp.sum(tp.abs(tp.sub(p, q))), 0.5 / p.dim(0));
}

/// Bootstrapping-soft: cross-entropy against w*y + (1-w)*stop_grad(pred).
inline Tensor bootsoft_loss(Tape& tp, const Tensor& pred, const Tensor& one_hot, double w) {
  if (!(w >= 0 && w <= 1)) throw config_error("bootsoft_loss: weight must be in [0,1]");
  std::vector<double> target(pred.values().size());
  for (size_t i = 0; i < target.size(); ++i)
    target[i] = w * one_hot.values()[i] + (1.0 - w) * pred.values()[i];
  return cross_entropy(tp, pred, Tensor(pred.shape(), std::move(target)));
}

/// Forward correction: cross-entropy of the noisy label against T^t * pred.
inline Tensor forward_corrected_loss(Tape& tp, const Tensor& pred, const Tensor& one_hot,
                                     const NoiseTransition& t) {
  if (pred.dim(1) != t.n) throw shape_error("forward_corrected_loss", {pred.shape(), {t.n, t.n}});
  Tensor tmat({t.n, t.n}, t.p);
  Tensor mixed = tp.matmul(pred, tmat);  // row p * T == T^t p
  double inv_n = 1.0 / pred.dim(0);
  return tp.scale(tp.negate(tp.sum(tp.mul(one_hot, tp.log(mixed, kProbClamp)))), inv_n);
}

namespace detail {

/// Gauss-Jordan inverse with partial pivoting; throws with a condition
/// estimate when the matrix is numerically singular.
inline std::vector<double> invert_matrix(const std::vector<double>& a, int n,
                                         const std::string& context) {
  std::vector<double> m = a;
  std::vector<double> inv(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * n + i] = 1.0;
  double norm1 = 0;
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::abs(a[static_cast<size_t>(i) * n + j]);
    norm1 = std::max(norm1, s);
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[static_cast<size_t>(r) * n + col]) >
          std::abs(m[static_cast<size_t>(piv) * n + col]))
        piv = r;
    double pval = m[static_cast<size_t>(piv) * n + col];
    if (std::abs(pval) < 1e-300)
      throw numeric_error(context + ": singular matrix (zero pivot at column " +
                          std::to_string(col) + ")");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(m[static_cast<size_t>(piv) * n + j], m[static_cast<size_t>(col) * n + j]);
        std::swap(inv[static_cast<size_t>(piv) * n + j], inv[static_cast<size_t>(col) * n + j]);
      }
    double d = 1.0 / m[static_cast<size_t>(col) * n + col];
    for (int j = 0; j < n; ++j) {
      m[static_cast<size_t>(col) * n + j] *= d;
      inv[static_cast<size_t>(col) * n + j] *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = m[static_cast<size_t>(r) * n + col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m[static_cast<size_t>(r) * n + j] -= f * m[static_cast<size_t>(col) * n + j];
        inv[static_cast<size_t>(r) * n + j] -= f * inv[static_cast<size_t>(col) * n + j];
      }
    }
  }
  double inv_norm1 = 0;
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::abs(inv[static_cast<size_t>(i) * n + j]);
    inv_norm1 = std::max(inv_norm1, s);
  }
  double cond = norm1 * inv_norm1;
  if (!(cond < 1e12))
    throw numeric_error(context + ": matrix numerically singular (condition estimate " +
                        std::to_string(cond) + ")");
  return inv;
}

}  // namespace detail

/// Backward correction: the per-class CE vector left-multiplied by T^-1,
/// evaluated at the noisy label. Written so that T = identity reproduces
/// plain cross-entropy bit for bit.
inline Tensor backward_corrected_loss(Tape& tp, const Tensor& pred, const Tensor& one_hot,
                                      const NoiseTransition& t) {
  if (pred.dim(1) != t.n) throw shape_error("backward_corrected_loss", {pred.shape(), {t.n, t.n}});
  auto inv = detail::invert_matrix(t.p, t.n, "backward_corrected_loss");
  Tensor coeff = tp.matmul(one_hot, Tensor({t.n, t.n}, std::move(inv)));
  double inv_n = 1.0 / pred.dim(0);
  return tp.scale(tp.negate(tp.sum(tp.mul(coeff, tp.log(pred, kProbClamp)))), inv_n);
}

// ---------------------------------------------------------------------------
// Adversarial regularizers: D(p(x + r^a), stop_grad p(x)), with r^a from the
// power iteration. r^a and the reference prediction are constants in the
// returned tensor's gradient.
// ---------------------------------------------------------------------------

namespace detail {

inline Tensor regularizer(Tape& tp, const BoundMlp& bm, const Tensor& x, const AdvConfig& cfg,
                          std::mt19937_64& rng, const Tensor* reference) {
  cfg.validate();
  auto dir = adversarial_direction(bm.model(), x, cfg, rng);
  Tensor x_adv = adversarial_example(x.detached(), dir.dir, cfg.epsilon);
  Tensor p_adv = bm.forward(x_adv);
  Tensor ref;
  if (reference) {
    ref = stop_gradient(*reference);
  } else {
    auto vals = bm.model().forward_values(x.values().data(), x.dim(0));
    ref = Tensor({x.dim(0), bm.model().output_dim()}, std::move(vals));
  }
  switch (cfg.divergence) {
    case DivKind::kl: return kl_divergence(tp, p_adv, ref);
    case DivKind::tv: return tv_divergence(tp, p_adv, ref);
    case DivKind::ot:
      return tp.scale(tp.sum(sharp_ot_loss_batch(tp, p_adv, ref, *cfg.cost, cfg.sinkhorn)),
                      1.0 / x.dim(0));
  }
  throw error("unreachable divergence");
}

}  // namespace detail

/// KL or TV adversarial regularizer (the paper's AR).
inline Tensor ar_regularizer(Tape& tp, const BoundMlp& bm, const Tensor& x, const AdvConfig& cfg,
                             std::mt19937_64& rng, const Tensor* reference = nullptr) {
  if (cfg.divergence == DivKind::ot)
    throw config_error("ar_regularizer: use war_regularizer for the OT divergence");
  return detail::regularizer(tp, bm, x, cfg, rng, reference);
}

/// Wasserstein adversarial regularizer: sharp OT loss between the adversarial
/// and reference predictions under the ground cost. With a 0-1 cost this is
/// the WAR-01 variant.
inline Tensor war_regularizer(Tape& tp, const BoundMlp& bm, const Tensor& x, const CostMatrix& c,
                              const SinkhornConfig& sink, const AdvConfig& adv,
                              std::mt19937_64& rng, const Tensor* reference = nullptr) {
  AdvConfig cfg = adv;
  cfg.divergence = DivKind::ot;
  cfg.cost = c;
  cfg.sinkhorn = sink;  // inner max and outer min share the solver settings
  return detail::regularizer(tp, bm, x, cfg, rng, reference);
}

/// The full training objective: CE (or a correction baseline) plus the
/// beta-weighted regularizer, with beta forced to 0 during warm-up epochs.
inline Tensor total_loss(Tape& tp, const BoundMlp& bm, const Tensor& x, const Tensor& one_hot,
                         int epoch, const LossConfig& loss_cfg, const AdvConfig& adv_cfg,
                         const SinkhornConfig& sink, const CostMatrix* cost,
                         std::mt19937_64& rng) {
  loss_cfg.validate();
  Tensor pred = bm.forward(x);

  switch (loss_cfg.method) {
    case LossMethod::bootsoft:
      return bootsoft_loss(tp, pred, one_hot, loss_cfg.bootstrap_weight);
    case LossMethod::forward:
      return forward_corrected_loss(tp, pred, one_hot, *loss_cfg.transition);
    case LossMethod::backward:
      return backward_corrected_loss(tp, pred, one_hot, *loss_cfg.transition);
    default:
      break;
  }

  Tensor ce = cross_entropy(tp, pred, one_hot);
  bool warmed_up = epoch >= loss_cfg.warmup_epochs;
  if (loss_cfg.method == LossMethod::cce || loss_cfg.beta == 0.0 || !warmed_up) return ce;

  Tensor reg;
  switch (loss_cfg.method) {
    case LossMethod::ar_kl: {
      AdvConfig cfg = adv_cfg;
      cfg.divergence = DivKind::kl;
      reg = ar_regularizer(tp, bm, x, cfg, rng, &pred);
      break;
    }
    case LossMethod::war_01:
      reg = war_regularizer(tp, bm, x, cost_zero_one(one_hot.dim(1)), sink, adv_cfg, rng, &pred);
      break;
    case LossMethod::war_c:
      if (!cost) throw config_error("WAR-C needs a ground cost matrix");
      reg = war_regularizer(tp, bm, x, *cost, sink, adv_cfg, rng, &pred);
      break;
    default:
      throw config_error("total_loss: unhandled method");
  }
  return tp.add(ce, tp.scale(reg, loss_cfg.beta));
}

/// Effective beta after warm-up gating, for logging.
inline double effective_beta(const LossConfig& cfg, int epoch) {
  bool regularized = cfg.method == LossMethod::ar_kl || cfg.method == LossMethod::war_01 ||
                     cfg.method == LossMethod::war_c;
  if (!regularized || epoch < cfg.warmup_epochs) return 0.0;
  return cfg.beta;
}

// ---------------------------------------------------------------------------
// Lemma 1: with D = KL and eps = beta/(beta+1), the appendix algebra gives
//   (1-eps) * [CE(x,y) + beta*KL(p(x+r^a) || p(x))]
//     = CE(x, (1-eps)*y + eps*p(x+r^a)) - eps*H(p(x+r^a)).
// The lemma as printed uses (1-eps)*H on the right instead; both residuals
// are computed, and only the derivation-corrected one is expected to vanish.
// ---------------------------------------------------------------------------

struct Lemma1Residuals {
  double corrected = 0;    // residual of the derivation-corrected identity
  double paper_form = 0;   // residual of the printed form, for documentation
};

inline Lemma1Residuals lemma1_identity_check(const MlpModel& model, const std::vector<double>& x,
                                             int label, double beta, const AdvConfig& adv_cfg,
                                             uint64_t seed) {
  int c = model.output_dim();
  if (label < 0 || label >= c) throw config_error("lemma1_identity_check: label out of range");
  Tensor xt({1, static_cast<int>(x.size())}, x);

  AdvConfig cfg = adv_cfg;
  cfg.divergence = DivKind::kl;
  std::mt19937_64 rng(seed);
  auto dir = adversarial_direction(model, xt, cfg, rng);
  Tensor x_adv = adversarial_example(xt, dir.dir, cfg.epsilon);

  std::vector<double> p = model.forward_values(xt.values().data(), 1);
  std::vector<double> pa = model.forward_values(x_adv.values().data(), 1);

  auto clog = [](double v) { return std::log(std::max(v, kProbClamp)); };
  double ce = -clog(p[static_cast<size_t>(label)]);
  double kl = 0, h_adv = 0, cross = 0;
  for (int k = 0; k < c; ++k) {
    kl += pa[static_cast<size_t>(k)] * (clog(pa[static_cast<size_t>(k)]) - clog(p[static_cast<size_t>(k)]));
    h_adv -= pa[static_cast<size_t>(k)] * clog(pa[static_cast<size_t>(k)]);
    cross -= pa[static_cast<size_t>(k)] * clog(p[static_cast<size_t>(k)]);
  }
  double eps = beta / (beta + 1.0);
  double total = ce + beta * kl;
  double interp_ce = (1.0 - eps) * ce + eps * cross;  // CE against the interpolated label

  Lemma1Residuals r;
  r.corrected = std::abs((1.0 - eps) * total - (interp_ce - eps * h_adv));
  r.paper_form = std::abs(total - (interp_ce - (1.0 - eps) * h_adv));
  return r;
}

}  // namespace war
