#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "war/tape.hpp"

namespace war {

/// Point on the probability simplex.
struct ProbVector {
  std::vector<double> w;

  int dim() const { return static_cast<int>(w.size()); }

  static ProbVector checked(std::vector<double> w, double tol = 1e-9) {
    double s = 0;
    for (double v : w) {
      if (!(v >= 0)) throw config_error("ProbVector: negative or NaN entry");
      s += v;
    }
    if (std::abs(s - 1.0) > tol)
      throw config_error("ProbVector: weights sum to " + std::to_string(s) + ", expected 1");
    return ProbVector{std::move(w)};
  }

  static ProbVector normalized(std::vector<double> w) {
    double s = 0;
    for (double v : w) s += v;
    if (!(s > 0)) throw config_error("ProbVector: cannot normalize nonpositive mass");
    for (double& v : w) v /= s;
    return ProbVector{std::move(w)};
  }
};

/// Symmetric nonnegative ground cost with zero diagonal.
class CostMatrix {
 public:
  CostMatrix() = default;

  static CostMatrix checked(int n, std::vector<double> entries,
                            const std::vector<std::string>* names = nullptr) {
    if (n < 2 || static_cast<int>(entries.size()) != n * n)
      throw config_error("CostMatrix: need n>=2 and n*n entries");
    auto label = [&](int i) {
      return names && i < static_cast<int>(names->size()) ? (*names)[static_cast<size_t>(i)]
                                                          : std::to_string(i);
    };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = entries[static_cast<size_t>(i) * n + j];
        if (std::isnan(v)) throw config_error("CostMatrix: NaN at (" + label(i) + "," + label(j) + ")");
        if (i == j && v != 0.0)
          throw config_error("CostMatrix: nonzero diagonal at " + label(i));
        if (i != j && !(v > 0))
          throw config_error("CostMatrix: off-diagonal entry at (" + label(i) + "," + label(j) +
                             ") must be > 0");
        double vt = entries[static_cast<size_t>(j) * n + i];
        if (std::abs(v - vt) > 1e-9)
          throw config_error("CostMatrix: asymmetric at (" + label(i) + "," + label(j) + "): " +
                             std::to_string(v) + " vs " + std::to_string(vt));
      }
    }
    CostMatrix c;
    c.n_ = n;
    c.e_ = std::move(entries);
    return c;
  }

  int dim() const { return n_; }
  double at(int i, int j) const { return e_[static_cast<size_t>(i) * n_ + j]; }
  const std::vector<double>& entries() const { return e_; }

  double max_entry() const {
    double m = 0;
    for (double v : e_) m = std::max(m, v);
    return m;
  }

  std::vector<double> row(int i) const {
    return std::vector<double>(e_.begin() + static_cast<size_t>(i) * n_,
                               e_.begin() + static_cast<size_t>(i + 1) * n_);
  }

  std::vector<double> col(int j) const {
    std::vector<double> c(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) c[static_cast<size_t>(i)] = at(i, j);
    return c;
  }

 private:
  int n_ = 0;
  std::vector<double> e_;
};

struct SinkhornConfig {
  double lambda = 0.05;  // entropic strength
  int iterations = 50;   // fixed unrolled iteration count
  bool log_domain = true;
  // Anneal the strength geometrically from max(lambda, 0.1*max(C)) down to
  // lambda over the first half of the budget. Same fixed iteration count,
  // far faster convergence when lambda is tiny relative to the costs; for
  // training-scale lambda leave it off so every iteration matches the
  // paper's constant-strength unrolling.
  bool warm_start = false;

  void validate() const {
    if (!(lambda > 0)) throw config_error("SinkhornConfig: lambda must be > 0");
    if (iterations < 1) throw config_error("SinkhornConfig: iterations must be >= 1");
    if (warm_start && !log_domain)
      throw config_error("SinkhornConfig: warm_start requires the log-domain path");
  }

  double lambda_at(int iteration, double max_cost) const {
    if (!warm_start) return lambda;
    double lam0 = std::max(lambda, 0.1 * max_cost);
    int warm = iterations / 2;
    if (iteration >= warm || lam0 <= lambda) return lambda;
    return lam0 * std::pow(lambda / lam0, static_cast<double>(iteration) / warm);
  }

  /// High-iteration annealed setting used when comparing against the exact
  /// solver.
  static SinkhornConfig oracle(double lambda = 1e-3) { return {lambda, 2000, true, true}; }
};

/// Coupling with the marginals it was solved for and the residual feasibility
/// error after the fixed iteration count.
struct TransportPlan {
  int n = 0;
  std::vector<double> entries;  // row-major n*n
  ProbVector row_marginal, col_marginal;
  double marginal_violation = 0;  // Linf of row/col sums vs targets
  bool clamped = false;           // some marginal entries were clamped before log

  double at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }

  double cost(const CostMatrix& c) const {
    double s = 0;
    for (size_t k = 0; k < entries.size(); ++k) s += entries[k] * c.entries()[k];
    return s;
  }
};

namespace detail {

constexpr double kMarginalClamp = 1e-30;

inline double lse(const std::vector<double>& x) {
  double m = x[0];
  for (double v : x) m = std::max(m, v);
  double s = 0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace detail

/// Entropic OT plan from exactly cfg.iterations alternating scalings.
/// Zero marginal entries are clamped (never a failure); the violation of the
/// marginal constraints after the final iteration is reported on the plan.
inline TransportPlan sinkhorn_plan(const ProbVector& a, const ProbVector& b, const CostMatrix& C,
                                   const SinkhornConfig& cfg) {
  cfg.validate();
  int n = C.dim();
  if (a.dim() != n || b.dim() != n)
    throw shape_error("sinkhorn", {{a.dim()}, {b.dim()}, {n, n}});

  TransportPlan plan;
  plan.n = n;
  plan.row_marginal = a;
  plan.col_marginal = b;
  plan.entries.assign(static_cast<size_t>(n) * n, 0.0);

  double lam = cfg.lambda;
  if (cfg.log_domain) {
    std::vector<double> la(static_cast<size_t>(n)), lb(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      if (a.w[static_cast<size_t>(i)] < detail::kMarginalClamp ||
          b.w[static_cast<size_t>(i)] < detail::kMarginalClamp)
        plan.clamped = true;
      la[static_cast<size_t>(i)] = std::log(std::max(a.w[static_cast<size_t>(i)], detail::kMarginalClamp));
      lb[static_cast<size_t>(i)] = std::log(std::max(b.w[static_cast<size_t>(i)], detail::kMarginalClamp));
    }
    std::vector<double> f(static_cast<size_t>(n), 0.0), g(static_cast<size_t>(n), 0.0);
    std::vector<double> t(static_cast<size_t>(n));
    double max_cost = C.max_entry();
    for (int it = 0; it < cfg.iterations; ++it) {
      double lam_t = cfg.lambda_at(it, max_cost);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) t[static_cast<size_t>(j)] = (g[static_cast<size_t>(j)] - C.at(i, j)) / lam_t;
        f[static_cast<size_t>(i)] = lam_t * (la[static_cast<size_t>(i)] - detail::lse(t));
      }
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = (f[static_cast<size_t>(i)] - C.at(i, j)) / lam_t;
        g[static_cast<size_t>(j)] = lam_t * (lb[static_cast<size_t>(j)] - detail::lse(t));
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        plan.entries[static_cast<size_t>(i) * n + j] =
            std::exp((f[static_cast<size_t>(i)] + g[static_cast<size_t>(j)] - C.at(i, j)) / lam);
  } else {
    std::vector<double> K(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) K[static_cast<size_t>(i) * n + j] = std::exp(-C.at(i, j) / lam);
    std::vector<double> u(static_cast<size_t>(n), 1.0), v(static_cast<size_t>(n), 1.0);
    for (int it = 0; it < cfg.iterations; ++it) {
      for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += K[static_cast<size_t>(i) * n + j] * v[static_cast<size_t>(j)];
        u[static_cast<size_t>(i)] = std::max(a.w[static_cast<size_t>(i)], detail::kMarginalClamp) / s;
      }
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += K[static_cast<size_t>(i) * n + j] * u[static_cast<size_t>(i)];
        v[static_cast<size_t>(j)] = std::max(b.w[static_cast<size_t>(j)], detail::kMarginalClamp) / s;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        plan.entries[static_cast<size_t>(i) * n + j] =
            u[static_cast<size_t>(i)] * K[static_cast<size_t>(i) * n + j] * v[static_cast<size_t>(j)];
  }

  double viol = 0;
  for (int i = 0; i < n; ++i) {
    double rs = 0, cs = 0;
    for (int j = 0; j < n; ++j) {
      rs += plan.at(i, j);
      cs += plan.at(j, i);
    }
    viol = std::max(viol, std::abs(rs - a.w[static_cast<size_t>(i)]));
    viol = std::max(viol, std::abs(cs - b.w[static_cast<size_t>(i)]));
  }
  plan.marginal_violation = viol;
  return plan;
}

// ---------------------------------------------------------------------------
// Differentiable sharp loss <T_lambda, C> through unrolled Sinkhorn.
// ---------------------------------------------------------------------------

namespace detail {

// One log-domain half-update assembled column by column. Always stable:
// each class row of the cost is subtracted before the logsumexp.
inline Tensor half_update_columnwise(Tape& tp, const Tensor& pot, const Tensor& log_marg,
                                     const std::vector<std::vector<double>>& cost_rows,
                                     double lambda) {
  int n = static_cast<int>(cost_rows.size());
  int batch = pot.dim(0);
  Tensor acc;
  for (int i = 0; i < n; ++i) {
    Tensor crow({n}, cost_rows[static_cast<size_t>(i)]);
    Tensor l = tp.logsumexp(tp.scale(tp.sub(pot, crow), 1.0 / lambda)).reshaped({batch, 1});
    std::vector<double> oh(static_cast<size_t>(n), 0.0);
    oh[static_cast<size_t>(i)] = 1.0;
    Tensor contrib = tp.matmul(l, Tensor({1, n}, oh));
    acc = (i == 0) ? contrib : tp.add(acc, contrib);
  }
  return tp.scale(tp.sub(log_marg, acc), lambda);
}

// One half-update through a stabilized kernel matmul. Requires
// max(C)/lambda small enough that exp((pot - rowmax)/lambda) cannot
// underflow to zero (guaranteed by the dispatch threshold).
inline Tensor half_update_kernel(Tape& tp, const Tensor& pot, const Tensor& log_marg,
                                 const Tensor& kernel_t, double lambda) {
  int batch = pot.dim(0);
  Tensor m = tp.max_reduce(pot).reshaped({batch, 1});
  Tensor e = tp.exp(tp.scale(tp.sub(pot, m), 1.0 / lambda));
  Tensor lse = tp.add(tp.log(tp.matmul(e, kernel_t)), tp.scale(m, 1.0 / lambda));
  return tp.scale(tp.sub(log_marg, lse), lambda);
}

}  // namespace detail

/// Sharp entropic OT loss for a batch of simplex pairs: rows of `a` and `b`
/// are the two marginals of each pair. Returns the per-pair loss vector [N].
/// Differentiable w.r.t. both inputs through the unrolled iterations.
inline Tensor sharp_ot_loss_batch(Tape& tp, const Tensor& a, const Tensor& b,
                                  const CostMatrix& C, const SinkhornConfig& cfg) {
  cfg.validate();
  int n = C.dim();
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != n || a.shape() != b.shape())
    throw shape_error("sharp_ot_loss", {a.shape(), b.shape(), {n, n}});
  int batch = a.dim(0);
  double lam = cfg.lambda;

  Tensor la = tp.log(a, detail::kMarginalClamp);
  Tensor lb = tp.log(b, detail::kMarginalClamp);

  std::vector<std::vector<double>> rows(static_cast<size_t>(n)), cols(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    rows[static_cast<size_t>(i)] = C.row(i);
    cols[static_cast<size_t>(i)] = C.col(i);
  }

  // The kernel shortcut is numerically exact while potentials stay within
  // the exponent range; otherwise fall back to the columnwise form.
  bool fast = cfg.log_domain && !cfg.warm_start && (C.max_entry() / lam <= 500.0);
  Tensor kernel, kernel_t;
  if (fast) {
    std::vector<double> k(static_cast<size_t>(n) * n), kt(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        k[static_cast<size_t>(i) * n + j] = std::exp(-C.at(i, j) / lam);
        kt[static_cast<size_t>(j) * n + i] = k[static_cast<size_t>(i) * n + j];
      }
    kernel = Tensor({n, n}, std::move(k));
    kernel_t = Tensor({n, n}, std::move(kt));
  }

  double max_cost = C.max_entry();
  Tensor f = Tensor::zeros({batch, n});
  Tensor g = Tensor::zeros({batch, n});
  for (int it = 0; it < cfg.iterations; ++it) {
    if (fast) {
      f = detail::half_update_kernel(tp, g, la, kernel_t, lam);
      g = detail::half_update_kernel(tp, f, lb, kernel, lam);
    } else {
      double lam_t = cfg.lambda_at(it, max_cost);
      f = detail::half_update_columnwise(tp, g, la, rows, lam_t);
      g = detail::half_update_columnwise(tp, f, lb, cols, lam_t);
    }
  }

  // loss[n] = sum_ij C_ij exp((f_i + g_j - C_ij)/lambda); the plan entries
  // are bounded by 1 after the final column update, so the exp is safe.
  Tensor ones({n, 1}, std::vector<double>(static_cast<size_t>(n), 1.0));
  Tensor loss;
  for (int i = 0; i < n; ++i) {
    std::vector<double> oh(static_cast<size_t>(n), 0.0);
    oh[static_cast<size_t>(i)] = 1.0;
    Tensor fi = tp.scale(tp.matmul(f, Tensor({n, 1}, oh)), 1.0 / lam);  // [N,1]
    Tensor crow({n}, rows[static_cast<size_t>(i)]);
    Tensor t = tp.add(tp.scale(tp.sub(g, crow), 1.0 / lam), fi);
    Tensor weighted = tp.mul(tp.exp(t), crow);
    Tensor rowsum = tp.matmul(weighted, ones);  // [N,1]
    loss = (i == 0) ? rowsum : tp.add(loss, rowsum);
  }
  return loss.reshaped({batch});
}

/// Sharp entropic OT loss for one pair of simplex tensors (shape [C] or [1,C]).
inline Tensor sharp_ot_loss(Tape& tp, const Tensor& a, const Tensor& b, const CostMatrix& C,
                            const SinkhornConfig& cfg) {
  Tensor a2 = a.rank() == 1 ? a.reshaped({1, static_cast<int>(a.size())}) : a;
  Tensor b2 = b.rank() == 1 ? b.reshaped({1, static_cast<int>(b.size())}) : b;
  return sharp_ot_loss_batch(tp, a2, b2, C, cfg).reshaped({1});
}

// ---------------------------------------------------------------------------
// Exact transportation LP (dense transportation simplex). Test oracle and
// bound verification; capped at 32 bins.
// ---------------------------------------------------------------------------

struct ExactOtResult {
  double cost = 0;
  std::vector<double> plan;  // row-major n*n
};

inline ExactOtResult exact_ot_plan(const ProbVector& a, const ProbVector& b, const CostMatrix& C) {
  int n = C.dim();
  if (n > 32) throw config_error("exact_ot: dimension " + std::to_string(n) + " above cap 32");
  if (a.dim() != n || b.dim() != n) throw shape_error("exact_ot", {{a.dim()}, {b.dim()}, {n, n}});

  // Balance the two sides exactly.
  std::vector<double> supply = a.w, demand = b.w;
  double sa = 0, sb = 0;
  for (double v : supply) sa += v;
  for (double v : demand) sb += v;
  for (double& v : supply) v /= sa;
  for (double& v : demand) v /= sb;

  int cells = n * n;
  std::vector<double> alloc(static_cast<size_t>(cells), 0.0);
  std::vector<char> basic(static_cast<size_t>(cells), 0);

  // Northwest-corner initial basis: exactly 2n-1 basic cells, zero
  // allocations allowed for degenerate steps.
  {
    std::vector<double> rem_s = supply, rem_d = demand;
    int i = 0, j = 0;
    while (true) {
      double q = std::min(rem_s[static_cast<size_t>(i)], rem_d[static_cast<size_t>(j)]);
      alloc[static_cast<size_t>(i) * n + j] = q;
      basic[static_cast<size_t>(i) * n + j] = 1;
      rem_s[static_cast<size_t>(i)] -= q;
      rem_d[static_cast<size_t>(j)] -= q;
      if (i == n - 1 && j == n - 1) break;
      if (i < n - 1 && (rem_s[static_cast<size_t>(i)] <= rem_d[static_cast<size_t>(j)] || j == n - 1))
        ++i;
      else
        ++j;
    }
  }

  double tol = 1e-12 * (1.0 + C.max_entry());
  const int bland_after = 20 * n * n + 200;
  const int max_pivots = 4000 * n + 20000;
  std::vector<double> u(static_cast<size_t>(n)), v(static_cast<size_t>(n));
  std::vector<int> parent(static_cast<size_t>(2) * n), order(static_cast<size_t>(2) * n);

  for (int pivot = 0;; ++pivot) {
    if (pivot > max_pivots) throw numeric_error("exact_ot: pivot limit exceeded");

    // Duals via BFS over the basis tree (nodes: rows 0..n-1, cols n..2n-1).
    std::vector<char> seen(static_cast<size_t>(2) * n, 0);
    int head = 0, tail = 0;
    order[tail++] = 0;
    seen[0] = 1;
    u[0] = 0;
    while (head < tail) {
      int node = order[head++];
      if (node < n) {
        for (int j = 0; j < n; ++j)
          if (basic[static_cast<size_t>(node) * n + j] && !seen[static_cast<size_t>(n + j)]) {
            v[static_cast<size_t>(j)] = C.at(node, j) - u[static_cast<size_t>(node)];
            seen[static_cast<size_t>(n + j)] = 1;
            order[tail++] = n + j;
          }
      } else {
        int j = node - n;
        for (int i = 0; i < n; ++i)
          if (basic[static_cast<size_t>(i) * n + j] && !seen[static_cast<size_t>(i)]) {
            u[static_cast<size_t>(i)] = C.at(i, j) - v[static_cast<size_t>(j)];
            seen[static_cast<size_t>(i)] = 1;
            order[tail++] = i;
          }
      }
    }
    if (tail != 2 * n) throw numeric_error("exact_ot: basis lost spanning-tree structure");

    // Entering cell: most negative reduced cost (Dantzig), or first negative
    // in index order once past the anti-cycling threshold (Bland).
    int ei = -1, ej = -1;
    double best = -tol;
    for (int i = 0; i < n && (pivot <= bland_after || ei < 0); ++i)
      for (int j = 0; j < n; ++j) {
        if (basic[static_cast<size_t>(i) * n + j]) continue;
        double r = C.at(i, j) - u[static_cast<size_t>(i)] - v[static_cast<size_t>(j)];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
          if (pivot > bland_after) break;
        }
      }
    if (ei < 0) break;  // optimal

    // Unique tree path from row ei to col ej; with the entering edge it
    // forms the pivot cycle.
    std::fill(parent.begin(), parent.end(), -2);
    head = 0;
    tail = 0;
    order[tail++] = ei;
    parent[static_cast<size_t>(ei)] = -1;
    while (head < tail && parent[static_cast<size_t>(n + ej)] == -2) {
      int node = order[head++];
      if (node < n) {
        for (int j = 0; j < n; ++j)
          if (basic[static_cast<size_t>(node) * n + j] && parent[static_cast<size_t>(n + j)] == -2) {
            parent[static_cast<size_t>(n + j)] = node;
            order[tail++] = n + j;
          }
      } else {
        int j = node - n;
        for (int i = 0; i < n; ++i)
          if (basic[static_cast<size_t>(i) * n + j] && parent[static_cast<size_t>(i)] == -2) {
            parent[static_cast<size_t>(i)] = n + j;
            order[tail++] = i;
          }
      }
    }
    if (parent[static_cast<size_t>(n + ej)] == -2)
      throw numeric_error("exact_ot: entering cell not connected to basis tree");

    std::vector<int> path_nodes;
    for (int node = n + ej; node != -1; node = parent[static_cast<size_t>(node)])
      path_nodes.push_back(node);
    // path_nodes runs col ej -> ... -> row ei; consecutive nodes are basic cells.
    std::vector<std::pair<int, int>> minus_cells, plus_cells;
    for (size_t t = 0; t + 1 < path_nodes.size(); ++t) {
      int x = path_nodes[t], y = path_nodes[t + 1];
      int ci = x < n ? x : y;
      int cj = (x < n ? y : x) - n;
      if (t % 2 == 0)
        minus_cells.push_back({ci, cj});  // adjacent to the entering column
      else
        plus_cells.push_back({ci, cj});
    }

    double theta = std::numeric_limits<double>::infinity();
    std::pair<int, int> leaving{-1, -1};
    for (auto [ci, cj] : minus_cells) {
      double q = alloc[static_cast<size_t>(ci) * n + cj];
      if (q < theta - 1e-18 || (std::abs(q - theta) <= 1e-18 &&
                                std::make_pair(ci, cj) < leaving)) {
        theta = q;
        leaving = {ci, cj};
      }
    }

    alloc[static_cast<size_t>(ei) * n + ej] += theta;
    basic[static_cast<size_t>(ei) * n + ej] = 1;
    for (auto [ci, cj] : plus_cells) alloc[static_cast<size_t>(ci) * n + cj] += theta;
    for (auto [ci, cj] : minus_cells) alloc[static_cast<size_t>(ci) * n + cj] -= theta;
    alloc[static_cast<size_t>(leaving.first) * n + leaving.second] = 0;
    basic[static_cast<size_t>(leaving.first) * n + leaving.second] = 0;
  }

  ExactOtResult r;
  r.plan = std::move(alloc);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.cost += r.plan[static_cast<size_t>(i) * n + j] * C.at(i, j);
  return r;
}

inline double exact_ot(const ProbVector& a, const ProbVector& b, const CostMatrix& C) {
  return exact_ot_plan(a, b, C).cost;
}

// ---------------------------------------------------------------------------
// Total variation and the weighted-TV lower bounds.
// ---------------------------------------------------------------------------

/// TV(p, q) = 0.5 * sum_k |p_k - q_k|. This convention is used everywhere.
inline double tv_distance(const ProbVector& p, const ProbVector& q) {
  if (p.dim() != q.dim()) throw shape_error("tv_distance", {{p.dim()}, {q.dim()}});
  double s = 0;
  for (int k = 0; k < p.dim(); ++k)
    s += std::abs(p.w[static_cast<size_t>(k)] - q.w[static_cast<size_t>(k)]);
  return 0.5 * s;
}

struct Lemma2Bounds {
  double lower1 = 0;  // cmin * TV(p,q)
  double lower2 = 0;  // 0.5 * sum_k cmin_k |p_k - q_k|
};

/// Both lower bounds of the weighted-TV chain
///   cmin*TV <= 0.5*sum_k cmin_k|p_k-q_k| <= <T*,C> <= <T*_lambda,C>
/// where cmin_k is the minimal off-diagonal cost in row k.
inline Lemma2Bounds lemma2_bounds(const ProbVector& p, const ProbVector& q, const CostMatrix& C) {
  int n = C.dim();
  if (p.dim() != n || q.dim() != n) throw shape_error("lemma2_bounds", {{p.dim()}, {q.dim()}, {n, n}});
  // CostMatrix enforces symmetry and zero diagonal at construction; recheck
  // cheaply so hand-built matrices cannot slip through.
  for (int i = 0; i < n; ++i) {
    if (C.at(i, i) != 0.0) throw config_error("lemma2_bounds: nonzero diagonal");
    for (int j = i + 1; j < n; ++j)
      if (std::abs(C.at(i, j) - C.at(j, i)) > 1e-9)
        throw config_error("lemma2_bounds: asymmetric cost");
  }
  Lemma2Bounds out;
  double cmin_global = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    double ck = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      if (i != k) ck = std::min(ck, C.at(k, i));
    cmin_global = std::min(cmin_global, ck);
    out.lower2 += 0.5 * ck * std::abs(p.w[static_cast<size_t>(k)] - q.w[static_cast<size_t>(k)]);
  }
  out.lower1 = cmin_global * tv_distance(p, q);
  return out;
}

/// Writes a plan as headered CSV for inspection.
inline void save_plan_csv(const TransportPlan& plan, const std::string& path,
                          const std::vector<std::string>* names = nullptr) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  auto label = [&](int i) {
    return names && i < static_cast<int>(names->size()) ? (*names)[static_cast<size_t>(i)]
                                                        : "c" + std::to_string(i);
  };
  out.precision(17);
  for (int j = 0; j < plan.n; ++j) out << "," << label(j);
  out << "\n";
  for (int i = 0; i < plan.n; ++i) {
    out << label(i);
    for (int j = 0; j < plan.n; ++j) out << "," << plan.at(i, j);
    out << "\n";
  }
}

}  // namespace war
