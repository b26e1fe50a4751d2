#pragma once

// Minimization of the Gauss functional over the nonnegative cone
// (pseudo-balayage, capacitary measure) and over the unit-mass slice of it
// (weighted equilibrium measure). Both problems are the convex QP
//
//   minimize 1/2 w'Kw - b'w   subject to w >= 0   [and sum(w) = 1],
//
// solved by projected gradient. The stopping test is the KKT system itself.
// Reported objectives use I_f = w'Kw - 2 b'w, twice the internal one.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riesz/errors.hpp"
#include "riesz/kernel.hpp"
#include "riesz/measures.hpp"
#include "riesz/potential.hpp"

namespace riesz {

enum class StepRule { fixed_inverse_lipschitz, adaptive_bb_with_monotone_fallback };

// natural: zero on the cone, uniform on the simplex.
enum class StartPoint { natural, uniform, first_vertex };

struct SolverConfig {
  int max_iters = 50000;
  double kkt_tol = 1e-8;  // relative to max(1, max_i |b_i|)
  StepRule step_rule = StepRule::adaptive_bb_with_monotone_fallback;
  StartPoint start = StartPoint::natural;
  bool record_history = false;

  void validate() const {
    if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
    if (!(kkt_tol > 0.0)) throw ArgumentError("kkt_tol must be positive");
  }
};

struct SolveReport {
  double objective = 0.0;           // I_f = w'Kw - 2 b'w
  double internal_objective = 0.0;  // 1/2 w'Kw - b'w
  double kkt_stationarity = 0.0;    // largest violation of the sign condition
  double kkt_complementarity = 0.0; // sum_i w_i |g_i - c|, c = 0 on the cone
  double kkt_scale = 1.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> equilibrium_constant;
  std::vector<double> objective_history;  // internal objective per accepted step
};

struct QpResult {
  Eigen::VectorXd weights;
  SolveReport report;
};

namespace detail {

inline void check_qp_shape(const Eigen::MatrixXd& k, const Eigen::VectorXd& b) {
  if (k.rows() != k.cols()) throw ArgumentError("kernel matrix must be square");
  if (b.size() != k.rows()) throw ArgumentError("linear term length does not match the matrix");
  if (k.rows() == 0) return;
  const double tol = 1e-12 * k.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (std::abs(k(i, j) - k(j, i)) > tol) {
        throw ArgumentError("kernel matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

/// Spectral norm estimate: 30 power iterations from the all-ones vector.
inline double power_iteration_norm(const Eigen::MatrixXd& k, int iters = 30) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(k.rows());
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd kv = k * v;
    const double norm = kv.norm();
    if (norm == 0.0) return 0.0;
    lambda = norm / v.norm();
    v = kv / norm;
  }
  return lambda;
}

/// Euclidean projection onto {w >= 0, sum(w) = 1} by sort and threshold.
inline Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

enum class Feasible { cone, simplex };

struct Residuals {
  double stationarity;
  double complementarity;
  double multiplier;
};

inline Residuals kkt_residuals(const Eigen::VectorXd& w, const Eigen::VectorXd& g, Feasible set) {
  const double c = set == Feasible::simplex ? w.dot(g) / w.sum() : 0.0;
  const double stationarity = std::max(0.0, (c - g.array()).maxCoeff());
  const double complementarity = (w.array() * (g.array() - c).abs()).sum();
  return {stationarity, complementarity, c};
}

inline QpResult projected_gradient(const Eigen::MatrixXd& k, const Eigen::VectorXd& b, Eigen::VectorXd w,
                                   const SolverConfig& cfg, Feasible set) {
  cfg.validate();
  auto project = [set](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return set == Feasible::simplex ? project_to_simplex(v) : Eigen::VectorXd(v.cwiseMax(0.0));
  };

  QpResult out;
  SolveReport& rep = out.report;
  if (k.rows() == 0) {
    rep.converged = true;
    out.weights = std::move(w);
    return out;
  }
  rep.kkt_scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  const double threshold = cfg.kkt_tol * rep.kkt_scale;

  const double lipschitz = power_iteration_norm(k);
  const double base_step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  double step = base_step;

  Eigen::VectorXd g = k * w - b;
  double f = 0.5 * w.dot(g - b);
  if (cfg.record_history) rep.objective_history.push_back(f);

  Residuals res = kkt_residuals(w, g, set);
  int it = 0;
  // The decrease f(w + s) - f(w) = s'(g + g_next) / 2 is evaluated directly:
  // near the optimum it is far below the rounding error of f itself, and
  // comparing two full objective values would stall the line search. On the
  // simplex sum(s) = 0, so the gradient is shifted by the current multiplier
  // first; this leaves step and decrease unchanged but removes the large
  // constant component that would otherwise amplify rounding.
  while (!(res.stationarity <= threshold && res.complementarity <= threshold) && it < cfg.max_iters) {
    Eigen::VectorXd w_next;
    Eigen::VectorXd g_next;
    double decrease = 0.0;
    bool stalled = false;
    int halvings = 0;
    const double shift = set == Feasible::simplex ? res.multiplier : 0.0;
    const Eigen::VectorXd direction = (g.array() - shift).matrix();
    for (;;) {
      const double t = cfg.step_rule == StepRule::fixed_inverse_lipschitz ? base_step : step;
      w_next = project(w - t * direction);
      g_next = k * w_next - b;
      decrease = 0.5 * (w_next - w).dot(((direction + g_next).array() - shift).matrix());
      if (decrease <= 0.0 || cfg.step_rule == StepRule::fixed_inverse_lipschitz) break;
      if (++halvings > 60) {
        stalled = true;
        break;
      }
      step *= 0.5;
    }
    if (stalled) break;
    const Eigen::VectorXd s = w_next - w;
    const Eigen::VectorXd y = g_next - g;
    w = std::move(w_next);
    g = std::move(g_next);
    f += decrease;
    ++it;
    if (cfg.record_history) rep.objective_history.push_back(f);
    if (cfg.step_rule == StepRule::adaptive_bb_with_monotone_fallback) {
      const double sy = s.dot(y);
      step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-3 * base_step, 1e6 * base_step) : base_step;
    }
    res = kkt_residuals(w, g, set);
  }

  rep.iterations = it;
  rep.kkt_stationarity = res.stationarity;
  rep.kkt_complementarity = res.complementarity;
  rep.converged = res.stationarity <= threshold && res.complementarity <= threshold;
  rep.internal_objective = 0.5 * w.dot(g - b);
  rep.objective = 2.0 * rep.internal_objective;
  if (set == Feasible::simplex) rep.equilibrium_constant = w.dot(g);
  out.weights = std::move(w);
  return out;
}

inline Eigen::VectorXd start_point(Eigen::Index n, StartPoint start, Feasible set) {
  switch (start) {
    case StartPoint::uniform:
      return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    case StartPoint::first_vertex: {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
      w[0] = 1.0;
      return w;
    }
    case StartPoint::natural:
      break;
  }
  return set == Feasible::cone ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

}  // namespace detail

/// min 1/2 w'Kw - b'w over w >= 0. Non-convergence is reported, not thrown.
inline QpResult minimize_on_cone(const Eigen::MatrixXd& k, const Eigen::VectorXd& b, const SolverConfig& cfg = {}) {
  detail::check_qp_shape(k, b);
  return detail::projected_gradient(k, b, detail::start_point(k.rows(), cfg.start, detail::Feasible::cone), cfg,
                                    detail::Feasible::cone);
}

/// min 1/2 w'Kw - b'w over w >= 0 with sum(w) = 1. The equilibrium constant
/// w'(Kw - b) is filled in.
inline QpResult minimize_on_simplex(const Eigen::MatrixXd& k, const Eigen::VectorXd& b, const SolverConfig& cfg = {}) {
  detail::check_qp_shape(k, b);
  if (k.rows() == 0) throw ArgumentError("unit-mass problem needs a nonempty node set");
  return detail::projected_gradient(k, b, detail::start_point(k.rows(), cfg.start, detail::Feasible::simplex), cfg,
                                    detail::Feasible::simplex);
}

/// Minimizer on a node set together with the field and its own potential there.
struct Solution {
  DiscreteMeasure measure;
  SolveReport report;
  Eigen::VectorXd field_values;      // U^omega at the nodes
  Eigen::VectorXd potential_values;  // U^measure at the nodes
  KernelContext context;
};

namespace detail {

inline Solution make_solution(const KernelMatrix& k, Eigen::VectorXd b, QpResult qp) {
  Eigen::VectorXd pot = k.entries * qp.weights;
  qp.report.objective = qp.weights.dot(pot) - 2.0 * b.dot(qp.weights);
  return Solution{DiscreteMeasure(k.row_nodes, std::move(qp.weights)), std::move(qp.report), std::move(b),
                  std::move(pot), k.context};
}

inline void check_square_kernel(const KernelMatrix& k) {
  if (!(k.row_nodes == k.col_nodes)) throw ArgumentError("expected the kernel matrix of a node set with itself");
  if (k.row_nodes.empty()) throw ArgumentError("node set must be nonempty");
}

}  // namespace detail

/// Pseudo-balayage of omega onto the nodes of `k`.
inline Solution solve_pseudo_balayage(const SignedMeasure& omega, const KernelMatrix& k, const SolverConfig& cfg = {}) {
  detail::check_square_kernel(k);
  Eigen::VectorXd b = field_potential(omega, k.row_nodes, k.context);
  QpResult qp = minimize_on_cone(k.entries, b, cfg);
  return detail::make_solution(k, std::move(b), std::move(qp));
}

inline Solution solve_pseudo_balayage(const SignedMeasure& omega, const NodeSet& a, const KernelContext& ctx,
                                      const SolverConfig& cfg = {}) {
  if (a.empty()) throw ArgumentError("target node set must be nonempty");
  return solve_pseudo_balayage(omega, kernel_matrix(a, ctx), cfg);
}

/// Weighted equilibrium measure: the unit-mass minimizer of the Gauss functional.
inline Solution solve_gauss_variational(const SignedMeasure& omega, const KernelMatrix& k, const SolverConfig& cfg = {}) {
  detail::check_square_kernel(k);
  Eigen::VectorXd b = field_potential(omega, k.row_nodes, k.context);
  QpResult qp = minimize_on_simplex(k.entries, b, cfg);
  return detail::make_solution(k, std::move(b), std::move(qp));
}

inline Solution solve_gauss_variational(const SignedMeasure& omega, const NodeSet& a, const KernelContext& ctx,
                                        const SolverConfig& cfg = {}) {
  if (a.empty()) throw ArgumentError("target node set must be nonempty");
  return solve_gauss_variational(omega, kernel_matrix(a, ctx), cfg);
}

struct CapacitaryResult {
  DiscreteMeasure gamma;
  double capacity = 0.0;
  SolveReport report;
  Eigen::VectorXd potential_values;
};

/// Capacitary measure: minimizes ||mu||^2 - 2 mu(R^n) over the cone, so that
/// U^gamma >= 1 on the nodes with equality on its support.
inline CapacitaryResult solve_capacitary(const NodeSet& nodes, const KernelContext& ctx, const SolverConfig& cfg = {}) {
  if (nodes.empty()) throw ArgumentError("capacitary measure needs a nonempty node set");
  const KernelMatrix k = kernel_matrix(nodes, ctx);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nodes.size());
  QpResult qp = minimize_on_cone(k.entries, ones, cfg);
  Eigen::VectorXd pot = k.entries * qp.weights;
  qp.report.objective = qp.weights.dot(pot) - 2.0 * qp.weights.sum();
  const double cap = qp.weights.sum();
  return CapacitaryResult{DiscreteMeasure(nodes, std::move(qp.weights)), cap, std::move(qp.report), std::move(pot)};
}

}  // namespace riesz
