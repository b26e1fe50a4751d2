#pragma once

// Conformance checks for solver output and diagnostics over families of
// truncations: optimality audits, the balayage case alpha <= 2, Kelvin
// identities, shell-capacity series and solvability classification.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riesz/errors.hpp"
#include "riesz/geometry.hpp"
#include "riesz/kernel.hpp"
#include "riesz/measures.hpp"
#include "riesz/potential.hpp"
#include "riesz/solvers.hpp"

namespace riesz {

struct CharacterizationReport {
  double min_excess = 0.0;       // min over nodes of the (shifted) excess potential
  double complementarity = 0.0;  // cone: sum w_i excess_i; slice: sum w_i |excess_i|
  double scale = 1.0;            // max(1, max |U^omega|)
  double tol = 0.0;
  bool pass = false;
  std::optional<double> equilibrium_constant;  // slice only
  std::optional<double> constant_gap;          // relative gap between the two constant formulas
};

/// Audits a cone solution: U^measure >= U^omega on every node and equality
/// on the support. The potential of the measure is recomputed from its weights.
inline CharacterizationReport check_pseudo_balayage(const Solution& sol, double tol) {
  CharacterizationReport rep;
  rep.tol = tol;
  const Eigen::Index n = sol.measure.size();
  if (n == 0) {
    rep.pass = true;
    return rep;
  }
  const Eigen::VectorXd pot = potential(sol.measure, sol.measure.nodes(), sol.context);
  const Eigen::VectorXd excess = pot - sol.field_values;
  rep.scale = std::max(1.0, sol.field_values.cwiseAbs().maxCoeff());
  rep.min_excess = excess.minCoeff();
  rep.complementarity = sol.measure.weights().dot(excess);
  rep.pass = rep.min_excess >= -tol * rep.scale && std::abs(rep.complementarity) <= tol * rep.scale;
  return rep;
}

/// Audits a unit-mass solution: U_f = U^measure - U^omega satisfies
/// U_f >= c on every node and U_f = c on the support, where c is the
/// equilibrium constant. c is computed as the integral of U_f and again as
/// I_f(measure) + integral of U^omega; the two must agree to 1e-8.
inline CharacterizationReport check_weighted_equilibrium(const Solution& sol, double tol) {
  CharacterizationReport rep;
  rep.tol = tol;
  if (sol.measure.size() == 0) throw ArgumentError("unit-mass solution has no nodes");
  const Eigen::VectorXd& w = sol.measure.weights();
  const Eigen::VectorXd pot = potential(sol.measure, sol.measure.nodes(), sol.context);
  const Eigen::VectorXd weighted = pot - sol.field_values;
  const double c = w.dot(weighted);
  const double c_alt = sol.report.objective + w.dot(sol.field_values);
  rep.equilibrium_constant = c;
  rep.constant_gap = std::abs(c - c_alt) / std::max(1.0, std::abs(c));
  rep.scale = std::max(1.0, sol.field_values.cwiseAbs().maxCoeff());
  rep.min_excess = (weighted.array() - c).minCoeff();
  rep.complementarity = (w.array() * (weighted.array() - c).abs()).sum();
  rep.pass = rep.min_excess >= -tol * rep.scale && rep.complementarity <= tol * rep.scale && *rep.constant_gap <= 1e-8;
  return rep;
}

struct BalayageReport {
  double max_relative_residual = 0.0;  // max over ALL nodes of |U^hat - U^omega| / U^omega
  double total_mass = 0.0;
  bool pass = false;
  Solution solution;
};

/// For alpha <= 2 and positive omega the pseudo-balayage reproduces U^omega
/// on the whole target, not only on its support.
inline BalayageReport check_balayage_specialization(const DiscreteMeasure& omega, const NodeSet& a,
                                                    const KernelContext& ctx, double tol,
                                                    const SolverConfig& cfg = {}) {
  if (ctx.alpha() > 2.0) {
    throw ArgumentError("potential equality on the whole target only holds for alpha <= 2, got alpha = " +
                        std::to_string(ctx.alpha()));
  }
  Solution sol = solve_pseudo_balayage(SignedMeasure::positive(omega), a, ctx, cfg);
  const Eigen::VectorXd pot = potential(sol.measure, a, ctx);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double ref = sol.field_values[i];
    const double diff = std::abs(pot[i] - ref);
    worst = std::max(worst, ref > 0.0 ? diff / ref : diff);
  }
  const double mass = total_mass(sol.measure);
  return BalayageReport{worst, mass, worst <= tol, std::move(sol)};
}

struct KelvinReport {
  double mass_identity_error = 0.0;      // |mu*(R^n) - U^mu(center)| / U^mu(center)
  double energy_identity_error = 0.0;    // off-diagonal energies, relative
  double potential_identity_error = 0.0; // max over samples, relative
};

/// Residuals of the three Kelvin identities: mass, energy, and
/// U^{mu*}(x) = |x - center|^(alpha - dim) U^mu(x*) at the sample points.
inline KelvinReport check_kelvin_identities(const DiscreteMeasure& mu, const Point& center, const KernelContext& ctx,
                                            const std::vector<Point>& samples) {
  const DiscreteMeasure image = kelvin_transform(mu, center, ctx);
  KelvinReport rep;
  const double at_center = exact_potential_at(mu, center, ctx);
  rep.mass_identity_error = std::abs(total_mass(image) - at_center) / at_center;
  const double e0 = off_diagonal_energy(mu, ctx);
  const double e1 = off_diagonal_energy(image, ctx);
  rep.energy_identity_error = std::abs(e1 - e0) / std::abs(e0);
  for (const Point& x : samples) {
    const Eigen::VectorXd rel = x.coords() - center.coords();
    const double r2 = rel.squaredNorm();
    const Point x_star(Eigen::VectorXd(center.coords() + rel / r2));
    const double lhs = exact_potential_at(image, x, ctx);
    const double rhs = ctx.value_at_distance(std::sqrt(r2)) * exact_potential_at(mu, x_star, ctx);
    rep.potential_identity_error = std::max(rep.potential_identity_error, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Thinness at infinity

enum class ThinnessVerdict { diverges_likely, converges_likely };

inline std::string to_string(ThinnessVerdict v) {
  return v == ThinnessVerdict::diverges_likely ? "diverges_likely" : "converges_likely";
}

struct ThinnessSeries {
  std::vector<double> terms;         // c(A_j) / q^(j (n - alpha))
  std::vector<double> partial_sums;
  double tail_ratio = 0.0;           // geometric-mean term ratio over the last decade
  ThinnessVerdict verdict = ThinnessVerdict::converges_likely;
};

/// Partial sums of sum_j c(A_j) / q^(j (n - alpha)) with shell_capacities[j] =
/// c(A cap {q^j <= |x| < q^(j+1)}). The verdict compares the average term
/// ratio over the last (up to) ten terms against 0.9; it is a heuristic.
inline ThinnessSeries thinness_series(const std::vector<double>& shell_capacities, double q, double alpha, int dim) {
  if (!(q > 1.0)) throw ArgumentError("shell ratio q must exceed 1");
  if (!(alpha > 0.0) || !(alpha < dim)) throw ArgumentError("alpha must lie in (0, dim)");
  ThinnessSeries out;
  double sum = 0.0;
  for (std::size_t j = 0; j < shell_capacities.size(); ++j) {
    if (!(shell_capacities[j] >= 0.0)) throw ArgumentError("shell capacities must be nonnegative");
    const double term = shell_capacities[j] / std::pow(q, static_cast<double>(j) * (dim - alpha));
    out.terms.push_back(term);
    sum += term;
    out.partial_sums.push_back(sum);
  }
  const std::size_t n = out.terms.size();
  if (n >= 2) {
    const std::size_t last = n - 1;
    const std::size_t span = std::min<std::size_t>(10, last);
    const double t_last = out.terms[last];
    const double t_first = out.terms[last - span];
    if (t_last == 0.0) {
      out.tail_ratio = 0.0;
    } else if (t_first == 0.0) {
      out.tail_ratio = std::numeric_limits<double>::infinity();
    } else {
      out.tail_ratio = std::pow(t_last / t_first, 1.0 / static_cast<double>(span));
    }
  }
  out.verdict = out.tail_ratio >= 0.9 ? ThinnessVerdict::diverges_likely : ThinnessVerdict::converges_likely;
  return out;
}

/// Capacities of the pieces A_j = A cap {q^j <= |x - center| < q^(j+1)}, j = 0..J,
/// with J the shell holding the farthest node. Nodes inside the unit sphere are
/// ignored; empty shells have capacity 0.
inline std::vector<double> shell_capacities(const NodeSet& a, double q, const KernelContext& ctx,
                                            const SolverConfig& cfg = {}, const Point* center = nullptr) {
  if (!(q > 1.0)) throw ArgumentError("shell ratio q must exceed 1");
  const Point origin = center ? *center : Point::origin(a.dim());
  const Eigen::VectorXd r = a.radii(origin);
  std::vector<std::vector<Eigen::Index>> shells;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (r[i] < 1.0) continue;
    const auto j = static_cast<std::size_t>(std::floor(std::log(r[i]) / std::log(q) + 1e-9));
    if (shells.size() <= j) shells.resize(j + 1);
    shells[j].push_back(i);
  }
  std::vector<double> caps;
  for (const auto& idx : shells) {
    caps.push_back(idx.empty() ? 0.0 : solve_capacitary(detail::subset(a, idx), ctx, cfg).capacity);
  }
  return caps;
}

// ---------------------------------------------------------------------------
// Truncation sweeps

enum class SweepVerdict { solvable_equal_pb, solvable_strict, unsolvable_mass_deficit };

inline std::string to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::solvable_equal_pb:
      return "solvable_equal_pb";
    case SweepVerdict::solvable_strict:
      return "solvable_strict";
    case SweepVerdict::unsolvable_mass_deficit:
      return "unsolvable_mass_deficit";
  }
  return "unknown";
}

struct SweepRecord {
  double truncation_radius = 0.0;
  double cone_mass = 0.0;
  double cone_objective = 0.0;   // hat w_f on the truncation
  double slice_objective = 0.0;  // w_f on the truncation
  double equilibrium_constant = 0.0;
  double support_radius = 0.0;   // of the unit-mass solution
  bool converged = false;        // both solves
};

struct SweepOptions {
  double margin = 0.02;
  double support_threshold = 1e-6;  // relative to the largest weight
  double objective_slack = 1e-8;
  bool parallel = false;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  SweepVerdict verdict = SweepVerdict::solvable_equal_pb;
  double m_infinity = 0.0;
  double margin = 0.0;
  double cone_objective_limit = 0.0;   // extrapolated like the mass
  double slice_objective_limit = 0.0;
  bool cone_monotone = true;
  bool slice_monotone = true;
};

/// Least-squares fit y = y_inf + a * R^exponent; returns y_inf.
inline double extrapolate_to_infinity(const std::vector<double>& radii, const std::vector<double>& values,
                                      double exponent) {
  if (radii.size() != values.size() || radii.size() < 2) throw ArgumentError("extrapolation needs at least 2 points");
  const auto n = static_cast<double>(radii.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double x = std::pow(radii[k], exponent);
    sx += x;
    sy += values[k];
    sxx += x * x;
    sxy += x * values[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return (sy - slope * sx) / n;
}

inline SweepRecord sweep_member(const SignedMeasure& omega, const NodeSet& nodes, const KernelContext& ctx,
                                const SolverConfig& cfg, const SweepOptions& opt) {
  const KernelMatrix k = kernel_matrix(nodes, ctx);
  const Solution cone = solve_pseudo_balayage(omega, k, cfg);
  const Solution slice = solve_gauss_variational(omega, k, cfg);
  SweepRecord rec;
  const Eigen::VectorXd r = nodes.radii(Point::origin(nodes.dim()));
  rec.truncation_radius = r.maxCoeff();
  rec.cone_mass = total_mass(cone.measure);
  rec.cone_objective = cone.report.objective;
  rec.slice_objective = slice.report.objective;
  rec.equilibrium_constant = slice.report.equilibrium_constant.value_or(0.0);
  const Eigen::VectorXd& w = slice.measure.weights();
  const double cut = opt.support_threshold * w.maxCoeff();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] > cut) rec.support_radius = std::max(rec.support_radius, r[i]);
  }
  rec.converged = cone.report.converged && slice.report.converged;
  return rec;
}

/// Solves both problems on each member of a family of truncations with
/// increasing outer radius and classifies solvability from the extrapolated
/// cone mass m_inf (fit m(R) = m_inf + a R^(alpha - dim) over the last three
/// records).
inline SweepResult truncation_sweep(const SignedMeasure& omega, const std::vector<NodeSet>& family,
                                    const KernelContext& ctx, const SolverConfig& cfg = {},
                                    const SweepOptions& opt = {}) {
  if (family.size() < 3) throw ArgumentError("a sweep needs at least 3 truncations");
  SweepResult out;
  out.margin = opt.margin;
  if (opt.parallel) {
    std::vector<std::future<SweepRecord>> jobs;
    for (const NodeSet& nodes : family) {
      jobs.push_back(std::async(std::launch::async, [&, nodes_ptr = &nodes] {
        return sweep_member(omega, *nodes_ptr, ctx, cfg, opt);
      }));
    }
    for (auto& j : jobs) out.records.push_back(j.get());
  } else {
    for (const NodeSet& nodes : family) out.records.push_back(sweep_member(omega, nodes, ctx, cfg, opt));
  }
  for (std::size_t k = 1; k < out.records.size(); ++k) {
    if (!(out.records[k].truncation_radius > out.records[k - 1].truncation_radius)) {
      throw ArgumentError("truncation radii must be strictly increasing");
    }
    const double slack = opt.objective_slack;
    if (out.records[k].slice_objective > out.records[k - 1].slice_objective + slack) out.slice_monotone = false;
    if (out.records[k].cone_objective > out.records[k - 1].cone_objective + slack) out.cone_monotone = false;
  }

  std::vector<double> radii, mass, cone_obj, slice_obj;
  for (std::size_t k = out.records.size() - 3; k < out.records.size(); ++k) {
    radii.push_back(out.records[k].truncation_radius);
    mass.push_back(out.records[k].cone_mass);
    cone_obj.push_back(out.records[k].cone_objective);
    slice_obj.push_back(out.records[k].slice_objective);
  }
  out.m_infinity = extrapolate_to_infinity(radii, mass, ctx.exponent());
  out.cone_objective_limit = extrapolate_to_infinity(radii, cone_obj, ctx.exponent());
  out.slice_objective_limit = extrapolate_to_infinity(radii, slice_obj, ctx.exponent());
  if (out.m_infinity < 1.0 - opt.margin) {
    out.verdict = SweepVerdict::unsolvable_mass_deficit;
  } else if (out.m_infinity > 1.0 + opt.margin) {
    out.verdict = SweepVerdict::solvable_strict;
  } else {
    out.verdict = SweepVerdict::solvable_equal_pb;
  }
  return out;
}

/// True when the support radius of the last three records agrees to
/// `rel_tol` and stays below half the truncation radius.
inline bool support_radius_stabilized(const std::vector<SweepRecord>& records, double rel_tol = 1e-9) {
  if (records.size() < 3) return false;
  const auto& last = records.back();
  for (std::size_t k = records.size() - 3; k < records.size(); ++k) {
    if (std::abs(records[k].support_radius - last.support_radius) > rel_tol * last.support_radius) return false;
  }
  return last.support_radius < 0.5 * last.truncation_radius;
}

/// Cone mass of omega on `a`; dividing omega by it gives a field whose
/// pseudo-balayage has unit mass.
inline double cone_mass(const SignedMeasure& omega, const NodeSet& a, const KernelContext& ctx,
                        const SolverConfig& cfg = {}) {
  return total_mass(solve_pseudo_balayage(omega, a, ctx, cfg).measure);
}

/// Nested annular truncations of {|x| >= inner} at the given outer radii,
/// all with the same per-shell node count and shell ratio.
inline std::vector<NodeSet> truncation_family(double inner_radius, const std::vector<double>& outer_radii,
                                              int nodes_per_shell, int dim, double ratio) {
  std::vector<NodeSet> family;
  for (double outer : outer_radii) {
    family.push_back(make_truncated_complement(inner_radius, outer,
                                               nodes_per_shell * shell_count(inner_radius, outer, ratio), dim, ratio));
  }
  return family;
}

}  // namespace riesz
