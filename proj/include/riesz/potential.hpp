#pragma once

// Potentials, energies and the Gauss functional of discrete measures. Sums
// run over atoms left to right, one output row at a time.

#include <string>

#include <Eigen/Core>

#include "riesz/errors.hpp"
#include "riesz/kernel.hpp"
#include "riesz/measures.hpp"

namespace riesz {

/// U^mu at every node of `at`, with the regularized self-interaction where
/// a node coincides with an atom.
inline Eigen::VectorXd potential(const DiscreteMeasure& mu, const NodeSet& at, const KernelContext& ctx) {
  detail::check_context_dim(at, ctx, "evaluation node set");
  detail::check_context_dim(mu.nodes(), ctx, "measure support");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
      s += detail::kernel_entry(at, i, mu.nodes(), j, ctx) * mu.weights()[j];
    }
    out[i] = s;
  }
  return out;
}

/// U^mu(x) with the exact kernel; throws if x is an atom location.
inline double exact_potential_at(const DiscreteMeasure& mu, const Point& x, const KernelContext& ctx) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) s += riesz_kernel(x, mu.nodes().point(j), ctx) * mu.weights()[j];
  return s;
}

inline double mutual_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KernelContext& ctx) {
  if (mu.empty() || nu.empty()) return 0.0;
  return mu.weights().dot(potential(nu, mu.nodes(), ctx));
}

inline double energy(const DiscreteMeasure& mu, const KernelContext& ctx) { return mutual_energy(mu, mu, ctx); }

/// Energy over pairs of distinct atoms only, using the exact kernel.
inline double off_diagonal_energy(const DiscreteMeasure& mu, const KernelContext& ctx) {
  detail::check_context_dim(mu.nodes(), ctx, "measure support");
  const auto& x = mu.nodes().coords();
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
      if (j == i) continue;
      row += ctx.value_at_distance(std::sqrt(detail::squared_distance(x.col(i).data(), x.col(j).data(), x.rows()))) *
             mu.weights()[j];
    }
    s += mu.weights()[i] * row;
  }
  return s;
}

/// Field U^omega = U^omega+ - U^omega- at the nodes of `at`.
inline Eigen::VectorXd field_potential(const SignedMeasure& omega, const NodeSet& at, const KernelContext& ctx) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(at.size());
  if (!omega.plus().empty()) b += potential(omega.plus(), at, ctx);
  if (!omega.minus().empty()) b -= potential(omega.minus(), at, ctx);
  return b;
}

/// I_f(mu) = ||mu||^2 - 2 * integral of U^omega d mu.
inline double gauss_functional(const DiscreteMeasure& mu, const SignedMeasure& omega, const KernelContext& ctx) {
  return energy(mu, ctx) - 2.0 * (mutual_energy(mu, omega.plus(), ctx) - mutual_energy(mu, omega.minus(), ctx));
}

}  // namespace riesz
