#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "riesz/errors.hpp"
#include "riesz/geometry.hpp"
#include "riesz/kernel.hpp"

namespace riesz {

/// Nonnegative atoms on a node set.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// Zero measure with no atoms.
  static DiscreteMeasure zero(int dim) { return DiscreteMeasure(NodeSet(dim), Eigen::VectorXd()); }

  static DiscreteMeasure dirac(const Point& at, double mass = 1.0, double spacing = 1.0) {
    return DiscreteMeasure(NodeSet::single(at, spacing), Eigen::VectorXd::Constant(1, mass));
  }

  DiscreteMeasure(NodeSet nodes, Eigen::VectorXd weights) : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (weights_.size() != nodes_.size()) {
      throw ArgumentError("weight count " + std::to_string(weights_.size()) + " does not match node count " +
                          std::to_string(nodes_.size()));
    }
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
        throw ArgumentError("weight " + std::to_string(i) + " must be finite and nonnegative");
      }
    }
  }

  const NodeSet& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  int dim() const { return nodes_.dim(); }
  Eigen::Index size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

 private:
  NodeSet nodes_;
  Eigen::VectorXd weights_;
};

inline double total_mass(const DiscreteMeasure& mu) { return mu.weights().sum(); }

inline DiscreteMeasure scale(const DiscreteMeasure& mu, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw ArgumentError("positive measures can only be scaled by finite c >= 0");
  }
  return DiscreteMeasure(mu.nodes(), c * mu.weights());
}

/// Zeroes the weights of nodes failing `keep`; the node set is unchanged.
inline DiscreteMeasure restrict(const DiscreteMeasure& mu, const std::function<bool(const Point&)>& keep) {
  Eigen::VectorXd w = mu.weights();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!keep(mu.nodes().point(i))) w[i] = 0.0;
  }
  return DiscreteMeasure(mu.nodes(), std::move(w));
}

namespace detail {

using CoordKey = std::vector<double>;

inline CoordKey coord_key(const NodeSet& nodes, Eigen::Index i) {
  const auto c = nodes.coords().col(i);
  return CoordKey(c.data(), c.data() + c.size());
}

inline NodeSet subset(const NodeSet& nodes, const std::vector<Eigen::Index>& keep) {
  Eigen::MatrixXd coords(nodes.dim(), static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd spacing(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    coords.col(static_cast<Eigen::Index>(k)) = nodes.coords().col(keep[k]);
    spacing[static_cast<Eigen::Index>(k)] = nodes.spacing(keep[k]);
  }
  return NodeSet(std::move(coords), std::move(spacing));
}

}  // namespace detail

/// Sum of two measures. Coincident atoms merge; on a genuine union the
/// spacing of each node shrinks to its nearest-neighbor distance if closer.
inline DiscreteMeasure add(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.empty()) return nu;
  if (nu.empty()) return mu;
  if (mu.dim() != nu.dim()) throw DimensionError("cannot add measures of different dimension");
  if (mu.nodes() == nu.nodes()) return DiscreteMeasure(mu.nodes(), mu.weights() + nu.weights());

  std::map<detail::CoordKey, Eigen::Index> index;
  std::vector<double> flat;
  std::vector<double> spacing;
  std::vector<double> weights;
  auto absorb = [&](const DiscreteMeasure& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      auto key = detail::coord_key(m.nodes(), i);
      auto [it, inserted] = index.emplace(key, static_cast<Eigen::Index>(weights.size()));
      if (inserted) {
        flat.insert(flat.end(), key.begin(), key.end());
        spacing.push_back(m.nodes().spacing(i));
        weights.push_back(m.weights()[i]);
      } else {
        const auto k = static_cast<std::size_t>(it->second);
        spacing[k] = std::min(spacing[k], m.nodes().spacing(i));
        weights[k] += m.weights()[i];
      }
    }
  };
  absorb(mu);
  absorb(nu);
  const auto n = static_cast<Eigen::Index>(weights.size());
  Eigen::MatrixXd coords = Eigen::Map<Eigen::MatrixXd>(flat.data(), mu.dim(), n);
  Eigen::VectorXd sp = Eigen::Map<Eigen::VectorXd>(spacing.data(), n);
  sp = sp.cwiseMin(nearest_neighbor_distances(coords));
  return DiscreteMeasure(NodeSet(std::move(coords), std::move(sp)),
                         Eigen::Map<Eigen::VectorXd>(weights.data(), n));
}

/// Signed measure as positive and negative parts with disjoint atoms.
/// Atoms present in both parts cancel at construction.
class SignedMeasure {
 public:
  SignedMeasure() = default;

  static SignedMeasure zero(int dim) { return SignedMeasure(DiscreteMeasure::zero(dim), DiscreteMeasure::zero(dim)); }

  static SignedMeasure positive(DiscreteMeasure plus) {
    const int dim = plus.dim();
    return SignedMeasure(std::move(plus), DiscreteMeasure::zero(dim));
  }

  /// Splits a signed weight column on sign; zero weights are dropped.
  static SignedMeasure from_signed(const NodeSet& nodes, const Eigen::VectorXd& signed_weights) {
    if (signed_weights.size() != nodes.size()) throw ArgumentError("signed weight count does not match node count");
    std::vector<Eigen::Index> pos;
    std::vector<Eigen::Index> neg;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
      if (!std::isfinite(signed_weights[i])) throw ArgumentError("signed weight " + std::to_string(i) + " is not finite");
      if (signed_weights[i] > 0.0) pos.push_back(i);
      if (signed_weights[i] < 0.0) neg.push_back(i);
    }
    auto part = [&](const std::vector<Eigen::Index>& idx, double sign) {
      Eigen::VectorXd w(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) w[static_cast<Eigen::Index>(k)] = sign * signed_weights[idx[k]];
      return DiscreteMeasure(detail::subset(nodes, idx), std::move(w));
    };
    return SignedMeasure(part(pos, 1.0), part(neg, -1.0));
  }

  SignedMeasure(DiscreteMeasure plus, DiscreteMeasure minus) {
    if (!plus.empty() && !minus.empty() && plus.dim() != minus.dim()) {
      throw DimensionError("positive and negative parts differ in dimension");
    }
    std::map<detail::CoordKey, Eigen::Index> minus_index;
    for (Eigen::Index j = 0; j < minus.size(); ++j) minus_index.emplace(detail::coord_key(minus.nodes(), j), j);

    Eigen::VectorXd wp = plus.weights();
    Eigen::VectorXd wm = minus.weights();
    std::vector<bool> drop_p(static_cast<std::size_t>(wp.size()), false);
    std::vector<bool> drop_m(static_cast<std::size_t>(wm.size()), false);
    for (Eigen::Index i = 0; i < plus.size() && !minus_index.empty(); ++i) {
      auto it = minus_index.find(detail::coord_key(plus.nodes(), i));
      if (it == minus_index.end()) continue;
      const Eigen::Index j = it->second;
      const double common = std::min(wp[i], wm[j]);
      wp[i] -= common;
      wm[j] -= common;
      if (wp[i] == 0.0) drop_p[static_cast<std::size_t>(i)] = true;
      if (wm[j] == 0.0) drop_m[static_cast<std::size_t>(j)] = true;
    }
    plus_ = prune(plus, wp, drop_p);
    minus_ = prune(minus, wm, drop_m);
  }

  const DiscreteMeasure& plus() const { return plus_; }
  const DiscreteMeasure& minus() const { return minus_; }
  int dim() const { return plus_.empty() ? minus_.dim() : plus_.dim(); }

  /// Multiplies by any real c; a negative c swaps the parts.
  SignedMeasure scaled(double c) const {
    if (c >= 0.0) return SignedMeasure(scale(plus_, c), scale(minus_, c));
    return SignedMeasure(scale(minus_, -c), scale(plus_, -c));
  }

 private:
  static DiscreteMeasure prune(const DiscreteMeasure& m, const Eigen::VectorXd& w, const std::vector<bool>& drop) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
    }
    if (keep.size() == static_cast<std::size_t>(m.size())) return DiscreteMeasure(m.nodes(), w);
    Eigen::VectorXd kept(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) kept[static_cast<Eigen::Index>(k)] = w[keep[k]];
    return DiscreteMeasure(detail::subset(m.nodes(), keep), std::move(kept));
  }

  DiscreteMeasure plus_;
  DiscreteMeasure minus_;
};

/// Kelvin transform in the unit sphere about `center`: an atom of mass m at y
/// moves to the inverse point y* and gets mass m |y - center|^(alpha - dim).
inline DiscreteMeasure kelvin_transform(const DiscreteMeasure& mu, const Point& center, const KernelContext& ctx) {
  if (mu.empty()) return mu;
  if (mu.dim() != ctx.dim() || center.dim() != ctx.dim()) throw DimensionError("Kelvin transform dimension mismatch");
  const Eigen::VectorXd r = mu.nodes().radii(center);
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (r[i] == 0.0) throw SingularityError("atom " + std::to_string(i) + " sits at the Kelvin center");
  }
  Eigen::VectorXd w(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) w[i] = mu.weights()[i] * ctx.value_at_distance(r[i]);
  return DiscreteMeasure(invert(mu.nodes(), center), std::move(w));
}

}  // namespace riesz
