#pragma once

// Point clouds standing in for the sets a measure may live on: spheres,
// lattice balls, radially graded annuli and their inversions.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riesz/errors.hpp"

namespace riesz {

class Point {
 public:
  Point() = default;
  explicit Point(Eigen::VectorXd coords) : coords_(std::move(coords)) { validate(); }
  Point(std::initializer_list<double> coords)
      : coords_(Eigen::Map<const Eigen::VectorXd>(coords.begin(),
                                                  static_cast<Eigen::Index>(coords.size()))) {
    validate();
  }

  static Point origin(int dim) { return Point(Eigen::VectorXd::Zero(dim)); }

  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }
  const Eigen::VectorXd& coords() const { return coords_; }

  double distance_to(const Point& other) const { return (coords_ - other.coords_).norm(); }

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim() == b.dim() && a.coords_ == b.coords_;
  }

 private:
  void validate() const {
    if (coords_.size() < 2) throw DimensionError("point dimension must be at least 2");
    if (!coords_.allFinite()) throw ArgumentError("point coordinates must be finite");
  }

  Eigen::VectorXd coords_;
};

namespace detail {

// Indices sorted lexicographically by coordinates; used for duplicate checks.
inline std::vector<Eigen::Index> lexicographic_order(const Eigen::MatrixXd& coords) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(coords.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index d = 0; d < coords.rows(); ++d) {
      if (coords(d, a) != coords(d, b)) return coords(d, a) < coords(d, b);
    }
    return a < b;
  });
  return order;
}

}  // namespace detail

/// Brute-force O(N^2) nearest-neighbor distance for each column of `coords`.
/// A lone point has no neighbor and gets +infinity.
inline Eigen::VectorXd nearest_neighbor_distances(const Eigen::MatrixXd& coords) {
  const Eigen::Index n = coords.cols();
  Eigen::VectorXd best = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = (coords.col(i) - coords.col(j)).squaredNorm();
      best[i] = std::min(best[i], d2);
      best[j] = std::min(best[j], d2);
    }
  }
  return best.array().sqrt();
}

/// Finite, ordered set of distinct points in R^dim with a positive spacing
/// per node. Coordinates are stored column-wise (dim x size).
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(int dim) : coords_(dim, 0) {
    if (dim < 2) throw DimensionError("node set dimension must be at least 2");
  }

  NodeSet(Eigen::MatrixXd coords, Eigen::VectorXd spacing)
      : coords_(std::move(coords)), spacing_(std::move(spacing)) {
    if (coords_.rows() < 2) throw DimensionError("node set dimension must be at least 2");
    if (spacing_.size() != coords_.cols()) {
      throw ArgumentError("spacing length " + std::to_string(spacing_.size()) +
                          " does not match node count " + std::to_string(coords_.cols()));
    }
    if (!coords_.allFinite()) throw ArgumentError("node coordinates must be finite");
    for (Eigen::Index i = 0; i < spacing_.size(); ++i) {
      if (!(spacing_[i] > 0.0) || !std::isfinite(spacing_[i])) {
        throw ArgumentError("spacing of node " + std::to_string(i) + " must be positive and finite");
      }
    }
    const auto order = detail::lexicographic_order(coords_);
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (coords_.col(order[k - 1]) == coords_.col(order[k])) {
        throw ArgumentError("nodes " + std::to_string(order[k - 1]) + " and " +
                            std::to_string(order[k]) + " coincide");
      }
    }
  }

  /// Spacing = nearest-neighbor distance; a lone point gets `isolated_spacing`.
  static NodeSet from_points(Eigen::MatrixXd coords, double isolated_spacing = 1.0) {
    Eigen::VectorXd spacing = nearest_neighbor_distances(coords);
    for (Eigen::Index i = 0; i < spacing.size(); ++i) {
      if (std::isinf(spacing[i])) spacing[i] = isolated_spacing;
    }
    return NodeSet(std::move(coords), std::move(spacing));
  }

  static NodeSet single(const Point& p, double spacing = 1.0) {
    return NodeSet(Eigen::MatrixXd(p.coords()), Eigen::VectorXd::Constant(1, spacing));
  }

  int dim() const { return static_cast<int>(coords_.rows()); }
  Eigen::Index size() const { return coords_.cols(); }
  bool empty() const { return coords_.cols() == 0; }

  const Eigen::MatrixXd& coords() const { return coords_; }
  const Eigen::VectorXd& spacing() const { return spacing_; }
  double spacing(Eigen::Index i) const { return spacing_[i]; }
  Point point(Eigen::Index i) const { return Point(Eigen::VectorXd(coords_.col(i))); }

  /// Euclidean norms of the nodes relative to `center`.
  Eigen::VectorXd radii(const Point& center) const {
    return (coords_.colwise() - center.coords()).colwise().norm().transpose();
  }

  friend bool operator==(const NodeSet& a, const NodeSet& b) {
    return a.coords_.rows() == b.coords_.rows() && a.coords_.cols() == b.coords_.cols() &&
           a.coords_ == b.coords_ && a.spacing_ == b.spacing_;
  }

 private:
  Eigen::MatrixXd coords_;
  Eigen::VectorXd spacing_;
};

namespace detail {

inline void check_generator_dim(const Point& center, int dim) {
  if (dim != 2 && dim != 3) {
    throw DimensionError("only dimensions 2 and 3 are supported, got " + std::to_string(dim));
  }
  if (center.dim() != dim) {
    throw DimensionError("center has dimension " + std::to_string(center.dim()) + ", expected " +
                         std::to_string(dim));
  }
}

// Unit-sphere directions: equal angles on the circle, golden-angle spiral on S^2.
inline Eigen::MatrixXd unit_sphere_directions(int count, int dim) {
  Eigen::MatrixXd dirs(dim, count);
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * i / count;
      dirs(0, i) = std::cos(t);
      dirs(1, i) = std::sin(t);
    }
    return dirs;
  }
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden_angle * i;
    dirs(0, i) = r * std::cos(t);
    dirs(1, i) = r * std::sin(t);
    dirs(2, i) = z;
  }
  return dirs;
}

inline double unit_ball_volume(int dim) {
  return dim == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0;
}

}  // namespace detail

/// Nodes on the sphere |x - center| = radius. Circle: equal angles starting
/// at angle 0. Sphere: golden-angle spiral with z_i = 1 - (2i+1)/count.
inline NodeSet make_sphere(const Point& center, double radius, int count, int dim) {
  detail::check_generator_dim(center, dim);
  if (count < 2) throw ArgumentError("sphere needs at least 2 nodes, got " + std::to_string(count));
  if (!(radius > 0.0)) throw ArgumentError("sphere radius must be positive");
  Eigen::MatrixXd coords = radius * detail::unit_sphere_directions(count, dim);
  coords.colwise() += center.coords();
  return NodeSet::from_points(std::move(coords));
}

/// Grid nodes of pitch `pitch` anchored at `center` that lie in the closed ball.
/// Membership is decided in integer index space so that lattices with the same
/// radius/pitch ratio are exact scaled copies of each other.
inline NodeSet make_ball_with_pitch(const Point& center, double radius, double pitch, int dim) {
  detail::check_generator_dim(center, dim);
  if (!(radius > 0.0)) throw ArgumentError("ball radius must be positive");
  if (!(pitch > 0.0)) throw ArgumentError("grid pitch must be positive");
  const double ratio = radius / pitch;
  const double limit = ratio * ratio * (1.0 + 1e-12);
  const int m = static_cast<int>(std::floor(ratio * (1.0 + 1e-12)));

  std::vector<double> flat;
  std::vector<int> idx(static_cast<std::size_t>(dim), -m);
  for (;;) {
    double s = 0.0;
    for (int v : idx) s += static_cast<double>(v) * v;
    if (s <= limit) {
      for (int d = 0; d < dim; ++d) flat.push_back(center[d] + pitch * idx[static_cast<std::size_t>(d)]);
    }
    int d = dim - 1;
    while (d >= 0 && idx[static_cast<std::size_t>(d)] == m) idx[static_cast<std::size_t>(d--)] = -m;
    if (d < 0) break;
    ++idx[static_cast<std::size_t>(d)];
  }
  const Eigen::Index n = static_cast<Eigen::Index>(flat.size()) / dim;
  if (n < 2) throw ArgumentError("grid pitch too coarse: fewer than 2 nodes in the ball");
  Eigen::MatrixXd coords = Eigen::Map<Eigen::MatrixXd>(flat.data(), dim, n);
  return NodeSet(std::move(coords), Eigen::VectorXd::Constant(n, pitch));
}

/// Lattice ball with roughly `count` nodes; the pitch depends only on
/// radius and count.
inline NodeSet make_ball(const Point& center, double radius, int count, int dim) {
  detail::check_generator_dim(center, dim);
  if (count < 2) throw ArgumentError("ball needs at least 2 nodes, got " + std::to_string(count));
  if (!(radius > 0.0)) throw ArgumentError("ball radius must be positive");
  const double pitch = radius * std::pow(detail::unit_ball_volume(dim) / count, 1.0 / dim);
  return make_ball_with_pitch(center, radius, pitch, dim);
}

inline constexpr double kDefaultShellRatio = 1.15;

/// Number of shells inner * ratio^k that fit in [inner, outer].
inline int shell_count(double inner_radius, double outer_radius, double ratio = kDefaultShellRatio) {
  return 1 + static_cast<int>(std::floor(std::log(outer_radius / inner_radius) / std::log(ratio) + 1e-9));
}

/// Annulus inner <= |x| <= outer around the origin, built from concentric
/// shells at radii inner * ratio^k, each carrying the same unit-sphere pattern
/// with count / shells nodes. Families with equal per-shell counts and growing
/// outer radius are nested.
inline NodeSet make_truncated_complement(double inner_radius, double outer_radius, int count, int dim,
                                         double ratio = kDefaultShellRatio) {
  if (dim != 2 && dim != 3) {
    throw DimensionError("only dimensions 2 and 3 are supported, got " + std::to_string(dim));
  }
  if (!(inner_radius > 0.0) || !(outer_radius > inner_radius)) {
    throw ArgumentError("truncated complement needs 0 < inner_radius < outer_radius");
  }
  if (!(ratio > 1.0)) throw ArgumentError("shell ratio must exceed 1");
  const int shells = shell_count(inner_radius, outer_radius, ratio);
  const int per_shell = count / shells;
  if (per_shell < 2) {
    throw ArgumentError("count " + std::to_string(count) + " too small for " + std::to_string(shells) +
                        " shells");
  }
  const Eigen::MatrixXd dirs = detail::unit_sphere_directions(per_shell, dim);
  Eigen::MatrixXd coords(dim, static_cast<Eigen::Index>(shells) * per_shell);
  for (int k = 0; k < shells; ++k) {
    coords.middleCols(static_cast<Eigen::Index>(k) * per_shell, per_shell) =
        (inner_radius * std::pow(ratio, k)) * dirs;
  }
  return NodeSet::from_points(std::move(coords));
}

/// Lattice balls of fixed radius along the positive x1 axis, ball j centered
/// at sqrt(q) * q^j so that it sits inside the shell q^j <= |x| < q^(j+1)
/// when ball_radius is small enough. A set that is thin at infinity.
inline NodeSet make_ball_ray(double q, int balls, double ball_radius, int count_per_ball, int dim) {
  if (!(q > 1.0)) throw ArgumentError("ray ratio q must exceed 1");
  if (balls < 1) throw ArgumentError("ray needs at least one ball");
  if (!(ball_radius > 0.0) || !(std::sqrt(q) - ball_radius >= 1.0)) {
    throw ArgumentError("ball radius must keep every ball inside its own shell");
  }
  const NodeSet unit = make_ball(Point::origin(dim), ball_radius, count_per_ball, dim);
  Eigen::MatrixXd coords(dim, unit.size() * balls);
  Eigen::VectorXd spacing(unit.size() * balls);
  for (int j = 0; j < balls; ++j) {
    Eigen::MatrixXd block = unit.coords();
    block.row(0).array() += std::sqrt(q) * std::pow(q, j);
    coords.middleCols(j * unit.size(), unit.size()) = block;
    spacing.segment(j * unit.size(), unit.size()) = unit.spacing();
  }
  return NodeSet(std::move(coords), std::move(spacing));
}

/// Inversion x -> center + (x - center) / |x - center|^2 in the unit sphere
/// about `center`; spacing is recomputed on the image.
inline NodeSet invert(const NodeSet& nodes, const Point& center) {
  if (nodes.dim() != center.dim()) throw DimensionError("inversion center dimension mismatch");
  Eigen::MatrixXd coords = nodes.coords();
  Eigen::VectorXd r2(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    Eigen::VectorXd rel = coords.col(i) - center.coords();
    r2[i] = rel.squaredNorm();
    if (r2[i] == 0.0) throw SingularityError("node " + std::to_string(i) + " coincides with inversion center");
    coords.col(i) = center.coords() + rel / r2[i];
  }
  if (nodes.size() == 1) {
    return NodeSet(std::move(coords), Eigen::VectorXd::Constant(1, nodes.spacing(0) / r2[0]));
  }
  return NodeSet::from_points(std::move(coords));
}

}  // namespace riesz
