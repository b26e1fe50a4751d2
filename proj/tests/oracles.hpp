#pragma once

// Exhaustive reference solvers for small QPs, used to check the projected
// gradient solver. Exponential in n; keep n around 10.

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline std::vector<int> members(unsigned mask, int n) {
  std::vector<int> s;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) s.push_back(i);
  }
  return s;
}

// min 1/2 w'Kw - b'w over w >= 0. Tries every support S: solve K_SS w_S = b_S
// and keep the pattern with w_S >= 0 and (Kw - b)_i >= 0 off S. Strict
// convexity makes it unique.
inline std::optional<Eigen::VectorXd> cone(const Eigen::MatrixXd& k, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(b.size());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const std::vector<int> s = members(mask, n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    if (!s.empty()) {
      const Eigen::VectorXd ws = k(s, s).ldlt().solve(b(s));
      if (ws.minCoeff() < -1e-12) continue;
      w(s) = ws;
    }
    const Eigen::VectorXd g = k * w - b;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i)) && g[i] < -1e-12) ok = false;
    }
    if (ok) return w;
  }
  return std::nullopt;
}

// Same over the unit simplex. For each nonempty support the bordered system
// [K_SS 1; 1' 0][w; -c] = [b_S; 1] gives (Kw - b) = c on S and sum w = 1; keep
// w_S >= 0 with (Kw - b) >= c off S. Returns the weights and c.
inline std::optional<std::pair<Eigen::VectorXd, double>> simplex(const Eigen::MatrixXd& k, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(b.size());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const std::vector<int> s = members(mask, n);
    const auto m = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m + 1, m + 1);
    sys.topLeftCorner(m, m) = k(s, s);
    sys.topRightCorner(m, 1).setOnes();
    sys.bottomLeftCorner(1, m).setOnes();
    Eigen::VectorXd rhs(m + 1);
    rhs << b(s), 1.0;
    const Eigen::VectorXd x = sys.fullPivLu().solve(rhs);
    if (x.head(m).minCoeff() < -1e-12) continue;
    const double c = -x[m];
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    w(s) = x.head(m);
    const Eigen::VectorXd g = k * w - b;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i)) && g[i] < c - 1e-12) ok = false;
    }
    if (ok) return std::make_pair(w, c);
  }
  return std::nullopt;
}

}  // namespace oracle
