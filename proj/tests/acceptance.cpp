// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "riesz/analysis.hpp"

using namespace riesz;

namespace {

constexpr double kDefaultReg = 0.25;
constexpr double kRobustRegs[] = {0.4, 0.6};

// 1
constexpr int kKktInstances = 20;
constexpr int kKktMaxNodes = 30;
constexpr double kKktCheckFactor = 10.0;
constexpr double kOracleTol = 1e-8;
// 2
constexpr double kMassBoundSlack = 1e-6;
// 3
constexpr int kSphereNodes3 = 1000;
constexpr double kMassLower3 = 1.005;
constexpr double kUniformSpread3 = 0.01;
// 4
constexpr int kSphereNodes4 = 5000;
constexpr double kMassTol4 = 0.01;
constexpr double kResidualTol4 = 0.02;
// 5
constexpr double kKelvinMassTol = 1e-12;
constexpr double kKelvinEnergyTol = 1e-10;
constexpr double kKelvinPotentialTol = 1e-10;
// 6
constexpr int kLatticeNodes6 = 2000;
constexpr double kHomogeneityTol = 0.03;
// 7, 8
const std::vector<double> kOuterRadii{4.0, 8.0, 16.0, 32.0};
constexpr int kNodesPerShell = 60;
const double kShellRatio = std::pow(2.0, 0.2);
constexpr double kSweepKktTol = 1e-10;
constexpr double kEqualCaseConstant = 1e-3;
constexpr double kStrictCaseConstant = 1e-2;
constexpr double kAgreementTol8 = 1e-4;
// 9
constexpr double kScalingTol = 1e-8;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;
std::vector<std::string> pending_notes;  // printed under the next criterion line

void print(const std::string& label, const Verdict& v, double seconds) {
  std::printf("%s: %s  (%.1fs) %s\n", label.c_str(), v.pass ? "PASS" : "FAIL", seconds, v.detail.c_str());
  for (const auto& n : pending_notes) std::printf("  note: %s\n", n.c_str());
  pending_notes.clear();
  std::fflush(stdout);
  failures += v.pass ? 0 : 1;
}

void note(const std::string& text) { pending_notes.push_back(text); }

template <class F>
void criterion(const std::string& label, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  const Verdict v = body();
  print(label, v, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

SolverConfig with_tol(double tol) {
  SolverConfig cfg;
  cfg.kkt_tol = tol;
  cfg.max_iters = 200000;
  return cfg;
}

SignedMeasure dirac(const Point& at, double mass = 1.0) {
  return SignedMeasure::positive(DiscreteMeasure::dirac(at, mass));
}

// ---------------------------------------------------------------------------

Verdict kkt_characterization() {
  Verdict v;
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> mass(0.2, 2.0);
  std::uniform_real_distribution<double> alpha_dist(1.0, 2.9);
  std::uniform_int_distribution<int> count(5, kKktMaxNodes);
  int passed = 0, converged = 0, oracle_ok = 0, oracle_runs = 0;
  double worst_oracle = 0.0;
  for (int inst = 0; inst < kKktInstances; ++inst) {
    const int n = inst < kKktInstances / 2 ? 10 : count(rng);
    Eigen::MatrixXd x(3, n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    const NodeSet a = NodeSet::from_points(x);
    Eigen::MatrixXd y(3, 4);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 2.5 * unit(rng) + (unit(rng) > 0 ? 2.0 : -2.0);
    Eigen::VectorXd s(4);
    s << mass(rng), -mass(rng), mass(rng), -mass(rng);
    const SignedMeasure omega = SignedMeasure::from_signed(NodeSet::from_points(y), s);
    const KernelContext ctx(alpha_dist(rng), 3, kDefaultReg);

    const SolverConfig cfg;
    const Solution sol = solve_pseudo_balayage(omega, a, ctx, cfg);
    converged += sol.report.converged;
    if (sol.report.converged && check_pseudo_balayage(sol, kKktCheckFactor * cfg.kkt_tol).pass) ++passed;

    if (n == 10) {
      ++oracle_runs;
      const KernelMatrix k = kernel_matrix(a, ctx);
      const Eigen::VectorXd b = field_potential(omega, a, ctx);
      const auto expected = oracle::cone(k.entries, b);
      const QpResult tight = minimize_on_cone(k.entries, b, with_tol(1e-12));
      if (expected && tight.report.converged) {
        const double err = (tight.weights - *expected).cwiseAbs().maxCoeff();
        worst_oracle = std::max(worst_oracle, err);
        oracle_ok += err <= kOracleTol;
      }
    }
  }
  v.require(converged == kKktInstances, std::to_string(converged) + "/" + std::to_string(kKktInstances) + " converged");
  v.require(passed == kKktInstances,
            std::to_string(passed) + "/" + std::to_string(kKktInstances) + " pass the characterization at 10*kkt_tol");
  v.require(oracle_ok == oracle_runs && oracle_runs > 0,
            std::to_string(oracle_ok) + "/" + std::to_string(oracle_runs) +
                fmt(" 10-node instances match enumeration (worst %.2e)", worst_oracle));
  return v;
}

Verdict mass_bound() {
  Verdict v;
  int cases = 0, ok = 0;
  double worst = -INFINITY;
  for (double alpha : {1.5, 2.0, 2.5}) {
    const KernelContext ctx(alpha, 3, kDefaultReg);
    const NodeSet sphere = make_sphere(Point::origin(3), 1.0, 800, 3);
    const NodeSet annulus =
        make_truncated_complement(1.0, 3.0, 50 * shell_count(1.0, 3.0, kShellRatio), 3, kShellRatio);
    for (const NodeSet* a : {&sphere, &annulus}) {
      for (const Point& x : {Point{0, 0, 0}, Point{0.3, 0.2, -0.1}, Point{4.0, 0.5, 0.0}}) {
        for (double m : {1.0, 2.5}) {
          const Solution sol = solve_pseudo_balayage(dirac(x, m), *a, ctx);
          const double ratio = total_mass(sol.measure) / (ctx.mass_bound_constant() * m);
          worst = std::max(worst, ratio);
          ++cases;
          ok += sol.report.converged && ratio <= 1.0 + kMassBoundSlack;
        }
      }
    }
  }
  v.require(ok == cases, std::to_string(ok) + "/" + std::to_string(cases) + " cases within C*mass");
  v.require(true, fmt("largest mass / bound %.6f", worst));
  return v;
}

Verdict mass_increase(double reg) {
  Verdict v;
  const KernelContext ctx(2.5, 3, reg);
  const NodeSet s = make_sphere(Point::origin(3), 1.0, kSphereNodes3, 3);
  const Solution sol = solve_pseudo_balayage(dirac(Point{0, 0, 0}), s, ctx);
  const Eigen::VectorXd& w = sol.measure.weights();
  const double mass = w.sum();
  const double spread = (w.maxCoeff() - w.minCoeff()) / w.mean();
  v.require(sol.report.converged, "converged");
  v.require(mass > kMassLower3 && mass <= std::sqrt(2.0), fmt("mass %.6f in (1.005, 2^0.5]", mass));
  v.require(spread <= kUniformSpread3, fmt("per-node weight spread (max-min)/mean %.4f <= 0.01", spread));
  // Equal-area latitude bands: the discrete analogue of a uniform surface law.
  constexpr int bands = 10;
  std::vector<double> band(bands, 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const int k = std::min(bands - 1, static_cast<int>((s.coords()(2, i) + 1.0) / 2.0 * bands));
    band[static_cast<std::size_t>(k)] += w[i];
  }
  double dev = 0.0;
  for (double b : band) dev = std::max(dev, std::abs(b / (mass / bands) - 1.0));
  note(fmt("reg %.2f: mass in 10 equal-area bands deviates from mass/10 by at most %.4f", reg, dev));
  return v;
}

Verdict balayage_specialization(double reg) {
  Verdict v;
  const BalayageReport r = check_balayage_specialization(DiscreteMeasure::dirac(Point{0, 0, 0}),
                                                         make_sphere(Point::origin(3), 1.0, kSphereNodes4, 3),
                                                         KernelContext(2.0, 3, reg), kResidualTol4);
  v.require(r.solution.report.converged, "converged");
  v.require(std::abs(r.total_mass - 1.0) <= kMassTol4, fmt("mass %.6f = 1 +- 0.01", r.total_mass));
  v.require(r.pass, fmt("max potential-equality residual %.2e <= 0.02", r.max_relative_residual));
  return v;
}

Verdict kelvin_identities() {
  Verdict v;
  const KernelContext ctx(2.5, 3, kDefaultReg);
  const NodeSet ball = make_sphere(Point::origin(3), 0.5, 500, 3);
  const CapacitaryResult cap = solve_capacitary(ball, ctx);
  const Point center{0.0123, -0.0071, 0.0049};
  const NodeSet around = make_sphere(center, 1.3, 100, 3);
  std::vector<Point> samples;
  for (Eigen::Index i = 0; i < around.size(); ++i) samples.push_back(around.point(i));
  const KelvinReport r = check_kelvin_identities(cap.gamma, center, ctx, samples);
  v.require(cap.report.converged && cap.gamma.size() == 500, std::to_string(cap.gamma.size()) + " atoms");
  v.require(r.mass_identity_error <= kKelvinMassTol, fmt("mass %.2e", r.mass_identity_error));
  v.require(r.energy_identity_error <= kKelvinEnergyTol, fmt("energy %.2e", r.energy_identity_error));
  v.require(r.potential_identity_error <= kKelvinPotentialTol,
            fmt("potential at %.0f points %.2e", static_cast<double>(samples.size()), r.potential_identity_error));
  return v;
}

Verdict capacity_homogeneity() {
  Verdict v;
  for (double alpha : {1.5, 2.0, 2.5}) {
    const KernelContext ctx(alpha, 3, kDefaultReg);
    const CapacitaryResult small = solve_capacitary(make_ball(Point::origin(3), 1.0, kLatticeNodes6, 3), ctx);
    const CapacitaryResult large = solve_capacitary(make_ball(Point::origin(3), 2.0, kLatticeNodes6, 3), ctx);
    const double ratio = large.capacity / small.capacity;
    const double expected = std::pow(2.0, 3.0 - alpha);
    v.require(small.report.converged && large.report.converged &&
                  std::abs(ratio / expected - 1.0) <= kHomogeneityTol,
              fmt("alpha %.1f ratio %.6f vs %.6f", alpha, ratio, expected));
  }
  return v;
}

struct Sweeps {
  SweepResult small, equal, strict;
  double q = 0.0;
};

Sweeps run_sweeps(double reg) {
  const auto family = truncation_family(1.0, kOuterRadii, kNodesPerShell, 3, kShellRatio);
  const KernelContext ctx(2.0, 3, reg);
  const SolverConfig cfg = with_tol(kSweepKktTol);
  SweepOptions opt;
  opt.parallel = true;
  Sweeps s;
  s.q = cone_mass(dirac(Point{0, 0, 0}), family.back(), ctx, cfg);
  s.small = truncation_sweep(dirac(Point{0, 0, 0}, 0.3), family, ctx, cfg, opt);
  s.equal = truncation_sweep(dirac(Point{0, 0, 0}, 1.0 / s.q), family, ctx, cfg, opt);
  s.strict = truncation_sweep(dirac(Point{0, 0, 0}, 3.0), family, ctx, cfg, opt);
  return s;
}

bool all_converged(const SweepResult& r) {
  for (const auto& rec : r.records) {
    if (!rec.converged) return false;
  }
  return true;
}

Verdict trichotomy(const Sweeps& s) {
  Verdict v;
  v.require(all_converged(s.small) && all_converged(s.equal) && all_converged(s.strict), "all solves converged");
  v.require(s.small.verdict == SweepVerdict::unsolvable_mass_deficit,
            "mass 0.3: " + to_string(s.small.verdict) + fmt(" (m_inf %.5f)", s.small.m_infinity));
  const double c_equal = s.equal.records.back().equilibrium_constant;
  v.require(s.equal.verdict == SweepVerdict::solvable_equal_pb && std::abs(c_equal) <= kEqualCaseConstant,
            fmt("mass 1/q, q = %.6f: ", s.q) + to_string(s.equal.verdict) + fmt(" (c %.2e)", c_equal));
  const double c_strict = s.strict.records.back().equilibrium_constant;
  v.require(s.strict.verdict == SweepVerdict::solvable_strict && std::abs(c_strict) > kStrictCaseConstant &&
                support_radius_stabilized(s.strict.records),
            "mass 3: " + to_string(s.strict.verdict) +
                fmt(" (c %.4f, support radius %.4f)", c_strict, s.strict.records.back().support_radius));
  return v;
}

Verdict monotone_convergence(const Sweeps& s) {
  Verdict v;
  for (const SweepResult* r : {&s.small, &s.equal, &s.strict}) {
    v.require(r->cone_monotone && r->slice_monotone, to_string(r->verdict) + " objectives non-increasing");
  }
  const SweepRecord& last = s.small.records.back();
  const double gap = std::abs(last.slice_objective - last.cone_objective) / std::abs(last.cone_objective);
  v.require(gap <= kAgreementTol8, fmt("unsolvable case final-record objective gap %.4e <= 1e-4", gap));
  const double limit_gap = std::abs(s.small.slice_objective_limit - s.small.cone_objective_limit) /
                           std::abs(s.small.cone_objective_limit);
  note(fmt("final record R = %.0f: cone %.8f, slice %.8f", last.truncation_radius, last.cone_objective,
           last.slice_objective));
  note(fmt("limits fitted over the last three records: cone %.8f, slice %.8f, relative gap %.2e",
           s.small.cone_objective_limit, s.small.slice_objective_limit, limit_gap));
  return v;
}

Verdict scaling_and_degeneracy() {
  Verdict v;
  const KernelContext ctx(2.2, 3, kDefaultReg);
  const SolverConfig cfg = with_tol(1e-13);
  double worst = 0.0;
  bool converged = true;
  bool zero_exact = true;
  for (const NodeSet& a : {make_sphere(Point::origin(3), 1.0, 400, 3),
                           make_truncated_complement(1.0, 3.0, 40 * shell_count(1.0, 3.0, kShellRatio), 3,
                                                     kShellRatio)}) {
    const SignedMeasure omega(DiscreteMeasure::dirac(Point{0.1, 0.0, 0.2}, 1.4),
                              DiscreteMeasure::dirac(Point{5.0, 1.0, 0.0}, 2.0));
    const Solution base = solve_pseudo_balayage(omega, a, ctx, cfg);
    converged = converged && base.report.converged;
    for (double c : {0.0, 0.5, 2.0}) {
      const Solution scaled = solve_pseudo_balayage(omega.scaled(c), a, ctx, cfg);
      converged = converged && scaled.report.converged;
      worst = std::max(worst, (scaled.measure.weights() - c * base.measure.weights()).cwiseAbs().maxCoeff());
    }
    const SignedMeasure negative(DiscreteMeasure::zero(3),
                                 add(DiscreteMeasure::dirac(Point{0.0, 0.0, 0.0}, 1.0),
                                     DiscreteMeasure::dirac(Point{6.0, 0.0, 0.0}, 3.0)));
    zero_exact = zero_exact && solve_pseudo_balayage(negative, a, ctx).measure.weights().isZero(0.0);
  }
  v.require(converged, "converged");
  v.require(worst <= kScalingTol, fmt("max |w(c omega) - c w(omega)| %.2e over c in {0, 0.5, 2}", worst));
  v.require(zero_exact, "purely negative fields give exactly zero");
  return v;
}

}  // namespace

int main() {
  std::printf("acceptance: default reg_factor %.2f\n", kDefaultReg);
  criterion("criterion 1 (KKT characterization)", kkt_characterization);
  criterion("criterion 2 (mass bound)", mass_bound);
  criterion("criterion 3 (mass increase onto a sphere)", [] { return mass_increase(kDefaultReg); });
  criterion("criterion 4 (balayage specialization)", [] { return balayage_specialization(kDefaultReg); });
  criterion("criterion 5 (Kelvin identities)", kelvin_identities);
  criterion("criterion 6 (capacity homogeneity)", capacity_homogeneity);

  Sweeps sweeps;
  criterion("criterion 7 (solvability trichotomy)", [&] {
    sweeps = run_sweeps(kDefaultReg);
    return trichotomy(sweeps);
  });
  criterion("criterion 8 (monotone convergence)", [&] { return monotone_convergence(sweeps); });
  criterion("criterion 9 (scaling and degeneracy)", scaling_and_degeneracy);

  criterion("criterion 10 (robustness in reg_factor)", [] {
    Verdict v;
    for (double reg : kRobustRegs) {
      const Verdict c3 = mass_increase(reg);
      const Verdict c4 = balayage_specialization(reg);
      const Verdict c7 = trichotomy(run_sweeps(reg));
      const std::string tag = fmt("reg %.1f ", reg);
      note(tag + "3: " + c3.detail);
      note(tag + "4: " + c4.detail);
      note(tag + "7: " + c7.detail);
      v.require(c3.pass, tag + "criterion 3 " + (c3.pass ? "holds" : "fails"));
      v.require(c4.pass, tag + "criterion 4 " + (c4.pass ? "holds" : "fails"));
      v.require(c7.pass, tag + "criterion 7 " + (c7.pass ? "holds" : "fails"));
    }
    return v;
  });

  std::printf("acceptance: %d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
