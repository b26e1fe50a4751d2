#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "riesz/analysis.hpp"
#include "riesz/measures.hpp"
#include "riesz/potential.hpp"

using namespace riesz;

namespace {

DiscreteMeasure random_measure(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> m(0.1, 1.0);
  Eigen::MatrixXd x(3, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = m(rng);
  return DiscreteMeasure(NodeSet::from_points(x), w);
}

}  // namespace

TEST(DiscreteMeasure, Validation) {
  const NodeSet s = make_sphere(Point::origin(2), 1.0, 3, 2);
  EXPECT_THROW(DiscreteMeasure(s, Eigen::Vector3d(1.0, -0.1, 0.0)), ArgumentError);
  EXPECT_THROW(DiscreteMeasure(s, Eigen::Vector2d(1.0, 1.0)), ArgumentError);
  EXPECT_THROW(DiscreteMeasure(s, Eigen::Vector3d(1.0, INFINITY, 0.0)), ArgumentError);
}

TEST(TotalMass, Basics) {
  EXPECT_EQ(total_mass(DiscreteMeasure::zero(3)), 0.0);
  EXPECT_EQ(total_mass(DiscreteMeasure::dirac(Point{1, 2, 3})), 1.0);
  const DiscreteMeasure mu = random_measure(20, 1);
  EXPECT_NEAR(total_mass(scale(mu, 2.5)), 2.5 * total_mass(mu), 1e-14);
}

TEST(Scale, NegativeFactorRejected) {
  EXPECT_THROW(scale(random_measure(5, 2), -1.0), ArgumentError);
}

TEST(Restrict, AlwaysTrueAndMonotoneInRadius) {
  const DiscreteMeasure mu = random_measure(60, 3);
  const DiscreteMeasure same = restrict(mu, [](const Point&) { return true; });
  EXPECT_TRUE(same.weights() == mu.weights());
  EXPECT_TRUE(same.nodes() == mu.nodes());
  double previous = INFINITY;
  for (double r : {4.0, 3.0, 2.0, 1.5, 1.0, 0.5, 0.0}) {
    const double m = total_mass(restrict(mu, [r](const Point& p) { return p.coords().norm() <= r; }));
    EXPECT_LE(m, previous);
    previous = m;
  }
  EXPECT_EQ(previous, 0.0);
}

TEST(Add, ZeroIsNeutral) {
  const DiscreteMeasure mu = random_measure(10, 4);
  const DiscreteMeasure s = add(mu, DiscreteMeasure::zero(3));
  EXPECT_TRUE(s.nodes() == mu.nodes());
  EXPECT_TRUE(s.weights() == mu.weights());
}

TEST(Add, MergesCoincidentAtomsAndShrinksSpacing) {
  const DiscreteMeasure a = DiscreteMeasure::dirac(Point{0, 0}, 1.0, 1.0);
  const DiscreteMeasure b = DiscreteMeasure::dirac(Point{0.25, 0}, 2.0, 1.0);
  const DiscreteMeasure c = DiscreteMeasure::dirac(Point{0, 0}, 0.5, 1.0);
  const DiscreteMeasure s = add(add(a, b), c);
  ASSERT_EQ(s.size(), 2);
  EXPECT_DOUBLE_EQ(total_mass(s), 3.5);
  EXPECT_DOUBLE_EQ(s.weights()[0], 1.5);
  EXPECT_DOUBLE_EQ(s.nodes().spacing(0), 0.25);
}

TEST(SignedMeasure, OverlapsCancel) {
  Eigen::MatrixXd x(2, 2);
  x << 0, 1, 0, 0;
  const NodeSet s = NodeSet::from_points(x);
  const DiscreteMeasure plus(s, Eigen::Vector2d(1.0, 0.5));
  const DiscreteMeasure minus(NodeSet::single(Point{1.0, 0.0}), Eigen::VectorXd::Constant(1, 2.0));
  const SignedMeasure w(plus, minus);
  ASSERT_EQ(w.plus().size(), 1);
  ASSERT_EQ(w.minus().size(), 1);
  EXPECT_DOUBLE_EQ(w.plus().weights()[0], 1.0);
  EXPECT_DOUBLE_EQ(w.minus().weights()[0], 1.5);
  EXPECT_TRUE(w.minus().nodes().point(0) == (Point{1.0, 0.0}));
}

TEST(SignedMeasure, FromSignedSplitsOnSign) {
  const NodeSet s = make_sphere(Point::origin(2), 1.0, 4, 2);
  const SignedMeasure w = SignedMeasure::from_signed(s, Eigen::Vector4d(1.0, -2.0, 0.0, 3.0));
  EXPECT_DOUBLE_EQ(total_mass(w.plus()), 4.0);
  EXPECT_DOUBLE_EQ(total_mass(w.minus()), 2.0);
  const SignedMeasure flipped = w.scaled(-0.5);
  EXPECT_DOUBLE_EQ(total_mass(flipped.plus()), 1.0);
  EXPECT_DOUBLE_EQ(total_mass(flipped.minus()), 2.0);
}

TEST(Kelvin, FixedSphereAndMassRule) {
  const KernelContext ctx(2.0, 3);
  const DiscreteMeasure on_sphere = DiscreteMeasure::dirac(Point{0, 1, 0}, 0.7);
  const DiscreteMeasure k = kelvin_transform(on_sphere, Point::origin(3), ctx);
  EXPECT_TRUE(k.nodes().point(0) == on_sphere.nodes().point(0));
  EXPECT_DOUBLE_EQ(k.weights()[0], 0.7);
  const DiscreteMeasure far = kelvin_transform(DiscreteMeasure::dirac(Point{0, 0, 2}), Point::origin(3), ctx);
  EXPECT_DOUBLE_EQ(far.nodes().point(0)[2], 0.5);
  EXPECT_DOUBLE_EQ(far.weights()[0], 0.5);
}

TEST(Kelvin, AtomAtCenterThrows) {
  EXPECT_THROW(kelvin_transform(DiscreteMeasure::dirac(Point{1, 1, 1}), Point{1, 1, 1}, KernelContext(2.0, 3)),
               SingularityError);
}

TEST(Kelvin, InvolutionOnMeasures) {
  const KernelContext ctx(1.4, 3);
  const DiscreteMeasure mu = random_measure(40, 5);
  const Point c{0.05, -0.03, 0.02};
  const DiscreteMeasure back = kelvin_transform(kelvin_transform(mu, c, ctx), c, ctx);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    EXPECT_LT((back.nodes().coords().col(i) - mu.nodes().coords().col(i)).norm(),
              1e-12 * mu.nodes().coords().col(i).norm());
    EXPECT_NEAR(back.weights()[i], mu.weights()[i], 1e-12 * mu.weights()[i]);
  }
}

TEST(Kelvin, IdentitiesOnRandomMeasure) {
  for (double alpha : {1.2, 2.0, 2.7}) {
    const KernelContext ctx(alpha, 3);
    const DiscreteMeasure mu = random_measure(50, 6);
    const Point c{0.011, 0.007, -0.013};
    std::vector<Point> samples;
    const NodeSet ring = make_sphere(Point{0.2, 0.1, 0.0}, 0.9, 40, 3);
    for (Eigen::Index i = 0; i < ring.size(); ++i) samples.push_back(ring.point(i));
    const KelvinReport r = check_kelvin_identities(mu, c, ctx, samples);
    EXPECT_LT(r.mass_identity_error, 1e-12);
    EXPECT_LT(r.energy_identity_error, 1e-10);
    EXPECT_LT(r.potential_identity_error, 1e-10);
  }
}

// Mass identity as stated: total mass of the image equals the exact potential
// at the center, computed here by an explicit loop.
TEST(Kelvin, MassIdentityAgainstExplicitSum) {
  const KernelContext ctx(2.5, 3);
  const DiscreteMeasure mu = random_measure(30, 8);
  const Point c{0.3, 0.3, 0.3};
  double u = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    u += mu.weights()[i] * std::pow((mu.nodes().coords().col(i) - c.coords()).norm(), 2.5 - 3.0);
  }
  EXPECT_NEAR(total_mass(kelvin_transform(mu, c, ctx)), u, 1e-12 * u);
}
