#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace cohom;

namespace {

VectorXd vec2(double x, double y) {
  VectorXd v(2);
  v << x, y;
  return v;
}

Cocycle anchor_a_unit(const RepresentationPtr& rep) {
  MatrixXd values(2, 1);
  values << 1, 0;
  return Cocycle(rep, values);
}

}  // namespace

TEST(Extend, IdentityGivesZero) {
  auto rep = fixtures::anchor_b();
  std::mt19937_64 rng(1);
  const Cocycle z = z1_basis(rep).random(rng);
  EXPECT_EQ(z.extend(rep->group().identity()).norm(), 0.0);
}

TEST(Extend, SquareUnfoldsOnce) {
  auto rep = fixtures::anchor_a();
  const Cocycle z = anchor_a_unit(rep);
  const VectorXd za = z.value(1);
  const VectorXd expect = za + rep->generator(1) * za;
  EXPECT_TRUE(z.extend(rep->group().from_word({1, 1})).isApprox(expect, 1e-15));
}

TEST(Extend, InverseLetter) {
  auto rep = fixtures::anchor_b();
  MatrixXd values(2, 2);
  values << 1, 2, 3, 4;
  const Cocycle z(rep, values);
  for (Letter s : {1, 2}) {
    const VectorXd expect = -rep->generator(-s) * z.value(s);
    EXPECT_TRUE(z.extend(rep->group().generator(-s)).isApprox(expect, 1e-15));
  }
}

TEST(Z1, DimensionsOfAnchors) {
  EXPECT_EQ(z1_basis(fixtures::anchor_b()).dim(), 4u);
  EXPECT_EQ(z1_basis(fixtures::anchor_a()).dim(), 2u);
  EXPECT_EQ(z1_basis(fixtures::anchor_c()).dim(), 2u);
  EXPECT_EQ(z1_basis(fixtures::s3_signed(3.0)).dim(), 3u);
}

TEST(Z1, BasisElementsSatisfyEveryRelation) {
  for (auto rep : {fixtures::anchor_c(), fixtures::s3_signed(3.0)}) {
    const auto basis = z1_basis(rep);
    for (std::size_t j = 0; j < basis.dim(); ++j) EXPECT_LE(relation_residual(basis.element(j)), 1e-12);
    // Cocycle identity z_{gh} = z_g + pi_g z_h over the whole group.
    const Cocycle z = basis.element(0);
    const auto& g = rep->group();
    for (const auto& a : g.enumerate())
      for (const auto& b : g.enumerate()) {
        const VectorXd lhs = z.extend(g.multiply(a, b));
        const VectorXd rhs = z.extend(a) + rep->evaluate(a) * z.extend(b);
        EXPECT_LE((lhs - rhs).norm(), 1e-12);
      }
  }
}

TEST(Z1, CoordinatesRoundTrip) {
  auto rep = fixtures::anchor_c();
  const auto basis = z1_basis(rep);
  VectorXd c(2);
  c << 0.3, -1.7;
  double residual = 1;
  EXPECT_TRUE(basis.coordinates(basis.cocycle(c), &residual).isApprox(c, 1e-12));
  EXPECT_LE(residual, 1e-12);
}

TEST(DPi, ZeroAndTrivial) {
  auto rep = fixtures::anchor_b();
  EXPECT_EQ(s_norm(d_pi(rep, VectorXd::Zero(2))), 0.0);
  auto trivial = Representation::make(Group::free(1), NormedSpace(2, 2.0), {MatrixXd::Identity(2, 2)},
                                      IsometryFamily::Orthogonal);
  EXPECT_EQ(s_norm(d_pi(trivial, vec2(3, -1))), 0.0);
}

TEST(DPi, RotationByTwoPiOverThree) {
  const Cocycle z = d_pi(fixtures::anchor_a(), vec2(1, 0));
  EXPECT_TRUE(z.value(1).isApprox(vec2(1.5, -std::sqrt(3.0) / 2.0), 1e-15));
}

TEST(DPi, IsACocycle) {
  EXPECT_LE(relation_residual(d_pi(fixtures::anchor_c(), vec2(0.4, 2.0))), 1e-14);
}

TEST(SNorm, ZeroIsometryAndScaling) {
  auto rep = fixtures::anchor_a();
  EXPECT_EQ(s_norm(Cocycle::zero(rep)), 0.0);
  const Cocycle z = anchor_a_unit(rep);
  EXPECT_NEAR(s_norm(z), 1.0, 1e-15);
  MatrixXd values(2, 2);
  values << 1, -2, 0.5, 3;
  const Cocycle w(fixtures::anchor_b(), values);
  EXPECT_NEAR(s_norm(w * 3.0), 3.0 * s_norm(w), 1e-14);
}

TEST(ZMu, ZeroCoboundaryAndHandValue) {
  auto rep = fixtures::anchor_a();
  const Measure mu = lazy_uniform<double>(rep->group_ptr());
  EXPECT_EQ(z_mu(Cocycle::zero(rep), mu).norm(), 0.0);

  const VectorXd v = vec2(0.7, -1.1);
  const MatrixXd a = markov_matrix(*rep, mu);
  EXPECT_TRUE(z_mu(d_pi(rep, v), mu).isApprox(v - a * v, 1e-14));

  const Cocycle z = anchor_a_unit(rep);
  const VectorXd expect = (MatrixXd::Identity(2, 2) - fixtures::rotation(-2.0 * std::numbers::pi / 3.0)) * vec2(1, 0) / 3.0;
  EXPECT_TRUE(z_mu(z, mu).isApprox(expect, 1e-14));
}

TEST(GammaAct, IdentityShiftAndBasePoint) {
  auto rep = fixtures::anchor_a();
  const Cocycle z = anchor_a_unit(rep);
  const auto& g = rep->group();
  const ShiftedCocycle same = gamma_act(g.identity(), z);
  EXPECT_TRUE(same.values().isApprox(z.values()));
  EXPECT_EQ(same.base_point().norm(), 0.0);

  const Element a = g.generator(1);
  const ShiftedCocycle shifted = gamma_act(a, z);
  EXPECT_TRUE(shifted.at(g.identity()).isApprox(z.extend(a)));
  EXPECT_TRUE(shifted.base_point().isApprox(z.value(1)));
  const VectorXd za2 = z.value(1) + rep->generator(1) * z.value(1);
  EXPECT_TRUE(shifted.at(a).isApprox(za2, 1e-15));
}

TEST(CocycleProperties, AveragingIdentitiesOnAnchors) {
  for (auto rep : {fixtures::anchor_a(), fixtures::anchor_b(), fixtures::anchor_c()}) {
    PropertyContext ctx{rep, lazy_uniform<double>(rep->group_ptr()), 23, 100, {}, {}, std::nullopt};
    for (const auto& r : cocycle_properties(ctx, z1_basis(rep))) EXPECT_TRUE(r.passed) << r.name << " " << r.note;
  }
}
