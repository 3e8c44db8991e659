#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ergolab/lie.hpp"
#include "oracles.hpp"

using namespace ergolab;

namespace {

double frob(const Mat& a) { return a.norm(); }

ChamberVector cv(std::initializer_list<double> h) {
  std::vector<double> v(h);
  return ChamberVector(static_cast<int>(v.size()), v);
}

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));

}  // namespace

TEST(MatrixElement, RejectsBadInput) {
  EXPECT_THROW(MatrixElement(2, {2, 0, 0, 1}), ValidationError);
  EXPECT_THROW(MatrixElement(Mat::Identity(2, 3)), ValidationError);
  EXPECT_THROW(MatrixElement(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}), UnsupportedDimension);
  EXPECT_THROW(MatrixElement(Mat::Identity(1, 1)), UnsupportedDimension);
  EXPECT_NO_THROW(MatrixElement(2, {1, 1, 0, 1}));
}

TEST(ChamberVector, TraceAndChamberFlags) {
  EXPECT_THROW(cv({1.0, 0.5}), ValidationError);
  EXPECT_TRUE(cv({0.5, -0.5}).in_closed_chamber());
  EXPECT_FALSE(cv({-0.5, 0.5}).in_closed_chamber());
  EXPECT_TRUE(ChamberVector::zero(3).in_closed_chamber());
}

TEST(Iwasawa, Examples) {
  const auto id = iwasawa(MatrixElement::identity(2));
  EXPECT_LT(frob(id.k - Mat::Identity(2, 2)), 1e-15);
  EXPECT_EQ(id.hI[0], 0.0);
  EXPECT_LT(frob(id.nfac - Mat::Identity(2, 2)), 1e-15);

  const MatrixElement u(2, {1, 1, 0, 1});
  const auto fu = iwasawa(u);
  EXPECT_LT(frob(fu.k - Mat::Identity(2, 2)), 1e-15);
  EXPECT_NEAR(fu.hI[0], 0.0, 1e-15);
  EXPECT_LT(frob(fu.nfac - u.mat()), 1e-15);

  const auto fa = iwasawa(MatrixElement(2, {2, 0, 0, 0.5}));
  EXPECT_NEAR(fa.hI[0], std::log(2.0), 1e-15);
  EXPECT_NEAR(fa.hI[1], -std::log(2.0), 1e-15);
  EXPECT_LT(frob(fa.nfac - Mat::Identity(2, 2)), 1e-15);
}

TEST(Iwasawa, RoundTripAndFactorConstraints) {
  std::mt19937_64 rng(11);
  for (int n : {2, 3})
    for (int trial = 0; trial < (n == 2 ? 1000 : 200); ++trial) {
      const auto g = random_element(n, 4.0, rng);
      const auto f = iwasawa(g);
      EXPECT_LT(frob(f.k * f.hI.exp().mat() * f.nfac - g.mat()), 1e-9);
      EXPECT_LT(orthogonality_defect(f.k), 1e-10);
      EXPECT_NEAR(f.k.determinant(), 1.0, 1e-10);
      for (int i = 0; i < n; ++i) {
        EXPECT_EQ(f.nfac(i, i), 1.0);
        for (int j = 0; j < i; ++j) EXPECT_EQ(f.nfac(i, j), 0.0);
      }
    }
}

TEST(Iwasawa, AdditiveOnDiagonals) {
  std::mt19937_64 rng(12);
  for (int n : {2, 3})
    for (int trial = 0; trial < 100; ++trial) {
      const auto h1 = random_chamber_vector(n, 3.0, rng), h2 = random_chamber_vector(n, 3.0, rng);
      const auto f = iwasawa(h1.exp() * h2.exp());
      for (int i = 0; i < n; ++i) EXPECT_NEAR(f.hI[i], h1[i] + h2[i], 1e-12);
    }
}

TEST(Iwasawa, RankDeficientInputFails) {
  Mat m(2, 2);
  m << 0.0, 1.0, 0.0, 1.0;
  Mat q, r;
  EXPECT_FALSE(detail::orthonormalize(m, q, r));
}

TEST(Cartan, Examples) {
  const double e = std::exp(1.0);
  const auto fd = cartan(MatrixElement(2, {e, 0, 0, 1 / e}));
  EXPECT_NEAR(fd.H[0], 1.0, 1e-14);
  EXPECT_NEAR(fd.H[1], -1.0, 1e-14);
  EXPECT_TRUE(fd.regular);
  // k1, k2 are the identity up to M = {+-I}
  EXPECT_NEAR(std::abs(fd.k1(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(fd.k2(0, 0)), 1.0, 1e-14);

  const auto fr = cartan(MatrixElement(rotation2(std::numbers::pi / 3)));
  EXPECT_NEAR(fr.H[0], 0.0, 1e-14);
  EXPECT_FALSE(fr.regular);

  const auto ev = oracle::eig2_sym(2, 1, 1);
  const auto fu = cartan(MatrixElement(2, {1, 1, 0, 1}));
  EXPECT_NEAR(fu.H[0], 0.5 * std::log(ev[0]), 1e-14);
  EXPECT_NEAR(fu.H[0], std::log(kGolden), 1e-14);
  EXPECT_NEAR(fu.H[0], 0.4812118250596034, 1e-14);
}

TEST(Cartan, RoundTripSortedAndSpecialOrthogonal) {
  std::mt19937_64 rng(13);
  for (int n : {2, 3})
    for (int trial = 0; trial < (n == 2 ? 1000 : 200); ++trial) {
      const auto g = random_element(n, 4.0, rng);
      const auto f = cartan(g);
      EXPECT_LT(frob(f.k1 * f.H.exp().mat() * f.k2 - g.mat()), 1e-9);
      EXPECT_LT(orthogonality_defect(f.k1), 1e-10);
      EXPECT_LT(orthogonality_defect(f.k2), 1e-10);
      EXPECT_NEAR(f.k1.determinant(), 1.0, 1e-10);
      EXPECT_NEAR(f.k2.determinant(), 1.0, 1e-10);
      EXPECT_TRUE(f.H.in_closed_chamber());
    }
}

TEST(Cartan, InverseIsOpposition) {
  std::mt19937_64 rng(14);
  for (int n : {2, 3}) {
    const auto rs = root_data(n);
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = random_element(n, 4.0, rng);
      const auto a = cartan(g.inverse()).H;
      const auto b = opposition_apply(rs, cartan(g).H);
      for (int i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
    }
  }
}

TEST(Cartan, LengthIsBiInvariant) {
  std::mt19937_64 rng(15);
  for (int n : {2, 3}) {
    const auto rs = root_data(n);
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = random_element(n, 4.0, rng);
      const MatrixElement k(random_rotation(n, rng)), l(random_rotation(n, rng));
      EXPECT_NEAR(length_of(rs, k * g * l), length_of(rs, g), 1e-9);
    }
  }
}

TEST(RootData, SL2) {
  const auto rs = root_data(2);
  EXPECT_EQ(rs.rho[0], 0.5);
  EXPECT_EQ(rs.rho[1], -0.5);
  EXPECT_NEAR(rs.delta, 1.0, 1e-12);
  EXPECT_NEAR(length_of(rs, rs.h_max), 1.0, 1e-12);
  EXPECT_TRUE(rs.h_max.in_closed_chamber());
  EXPECT_NEAR(rs.m0.determinant(), 1.0, 0.0);
}

TEST(RootData, SL3) {
  const auto rs = root_data(3);
  EXPECT_EQ(rs.rho[0], 1.0);
  EXPECT_EQ(rs.rho[1], 0.0);
  EXPECT_EQ(rs.rho[2], -1.0);
  EXPECT_EQ(rs.positive_roots.size(), 3u);
  EXPECT_NEAR(rs.delta, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(rs.delta, oracle::delta_grid_sl3(1.0), 1e-8);
  EXPECT_NEAR(length_of(rs, rs.h_max), 1.0, 1e-12);
  EXPECT_NEAR(rs.m0.determinant(), 1.0, 1e-15);
  EXPECT_LT(orthogonality_defect(rs.m0), 1e-15);
}

TEST(RootData, DeltaFollowsScale) {
  for (double c : {0.5, 1.0, 3.0}) {
    const auto rs = root_data(3, c);
    EXPECT_NEAR(rs.delta, oracle::delta_grid_sl3(c), 1e-8);
    EXPECT_NEAR(rs.delta, 2.0 * rho_of(rs, rs.h_max), 1e-12);
  }
  EXPECT_THROW(root_data(2, -1.0), ValidationError);
  EXPECT_THROW(root_data(4), UnsupportedDimension);
}

TEST(RootData, M0ReversesTheChamber) {
  std::mt19937_64 rng(16);
  for (int n : {2, 3}) {
    const auto rs = root_data(n);
    for (int trial = 0; trial < 50; ++trial) {
      auto h = cartan(random_element(n, 3.0, rng)).H;
      const Mat d = rs.m0 * h.exp().mat() * rs.m0.transpose();
      for (int i = 0; i + 1 < n; ++i) EXPECT_LE(d(i, i), d(i + 1, i + 1) * (1 + 1e-12));
    }
  }
}

TEST(RootData, RhoAndLength) {
  const auto r2 = root_data(2), r3 = root_data(3);
  EXPECT_EQ(rho_of(r2, ChamberVector::zero(2)), 0.0);
  EXPECT_NEAR(rho_of(r2, cv({0.75, -0.75})), 0.75, 1e-15);
  EXPECT_NEAR(rho_of(r3, cv({1, 0, -1})), 2.0, 1e-15);
  EXPECT_EQ(length_of(r2, ChamberVector::zero(2)), 0.0);
  EXPECT_NEAR(length_of(r2, cv({1.5, -1.5})), 3.0, 1e-15);
  EXPECT_NEAR(length_of(r2, MatrixElement(2, {1, 1, 0, 1})), 2.0 * std::log(kGolden), 1e-14);
  EXPECT_NEAR(length_of(r2, MatrixElement(2, {1, 1, 0, 1})), 0.9624236501192069, 1e-14);
}

TEST(ChamberAngle, Examples) {
  const auto r2 = root_data(2), r3 = root_data(3);
  EXPECT_THROW(chamber_angle(r2, ChamberVector::zero(2)), ZeroVector);
  EXPECT_EQ(chamber_angle(r2, r2.h_max), 0.0);
  EXPECT_EQ(chamber_angle(r2, cv({0.01, -0.01})), 0.0);
  const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
  EXPECT_NEAR(chamber_angle(r3, cv({1 / s2, 0, -1 / s2})), 0.0, 1e-15);
  EXPECT_NEAR(chamber_angle(r3, r3.h_max), 0.0, 1e-15);
  EXPECT_NEAR(chamber_angle(r3, cv({2 / s6, -1 / s6, -1 / s6})), oracle::dot_angle({2, -1, -1}, {1, 0, -1}), 1e-14);
  EXPECT_NEAR(chamber_angle(r3, cv({2 / s6, -1 / s6, -1 / s6})), std::numbers::pi / 6, 1e-14);
}

TEST(ChamberAngle, MatchesDotProductOracle) {
  std::mt19937_64 rng(17);
  const auto rs = root_data(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = random_chamber_vector(3, 5.0, rng);
    if (length_of(rs, h) < 1e-6) continue;
    EXPECT_NEAR(chamber_angle(rs, h), oracle::dot_angle({h[0], h[1], h[2]}, {1, 0, -1}), 1e-7);
  }
}

TEST(CartanJacobian, Examples) {
  const auto r2 = root_data(2), r3 = root_data(3);
  EXPECT_EQ(cartan_jacobian(r2, ChamberVector::zero(2)), 0.0);
  EXPECT_NEAR(cartan_jacobian(r2, cv({1.25, -1.25})), std::sinh(2.5), 1e-14);
  EXPECT_NEAR(cartan_jacobian(r3, cv({1, 0, -1})), std::sinh(1.0) * std::sinh(2.0) * std::sinh(1.0), 1e-13);
  EXPECT_EQ(cartan_jacobian(r3, cv({1, 1, -2})), 0.0);
}

TEST(CartanJacobian, NonNegativeOnChamber) {
  std::mt19937_64 rng(18);
  const auto rs = root_data(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto h = cartan(random_element(3, 4.0, rng)).H;
    EXPECT_GE(cartan_jacobian(rs, h), 0.0);
  }
}

TEST(Opposition, Examples) {
  const auto r2 = root_data(2), r3 = root_data(3);
  const auto z = opposition_apply(r3, ChamberVector::zero(3));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(z[i], 0.0);
  const auto a = opposition_apply(r2, cv({0.7, -0.7}));
  EXPECT_NEAR(a[0], 0.7, 1e-15);
  EXPECT_NEAR(a[1], -0.7, 1e-15);
  const auto b = opposition_apply(r3, cv({3, -1, -2}));
  EXPECT_NEAR(b[0], 2, 1e-15);
  EXPECT_NEAR(b[1], 1, 1e-15);
  EXPECT_NEAR(b[2], -3, 1e-15);
  const auto bb = opposition_apply(r3, b);
  EXPECT_NEAR(bb[0], 3, 1e-15);
  EXPECT_TRUE(b.in_closed_chamber());
}
