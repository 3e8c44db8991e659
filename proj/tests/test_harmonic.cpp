#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ergolab/harmonic.hpp"
#include "oracles.hpp"

using namespace ergolab;

namespace {

constexpr double kPi = std::numbers::pi;

MatrixElement element_of_length(int n, double L, std::mt19937_64& rng) {
  const auto rs = root_data(n);
  const ChamberVector h = random_chamber_vector(n, 1.0, rng);
  const double len = length_of(rs, h);
  return MatrixElement(Mat(random_rotation(n, rng) * h.scaled(L / len).exp().mat() * random_rotation(n, rng)));
}

}  // namespace

TEST(InnerProduct, Examples) {
  const auto q = circle_rule(1024);
  const auto one = functions::one(), e1 = functions::fourier(1), e2 = functions::fourier(2);
  EXPECT_NEAR(std::abs(inner_product(q, one, one) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(inner_product(q, e1, e1) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(inner_product(q, e1, e2)), 0.0, 1e-14);
  EXPECT_NEAR(inner_product(q, functions::arc(0, kPi / 2), one).real(), 0.5, 1.0 / 1024);
  const auto a = inner_product(q, e1, functions::cos2()), b = inner_product(q, functions::cos2(), e1);
  EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-15);
}

TEST(HarishChandra, IdentityIsOne) {
  for (int n : {2, 3}) {
    const auto rs = root_data(n);
    EXPECT_NEAR(harish_chandra(rs, default_quadrature(n), MatrixElement::identity(n)), 1.0, 1e-12);
  }
}

TEST(HarishChandra, MatchesLegendreOracle) {
  const auto rs = root_data(2);
  const double e = std::exp(1.0);
  const double xi = harish_chandra(rs, circle_rule(1024), MatrixElement(2, {e, 0, 0, 1 / e}));
  // L(diag(e, 1/e)) = 2 under the default normalization
  EXPECT_NEAR(xi, oracle::legendre_half_trapezoid(2.0), 1e-8);
  EXPECT_NEAR(oracle::legendre_half_trapezoid(2.0), oracle::legendre_half_elliptic(2.0), 1e-12);
}

TEST(HarishChandra, SymmetriesAndRange) {
  std::mt19937_64 rng(31);
  const auto rs = root_data(2);
  const auto q = circle_rule(1024);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = element_of_length(2, 4.0 * (trial + 1) / 50.0, rng);
    const double xi = harish_chandra(rs, q, g);
    EXPECT_GT(xi, 0.0);
    EXPECT_LE(xi, 1.0 + 1e-12);
    EXPECT_NEAR(harish_chandra(rs, q, g.inverse()), xi, 1e-8);
    const MatrixElement k(random_rotation(2, rng)), l(random_rotation(2, rng));
    EXPECT_NEAR(harish_chandra(rs, q, k * g * l), xi, 1e-8);
    EXPECT_NEAR(xi, oracle::legendre_half_elliptic(length_of(rs, g)), 1e-8);
  }
}

TEST(HarishChandra, QuadratureConverges) {
  std::mt19937_64 rng(32);
  const auto rs = root_data(2);
  const auto q1 = circle_rule(1024), q2 = circle_rule(2048);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = element_of_length(2, 4.0, rng);
    EXPECT_LT(std::abs(harish_chandra(rs, q1, g) - harish_chandra(rs, q2, g)), 1e-8);
  }
}

TEST(HarishChandra, SL3BiInvariance) {
  std::mt19937_64 rng(33);
  const auto rs = root_data(3);
  const auto q = euler_rule(48, 48, 48);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = element_of_length(3, 1.0, rng);
    const double xi = harish_chandra(rs, q, g);
    EXPECT_GT(xi, 0.0);
    EXPECT_LT(xi, 1.0);
    const MatrixElement k(random_rotation(3, rng)), l(random_rotation(3, rng));
    EXPECT_NEAR(harish_chandra(rs, q, k * g * l), xi, 1e-6);
    EXPECT_NEAR(harish_chandra(rs, q, g.inverse()), xi, 1e-6);
  }
}

TEST(HarishChandra, LiftChoiceIsImmaterial) {
  std::mt19937_64 rng(34);
  for (int n : {2, 3}) {
    const auto rs = root_data(n);
    const auto q = default_quadrature(n, n == 2 ? 256 : 8);
    auto shuffled = q;
    std::uniform_int_distribution<int> pick(0, 3);
    for (auto& k : shuffled.lifts) {
      const int s = pick(rng);
      if (n == 2) {
        if (s % 2) k = Mat(-k);
      } else if (s > 0) {
        k.col(s - 1) *= -1.0;
        k.col(s % 3) *= -1.0;
      }
    }
    const auto g = element_of_length(n, 1.5, rng);
    EXPECT_NEAR(harish_chandra(rs, q, g), harish_chandra(rs, shuffled, g), 1e-12);
    const auto phi = functions::cos2();
    EXPECT_NEAR(std::abs(matrix_coefficient(rs, q, g, phi, phi) - matrix_coefficient(rs, shuffled, g, phi, phi)), 0.0,
                1e-12);
  }
}

TEST(HarishChandra, DimensionMismatch) {
  EXPECT_THROW(harish_chandra(root_data(2), circle_rule(16), MatrixElement::identity(3)), DimensionMismatch);
}

TEST(MatrixCoefficient, Examples) {
  std::mt19937_64 rng(35);
  const auto rs = root_data(2);
  const auto q = circle_rule(1024);
  const auto one = functions::one(), e1 = functions::fourier(1), c2 = functions::cos2();
  EXPECT_NEAR(std::abs(matrix_coefficient(rs, q, MatrixElement::identity(2), e1, c2) - inner_product(q, e1, c2)), 0.0,
              1e-15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = element_of_length(2, 4.0 * rng() / rng.max(), rng);
    EXPECT_NEAR(matrix_coefficient(rs, q, g, one, one).real(), harish_chandra(rs, q, g), 1e-15);
    EXPECT_LE(std::abs(matrix_coefficient(rs, q, g, e1, c2)),
              std::sqrt(inner_product(q, e1, e1).real() * inner_product(q, c2, c2).real()) + 1e-12);
  }
}

TEST(MatrixCoefficient, BatchAgreesWithSingle) {
  std::mt19937_64 rng(36);
  const auto rs = root_data(2);
  const auto q = circle_rule(512);
  const std::vector<BoundaryFunction> phis{functions::one(), functions::fourier(1)};
  const std::vector<BoundaryFunction> psis{functions::cos2(), functions::fourier(1), functions::arc(0, 1)};
  const CoefficientBatch batch(rs, q, phis, psis);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = element_of_length(2, 3.0, rng);
    const auto r = batch(g.mat());
    EXPECT_EQ(r.xi, harish_chandra(rs, q, g));
    for (std::size_t a = 0; a < phis.size(); ++a)
      for (std::size_t b = 0; b < psis.size(); ++b)
        EXPECT_NEAR(std::abs(r.coef[a * psis.size() + b] - matrix_coefficient(rs, q, g, phis[a], psis[b])), 0.0,
                    1e-14);
  }
}

TEST(Unitarity, NormIsPreserved) {
  std::mt19937_64 rng(37);
  const auto rs = root_data(2);
  const auto q = circle_rule(1024);
  const BoundaryFunction fs[] = {functions::fourier(1), functions::fourier(3), functions::cos2(),
                                 parse_function("one+fourier:2")};
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = element_of_length(2, 4.0 * rng() / rng.max(), rng);
    const auto& phi = fs[trial % 4];
    double norm2 = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) norm2 += q.weights[j] * std::norm(pi_eval(g, phi, q.nodes[j]));
    EXPECT_NEAR(norm2, inner_product(q, phi, phi).real(), 1e-6);
  }
}

TEST(PoissonP0, Examples) {
  std::mt19937_64 rng(38);
  const auto rs = root_data(2);
  const auto q = circle_rule(1024);
  const auto arc = functions::arc(0.2, 1.4);
  EXPECT_NEAR(std::abs(poisson_p0(rs, q, arc, MatrixElement::identity(2)) - inner_product(q, arc, functions::one())),
              0.0, 1e-15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = element_of_length(2, 5.0 * rng() / rng.max(), rng);
    EXPECT_NEAR(std::abs(poisson_p0(rs, q, functions::one(), g) - 1.0), 0.0, 1e-14);
  }
}

TEST(PeakDecay, EdgeCases) {
  const auto rs = root_data(2);
  const auto q = circle_rule(1024);
  const std::vector<double> s{0.5, 1.0, 2.0};
  for (const auto& [t, v] : peak_decay_profile(rs, q, kPi, s)) EXPECT_EQ(v, 0.0);
  const std::vector<double> tiny{1e-9};
  const double value = peak_decay_profile(rs, q, 0.5, tiny)[0].second;
  // nu{d(., eM) >= r} = 1 - 2r/pi on the grid
  EXPECT_NEAR(value, 1.0 - 2.0 * 0.5 / kPi, 2.0 / 1024);
  EXPECT_THROW(peak_decay_profile(rs, q, 0.0, s), ValidationError);
  const std::vector<double> bad{2.0, 1.0};
  EXPECT_THROW(peak_decay_profile(rs, q, 0.5, bad), ValidationError);
}

TEST(PeakDecay, DecreasesAlongTheFlow) {
  const auto rs = root_data(2);
  const auto q = circle_rule(1024);
  const std::vector<double> s{0.5, 1, 2, 3, 4};
  const auto p = peak_decay_profile(rs, q, 0.5, s);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) EXPECT_LT(p[i + 1].second, p[i].second);
  for (const auto& [t, v] : p) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Stability, SmallNeighborhoodGivesBoundedConstant) {
  std::mt19937_64 rng(39);
  const auto rs = root_data(2);
  const auto q = circle_rule(1024);
  std::vector<MatrixElement> vs, gs;
  for (int i = 0; i < 100; ++i) vs.push_back(element_of_length(2, 0.1 * rng() / rng.max(), rng));
  for (int i = 0; i < 10; ++i) gs.push_back(element_of_length(2, 6.0 * (i + 1) / 10, rng));
  const double c0 = stability_constant(rs, q, vs, gs);
  EXPECT_GT(c0, 0.0);
  EXPECT_LT(c0, 1.0);
  // |log Xi(vg) - log Xi(g)| <= L(v) * (1/2 + small) in rank one
  EXPECT_LT(c0, 0.1);
}
