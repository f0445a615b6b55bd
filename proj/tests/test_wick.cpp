#include <cmath>

#include <gtest/gtest.h>

#include "cvvqe/wick.hpp"

using namespace cvvqe;

namespace {

CovarianceMatrix squeezed(double s) {
  const std::vector<double> flat{s, 0.0};
  return gaussian_covariance(GaussianParams::from_flat(flat, 1));
}

LadderMonomial monomial(std::vector<LadderOp> ops) { return {Complex(1.0), std::move(ops)}; }

const LadderOp ad = LadderOp::create(0);
const LadderOp a = LadderOp::annihilate(0);

}  // namespace

TEST(Wick, MatchingCounts) {
  EXPECT_EQ(perfect_matching_count(0), 1u);
  EXPECT_EQ(perfect_matching_count(2), 1u);
  EXPECT_EQ(perfect_matching_count(4), 3u);
  EXPECT_EQ(perfect_matching_count(6), 15u);
  EXPECT_EQ(perfect_matching_count(8), 105u);
  EXPECT_EQ(perfect_matching_count(5), 0u);

  const ContractionTable table(squeezed(0.3));
  for (std::size_t length = 2; length <= 10; length += 2) {
    const auto sum = sum_matchings(monomial(std::vector<LadderOp>(length, ad)), table);
    EXPECT_EQ(sum.matchings_evaluated, perfect_matching_count(length));
  }
  for (std::size_t length = 1; length <= 9; length += 2) {
    const auto sum = sum_matchings(monomial(std::vector<LadderOp>(length, a)), table);
    EXPECT_EQ(sum.matchings_evaluated, 0u);
    EXPECT_EQ(sum.value, Complex(0.0));
  }
}

TEST(Wick, VisitorSeesEveryMatching) {
  const ContractionTable table(squeezed(0.3));
  std::size_t seen = 0;
  Complex total{0.0, 0.0};
  const auto sum = sum_matchings(monomial({ad, a, ad, a}), table,
                                 [&](const std::vector<std::pair<std::size_t, std::size_t>>& pairs, Complex value) {
                                   EXPECT_EQ(pairs.size(), 2u);
                                   for (const auto& [i, j] : pairs) EXPECT_LT(i, j);
                                   ++seen;
                                   total += value;
                                 });
  EXPECT_EQ(seen, 3u);
  EXPECT_NEAR(std::abs(total - sum.value), 0.0, 1e-15);
}

TEST(Wick, VacuumContractions) {
  const auto v = vacuum_covariance(2);
  EXPECT_EQ(pair_expectation(a, ad, v), Complex(1.0));
  EXPECT_EQ(pair_expectation(ad, a, v), Complex(0.0));
  EXPECT_EQ(pair_expectation(ad, ad, v), Complex(0.0));
  EXPECT_EQ(pair_expectation(LadderOp::annihilate(0), LadderOp::create(1), v), Complex(0.0));
}

TEST(Wick, SqueezedVacuumMoments) {
  for (const double s : {0.1, 0.5, 1.0}) {
    const auto v = squeezed(s);
    const double nu = std::sinh(s) * std::sinh(s);
    EXPECT_NEAR(gaussian_expectation(monomial({ad, a}), v).real(), nu, 1e-12);
    // <a a> = -cosh s sinh s for exp[(s/2)(a^2 - a^dag^2)]
    EXPECT_NEAR(gaussian_expectation(monomial({a, a}), v).real(), -std::cosh(s) * std::sinh(s), 1e-12);
  }
}

TEST(Wick, FourthMomentFrozen) {
  // Dense-matrix reference (tests/oracles/frozen_values.py): 0.492742749341117
  const auto v = squeezed(0.5);
  EXPECT_NEAR(gaussian_expectation(monomial({ad, ad, a, a}), v).real(), 0.492742749341117, 1e-12);
}

TEST(Wick, SubtractedSqueezedVacuum) {
  for (const double s : {0.1, 0.5, 1.0}) {
    const double nu = std::sinh(s) * std::sinh(s);
    const auto value = nongaussian_expectation(LadderPolynomial::number(0), LadderPolynomial::op(a), squeezed(s));
    EXPECT_NEAR(value.real(), 1.0 + 3.0 * nu, 1e-10);
    EXPECT_NEAR(value.imag(), 0.0, 1e-12);
  }
  // frozen reference at s = 0.5
  EXPECT_NEAR(nongaussian_expectation(LadderPolynomial::number(0), LadderPolynomial::op(a), squeezed(0.5)).real(),
              1.814620952222866, 1e-12);
}

TEST(Wick, SubtractionFromVacuumAnnihilates) {
  EXPECT_THROW(nongaussian_expectation(LadderPolynomial::number(0), LadderPolynomial::op(a), vacuum_covariance(1)),
               AnnihilatedPreparation);
}

TEST(Wick, EmptyPrepIsIdentity) {
  const auto v = squeezed(0.4);
  const auto n = LadderPolynomial::number(0);
  EXPECT_EQ(nongaussian_expectation(n, LadderPolynomial{}, v), polynomial_expectation(n, v));
  EXPECT_NEAR(std::abs(nongaussian_expectation(n, LadderPolynomial::identity(), v) - polynomial_expectation(n, v)),
              0.0, 1e-15);
}

TEST(Wick, CrossModeNormalOrderedContraction) {
  // a_j a_k^dag = delta_jk + a_k^dag a_j, so <a_1 a_2^dag> = <a_2^dag a_1>.
  const std::vector<double> flat{0.3, -0.5, 0.8, 0.4, 0.2, -0.7};
  const auto v = gaussian_covariance(GaussianParams::from_flat(flat, 2));
  const auto lhs = pair_expectation(LadderOp::annihilate(0), LadderOp::create(1), v);
  const auto rhs = pair_expectation(LadderOp::create(1), LadderOp::annihilate(0), v);
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-15);
  EXPECT_GT(std::abs(lhs), 1e-3);
}

TEST(Wick, FaultFlipsNumberSign) {
  const auto v = squeezed(0.5);
  const ContractionTable bad(v, ContractionFault::flip_normal_order_sign);
  const ContractionTable good(v);
  EXPECT_NEAR(polynomial_expectation(LadderPolynomial::number(0), bad).real(),
              -polynomial_expectation(LadderPolynomial::number(0), good).real(), 1e-15);
}
