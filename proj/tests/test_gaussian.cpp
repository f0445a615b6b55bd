#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cvvqe/gaussian.hpp"

using namespace cvvqe;

namespace {

GaussianParams random_params(std::mt19937_64& rng, int n, double max_s = 0.8) {
  std::uniform_real_distribution<double> s(-max_s, max_s);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  auto params = GaussianParams::zeros(n);
  for (auto& x : params.squeezings) x = s(rng);
  for (auto& x : params.passive) x = angle(rng);
  return params;
}

std::span<const double> view(const RealVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST(Gaussian, VacuumIsIdentity) {
  const auto v = gaussian_covariance(GaussianParams::zeros(3));
  EXPECT_TRUE(v.matrix().isApprox(RealMatrix::Identity(6, 6)));
  EXPECT_NEAR(purity(v), 1.0, 1e-15);
}

TEST(Gaussian, SqueezerCovariance) {
  const std::vector<double> s{0.5};
  const auto v = covariance_of(squeezer_symplectic(s));
  EXPECT_NEAR(v(0, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(v(1, 1), std::exp(1.0), 1e-14);
  EXPECT_NEAR(v(0, 1), 0.0, 1e-15);
}

TEST(Gaussian, RejectsAsymmetricCovariance) {
  RealMatrix m = RealMatrix::Identity(2, 2);
  m(0, 1) = 0.1;
  EXPECT_THROW(CovarianceMatrix{m}, std::invalid_argument);
}

TEST(Gaussian, RejectsNonSymplectic) {
  RealMatrix m = RealMatrix::Identity(2, 2);
  m(0, 0) = 2.0;
  EXPECT_THROW(SymplecticMatrix{m}, std::invalid_argument);
}

TEST(Gaussian, RandomCircuitsAreSymplectic) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto params = random_params(rng, n);
      const auto s = gaussian_symplectic(params);
      EXPECT_LT(s.symplectic_residual(), 1e-12);
      EXPECT_LT(passive_from_params(view(params.passive)).orthogonality_residual(), 1e-13);
      EXPECT_NEAR(purity(covariance_of(s)), 1.0, 1e-10);
    }
  }
}

TEST(Gaussian, MeshLayoutIsRectangular) {
  EXPECT_EQ(mesh_element_count(4), 6u);
  EXPECT_EQ(mesh_layout(4), (std::vector<int>{0, 2, 1, 0, 2, 1}));
  EXPECT_EQ(mesh_layout(3), (std::vector<int>{0, 1, 0}));
  EXPECT_TRUE(mesh_layout(1).empty());
}

TEST(Gaussian, PassiveUnitaryIsUnitaryAndMatchesRealification) {
  std::mt19937_64 rng(3);
  const auto params = random_params(rng, 3);
  const auto w = passive_unitary(view(params.passive));
  EXPECT_TRUE((w * w.adjoint()).isApprox(ComplexMatrix::Identity(3, 3), 1e-13));
  const auto direct = passive_from_params(view(params.passive));
  const auto realified = passive_from_unitary(w);
  EXPECT_LT((direct.matrix() - realified.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Gaussian, SingleRotationUnitary) {
  // One element with angle pi/2 and no phases swaps the modes: a_1^dag -> a_2^dag.
  const std::vector<double> theta{std::acos(-1.0) / 2.0, 0.0, 0.0, 0.0};
  const auto w = passive_unitary(theta);
  EXPECT_NEAR(std::abs(w(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(w(0, 0)), 0.0, 1e-15);
}

TEST(Gaussian, InverseAndComposition) {
  std::mt19937_64 rng(11);
  const auto a = gaussian_symplectic(random_params(rng, 2));
  const auto b = gaussian_symplectic(random_params(rng, 2));
  EXPECT_TRUE((a * a.inverse()).matrix().isApprox(RealMatrix::Identity(4, 4), 1e-12));
  EXPECT_LT((a * b).symplectic_residual(), 1e-11);
}

TEST(Gaussian, BogoliubovRoundTrip) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 3; ++n) {
    const auto s = gaussian_symplectic(random_params(rng, n));
    const auto map = bogoliubov_of(s);
    EXPECT_LT(map.canonical_residual(), 1e-12);
    EXPECT_LT((symplectic_of(map).matrix() - s.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Gaussian, BogoliubovOfSqueezer) {
  const std::vector<double> s{0.5};
  const auto map = bogoliubov_of(squeezer_symplectic(s));
  EXPECT_NEAR(map.E(0, 0).real(), std::cosh(0.5), 1e-15);
  EXPECT_NEAR(map.F(0, 0).real(), -std::sinh(0.5), 1e-15);
  EXPECT_NEAR(std::abs(map.E(0, 0).imag()) + std::abs(map.F(0, 0).imag()), 0.0, 1e-15);
}

TEST(Gaussian, BogoliubovCompositionMatchesSymplectic) {
  std::mt19937_64 rng(9);
  const auto a = gaussian_symplectic(random_params(rng, 2));
  const auto b = gaussian_symplectic(random_params(rng, 2));
  const auto composed = bogoliubov_of(a) * bogoliubov_of(b);
  const auto direct = bogoliubov_of(a * b);
  EXPECT_LT((composed.E - direct.E).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((composed.F - direct.F).cwiseAbs().maxCoeff(), 1e-12);
  const auto inv = bogoliubov_of(a).inverse();
  const auto id = bogoliubov_of(a) * inv;
  EXPECT_LT((id.E - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(id.F.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gaussian, SqueezingSpectrumIgnoresPassivePart) {
  std::mt19937_64 rng(13);
  auto params = random_params(rng, 3);
  const auto before = squeezing_spectrum(gaussian_covariance(params));
  for (auto& x : params.passive) x += 0.37;
  const auto after = squeezing_spectrum(gaussian_covariance(params));
  ASSERT_EQ(before.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(before[j], after[j], 1e-12);
  std::vector<double> expected;
  for (const double s : params.squeezings) expected.push_back(std::exp(-2.0 * std::abs(s)));
  std::sort(expected.begin(), expected.end());
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(before[j], expected[j], 1e-12);
}

TEST(Gaussian, ImpuritySetsPurity) {
  std::mt19937_64 rng(17);
  const auto v = gaussian_covariance(random_params(rng, 2));
  for (const double p : {1.0, 0.95, 0.5}) {
    EXPECT_NEAR(purity(apply_impurity(v, p)), p, 1e-12);
  }
  EXPECT_THROW(apply_impurity(v, 0.0), std::invalid_argument);
  EXPECT_THROW(apply_impurity(v, 1.5), std::invalid_argument);
}

TEST(Gaussian, SymplecticEigenvaluesOfThermalState) {
  const auto v = apply_impurity(vacuum_covariance(2), 0.25);
  for (const double nu : symplectic_eigenvalues(v)) EXPECT_NEAR(nu, 2.0, 1e-12);
}

TEST(Gaussian, CovarianceTextRoundTrip) {
  std::mt19937_64 rng(19);
  const auto v = gaussian_covariance(random_params(rng, 2));
  std::stringstream buffer;
  write_covariance(buffer, v);
  const auto back = read_covariance(buffer);
  EXPECT_EQ(back.matrix(), v.matrix());
}

TEST(Gaussian, FromFlatChecksLength) {
  const std::vector<double> flat(5, 0.0);
  EXPECT_THROW(GaussianParams::from_flat(flat, 2), std::invalid_argument);
  const std::vector<double> ok{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  EXPECT_EQ(GaussianParams::from_flat(ok, 2).flatten(), ok);
}
