#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cvvqe/fock.hpp"
#include "cvvqe/models.hpp"
#include "cvvqe/wick.hpp"

using namespace cvvqe;

TEST(Fock, SpaceIndexing) {
  const FockSpace space(3, 4);
  EXPECT_EQ(space.dimension(), 125u);
  const std::vector<int> occ{1, 2, 3};
  const auto index = space.index(occ);
  EXPECT_EQ(index, 1u * 25 + 2u * 5 + 3u);
  EXPECT_EQ(space.occupations(index), occ);
  EXPECT_THROW(FockSpace(4, 40), std::invalid_argument);
}

TEST(Fock, LadderActionOnBasisStates) {
  const FockSpace space(2, 5);
  const auto vac = vacuum_state(space);
  EXPECT_EQ(apply_polynomial(LadderPolynomial::op(LadderOp::annihilate(0)), vac).norm(), 0.0);

  const auto one = apply_polynomial(LadderPolynomial::op(LadderOp::create(0)), vac);
  const std::vector<int> occ10{1, 0};
  EXPECT_NEAR(std::abs(one.amplitudes(static_cast<Eigen::Index>(space.index(occ10))) - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(one.norm(), 1.0, 1e-15);

  const std::vector<int> occ21{2, 1};
  const auto state = basis_state(space, occ21);
  const auto n_state = apply_polynomial(LadderPolynomial::number(0), state);
  EXPECT_LT((n_state.amplitudes - 2.0 * state.amplitudes).norm(), 1e-15);
}

TEST(Fock, CreationAtCutoffCountsAsLeakage) {
  const FockSpace space(1, 3);
  const std::vector<int> top{3};
  const auto out = apply_polynomial(LadderPolynomial::op(LadderOp::create(0)), basis_state(space, top));
  EXPECT_EQ(out.norm(), 0.0);
  EXPECT_GT(out.leakage, 0.0);
}

TEST(Fock, ExpectationBasics) {
  const FockSpace space(1, 4);
  EXPECT_EQ(expectation_fock(LadderPolynomial::number(0), vacuum_state(space)), Complex(0.0));
  const std::vector<int> one{1};
  EXPECT_EQ(expectation_fock(LadderPolynomial::number(0), basis_state(space, one)), Complex(1.0));
  FockVector zero = vacuum_state(space);
  zero.amplitudes.setZero();
  EXPECT_THROW(expectation_fock(LadderPolynomial::number(0), zero), std::domain_error);
}

TEST(Fock, SparseActionMatchesDenseMatrix) {
  const FockSpace space(2, 6);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  FockVector v = vacuum_state(space);
  for (Eigen::Index i = 0; i < v.amplitudes.size(); ++i) v.amplitudes(i) = Complex(normal(rng), normal(rng));
  v.amplitudes.normalize();

  const std::vector<LadderOp> ops{LadderOp::create(0), LadderOp::annihilate(1), LadderOp::create(1),
                                  LadderOp::annihilate(0)};
  const auto poly = LadderPolynomial::product(ops, Complex(0.5, -0.25)) + LadderPolynomial::number(1);
  const Eigen::MatrixXcd dense = polynomial_matrix(poly, space);
  const Complex direct = v.amplitudes.dot(dense * v.amplitudes);
  EXPECT_NEAR(std::abs(direct - expectation_fock(poly, v)), 0.0, 1e-12);

  // dense single-mode matrices
  const auto am = annihilation_matrix(6);
  EXPECT_NEAR(am(2, 3), std::sqrt(3.0), 1e-15);
}

TEST(Fock, VacuumForZeroParams) {
  const FockSpace space(2, 10);
  const auto state = gaussian_state_fock(GaussianParams::zeros(2), space);
  EXPECT_NEAR(std::abs(state.amplitudes(0) - Complex(1.0)), 0.0, 1e-14);
  EXPECT_NEAR(state.amplitudes.norm(), 1.0, 1e-14);
}

TEST(Fock, SqueezedVacuumSeries) {
  // c_{2n} = (-tanh s)^n sqrt((2n)!) / (2^n n! sqrt(cosh s)) for exp[(s/2)(a^2 - a^dag^2)]
  const double s = 0.5;
  const std::vector<double> flat{s, 0.0};
  const FockSpace space(1, 30);
  const auto state = gaussian_state_fock(GaussianParams::from_flat(flat, 1), space);
  for (int n = 0; n <= 15; ++n) {
    const double magnitude = std::exp(0.5 * std::lgamma(2.0 * n + 1) - n * std::log(2.0) - std::lgamma(n + 1.0)) /
                             std::sqrt(std::cosh(s));
    const double expected = std::pow(-std::tanh(s), n) * magnitude;
    EXPECT_NEAR(state.amplitudes(2 * n).real(), expected, 1e-10) << "n = " << n;
    EXPECT_NEAR(state.amplitudes(2 * n + 1).real(), 0.0, 1e-12);
  }
  // frozen dense reference for c_2
  EXPECT_NEAR(state.amplitudes(2).real(), -0.307719176458370, 1e-12);
  EXPECT_NEAR(expectation_fock(LadderPolynomial::number(0), state).real(), std::sinh(s) * std::sinh(s), 1e-9);
}

TEST(Fock, GaussianStateMatchesWick) {
  const std::vector<double> flat{0.3, -0.25, 0.4, 1.2, -0.6, 0.8, 0.1, 0.5, -1.1, 0.3, 0.7, -0.2};
  const auto params = GaussianParams::from_flat(flat, 3);
  const auto state = gaussian_state_fock(params, FockSpace(3, 20));
  const auto v = gaussian_covariance(params);
  const std::vector<LadderOp> ops{LadderOp::create(2), LadderOp::annihilate(0), LadderOp::create(1),
                                  LadderOp::annihilate(1)};
  const auto poly = LadderPolynomial::product(ops);
  EXPECT_NEAR(std::abs(expectation_fock(poly, state) - polynomial_expectation(poly, v)), 0.0, 1e-9);
  EXPECT_LT(state.leakage, 1e-10);
}

TEST(Fock, LeakageGuard) {
  const std::vector<double> flat{1.5, 0.0};
  EXPECT_THROW(gaussian_state_fock(GaussianParams::from_flat(flat, 1), FockSpace(1, 10)), LeakageError);
}

TEST(Fock, EdDiagonalModel) {
  BoseHubbardParams p;
  p.hopping = 0.0;
  for (const int n_max : {2, 4, 8}) EXPECT_NEAR(bh_ground_energy(p, n_max), -2.0, 1e-12);
  BoseHubbardParams zero;
  zero.hopping = zero.interaction = zero.chemical_potential = 0.0;
  EXPECT_NEAR(bh_ground_energy(zero, 5), 0.0, 1e-12);
}

TEST(Fock, EdFrozenValues) {
  // Dense numpy diagonalization (tests/oracles/frozen_values.py).
  const BoseHubbardParams p;
  EXPECT_NEAR(bh_ground_energy(p, 4), -5.274917217635376, 1e-10);
  EXPECT_NEAR(bh_ground_energy(p, 8), -5.360927271798864, 1e-10);
  BoseHubbardParams weak;
  weak.interaction = 0.1;
  EXPECT_NEAR(bh_ground_energy(weak, 4), -10.249234634103576, 1e-10);
  BoseHubbardParams three;
  three.n_sites = 3;
  three.interaction = 2.0;
  three.chemical_potential = 0.5;
  EXPECT_NEAR(bh_ground_energy(three, 5), -4.271859056193660, 1e-10);
}

TEST(Fock, EdCutoffMonotone) {
  const BoseHubbardParams p;
  const double e4 = bh_ground_energy(p, 4);
  const double e8 = bh_ground_energy(p, 8);
  const double e12 = bh_ground_energy(p, 12);
  EXPECT_GE(e4 - e8, -1e-12);
  EXPECT_GE(e8 - e12, -1e-12);
}

TEST(Fock, DenseAndLanczosAgree) {
  BoseHubbardParams p;
  p.n_sites = 3;
  EdOptions dense;
  dense.solver = EdSolver::dense;
  EdOptions lanczos;
  lanczos.solver = EdSolver::lanczos;
  EXPECT_NEAR(bh_ground_energy(p, 7, dense), bh_ground_energy(p, 7, lanczos), 1e-8);
}

TEST(Fock, DirectMatrixMatchesPolynomialAndIsHermitian) {
  BoseHubbardParams p;
  p.n_sites = 3;
  p.boundary = Boundary::periodic;
  p.hopping = 0.7;
  const auto direct = bose_hubbard_matrix(p, 4);
  const Eigen::MatrixXcd poly = polynomial_matrix(bose_hubbard_polynomial(p), FockSpace(3, 4));
  EXPECT_LT((Eigen::MatrixXcd(direct.cast<Complex>()) - poly).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(hermiticity_residual(direct), 1e-12);
}
