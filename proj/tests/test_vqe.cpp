#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cvvqe/fock.hpp"
#include "cvvqe/models.hpp"
#include "cvvqe/vqe.hpp"
#include "cvvqe/wick.hpp"

using namespace cvvqe;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, std::size_t count, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> x(count);
  for (auto& v : x) v = normal(rng);
  return x;
}

double fock_energy(std::span<const double> params, const AnsatzConfig& ansatz, const LadderPolynomial& h,
                   int n_max) {
  const std::size_t per_layer = ansatz.parameters_per_layer();
  auto state = vacuum_state(FockSpace(ansatz.n_modes, n_max));
  for (int k = 0; k < ansatz.layers; ++k) {
    const auto block = params.subspan(static_cast<std::size_t>(k) * per_layer, per_layer);
    state = apply_polynomial(ansatz.prep, apply_gaussian(GaussianParams::from_flat(block, ansatz.n_modes), state));
  }
  return expectation_fock(h, state).real();
}

}  // namespace

TEST(Vqe, VacuumEnergyWithoutPrep) {
  BoseHubbardParams p;
  p.hopping = p.interaction = 0.0;
  AnsatzConfig ansatz;
  const std::vector<double> zeros(ansatz.parameter_count(), 0.0);
  EXPECT_EQ(energy(zeros, ansatz, bose_hubbard_polynomial(p)), 0.0);
}

TEST(Vqe, IdentityAnsatzEqualsGaussianExpectation) {
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  AnsatzConfig ansatz;
  const std::vector<double> zeros(ansatz.parameter_count(), 0.0);
  EXPECT_EQ(energy(zeros, ansatz, h), polynomial_expectation(h, vacuum_covariance(2)).real());
}

TEST(Vqe, SubtractionFromVacuumFails) {
  const auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  const std::vector<double> zeros(ansatz.parameter_count(), 0.0);
  EXPECT_THROW(energy(zeros, ansatz, bose_hubbard_polynomial(BoseHubbardParams{})), AnnihilatedPreparation);
}

TEST(Vqe, FrozenSubtractedEnergy) {
  // Dense-matrix reference (tests/oracles/frozen_values.py).
  const auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  const std::vector<double> params{0.31, -0.22, 0.7, 1.1, -0.4, 0.25};
  EXPECT_NEAR(energy(params, ansatz, bose_hubbard_polynomial(BoseHubbardParams{})), -1.813031215509, 1e-10);
}

TEST(Vqe, EnergyMatchesFockOracle) {
  std::mt19937_64 rng(21);
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  const auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_point(rng, ansatz.parameter_count(), 0.3);
    const double wick = energy(x, ansatz, h);
    const double fock = fock_energy(x, ansatz, h, 30);
    EXPECT_NEAR(wick, fock, 1e-6 * std::abs(fock));
  }
}

TEST(Vqe, TwoLayerEnergyMatchesLayeredFock) {
  std::mt19937_64 rng(22);
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  ansatz.layers = 2;
  for (int trial = 0; trial < 3; ++trial) {
    const auto x = random_point(rng, ansatz.parameter_count(), 0.3);
    EXPECT_NEAR(energy(x, ansatz, h), fock_energy(x, ansatz, h, 100), 1e-6);
  }
}

TEST(Vqe, CentralGradientOnQuadratic) {
  const auto f = [](std::span<const double> x) { return 3.0 * x[0] * x[0] - 2.0 * x[0] * x[1] + x[1]; };
  const std::vector<double> x{0.7, -1.3};
  const auto g = central_gradient(f, x, 1e-5);
  EXPECT_NEAR(g(0), 6.0 * 0.7 + 2.6, 1e-8);
  EXPECT_NEAR(g(1), -1.4 + 1.0, 1e-8);
  const auto bad = [](std::span<const double> p) { return p[0] > 0 ? std::nan("") : 0.0; };
  EXPECT_THROW(central_gradient(bad, std::vector<double>{0.0}, 1e-3), std::domain_error);
}

TEST(Vqe, GradientStepHalvingConsistency) {
  std::mt19937_64 rng(23);
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  const auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  const auto x = random_point(rng, ansatz.parameter_count(), 0.3);
  const auto g1 = gradient(x, ansatz, h, 1e-5);
  const auto g2 = gradient(x, ansatz, h, 1e-6);
  EXPECT_LT((g1 - g2).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Vqe, OptimizeIsDeterministicAndVariational) {
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  AnsatzConfig ansatz;
  OptimizerConfig opt;
  opt.restarts = 2;
  opt.rng_seed = 5;
  const auto a = optimize(ansatz, h, opt);
  const auto b = optimize(ansatz, h, opt);
  EXPECT_EQ(a.best_energy, b.best_energy);
  EXPECT_EQ(a.best_params, b.best_params);
  EXPECT_EQ(a.energy_trace, b.energy_trace);
  EXPECT_GE(a.best_energy, bh_ground_energy(BoseHubbardParams{}, 60) - 1e-6);
  for (std::size_t k = 1; k < a.energy_trace.size(); ++k) EXPECT_LE(a.energy_trace[k], a.energy_trace[k - 1]);
  if (a.converged) {
    EXPECT_LE(gradient(a.best_params, ansatz, h).norm(), 10.0 * opt.convergence_tol);
  }
}

TEST(Vqe, AllRestartsFailing) {
  // Zero init scale keeps every start at the vacuum, which a subtraction annihilates.
  const auto h = bose_hubbard_polynomial(BoseHubbardParams{});
  const auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  OptimizerConfig opt;
  opt.restarts = 2;
  opt.init_scale = 0.0;
  opt.max_init_attempts = 3;
  EXPECT_THROW(optimize(ansatz, h, opt), OptimizationError);
}

TEST(Vqe, SqueezingCost) {
  EXPECT_EQ(squeezing_cost(vacuum_covariance(2)), 0.0);
  const std::vector<double> flat{0.5, 0.0};
  EXPECT_NEAR(squeezing_cost(gaussian_covariance(GaussianParams::from_flat(flat, 1))), 10.0 * std::log10(std::exp(1.0)),
              1e-12);
  const std::vector<double> a{0.4, -0.3, 0.2, 0.9, -1.0, 0.5};
  const std::vector<double> b{0.4, -0.3, 1.7, -0.1, 0.3, 2.5};
  EXPECT_NEAR(squeezing_cost(gaussian_covariance(GaussianParams::from_flat(a, 2))),
              squeezing_cost(gaussian_covariance(GaussianParams::from_flat(b, 2))), 1e-9);
}

TEST(Vqe, SubtractionProbabilityModel) {
  // one stage with <n> = 0.4
  const double s = std::asinh(std::sqrt(0.4));
  const std::vector<double> flat{s, 0.0};
  const auto v = gaussian_covariance(GaussianParams::from_flat(flat, 1));
  const std::vector<LadderOp> one{LadderOp::annihilate(0)};
  EXPECT_NEAR(subtraction_probability(one, v, 0.05), 0.02, 1e-12);
  EXPECT_EQ(subtraction_probability(std::span<const LadderOp>{}, v, 0.05), 1.0);
  EXPECT_THROW(subtraction_probability(one, vacuum_covariance(1), 0.05), std::domain_error);

  const std::vector<double> half{0.5, 0.0};
  const auto w = gaussian_covariance(GaussianParams::from_flat(half, 1));
  double previous = 1.0;
  for (std::size_t k = 0; k <= 3; ++k) {
    const std::vector<LadderOp> ops(k, LadderOp::annihilate(0));
    const double p = subtraction_probability(ops, w, 0.05);
    EXPECT_LE(p, previous);
    EXPECT_GT(p, 0.0);
    previous = p;
  }
}

TEST(Vqe, SubtractionProbabilityForLayers) {
  auto ansatz = AnsatzConfig::with_subtractions(2, 2);
  const std::vector<double> x{0.31, -0.22, 0.7, 1.1, -0.4, 0.25};
  const double single = subtraction_probability(ansatz, x);
  const auto v = gaussian_covariance(GaussianParams::from_flat(x, 2));
  const std::vector<LadderOp> ops(2, LadderOp::annihilate(0));
  EXPECT_EQ(single, subtraction_probability(ops, v, 0.05));

  ansatz.layers = 2;
  std::vector<double> x2 = x;
  x2.insert(x2.end(), x.begin(), x.end());
  const double layered = subtraction_probability(ansatz, x2);
  EXPECT_GT(layered, 0.0);
  EXPECT_LE(layered, single);
}

TEST(Vqe, ResourceReportPurity) {
  auto ansatz = AnsatzConfig::with_subtractions(2, 1);
  ansatz.purity_target = 0.95;
  const std::vector<double> x{0.31, -0.22, 0.7, 1.1, -0.4, 0.25};
  const auto report = resource_report(ansatz, x);
  EXPECT_NEAR(report.purity, 0.95, 1e-9);
  EXPECT_EQ(report.ladder_op_count, 1u);
  EXPECT_GT(report.squeezing_cost_db, 0.0);
}

TEST(Vqe, ConfigValidation) {
  AnsatzConfig ansatz;
  ansatz.purity_target = 0.0;
  EXPECT_THROW(ansatz.validate(), std::invalid_argument);
  ansatz = AnsatzConfig::with_subtractions(2, 1, 3);
  EXPECT_THROW(ansatz.validate(), std::invalid_argument);
  OptimizerConfig opt;
  opt.restarts = 0;
  EXPECT_THROW(opt.validate(), std::invalid_argument);
  const std::vector<double> wrong(3, 0.0);
  EXPECT_THROW(energy(wrong, AnsatzConfig{}, LadderPolynomial::identity()), std::invalid_argument);
}
