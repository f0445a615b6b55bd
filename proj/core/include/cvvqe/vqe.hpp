#pragma once

// Variational loop: Gaussian unitary (squeezers + interferometer) on the
// vacuum, a ladder-operator preparation, optional global impurity, and the
// energy <H> evaluated by Wick's theorem. Parameters are minimized by L-BFGS
// over finite-difference gradients with seeded restarts.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cvvqe/gaussian.hpp"
#include "cvvqe/ladder.hpp"

namespace cvvqe {

struct AnsatzConfig {
  int n_modes = 2;
  /// Ladder polynomial applied after each layer's Gaussian (identity = no
  /// ladder operation).
  LadderPolynomial prep = LadderPolynomial::identity();
  int layers = 1;
  double purity_target = 1.0;
  /// Tap reflectivity R of the heralded-subtraction model.
  double tap_reflectivity = 0.05;

  /// k subtractions on `mode` (0-based), one layer.
  static AnsatzConfig with_subtractions(int n_modes, int count, int mode = 0);

  std::size_t parameters_per_layer() const { return GaussianParams::parameter_count(n_modes); }
  std::size_t parameter_count() const { return static_cast<std::size_t>(layers) * parameters_per_layer(); }
  void validate() const;
};

struct OptimizerConfig {
  int max_iterations = 500;
  double gradient_step = 1e-5;
  double convergence_tol = 1e-7;
  int restarts = 8;
  std::uint64_t rng_seed = 0;
  double init_scale = 0.1;
  int max_init_attempts = 100;
  /// 0 = thread_budget()
  unsigned threads = 0;

  void validate() const;
};

struct ResourceReport {
  double squeezing_cost_db = 0.0;
  double subtraction_probability = 1.0;
  double purity = 1.0;
  std::size_t ladder_op_count = 0;
};

struct VqeResult {
  double best_energy = 0.0;
  std::vector<double> best_params;
  std::vector<double> energy_trace;
  ResourceReport resources;
  bool converged = false;
  int iterations = 0;
  int best_restart = 0;
  /// Objective evaluations that failed (annihilated preparation or
  /// unphysical state) and were treated as +inf, over all restarts.
  std::size_t failed_evaluations = 0;
  std::vector<double> restart_energies;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The state prepared by a parameter vector, reduced to one Gaussian and one
/// ladder polynomial.
struct PreparedState {
  SymplecticMatrix gaussian;
  CovarianceMatrix pure_covariance;
  CovarianceMatrix covariance;  // with impurity applied
  LadderPolynomial prep;
  std::size_t ladder_op_count = 0;
};

/// Energy objective for a fixed ansatz and Hamiltonian. Single-layer
/// preparations are expanded once (P^dag H P and P^dag P) and reused.
class EnergyModel {
 public:
  EnergyModel(AnsatzConfig ansatz, LadderPolynomial hamiltonian);

  const AnsatzConfig& ansatz() const { return ansatz_; }
  const LadderPolynomial& hamiltonian() const { return hamiltonian_; }

  PreparedState prepare(std::span<const double> params) const;
  /// Complex <H> before the reality check.
  Complex raw_energy(std::span<const double> params) const;
  /// Real part of <H>. Throws AnnihilatedPreparation when K vanishes and
  /// std::domain_error when |Im| > 1e-9 (1 + |Re|).
  double energy(std::span<const double> params) const;

 private:
  AnsatzConfig ansatz_;
  LadderPolynomial hamiltonian_;
  LadderPolynomial sandwiched_;  // P^dag H P (single layer)
  LadderPolynomial norm_;        // P^dag P (single layer)
};

double energy(std::span<const double> params, const AnsatzConfig& ansatz, const LadderPolynomial& hamiltonian);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences with step h; 2 dim evaluations. Throws
/// std::domain_error if any probe is not finite.
Eigen::VectorXd central_gradient(const ScalarFunction& f, std::span<const double> x, double step);

Eigen::VectorXd gradient(std::span<const double> params, const AnsatzConfig& ansatz,
                         const LadderPolynomial& hamiltonian, double step = 1e-5);

/// Runs opt.restarts seeded L-BFGS runs and keeps the lowest energy (among
/// restarts within 1e-10 relative of it, a converged one is preferred).
/// Throws OptimizationError when every restart fails.
VqeResult optimize(const AnsatzConfig& ansatz, const LadderPolynomial& hamiltonian, const OptimizerConfig& opt);

/// Total squeezing sum_j |10 log10 r_j| in dB of a pure covariance matrix.
double squeezing_cost(const CovarianceMatrix& pure_covariance);

/// Heralded weak-tap model: product over stages of min(1, R <n_mode>), each
/// stage evaluated on the state conditioned on the earlier subtractions.
/// `subtractions` are in application order and must all be annihilators.
/// Throws std::domain_error if a stage has <n> = 0.
double subtraction_probability(std::span<const LadderOp> subtractions, const CovarianceMatrix& covariance,
                               double reflectivity);

/// Same model for a (possibly multi-layer) ansatz: every layer's prep must be
/// a single product of annihilators.
double subtraction_probability(const AnsatzConfig& ansatz, std::span<const double> params);

/// subtraction_probability is NaN when the preparation is not a product of
/// annihilators.
ResourceReport resource_report(const AnsatzConfig& ansatz, std::span<const double> params);

}  // namespace cvvqe
