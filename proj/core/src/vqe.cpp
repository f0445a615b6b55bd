#include "cvvqe/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "cvvqe/lbfgs.hpp"
#include "cvvqe/parallel.hpp"
#include "cvvqe/wick.hpp"

namespace cvvqe {

AnsatzConfig AnsatzConfig::with_subtractions(int n_modes, int count, int mode) {
  AnsatzConfig config;
  config.n_modes = n_modes;
  config.prep = LadderPolynomial::subtractions(mode, count);
  return config;
}

void AnsatzConfig::validate() const {
  if (n_modes < 1) throw std::invalid_argument(fmt::format("n_modes must be positive, got {}", n_modes));
  if (layers < 1) throw std::invalid_argument(fmt::format("layers must be positive, got {}", layers));
  if (!(purity_target > 0.0 && purity_target <= 1.0)) {
    throw std::invalid_argument(fmt::format("purity_target must lie in (0, 1], got {}", purity_target));
  }
  if (!(tap_reflectivity > 0.0 && tap_reflectivity <= 1.0)) {
    throw std::invalid_argument(fmt::format("tap_reflectivity must lie in (0, 1], got {}", tap_reflectivity));
  }
  if (prep.empty()) throw std::invalid_argument("preparation polynomial is empty");
  if (prep.mode_span() > n_modes) {
    throw std::invalid_argument(
        fmt::format("preparation acts on mode {} but the ansatz has {} modes", prep.mode_span(), n_modes));
  }
}

void OptimizerConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(gradient_step > 0.0)) throw std::invalid_argument("gradient_step must be positive");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be positive");
  if (restarts < 1) throw std::invalid_argument("restarts must be positive");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be non-negative");
  if (max_init_attempts < 1) throw std::invalid_argument("max_init_attempts must be positive");
}

namespace {

std::vector<IpagLayer> build_layers(const AnsatzConfig& ansatz, std::span<const double> params,
                                    const std::vector<LadderPolynomial>& ladders) {
  const std::size_t per_layer = ansatz.parameters_per_layer();
  std::vector<IpagLayer> layers;
  layers.reserve(ladders.size());
  for (std::size_t k = 0; k < ladders.size(); ++k) {
    const auto block = params.subspan(k * per_layer, per_layer);
    layers.push_back({gaussian_symplectic(GaussianParams::from_flat(block, ansatz.n_modes)), ladders[k]});
  }
  return layers;
}

void check_parameter_count(const AnsatzConfig& ansatz, std::span<const double> params) {
  if (params.size() != ansatz.parameter_count()) {
    throw std::invalid_argument(
        fmt::format("expected {} parameters, got {}", ansatz.parameter_count(), params.size()));
  }
}

double checked_norm(Complex k) {
  if (std::abs(k) < 1e-12) throw AnnihilatedPreparation(std::abs(k));
  if (!(k.real() > 0.0) || std::abs(k.imag()) > 1e-9 * std::max(1.0, std::abs(k))) {
    throw std::domain_error(fmt::format("normalization is not real positive: K = ({:g}, {:g})", k.real(), k.imag()));
  }
  return k.real();
}

// Annihilators of a single-monomial preparation in application order
// (rightmost first). Empty for the identity.
std::optional<std::vector<LadderOp>> subtraction_sequence(const LadderPolynomial& prep) {
  const auto canonical = prep.canonical();
  if (canonical.size() != 1) return std::nullopt;
  const auto& ops = canonical.terms().front().ops;
  if (std::any_of(ops.begin(), ops.end(), [](LadderOp op) { return op.is_creation(); })) return std::nullopt;
  return std::vector<LadderOp>(ops.rbegin(), ops.rend());
}

}  // namespace

EnergyModel::EnergyModel(AnsatzConfig ansatz, LadderPolynomial hamiltonian)
    : ansatz_(std::move(ansatz)), hamiltonian_(std::move(hamiltonian)) {
  ansatz_.validate();
  if (hamiltonian_.mode_span() > ansatz_.n_modes) {
    throw std::invalid_argument(fmt::format("Hamiltonian acts on {} modes but the ansatz has {}",
                                            hamiltonian_.mode_span(), ansatz_.n_modes));
  }
  if (ansatz_.layers == 1) {
    const auto left = dagger(ansatz_.prep);
    sandwiched_ = (left * hamiltonian_ * ansatz_.prep).canonical();
    norm_ = (left * ansatz_.prep).canonical();
  }
}

PreparedState EnergyModel::prepare(std::span<const double> params) const {
  check_parameter_count(ansatz_, params);
  const std::vector<LadderPolynomial> ladders(static_cast<std::size_t>(ansatz_.layers), ansatz_.prep);
  const auto layers = build_layers(ansatz_, params, ladders);
  auto reduced = ipag_reduce(layers);
  auto pure = covariance_of(reduced.gaussian);
  auto mixed = ansatz_.purity_target < 1.0 ? apply_impurity(pure, ansatz_.purity_target) : pure;
  return {std::move(reduced.gaussian), std::move(pure), std::move(mixed), std::move(reduced.ladder),
          reduced.ladder_op_count};
}

Complex EnergyModel::raw_energy(std::span<const double> params) const {
  check_parameter_count(ansatz_, params);
  if (ansatz_.layers == 1) {
    const auto s = gaussian_symplectic(GaussianParams::from_flat(params, ansatz_.n_modes));
    auto covariance = covariance_of(s);
    if (ansatz_.purity_target < 1.0) covariance = apply_impurity(covariance, ansatz_.purity_target);
    const ContractionTable table(covariance);
    const double k = checked_norm(polynomial_expectation(norm_, table));
    return polynomial_expectation(sandwiched_, table) / k;
  }
  const auto state = prepare(params);
  return nongaussian_expectation(hamiltonian_, state.prep, state.covariance);
}

double EnergyModel::energy(std::span<const double> params) const {
  const Complex value = raw_energy(params);
  if (!std::isfinite(value.real()) || std::abs(value.imag()) > 1e-9 * (1.0 + std::abs(value.real()))) {
    throw std::domain_error(fmt::format("energy is not real: ({:g}, {:g})", value.real(), value.imag()));
  }
  return value.real();
}

double energy(std::span<const double> params, const AnsatzConfig& ansatz, const LadderPolynomial& hamiltonian) {
  return EnergyModel(ansatz, hamiltonian).energy(params);
}

Eigen::VectorXd central_gradient(const ScalarFunction& f, std::span<const double> x, double step) {
  std::vector<double> probe(x.begin(), x.end());
  Eigen::VectorXd grad(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double plus = f(probe);
    probe[i] = x[i] - step;
    const double minus = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw std::domain_error(fmt::format("non-finite objective while differentiating parameter {}", i));
    }
    grad(static_cast<Eigen::Index>(i)) = (plus - minus) / (2.0 * step);
  }
  return grad;
}

Eigen::VectorXd gradient(std::span<const double> params, const AnsatzConfig& ansatz,
                         const LadderPolynomial& hamiltonian, double step) {
  const EnergyModel model(ansatz, hamiltonian);
  return central_gradient([&](std::span<const double> p) { return model.energy(p); }, params, step);
}

namespace {

struct RestartOutcome {
  bool ok = false;
  LbfgsResult result;
  std::size_t failures = 0;
  std::string error;
};

RestartOutcome run_restart(const EnergyModel& model, const OptimizerConfig& opt, int restart) {
  RestartOutcome outcome;
  const auto n = static_cast<Eigen::Index>(model.ansatz().parameter_count());

  auto safe_energy = [&](std::span<const double> p) {
    try {
      return model.energy(p);
    } catch (const AnnihilatedPreparation&) {
    } catch (const std::domain_error&) {
    } catch (const std::invalid_argument&) {
    }
    ++outcome.failures;
    return std::numeric_limits<double>::infinity();
  };

  std::seed_seq seq{static_cast<std::uint32_t>(opt.rng_seed), static_cast<std::uint32_t>(opt.rng_seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, opt.init_scale);

  Eigen::VectorXd x0(n);
  bool feasible = false;
  for (int attempt = 0; attempt < opt.max_init_attempts && !feasible; ++attempt) {
    for (Eigen::Index i = 0; i < n; ++i) x0(i) = normal(rng);
    feasible = std::isfinite(safe_energy({x0.data(), static_cast<std::size_t>(n)}));
  }
  if (!feasible) {
    outcome.error = fmt::format("no feasible start after {} draws", opt.max_init_attempts);
    return outcome;
  }

  const ObjectiveFunction objective = [&](const Eigen::VectorXd& x) {
    return safe_energy({x.data(), static_cast<std::size_t>(x.size())});
  };
  const GradientFunction grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    try {
      return central_gradient(safe_energy, {x.data(), static_cast<std::size_t>(x.size())}, opt.gradient_step);
    } catch (const std::domain_error&) {
      return Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
    }
  };

  LbfgsOptions options;
  options.max_iterations = opt.max_iterations;
  options.gradient_tolerance = opt.convergence_tol;
  try {
    outcome.result = minimize_lbfgs(objective, grad, x0, options);
    outcome.ok = std::isfinite(outcome.result.value);
  } catch (const std::invalid_argument& error) {
    outcome.error = error.what();
  }
  return outcome;
}

}  // namespace

VqeResult optimize(const AnsatzConfig& ansatz, const LadderPolynomial& hamiltonian, const OptimizerConfig& opt) {
  opt.validate();
  const EnergyModel model(ansatz, hamiltonian);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(opt.restarts));
  parallel_for(
      outcomes.size(), [&](std::size_t r) { outcomes[r] = run_restart(model, opt, static_cast<int>(r)); },
      opt.threads);

  VqeResult result;
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const auto& outcome = outcomes[r];
    result.failed_evaluations += outcome.failures;
    result.restart_energies.push_back(outcome.ok ? outcome.result.value : std::numeric_limits<double>::quiet_NaN());
    if (outcome.ok && (!best || outcome.result.value < outcomes[*best].result.value)) best = r;
  }
  if (best && !outcomes[*best].result.converged) {
    // Restarts that reach the same minimum differ only by round-off; report
    // one whose gradient test passed if there is one.
    const double floor = outcomes[*best].result.value;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
      const auto& candidate = outcomes[r];
      if (candidate.ok && candidate.result.converged &&
          candidate.result.value - floor <= 1e-10 * (1.0 + std::abs(floor))) {
        best = r;
        break;
      }
    }
  }
  if (!best) {
    throw OptimizationError(fmt::format("all {} restarts failed: {}", opt.restarts, outcomes.front().error));
  }

  const auto& winner = outcomes[*best].result;
  result.best_energy = winner.value;
  result.best_params.assign(winner.x.data(), winner.x.data() + winner.x.size());
  result.energy_trace = winner.trace;
  result.converged = winner.converged;
  result.iterations = winner.iterations;
  result.best_restart = static_cast<int>(*best);
  result.resources = resource_report(ansatz, result.best_params);
  return result;
}

double squeezing_cost(const CovarianceMatrix& pure_covariance) {
  double total = 0.0;
  for (const double r : squeezing_spectrum(pure_covariance)) total += std::abs(10.0 * std::log10(r));
  return total;
}

double subtraction_probability(std::span<const LadderOp> subtractions, const CovarianceMatrix& covariance,
                               double reflectivity) {
  const ContractionTable table(covariance);
  double probability = 1.0;
  std::vector<LadderOp> applied;  // operator order: latest leftmost
  for (const auto& op : subtractions) {
    if (op.is_creation()) throw std::invalid_argument("subtraction sequence contains a creation operator");
    const auto conditioned = applied.empty() ? LadderPolynomial::identity() : LadderPolynomial::product(applied);
    const double mean = nongaussian_expectation(LadderPolynomial::number(op.mode), conditioned, table).real();
    if (!(mean > 0.0)) {
      throw std::domain_error(fmt::format("mode {} is empty before a subtraction", op.mode + 1));
    }
    probability *= std::min(1.0, reflectivity * mean);
    applied.insert(applied.begin(), op);
  }
  return probability;
}

double subtraction_probability(const AnsatzConfig& ansatz, std::span<const double> params) {
  ansatz.validate();
  check_parameter_count(ansatz, params);
  const auto sequence = subtraction_sequence(ansatz.prep);
  if (!sequence) throw std::invalid_argument("preparation is not a product of annihilation operators");
  if (sequence->empty()) return 1.0;

  if (ansatz.layers == 1) {
    auto covariance = gaussian_covariance(GaussianParams::from_flat(params, ansatz.n_modes));
    if (ansatz.purity_target < 1.0) covariance = apply_impurity(covariance, ansatz.purity_target);
    return subtraction_probability(*sequence, covariance, ansatz.tap_reflectivity);
  }

  // Each stage sees the circuit truncated just before it.
  double probability = 1.0;
  const auto layer_count = static_cast<std::size_t>(ansatz.layers);
  for (std::size_t k = 0; k < layer_count; ++k) {
    std::vector<LadderPolynomial> ladders(k + 1, ansatz.prep);
    std::vector<LadderOp> applied;
    for (const auto& op : *sequence) {
      ladders[k] = applied.empty() ? LadderPolynomial::identity() : LadderPolynomial::product(applied);
      const auto reduced = ipag_reduce(build_layers(ansatz, params, ladders));
      auto covariance = covariance_of(reduced.gaussian);
      if (ansatz.purity_target < 1.0) covariance = apply_impurity(covariance, ansatz.purity_target);
      const double mean =
          nongaussian_expectation(LadderPolynomial::number(op.mode), reduced.ladder, covariance).real();
      if (!(mean > 0.0)) {
        throw std::domain_error(fmt::format("mode {} is empty before a subtraction", op.mode + 1));
      }
      probability *= std::min(1.0, ansatz.tap_reflectivity * mean);
      applied.insert(applied.begin(), op);
    }
  }
  return probability;
}

ResourceReport resource_report(const AnsatzConfig& ansatz, std::span<const double> params) {
  const EnergyModel model(ansatz, LadderPolynomial::identity());
  const auto state = model.prepare(params);
  ResourceReport report;
  report.squeezing_cost_db = squeezing_cost(state.pure_covariance);
  report.purity = purity(state.covariance);
  report.ladder_op_count = state.ladder_op_count;
  try {
    report.subtraction_probability = subtraction_probability(ansatz, params);
  } catch (const std::exception&) {
    report.subtraction_probability = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace cvvqe
