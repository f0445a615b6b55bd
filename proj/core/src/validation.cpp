#include "cvvqe/validation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "cvvqe/fock.hpp"
#include "cvvqe/models.hpp"

namespace cvvqe {

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

LadderMonomial random_monomial(std::mt19937_64& rng, int n_modes, std::size_t length) {
  std::uniform_int_distribution<int> mode(0, n_modes - 1);
  std::bernoulli_distribution creation(0.5);
  LadderMonomial monomial;
  for (std::size_t i = 0; i < length; ++i) {
    monomial.ops.push_back({mode(rng), creation(rng) ? LadderKind::creation : LadderKind::annihilation});
  }
  return monomial;
}

GaussianParams random_gaussian(std::mt19937_64& rng, int n_modes, double max_squeezing) {
  std::uniform_real_distribution<double> squeeze(-max_squeezing, max_squeezing);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  auto params = GaussianParams::zeros(n_modes);
  for (auto& s : params.squeezings) s = squeeze(rng);
  for (auto& theta : params.passive) theta = angle(rng);
  return params;
}

double relative_error(Complex wick, Complex fock) {
  const double diff = std::abs(wick - fock);
  if (std::abs(fock) == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / std::abs(fock);
}

template <typename Body>
CheckResult timed(std::string name, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult result{std::move(name), false, {}, 0.0};
  try {
    body(result);
  } catch (const std::exception& error) {
    result.passed = false;
    result.detail = fmt::format("exception: {}", error.what());
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

WickFockCase random_wick_fock_case(std::mt19937_64& rng, const WickFockLimits& limits) {
  const int n = std::uniform_int_distribution<int>(1, limits.max_modes)(rng);
  WickFockCase test;
  test.params = random_gaussian(rng, n, limits.max_squeezing);
  const auto length = std::uniform_int_distribution<std::size_t>(1, limits.max_observable_length)(rng);
  test.observable = LadderPolynomial(random_monomial(rng, n, length));
  const int prep_ops = std::uniform_int_distribution<int>(0, limits.max_prep_ops)(rng);
  std::uniform_int_distribution<int> mode(0, n - 1);
  std::vector<LadderOp> ops;
  for (int i = 0; i < prep_ops; ++i) ops.push_back(LadderOp::annihilate(mode(rng)));
  test.prep = ops.empty() ? LadderPolynomial::identity() : LadderPolynomial::product(ops);
  return test;
}

WickFockComparison compare_wick_fock(const WickFockCase& test, int n_max, ContractionFault fault) {
  WickFockComparison out;
  const ContractionTable table(gaussian_covariance(test.params), fault);
  out.wick = nongaussian_expectation(test.observable, test.prep, table);

  const FockSpace space(test.params.n_modes(), n_max);
  const auto state = apply_polynomial(test.prep, gaussian_state_fock(test.params, space));
  if (state.leakage > FockGaussianOptions{}.max_leakage) throw LeakageError(state.leakage, n_max);
  out.fock = expectation_fock(test.observable, state);
  out.leakage = state.leakage;
  out.relative_error = relative_error(out.wick, out.fock);
  out.n_max = n_max;
  return out;
}

bool wick_fock_agrees(const WickFockComparison& comparison, double tolerance) {
  return std::abs(comparison.wick - comparison.fock) <= tolerance * std::abs(comparison.fock) + 1e-12;
}

IpagCase random_ipag_case(std::mt19937_64& rng, int layers, int n_modes, double max_squeezing) {
  IpagCase test;
  std::uniform_int_distribution<int> mode(0, n_modes - 1);
  std::bernoulli_distribution creation(0.5);
  for (int k = 0; k < layers; ++k) {
    test.gaussians.push_back(random_gaussian(rng, n_modes, max_squeezing));
    const LadderOp op{mode(rng), creation(rng) ? LadderKind::creation : LadderKind::annihilation};
    test.ladders.push_back(LadderPolynomial::op(op));
  }
  // Even length: odd observables vanish identically on these states.
  const std::size_t length = std::bernoulli_distribution(0.5)(rng) ? 2 : 4;
  test.observable = LadderPolynomial(random_monomial(rng, n_modes, length));
  return test;
}

WickFockComparison compare_ipag(const IpagCase& test, int n_max) {
  std::vector<IpagLayer> layers;
  for (std::size_t k = 0; k < test.gaussians.size(); ++k) {
    layers.push_back({gaussian_symplectic(test.gaussians[k]), test.ladders[k]});
  }
  const auto reduced = ipag_reduce(layers);
  WickFockComparison out;
  out.wick = nongaussian_expectation(test.observable, reduced.ladder, covariance_of(reduced.gaussian));

  const int n = test.gaussians.front().n_modes();
  auto state = vacuum_state(FockSpace(n, n_max));
  for (std::size_t k = 0; k < test.gaussians.size(); ++k) {
    state = apply_polynomial(test.ladders[k], apply_gaussian(test.gaussians[k], state));
  }
  if (state.leakage > FockGaussianOptions{}.max_leakage) throw LeakageError(state.leakage, n_max);
  out.fock = expectation_fock(test.observable, state);
  out.leakage = state.leakage;
  out.relative_error = relative_error(out.wick, out.fock);
  out.n_max = n_max;
  return out;
}

WickFockComparison compare_ipag_adaptive(const IpagCase& test) {
  constexpr std::array cutoffs{30, 45, 60, 80};
  for (std::size_t k = 0;; ++k) {
    try {
      return compare_ipag(test, cutoffs[k]);
    } catch (const LeakageError&) {
      if (k + 1 == cutoffs.size()) throw;
    }
  }
}

void trace_matchings(std::ostream& out, const LadderMonomial& monomial, const ContractionTable& table) {
  const auto label = [](LadderOp op) { return fmt::format("{}({})", op.is_creation() ? "a'" : "a", op.mode + 1); };
  std::string text;
  for (const auto& op : monomial.ops) text += (text.empty() ? "" : " ") + label(op);
  out << fmt::format("monomial {} (length {}, {} matchings)\n", text.empty() ? "1" : text, monomial.length(),
                     perfect_matching_count(monomial.length()));
  const auto visitor = [&](const std::vector<std::pair<std::size_t, std::size_t>>& pairs, Complex product) {
    std::string line = "  ";
    for (const auto& [i, j] : pairs) {
      const Complex value = table(monomial.ops[i], monomial.ops[j]);
      line += fmt::format("<{} {}>=({:.6g},{:.6g}) ", label(monomial.ops[i]), label(monomial.ops[j]), value.real(),
                          value.imag());
    }
    out << line << fmt::format("-> ({:.9g},{:.9g})\n", product.real(), product.imag());
  };
  const auto sum = sum_matchings(monomial, table, visitor);
  out << fmt::format("  total ({:.12g},{:.12g})\n", sum.value.real(), sum.value.imag());
}

CheckResult check_closed_forms(const ValidationOptions& options) {
  return timed("closed forms", [&](CheckResult& result) {
    double worst = 0.0;
    for (const double s : {0.1, 0.5, 1.0}) {
      const std::vector<double> flat{s, 0.0};
      const ContractionTable table(gaussian_covariance(GaussianParams::from_flat(flat, 1)), options.fault);
      const auto n = LadderPolynomial::number(0);
      const auto a = LadderPolynomial::op(LadderOp::annihilate(0));
      const double sh2 = std::sinh(s) * std::sinh(s);
      const Complex plain = polynomial_expectation(n, table);
      const Complex subtracted = nongaussian_expectation(n, a, table);
      worst = std::max({worst, std::abs(plain - sh2), std::abs(subtracted - (1.0 + 3.0 * sh2))});
      if (options.trace != nullptr) {
        *options.trace << fmt::format("s = {}\n", s);
        trace_matchings(*options.trace, n.terms().front(), table);
        for (const auto& term : (dagger(a) * n * a).terms()) trace_matchings(*options.trace, term, table);
      }
    }
    result.passed = worst <= 1e-9;
    result.detail = fmt::format("max deviation {:.3g} (tol 1e-9)", worst);
  });
}

CheckResult check_matching_counts(const ValidationOptions& options) {
  return timed("matching counts", [&](CheckResult& result) {
    const ContractionTable table(vacuum_covariance(2), options.fault);
    std::mt19937_64 rng(options.seed);
    const std::uint64_t expected[] = {1, 3, 15, 105};
    bool ok = true;
    std::string detail;
    for (std::size_t m = 1; m <= 4; ++m) {
      const auto sum = sum_matchings(random_monomial(rng, 2, 2 * m), table);
      ok = ok && sum.matchings_evaluated == expected[m - 1];
      detail += fmt::format("{}:{} ", 2 * m, sum.matchings_evaluated);
    }
    for (std::size_t length = 1; length <= 9; length += 2) {
      const auto sum = sum_matchings(random_monomial(rng, 2, length), table);
      ok = ok && sum.matchings_evaluated == 0 && sum.value == Complex(0.0, 0.0);
    }
    result.passed = ok;
    result.detail = detail + "odd: 0";
  });
}

CheckResult check_wick_fock(const ValidationOptions& options) {
  const std::size_t target = options.quick ? 20 : 200;
  return timed(fmt::format("wick-fock equivalence ({} cases)", target), [&](CheckResult& result) {
    std::mt19937_64 rng(options.seed);
    std::size_t accepted = 0;
    std::size_t skipped = 0;
    std::size_t failures = 0;
    double worst = 0.0;
    while (accepted < target && skipped < 10 * target) {
      const auto test = random_wick_fock_case(rng);
      WickFockComparison cmp;
      try {
        cmp = compare_wick_fock(test, 30, options.fault);
      } catch (const LeakageError&) {
        ++skipped;
        continue;
      }
      if (cmp.leakage > 1e-10) {
        ++skipped;
        continue;
      }
      ++accepted;
      if (std::abs(cmp.fock) > 1e-12) worst = std::max(worst, cmp.relative_error);
      if (!wick_fock_agrees(cmp, 1e-6)) ++failures;
    }
    result.passed = accepted == target && failures == 0;
    result.detail = fmt::format("{} cases, {} failed, {} redrawn for leakage, worst rel {:.3g}", accepted, failures,
                                skipped, worst);
  });
}

CheckResult check_ed(const ValidationOptions&) {
  return timed("exact diagonalization", [&](CheckResult& result) {
    BoseHubbardParams diagonal;
    diagonal.hopping = 0.0;
    const double e_diag = bh_ground_energy(diagonal, 4);

    const BoseHubbardParams model;
    const double e4 = bh_ground_energy(model, 4);
    const double e8 = bh_ground_energy(model, 8);
    const double e12 = bh_ground_energy(model, 12);

    EdOptions dense;
    dense.solver = EdSolver::dense;
    EdOptions lanczos;
    lanczos.solver = EdSolver::lanczos;
    const double solver_gap = std::abs(bh_ground_energy(model, 12, dense) - bh_ground_energy(model, 12, lanczos));

    const auto direct = bose_hubbard_matrix(model, 6);
    const Eigen::MatrixXcd from_poly = polynomial_matrix(bose_hubbard_polynomial(model), FockSpace(2, 6));
    const double construction_gap = (Eigen::MatrixXcd(direct.cast<Complex>()) - from_poly).cwiseAbs().maxCoeff();
    const double hermitian = hermiticity_residual(direct);

    result.passed = std::abs(e_diag + 2.0) <= 1e-12 && e4 - e8 >= -1e-12 && e8 - e12 >= -1e-12 &&
                    solver_gap <= 1e-8 && construction_gap <= 1e-12 && hermitian <= 1e-12;
    result.detail = fmt::format("E(t=0)={:.15g}; E4={:.10f} E8={:.10f} E12={:.10f}; dense-lanczos {:.2g}; "
                                "direct-poly {:.2g}",
                                e_diag, e4, e8, e12, solver_gap, construction_gap);
  });
}

CheckResult check_ipag(const ValidationOptions& options) {
  const std::size_t target = options.quick ? 5 : 20;
  return timed(fmt::format("IPAG reduction ({} cases)", target), [&](CheckResult& result) {
    std::mt19937_64 rng(options.seed + 1);
    std::size_t failures = 0;
    double worst = 0.0;
    int highest_cutoff = 0;
    for (std::size_t i = 0; i < target; ++i) {
      const auto cmp = compare_ipag_adaptive(random_ipag_case(rng));
      if (std::abs(cmp.fock) > 1e-12) worst = std::max(worst, cmp.relative_error);
      if (!wick_fock_agrees(cmp, 1e-6)) ++failures;
      highest_cutoff = std::max(highest_cutoff, cmp.n_max);
    }
    result.passed = failures == 0;
    result.detail = fmt::format("{} failed, worst rel {:.3g}, highest n_max {}", failures, worst, highest_cutoff);
  });
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report;
  report.checks.push_back(check_closed_forms(options));
  report.checks.push_back(check_matching_counts(options));
  report.checks.push_back(check_wick_fock(options));
  report.checks.push_back(check_ed(options));
  report.checks.push_back(check_ipag(options));
  return report;
}

void print_report(std::ostream& out, const ValidationReport& report) {
  for (const auto& check : report.checks) {
    out << fmt::format("[{}] {:<36} {:7.3f}s  {}\n", check.passed ? "PASS" : "FAIL", check.name, check.seconds,
                       check.detail);
  }
  out << fmt::format("{} of {} checks passed\n",
                     std::count_if(report.checks.begin(), report.checks.end(),
                                   [](const CheckResult& c) { return c.passed; }),
                     report.checks.size());
}

}  // namespace cvvqe
