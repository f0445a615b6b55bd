#pragma once

// Self-checks behind `cvvqe validate`: closed forms, matching counts,
// Wick-vs-Fock equivalence on random circuits, ED sanity and IPAG reduction.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "cvvqe/gaussian.hpp"
#include "cvvqe/ladder.hpp"
#include "cvvqe/wick.hpp"

namespace cvvqe {

struct ValidationOptions {
  bool quick = false;
  std::uint64_t seed = 20240607;
  ContractionFault fault = ContractionFault::none;
  /// When set, matchings of the closed-form monomials are written here.
  std::ostream* trace = nullptr;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Random single-layer circuit and observable for the Wick-Fock comparison.
struct WickFockCase {
  GaussianParams params;
  LadderPolynomial prep;
  LadderPolynomial observable;
};

struct WickFockLimits {
  int max_modes = 3;
  double max_squeezing = 0.6;
  std::size_t max_observable_length = 6;
  int max_prep_ops = 2;
};

/// Draws N in [1, max_modes], s_j ~ U[-max_s, max_s], uniform mesh angles,
/// a random observable monomial of length 1..max_length and 0..max_prep_ops
/// annihilators as the preparation.
WickFockCase random_wick_fock_case(std::mt19937_64& rng, const WickFockLimits& limits = {});

struct WickFockComparison {
  Complex wick;
  Complex fock;
  double leakage = 0.0;
  double relative_error = 0.0;
  int n_max = 0;
};

/// Wick value on the covariance matrix against the Fock oracle at cutoff
/// n_max. relative_error is |wick - fock| / |fock| (0 when both vanish).
WickFockComparison compare_wick_fock(const WickFockCase& test, int n_max,
                                     ContractionFault fault = ContractionFault::none);

/// |wick - fock| <= tolerance * |fock| + 1e-12
bool wick_fock_agrees(const WickFockComparison& comparison, double tolerance);

/// Random two-layer IPAG circuit on two modes.
struct IpagCase {
  std::vector<GaussianParams> gaussians;
  std::vector<LadderPolynomial> ladders;
  LadderPolynomial observable;
};

IpagCase random_ipag_case(std::mt19937_64& rng, int layers = 2, int n_modes = 2, double max_squeezing = 0.4);

/// Wick value after ipag_reduce and the layer-by-layer Fock simulation.
/// Throws LeakageError when the simulated state leaks more than 1e-8.
WickFockComparison compare_ipag(const IpagCase& test, int n_max);

/// compare_ipag at the first cutoff in 30, 45, 60, 80 that keeps the
/// leakage below 1e-8.
WickFockComparison compare_ipag_adaptive(const IpagCase& test);

/// Prints each perfect matching of `monomial` with its pair contractions.
void trace_matchings(std::ostream& out, const LadderMonomial& monomial, const ContractionTable& table);

CheckResult check_closed_forms(const ValidationOptions& options);
CheckResult check_matching_counts(const ValidationOptions& options);
CheckResult check_wick_fock(const ValidationOptions& options);
CheckResult check_ed(const ValidationOptions& options);
CheckResult check_ipag(const ValidationOptions& options);

ValidationReport run_validation(const ValidationOptions& options);

void print_report(std::ostream& out, const ValidationReport& report);

}  // namespace cvvqe
