#pragma once

// Expectation values of ladder polynomials on zero-mean Gaussian states by
// Wick's theorem: a product of 2m operators evaluates to the sum, over all
// (2m-1)!! perfect matchings, of products of pair contractions. Each pair is
// contracted with its operators in their original left-to-right order.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cvvqe/gaussian.hpp"
#include "cvvqe/ladder.hpp"

namespace cvvqe {

/// Raised when the normalization K = <P^dag P> of a preparation vanishes,
/// e.g. when subtracting a photon from the vacuum.
class AnnihilatedPreparation : public std::runtime_error {
 public:
  explicit AnnihilatedPreparation(double norm);
  double norm() const { return norm_; }

 private:
  double norm_;
};

/// Fault injection for the validation harness; never set in production paths.
enum class ContractionFault : std::uint8_t { none, flip_normal_order_sign };

/// Two-point contraction Tr[op1 op2 rho_G] for op1 to the left of op2:
///   (dag, dag)  I1 = 1/4 [V_jk - V_{j+N,k+N} - i (V_{j,k+N} + V_{j+N,k})]
///   (.,   .)    I2 = conj(I1)
///   (dag, .)    I3 = 1/4 [V_jk + V_{j+N,k+N} + i (V_{j,k+N} - V_{j+N,k}) - 2 delta_jk]
///   (.,   dag)  I4 = delta_jk + I3(k, j)
Complex pair_expectation(LadderOp first, LadderOp second, const CovarianceMatrix& covariance);

/// All 4 N^2 contractions of one covariance matrix, computed once.
class ContractionTable {
 public:
  explicit ContractionTable(const CovarianceMatrix& covariance, ContractionFault fault = ContractionFault::none);

  int n_modes() const { return n_modes_; }
  Complex operator()(LadderOp first, LadderOp second) const {
    return values_[index(first, second)];
  }

 private:
  std::size_t index(LadderOp first, LadderOp second) const {
    const auto slot = [this](LadderOp op) {
      return static_cast<std::size_t>(op.mode) + (op.is_creation() ? 0u : static_cast<std::size_t>(n_modes_));
    };
    return slot(first) * 2 * static_cast<std::size_t>(n_modes_) + slot(second);
  }

  int n_modes_;
  std::vector<Complex> values_;
};

struct MatchingSum {
  std::size_t monomial_length = 0;
  std::uint64_t matchings_evaluated = 0;
  Complex value{0.0, 0.0};
};

/// Called once per perfect matching with the pairs (as positions in the
/// monomial) and the product of their contractions.
using MatchingVisitor =
    std::function<void(const std::vector<std::pair<std::size_t, std::size_t>>& pairs, Complex product)>;

/// (2m-1)!! for length 2m; 0 for odd lengths.
std::uint64_t perfect_matching_count(std::size_t length);

/// Full matching sum of one monomial including its coefficient. Odd lengths
/// short-circuit to exactly zero with zero matchings evaluated.
MatchingSum sum_matchings(const LadderMonomial& monomial, const ContractionTable& table,
                          const MatchingVisitor& visitor = {});

Complex gaussian_expectation(const LadderMonomial& monomial, const CovarianceMatrix& covariance);
Complex gaussian_expectation(const LadderMonomial& monomial, const ContractionTable& table);

/// Sum over terms in their stored order.
Complex polynomial_expectation(const LadderPolynomial& poly, const CovarianceMatrix& covariance);
Complex polynomial_expectation(const LadderPolynomial& poly, const ContractionTable& table);

/// Normalization K = <P^dag P> on the Gaussian state. Throws
/// AnnihilatedPreparation when |K| < 1e-12 and std::domain_error when K is not
/// real positive within 1e-9.
double preparation_norm(const LadderPolynomial& prep, const ContractionTable& table);

/// <M> on P rho_G P^dag / K, i.e. <P^dag M P> / <P^dag P>. An empty `prep`
/// is the identity.
Complex nongaussian_expectation(const LadderPolynomial& observable, const LadderPolynomial& prep,
                                const CovarianceMatrix& covariance);
Complex nongaussian_expectation(const LadderPolynomial& observable, const LadderPolynomial& prep,
                                const ContractionTable& table);

}  // namespace cvvqe
