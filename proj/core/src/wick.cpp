#include "cvvqe/wick.hpp"

#include <cmath>

#include <fmt/format.h>

namespace cvvqe {

AnnihilatedPreparation::AnnihilatedPreparation(double norm)
    : std::runtime_error(fmt::format("preparation annihilates the state: normalization K = {:.3g}", norm)),
      norm_(norm) {}

namespace {

constexpr Complex kI{0.0, 1.0};

Complex creation_creation(const RealMatrix& v, int n, int j, int k) {
  return 0.25 * (Complex(v(j, k) - v(j + n, k + n)) - kI * (v(j, k + n) + v(j + n, k)));
}

Complex creation_annihilation(const RealMatrix& v, int n, int j, int k) {
  const double delta = j == k ? 1.0 : 0.0;
  return 0.25 * (Complex(v(j, k) + v(j + n, k + n) - 2.0 * delta) + kI * (v(j, k + n) - v(j + n, k)));
}

Complex contract(LadderOp first, LadderOp second, const RealMatrix& v, int n) {
  const int j = first.mode;
  const int k = second.mode;
  if (first.is_creation() && second.is_creation()) return creation_creation(v, n, j, k);
  if (!first.is_creation() && !second.is_creation()) return std::conj(creation_creation(v, n, j, k));
  if (first.is_creation()) return creation_annihilation(v, n, j, k);
  // a_j a_k^dag = delta_jk + a_k^dag a_j
  return (j == k ? 1.0 : 0.0) + creation_annihilation(v, n, k, j);
}

void check_mode(LadderOp op, int n_modes) {
  if (op.mode < 0 || op.mode >= n_modes) {
    throw std::invalid_argument(fmt::format("ladder operator on mode {} outside 1..{}", op.mode + 1, n_modes));
  }
}

struct MatchingWalker {
  const std::vector<LadderOp>& ops;
  const ContractionTable& table;
  const MatchingVisitor* visitor;
  std::uint64_t count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  Complex walk(std::uint64_t used, Complex product) {
    const std::size_t length = ops.size();
    std::size_t first = 0;
    while (first < length && (used >> first & 1u)) ++first;
    if (first == length) {
      ++count;
      if (visitor != nullptr) (*visitor)(pairs, product);
      return product;
    }
    Complex total{0.0, 0.0};
    for (std::size_t second = first + 1; second < length; ++second) {
      if (used >> second & 1u) continue;
      const Complex value = table(ops[first], ops[second]);
      if (visitor != nullptr) pairs.emplace_back(first, second);
      total += walk(used | (std::uint64_t{1} << first) | (std::uint64_t{1} << second), product * value);
      if (visitor != nullptr) pairs.pop_back();
    }
    return total;
  }
};

}  // namespace

Complex pair_expectation(LadderOp first, LadderOp second, const CovarianceMatrix& covariance) {
  check_mode(first, covariance.n_modes());
  check_mode(second, covariance.n_modes());
  return contract(first, second, covariance.matrix(), covariance.n_modes());
}

ContractionTable::ContractionTable(const CovarianceMatrix& covariance, ContractionFault fault)
    : n_modes_(covariance.n_modes()),
      values_(static_cast<std::size_t>(4 * n_modes_ * n_modes_)) {
  const auto& v = covariance.matrix();
  for (int a = 0; a < 2 * n_modes_; ++a) {
    for (int b = 0; b < 2 * n_modes_; ++b) {
      const LadderOp first{a % n_modes_, a < n_modes_ ? LadderKind::creation : LadderKind::annihilation};
      const LadderOp second{b % n_modes_, b < n_modes_ ? LadderKind::creation : LadderKind::annihilation};
      Complex value = contract(first, second, v, n_modes_);
      if (fault == ContractionFault::flip_normal_order_sign && first.is_creation() && !second.is_creation()) {
        value = -value;
      }
      values_[index(first, second)] = value;
    }
  }
}

std::uint64_t perfect_matching_count(std::size_t length) {
  if (length % 2 != 0) return 0;
  std::uint64_t count = 1;
  for (std::uint64_t k = length > 0 ? length - 1 : 0; k > 1; k -= 2) count *= k;
  return count;
}

MatchingSum sum_matchings(const LadderMonomial& monomial, const ContractionTable& table,
                          const MatchingVisitor& visitor) {
  MatchingSum sum;
  sum.monomial_length = monomial.length();
  if (monomial.length() % 2 != 0) return sum;
  if (monomial.length() > 64) throw std::invalid_argument("monomials longer than 64 operators are not supported");
  for (const auto& op : monomial.ops) check_mode(op, table.n_modes());

  MatchingWalker walker{monomial.ops, table, visitor ? &visitor : nullptr, 0, {}};
  const Complex total = walker.walk(0, Complex(1.0, 0.0));
  sum.matchings_evaluated = walker.count;
  sum.value = monomial.coefficient * total;
  return sum;
}

Complex gaussian_expectation(const LadderMonomial& monomial, const ContractionTable& table) {
  return sum_matchings(monomial, table).value;
}

Complex gaussian_expectation(const LadderMonomial& monomial, const CovarianceMatrix& covariance) {
  return gaussian_expectation(monomial, ContractionTable(covariance));
}

Complex polynomial_expectation(const LadderPolynomial& poly, const ContractionTable& table) {
  Complex total{0.0, 0.0};
  for (const auto& term : poly.terms()) total += gaussian_expectation(term, table);
  return total;
}

Complex polynomial_expectation(const LadderPolynomial& poly, const CovarianceMatrix& covariance) {
  return polynomial_expectation(poly, ContractionTable(covariance));
}

double preparation_norm(const LadderPolynomial& prep, const ContractionTable& table) {
  const Complex k = polynomial_expectation(dagger(prep) * prep, table);
  if (std::abs(k) < 1e-12) throw AnnihilatedPreparation(std::abs(k));
  if (!(k.real() > 0.0) || std::abs(k.imag()) > 1e-9 * std::max(1.0, std::abs(k))) {
    throw std::domain_error(fmt::format("normalization is not real positive: K = ({:g}, {:g})", k.real(), k.imag()));
  }
  return k.real();
}

Complex nongaussian_expectation(const LadderPolynomial& observable, const LadderPolynomial& prep,
                                const ContractionTable& table) {
  if (prep.empty()) return polynomial_expectation(observable, table);
  const double k = preparation_norm(prep, table);
  return polynomial_expectation(dagger(prep) * observable * prep, table) / k;
}

Complex nongaussian_expectation(const LadderPolynomial& observable, const LadderPolynomial& prep,
                                const CovarianceMatrix& covariance) {
  return nongaussian_expectation(observable, prep, ContractionTable(covariance));
}

}  // namespace cvvqe
