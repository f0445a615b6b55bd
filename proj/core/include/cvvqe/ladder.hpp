#pragma once

// Ordered products of creation/annihilation operators with complex weights.
// The algebra is a free monoid: products concatenate and nothing is ever
// normal-ordered or commuted. Modes are 0-based in code and 1-based in the
// text format.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cvvqe/gaussian.hpp"

namespace cvvqe {

enum class LadderKind : std::uint8_t { creation, annihilation };

struct LadderOp {
  int mode = 0;
  LadderKind kind = LadderKind::annihilation;

  static LadderOp create(int mode) { return {mode, LadderKind::creation}; }
  static LadderOp annihilate(int mode) { return {mode, LadderKind::annihilation}; }

  bool is_creation() const { return kind == LadderKind::creation; }
  LadderOp dagger() const {
    return {mode, is_creation() ? LadderKind::annihilation : LadderKind::creation};
  }
  friend bool operator==(const LadderOp&, const LadderOp&) = default;
  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

/// coefficient * ops[0] ops[1] ... ; the rightmost operator acts first.
struct LadderMonomial {
  Complex coefficient{1.0, 0.0};
  std::vector<LadderOp> ops;

  std::size_t length() const { return ops.size(); }
};

class LadderPolynomial {
 public:
  LadderPolynomial() = default;
  explicit LadderPolynomial(LadderMonomial monomial);
  explicit LadderPolynomial(std::vector<LadderMonomial> terms);

  /// The constant 1 (one empty monomial).
  static LadderPolynomial identity();
  static LadderPolynomial constant(Complex value);
  static LadderPolynomial op(LadderOp op, Complex coefficient = 1.0);
  /// a_m^dag a_m
  static LadderPolynomial number(int mode);
  /// a_m a_m ... a_m (k times); identity for k = 0
  static LadderPolynomial subtractions(int mode, int count);
  static LadderPolynomial product(std::span<const LadderOp> ops, Complex coefficient = 1.0);

  const std::vector<LadderMonomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::size_t max_length() const;
  /// Largest mode index plus one; zero for a constant polynomial.
  int mode_span() const;

  /// Merges equal op sequences and drops terms below 1e-15 of the largest
  /// coefficient. Term order follows first appearance.
  LadderPolynomial& canonicalize();
  LadderPolynomial canonical() const;

  LadderPolynomial& operator+=(const LadderPolynomial& rhs);
  LadderPolynomial& operator*=(Complex scale);
  friend LadderPolynomial operator+(LadderPolynomial lhs, const LadderPolynomial& rhs) { return lhs += rhs; }
  friend LadderPolynomial operator*(Complex scale, LadderPolynomial poly) { return poly *= scale; }
  /// Concatenating product, distributed over terms.
  friend LadderPolynomial operator*(const LadderPolynomial& lhs, const LadderPolynomial& rhs);

  /// Structural equality after canonicalization, coefficients within `tolerance`.
  bool approx_equal(const LadderPolynomial& other, double tolerance = 1e-12) const;

 private:
  std::vector<LadderMonomial> terms_;
};

LadderPolynomial dagger(const LadderPolynomial& poly);
LadderPolynomial multiply(const LadderPolynomial& lhs, const LadderPolynomial& rhs);

/// Substitutes a_k^dag -> sum_j E(k,j) a_j^dag + F(k,j) a_j and
/// a_k -> sum_j conj(E(k,j)) a_j + conj(F(k,j)) a_j^dag in every monomial and
/// expands. With map = bogoliubov_of(G) this is X -> G^dag X G; use
/// map.inverse() for G X G^dag.
LadderPolynomial conjugate_by_gaussian(const LadderPolynomial& poly, const BogoliubovMap& map);

/// One IPAG layer: a Gaussian unitary followed by a ladder polynomial.
struct IpagLayer {
  SymplecticMatrix gaussian;
  LadderPolynomial ladder;
};

struct IpagOptions {
  std::size_t term_warning_cap = 200000;
};

/// Layered state P_l G_l ... P_1 G_1 |0> rewritten as P G |0>.
struct ReducedCircuit {
  SymplecticMatrix gaussian;
  LadderPolynomial ladder;
  /// Ladder operations before any Gaussian expansion (stellar-rank style count).
  std::size_t ladder_op_count = 0;
  bool exceeded_term_cap = false;
};

ReducedCircuit ipag_reduce(std::span<const IpagLayer> layers, const IpagOptions& options = {});

/// Text format: "coeff * a'(k) a(j) ..." per line; a' is a creation operator,
/// modes are 1-based; a bare constant is written "coeff * 1".
std::string to_text(const LadderPolynomial& poly);
void write_polynomial(std::ostream& out, const LadderPolynomial& poly);
LadderPolynomial parse_polynomial(const std::string& text);

}  // namespace cvvqe
