#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cvvqe/ladder.hpp"

namespace cvvqe {

enum class Boundary { open, periodic };

std::string to_string(Boundary boundary);
Boundary boundary_from_string(const std::string& name);

/// 1D Bose-Hubbard chain
///   H = -t sum_<ij> (b_i b_j^dag + b_i^dag b_j) + U/2 sum_i n_i n_i - (mu + U/2) sum_i n_i
struct BoseHubbardParams {
  int n_sites = 2;
  double hopping = 1.0;
  double interaction = 1.0;
  double chemical_potential = 1.0;
  Boundary boundary = Boundary::open;

  /// Throws std::invalid_argument for L < 2, or L < 3 with periodic boundary.
  void validate() const;
  /// Nearest-neighbour pairs (i, i+1), plus (L-1, 0) when periodic.
  std::vector<std::pair<int, int>> bonds() const;
};

/// The Hamiltonian as a ladder polynomial in the operator order shown above
/// (interaction kept as b^dag b b^dag b). Zero coefficients are dropped.
LadderPolynomial bose_hubbard_polynomial(const BoseHubbardParams& params);

/// sum_i n_i
LadderPolynomial total_number(int n_modes);

}  // namespace cvvqe
