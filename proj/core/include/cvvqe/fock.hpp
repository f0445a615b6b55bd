#pragma once

// Brute-force truncated-Fock reference: dense state vectors over
// {0..n_max}^N, Gaussian unitaries built from matrix exponentials of their
// quadratic generators, and exact diagonalization of the Bose-Hubbard chain.
// Everything here is independent of the covariance-matrix / Wick route and
// serves as its oracle.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cvvqe/gaussian.hpp"
#include "cvvqe/ladder.hpp"
#include "cvvqe/models.hpp"

namespace cvvqe {

/// Occupation basis {0..n_max}^N, row-major with mode 0 slowest.
class FockSpace {
 public:
  static constexpr std::size_t kMaxDimension = 2'000'000;

  /// Throws std::invalid_argument when the dimension exceeds kMaxDimension.
  FockSpace(int n_modes, int n_max);

  int n_modes() const { return n_modes_; }
  int n_max() const { return n_max_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t stride(int mode) const { return strides_[static_cast<std::size_t>(mode)]; }

  int occupation(std::size_t index, int mode) const {
    return static_cast<int>(index / stride(mode) % static_cast<std::size_t>(n_max_ + 1));
  }
  std::vector<int> occupations(std::size_t index) const;
  std::size_t index(std::span<const int> occupations) const;

  friend bool operator==(const FockSpace& a, const FockSpace& b) {
    return a.n_modes_ == b.n_modes_ && a.n_max_ == b.n_max_;
  }

 private:
  int n_modes_;
  int n_max_;
  std::size_t dimension_;
  std::vector<std::size_t> strides_;
};

struct FockVector {
  FockSpace space;
  Eigen::VectorXcd amplitudes;
  /// Squared norm lost to the cutoff so far, relative to the input norm.
  double leakage = 0.0;

  double norm() const { return amplitudes.norm(); }
};

FockVector vacuum_state(const FockSpace& space);
FockVector basis_state(const FockSpace& space, std::span<const int> occupations);

/// Raised when a Gaussian evolution loses more than the allowed probability
/// mass above the cutoff; raise n_max and retry.
class LeakageError : public std::runtime_error {
 public:
  LeakageError(double leakage, int n_max);
  double leakage() const { return leakage_; }

 private:
  double leakage_;
};

struct FockGaussianOptions {
  /// Extra per-mode levels carried internally so that amplitudes inside the
  /// n_max box are not distorted by the cutoff.
  int padding = 20;
  double max_leakage = 1e-8;
};

/// Applies squeezers exp[(s_j/2)(a_j^2 - a_j^dag^2)] and then the passive
/// mesh (phase exp(i phi n_i), rotation exp[theta (a_{i+1}^dag a_i - a_i^dag a_{i+1})],
/// output phases) to `state`. Throws LeakageError when the total leakage
/// exceeds options.max_leakage.
FockVector apply_gaussian(const GaussianParams& params, const FockVector& state,
                          const FockGaussianOptions& options = {});

FockVector gaussian_state_fock(const GaussianParams& params, const FockSpace& space,
                               const FockGaussianOptions& options = {});

/// Truncated action of a ladder polynomial; a^dag|n_max> components are
/// dropped and their weight added to `leakage`.
FockVector apply_polynomial(const LadderPolynomial& poly, const FockVector& state);

/// <v|P|v> / <v|v>. Throws std::domain_error for a zero vector.
Complex expectation_fock(const LadderPolynomial& poly, const FockVector& state);

/// Sparse matrix of the truncated polynomial action.
Eigen::SparseMatrix<Complex> polynomial_matrix(const LadderPolynomial& poly, const FockSpace& space);

/// Dense single-mode matrices on {0..n_max}.
Eigen::MatrixXd annihilation_matrix(int n_max);

// --- exact diagonalization ------------------------------------------------

/// Bose-Hubbard matrix built directly in the occupation basis.
Eigen::SparseMatrix<double> bose_hubbard_matrix(const BoseHubbardParams& params, int n_max);

double hermiticity_residual(const Eigen::SparseMatrix<double>& matrix);

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LanczosResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Lowest eigenvalue by Lanczos with full reorthogonalization. Throws
/// ConvergenceError if the Ritz residual has not dropped below
/// tolerance * max(1, |lambda|) after max_iterations.
LanczosResult lanczos_lowest(const Eigen::SparseMatrix<double>& matrix, int max_iterations = 600,
                             double tolerance = 1e-11);

/// automatic splits H into fixed boson-number sectors; dense and lanczos work on the full matrix.
enum class EdSolver { automatic, dense, lanczos };

struct EdOptions {
  EdSolver solver = EdSolver::automatic;
  std::size_t dense_threshold = 2000;
  int lanczos_max_iterations = 600;
  double lanczos_tolerance = 1e-11;
};

/// Ground energy of the Bose-Hubbard chain with at most n_max bosons per site.
double bh_ground_energy(const BoseHubbardParams& params, int n_max, const EdOptions& options = {});

}  // namespace cvvqe
