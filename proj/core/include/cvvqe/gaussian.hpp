#pragma once

// Zero-mean Gaussian states in the covariance-matrix picture.
//
// Conventions (see docs/conventions.md):
//   x = a + a^dag, p = i(a^dag - a), [x, p] = 2i, vacuum covariance = identity.
//   Quadrature vectors are ordered xxpp: (x_1..x_N, p_1..p_N).
//   A Gaussian unitary G is represented by its Heisenberg-picture symplectic
//   matrix S, defined by G^dag xi G = S xi. Hence S(G1 G2) = S(G1) S(G2) and
//   the state G|0> has covariance S S^T.

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvvqe {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Symplectic form [[0, I], [-I, 0]] for n_modes modes.
RealMatrix symplectic_form(int n_modes);

class CovarianceMatrix {
 public:
  /// Throws std::invalid_argument unless `entries` is a symmetric 2N x 2N
  /// matrix (|V - V^T|_max <= 1e-12). Physicality is not checked here.
  explicit CovarianceMatrix(RealMatrix entries);

  int n_modes() const { return static_cast<int>(entries_.rows() / 2); }
  const RealMatrix& matrix() const { return entries_; }
  double operator()(Eigen::Index row, Eigen::Index col) const { return entries_(row, col); }

 private:
  RealMatrix entries_;
};

class SymplecticMatrix {
 public:
  /// Throws std::invalid_argument unless `entries` is square with even size
  /// and S Omega S^T = Omega within `tolerance`.
  explicit SymplecticMatrix(RealMatrix entries, double tolerance = 1e-8);

  static SymplecticMatrix identity(int n_modes);

  int n_modes() const { return static_cast<int>(entries_.rows() / 2); }
  const RealMatrix& matrix() const { return entries_; }

  /// Heisenberg composition: (*this) * rhs represents G_this G_rhs.
  SymplecticMatrix operator*(const SymplecticMatrix& rhs) const;
  SymplecticMatrix inverse() const;

  /// max |S Omega S^T - Omega|
  double symplectic_residual() const;
  /// max |S S^T - I|; zero for passive elements
  double orthogonality_residual() const;

 private:
  struct Unchecked {};
  SymplecticMatrix(RealMatrix entries, Unchecked) : entries_(std::move(entries)) {}
  RealMatrix entries_;
};

/// Squeezings s_j (x-variance factor e^{-2 s_j}) followed by a passive
/// interferometer parametrized by N^2 mesh angles. See passive_from_params.
struct GaussianParams {
  RealVector squeezings;
  RealVector passive;

  static GaussianParams zeros(int n_modes);
  /// Unpacks [s_1..s_N, theta_1..theta_{N^2}].
  static GaussianParams from_flat(std::span<const double> flat, int n_modes);

  int n_modes() const { return static_cast<int>(squeezings.size()); }
  static std::size_t parameter_count(int n_modes) {
    return static_cast<std::size_t>(n_modes) * n_modes + n_modes;
  }
  std::vector<double> flatten() const;
};

/// Complex form of a Gaussian unitary in the Heisenberg picture:
///   G^dag a_k^dag G = sum_j E(k,j) a_j^dag + F(k,j) a_j.
struct BogoliubovMap {
  ComplexMatrix E;
  ComplexMatrix F;

  static BogoliubovMap identity(int n_modes);

  int n_modes() const { return static_cast<int>(E.rows()); }
  /// Composition matching SymplecticMatrix::operator*.
  BogoliubovMap operator*(const BogoliubovMap& rhs) const;
  /// Map of G^{-1}; conjugating by the inverse gives G a^dag G^dag.
  BogoliubovMap inverse() const;
  /// max of |E E^dag - F F^dag - I| and |E F^T - F E^T|.
  double canonical_residual() const;
};

/// One element of the rectangular interferometer mesh: a phase `phase` on
/// mode `first`, then a real rotation by `angle` between modes (first, first+1).
struct MeshElement {
  int first;
  double angle;
  double phase;
};

/// Number of two-mode mesh elements, N(N-1)/2.
std::size_t mesh_element_count(int n_modes);

/// Mode pairs of the rectangular mesh in application order (column-major).
std::vector<int> mesh_layout(int n_modes);

/// Decodes theta (length N^2) into mesh elements in application order plus
/// the N output phases. Parameter layout: (angle_k, phase_k) for each mesh
/// element, then the N output phases.
std::vector<MeshElement> mesh_elements(std::span<const double> theta, int n_modes,
                                       std::vector<double>* output_phases = nullptr);

/// Single-photon unitary W of the passive network (Schrodinger picture):
/// G a_k^dag G^dag = sum_j W(j,k) a_j^dag.
ComplexMatrix passive_unitary(std::span<const double> theta);

/// Orthogonal symplectic matrix of the passive network. theta.size() must be
/// a perfect square N^2.
SymplecticMatrix passive_from_params(std::span<const double> theta);

/// Realification [[Re W, -Im W], [Im W, Re W]] of a single-photon unitary.
SymplecticMatrix passive_from_unitary(const ComplexMatrix& unitary);

SymplecticMatrix squeezer_symplectic(std::span<const double> squeezings);

/// S = S_passive * S_squeeze (squeezers act on the vacuum first).
SymplecticMatrix gaussian_symplectic(const GaussianParams& params);

CovarianceMatrix vacuum_covariance(int n_modes);
CovarianceMatrix covariance_of(const SymplecticMatrix& symplectic);
CovarianceMatrix gaussian_covariance(const GaussianParams& params);

/// O V O^T
CovarianceMatrix transform(const CovarianceMatrix& covariance, const SymplecticMatrix& symplectic);

/// 1 / sqrt(det V). Throws std::domain_error for det V <= 0.
double purity(const CovarianceMatrix& covariance);

/// Uniform scaling c V with c = p^{-1/N}, so that purity(result) = p.
/// Requires det V = 1 within 1e-6 and p in (0, 1].
CovarianceMatrix apply_impurity(const CovarianceMatrix& covariance, double target_purity);

/// Symplectic eigenvalues (moduli of the eigenvalues of i Omega V), ascending.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& covariance);

/// The N eigenvalues r_j <= 1 of a pure covariance matrix, ascending.
/// Throws std::domain_error if det V deviates from 1 by more than 1e-6.
std::vector<double> squeezing_spectrum(const CovarianceMatrix& covariance);

BogoliubovMap bogoliubov_of(const SymplecticMatrix& symplectic);
BogoliubovMap bogoliubov_of(const GaussianParams& params);

/// Inverse of bogoliubov_of: S blocks from (E, F).
SymplecticMatrix symplectic_of(const BogoliubovMap& map);

/// Debug dump: "n_modes N" header line, then 2N rows of 2N decimal values.
void write_covariance(std::ostream& out, const CovarianceMatrix& covariance);
CovarianceMatrix read_covariance(std::istream& in);

}  // namespace cvvqe
