#include "cvvqe/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <mutex>
#include <random>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace cvvqe {

FockSpace::FockSpace(int n_modes, int n_max) : n_modes_(n_modes), n_max_(n_max), dimension_(1) {
  if (n_modes < 1 || n_max < 0) throw std::invalid_argument("Fock space needs n_modes >= 1 and n_max >= 0");
  const std::size_t levels = static_cast<std::size_t>(n_max) + 1;
  for (int m = 0; m < n_modes; ++m) {
    if (dimension_ > kMaxDimension / levels) {
      throw std::invalid_argument(
          fmt::format("Fock space ({}+1)^{} exceeds the dimension bound {}", n_max, n_modes, kMaxDimension));
    }
    dimension_ *= levels;
  }
  strides_.assign(static_cast<std::size_t>(n_modes), 1);
  for (int m = n_modes - 2; m >= 0; --m) {
    strides_[static_cast<std::size_t>(m)] = strides_[static_cast<std::size_t>(m + 1)] * levels;
  }
}

std::vector<int> FockSpace::occupations(std::size_t index) const {
  std::vector<int> occ(static_cast<std::size_t>(n_modes_));
  for (int m = 0; m < n_modes_; ++m) occ[static_cast<std::size_t>(m)] = occupation(index, m);
  return occ;
}

std::size_t FockSpace::index(std::span<const int> occupations) const {
  if (occupations.size() != static_cast<std::size_t>(n_modes_)) {
    throw std::invalid_argument("occupation tuple has the wrong number of modes");
  }
  std::size_t idx = 0;
  for (int m = 0; m < n_modes_; ++m) {
    const int n = occupations[static_cast<std::size_t>(m)];
    if (n < 0 || n > n_max_) throw std::out_of_range(fmt::format("occupation {} outside 0..{}", n, n_max_));
    idx += static_cast<std::size_t>(n) * stride(m);
  }
  return idx;
}

FockVector vacuum_state(const FockSpace& space) {
  FockVector v{space, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension())), 0.0};
  v.amplitudes(0) = 1.0;
  return v;
}

FockVector basis_state(const FockSpace& space, std::span<const int> occupations) {
  FockVector v{space, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension())), 0.0};
  v.amplitudes(static_cast<Eigen::Index>(space.index(occupations))) = 1.0;
  return v;
}

LeakageError::LeakageError(double leakage, int n_max)
    : std::runtime_error(fmt::format("Fock truncation at n_max = {} leaks {:.3g} of the norm; raise n_max", n_max,
                                     leakage)),
      leakage_(leakage) {}

Eigen::MatrixXd annihilation_matrix(int n_max) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

namespace {

using StridedColumn = Eigen::Map<Eigen::VectorXcd, 0, Eigen::InnerStride<Eigen::Dynamic>>;

// Applies a (levels x levels) operator to one mode of a state in `space`.
void apply_single_mode(Eigen::VectorXcd& amplitudes, const FockSpace& space, int mode, const Eigen::MatrixXcd& op) {
  const std::size_t levels = static_cast<std::size_t>(space.n_max()) + 1;
  const std::size_t stride = space.stride(mode);
  const std::size_t block = levels * stride;
  Eigen::VectorXcd scratch(static_cast<Eigen::Index>(levels));
  for (std::size_t high = 0; high < space.dimension(); high += block) {
    for (std::size_t low = 0; low < stride; ++low) {
      StridedColumn column(amplitudes.data() + high + low, static_cast<Eigen::Index>(levels),
                           Eigen::InnerStride<Eigen::Dynamic>(static_cast<Eigen::Index>(stride)));
      scratch.noalias() = op * column;
      column = scratch;
    }
  }
}

void apply_phase(Eigen::VectorXcd& amplitudes, const FockSpace& space, int mode, double phase) {
  if (phase == 0.0) return;
  Eigen::MatrixXcd diagonal = Eigen::MatrixXcd::Zero(space.n_max() + 1, space.n_max() + 1);
  for (int n = 0; n <= space.n_max(); ++n) diagonal(n, n) = std::polar(1.0, phase * n);
  apply_single_mode(amplitudes, space, mode, diagonal);
}

// exp[(s/2)(a^2 - a^dag^2)] restricted to the first `levels` Fock states,
// computed on a larger space so the cutoff does not distort the block.
Eigen::MatrixXcd squeezer_block(double squeezing, int n_max) {
  const int big = n_max + 40;
  const Eigen::MatrixXd a = annihilation_matrix(big);
  const Eigen::MatrixXd generator = 0.5 * squeezing * (a * a - a.transpose() * a.transpose());
  const Eigen::MatrixXd full = generator.exp();
  return full.topLeftCorner(n_max + 1, n_max + 1).cast<Complex>();
}

// Eigendecomposition of H_T = -i K_T, where K_T is the rotation generator
// a_j^dag a_i - a_i^dag a_j on the (T+1)-dimensional block {|k, T-k>}.
struct RotationBlock {
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd values;
};

const RotationBlock& rotation_block(int total) {
  static std::mutex mutex;
  static std::map<int, RotationBlock> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(total); it != cache.end()) return it->second;

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(total + 1, total + 1);
  for (int n = 0; n <= total; ++n) {
    // a_j^dag a_i |n, T-n> = sqrt(n (T-n+1)) |n-1, T-n+1>
    if (n >= 1) k(n - 1, n) += std::sqrt(static_cast<double>(n) * (total - n + 1));
    // -a_i^dag a_j |n, T-n> = -sqrt((n+1)(T-n)) |n+1, T-n-1>
    if (n < total) k(n + 1, n) -= std::sqrt(static_cast<double>(n + 1) * (total - n));
  }
  const Eigen::MatrixXcd hermitian = Complex(0.0, -1.0) * k.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian);
  return cache.emplace(total, RotationBlock{solver.eigenvectors(), solver.eigenvalues()}).first->second;
}

void apply_rotation(Eigen::VectorXcd& amplitudes, const FockSpace& space, int first, double angle) {
  if (angle == 0.0) return;
  const int n_max = space.n_max();
  const int second = first + 1;
  const std::size_t stride_i = space.stride(first);
  const std::size_t stride_j = space.stride(second);

  std::vector<Eigen::MatrixXcd> blocks(static_cast<std::size_t>(2 * n_max + 1));
  for (int total = 0; total <= 2 * n_max; ++total) {
    const auto& eig = rotation_block(total);
    Eigen::VectorXcd phases(eig.values.size());
    for (Eigen::Index q = 0; q < eig.values.size(); ++q) phases(q) = std::polar(1.0, angle * eig.values(q));
    blocks[static_cast<std::size_t>(total)] = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  }

  Eigen::VectorXcd in;
  Eigen::VectorXcd out;
  for (std::size_t base = 0; base < space.dimension(); ++base) {
    if (space.occupation(base, first) != 0 || space.occupation(base, second) != 0) continue;
    for (int total = 0; total <= 2 * n_max; ++total) {
      const int low = std::max(0, total - n_max);
      const int high = std::min(total, n_max);
      const int count = high - low + 1;
      in.resize(count);
      for (int k = low; k <= high; ++k) {
        in(k - low) = amplitudes(static_cast<Eigen::Index>(base + static_cast<std::size_t>(k) * stride_i +
                                                           static_cast<std::size_t>(total - k) * stride_j));
      }
      const auto& u = blocks[static_cast<std::size_t>(total)];
      out.noalias() = u.block(low, low, count, count) * in;
      for (int k = low; k <= high; ++k) {
        amplitudes(static_cast<Eigen::Index>(base + static_cast<std::size_t>(k) * stride_i +
                                             static_cast<std::size_t>(total - k) * stride_j)) = out(k - low);
      }
    }
  }
}

// Maps amplitudes between two spaces with the same mode count; entries
// outside the target box are dropped.
Eigen::VectorXcd reembed(const Eigen::VectorXcd& amplitudes, const FockSpace& from, const FockSpace& to) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.dimension()));
  std::vector<int> occ(static_cast<std::size_t>(from.n_modes()));
  for (std::size_t idx = 0; idx < from.dimension(); ++idx) {
    const Complex value = amplitudes(static_cast<Eigen::Index>(idx));
    if (value == Complex(0.0)) continue;
    bool inside = true;
    for (int m = 0; m < from.n_modes(); ++m) {
      occ[static_cast<std::size_t>(m)] = from.occupation(idx, m);
      inside = inside && occ[static_cast<std::size_t>(m)] <= to.n_max();
    }
    if (inside) out(static_cast<Eigen::Index>(to.index(occ))) = value;
  }
  return out;
}

}  // namespace

FockVector apply_gaussian(const GaussianParams& params, const FockVector& state, const FockGaussianOptions& options) {
  const FockSpace& box = state.space;
  const int n = box.n_modes();
  if (params.n_modes() != n) throw std::invalid_argument("Gaussian parameters and Fock space disagree on modes");
  const double input_norm2 = state.amplitudes.squaredNorm();
  if (input_norm2 == 0.0) throw std::domain_error("cannot evolve the zero vector");

  const FockSpace padded(n, box.n_max() + std::max(0, options.padding));
  Eigen::VectorXcd work = reembed(state.amplitudes, box, padded);

  for (int m = 0; m < n; ++m) {
    const double s = params.squeezings(m);
    if (s != 0.0) apply_single_mode(work, padded, m, squeezer_block(s, padded.n_max()));
  }
  std::vector<double> output_phases;
  const auto elements = mesh_elements(
      std::span<const double>(params.passive.data(), static_cast<std::size_t>(params.passive.size())), n,
      &output_phases);
  for (const auto& element : elements) {
    apply_phase(work, padded, element.first, element.phase);
    apply_rotation(work, padded, element.first, element.angle);
  }
  for (int m = 0; m < n; ++m) apply_phase(work, padded, m, output_phases[static_cast<std::size_t>(m)]);

  FockVector out{box, reembed(work, padded, box), state.leakage};
  out.leakage += std::max(0.0, (input_norm2 - out.amplitudes.squaredNorm()) / input_norm2);
  if (out.leakage > options.max_leakage) throw LeakageError(out.leakage, box.n_max());
  return out;
}

FockVector gaussian_state_fock(const GaussianParams& params, const FockSpace& space,
                               const FockGaussianOptions& options) {
  return apply_gaussian(params, vacuum_state(space), options);
}

// ---------------------------------------------------------------------------

namespace {

// Applies a monomial to one basis state. Returns false if the result is zero
// (annihilation below 0) or leaves the box (creation above n_max, flagged).
struct BasisAction {
  std::size_t target = 0;
  double factor = 1.0;
  bool zero = false;
  bool dropped = false;
};

BasisAction act_on_basis(const LadderMonomial& term, const FockSpace& space, std::size_t index) {
  BasisAction action{index, 1.0, false, false};
  for (auto it = term.ops.rbegin(); it != term.ops.rend(); ++it) {
    const int n = space.occupation(action.target, it->mode);
    const std::size_t stride = space.stride(it->mode);
    if (it->is_creation()) {
      if (n == space.n_max()) {
        action.dropped = true;
        action.factor *= std::sqrt(static_cast<double>(n + 1));
        return action;
      }
      action.factor *= std::sqrt(static_cast<double>(n + 1));
      action.target += stride;
    } else {
      if (n == 0) {
        action.zero = true;
        return action;
      }
      action.factor *= std::sqrt(static_cast<double>(n));
      action.target -= stride;
    }
  }
  return action;
}

void check_span(const LadderPolynomial& poly, const FockSpace& space) {
  if (poly.mode_span() > space.n_modes()) {
    throw std::invalid_argument(
        fmt::format("polynomial touches mode {} but the Fock space has {} modes", poly.mode_span(), space.n_modes()));
  }
}

}  // namespace

FockVector apply_polynomial(const LadderPolynomial& poly, const FockVector& state) {
  const FockSpace& space = state.space;
  check_span(poly, space);
  FockVector out{space, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension())), state.leakage};
  double dropped = 0.0;
  for (std::size_t idx = 0; idx < space.dimension(); ++idx) {
    const Complex amplitude = state.amplitudes(static_cast<Eigen::Index>(idx));
    if (amplitude == Complex(0.0)) continue;
    for (const auto& term : poly.terms()) {
      const auto action = act_on_basis(term, space, idx);
      if (action.zero) continue;
      const Complex value = term.coefficient * action.factor * amplitude;
      if (action.dropped) {
        dropped += std::norm(value);
      } else {
        out.amplitudes(static_cast<Eigen::Index>(action.target)) += value;
      }
    }
  }
  const double norm2 = state.amplitudes.squaredNorm();
  if (norm2 > 0.0) out.leakage += dropped / norm2;
  return out;
}

Complex expectation_fock(const LadderPolynomial& poly, const FockVector& state) {
  const double norm2 = state.amplitudes.squaredNorm();
  if (!(norm2 > 0.0)) throw std::domain_error("expectation of a zero-norm Fock vector");
  const FockVector image = apply_polynomial(poly, state);
  return state.amplitudes.dot(image.amplitudes) / norm2;
}

Eigen::SparseMatrix<Complex> polynomial_matrix(const LadderPolynomial& poly, const FockSpace& space) {
  check_span(poly, space);
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t idx = 0; idx < space.dimension(); ++idx) {
    for (const auto& term : poly.terms()) {
      const auto action = act_on_basis(term, space, idx);
      if (action.zero || action.dropped) continue;
      triplets.emplace_back(static_cast<Eigen::Index>(action.target), static_cast<Eigen::Index>(idx),
                            term.coefficient * action.factor);
    }
  }
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  Eigen::SparseMatrix<Complex> matrix(dim, dim);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return matrix;
}

// ---------------------------------------------------------------------------

Eigen::SparseMatrix<double> bose_hubbard_matrix(const BoseHubbardParams& params, int n_max) {
  params.validate();
  const FockSpace space(params.n_sites, n_max);
  const double t = params.hopping;
  const double half_u = 0.5 * params.interaction;
  const double mu_shift = params.chemical_potential + half_u;
  const auto bonds = params.bonds();

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t idx = 0; idx < space.dimension(); ++idx) {
    double diagonal = 0.0;
    for (int i = 0; i < params.n_sites; ++i) {
      const double n = space.occupation(idx, i);
      diagonal += half_u * n * n - mu_shift * n;
    }
    if (diagonal != 0.0) triplets.emplace_back(idx, idx, diagonal);
    if (t == 0.0) continue;
    for (const auto& [i, j] : bonds) {
      const int ni = space.occupation(idx, i);
      const int nj = space.occupation(idx, j);
      // b_i b_j^dag
      if (ni >= 1 && nj < n_max) {
        const std::size_t target = idx - space.stride(i) + space.stride(j);
        triplets.emplace_back(target, idx, -t * std::sqrt(static_cast<double>(ni) * (nj + 1)));
      }
      // b_i^dag b_j
      if (nj >= 1 && ni < n_max) {
        const std::size_t target = idx + space.stride(i) - space.stride(j);
        triplets.emplace_back(target, idx, -t * std::sqrt(static_cast<double>(ni + 1) * nj));
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  Eigen::SparseMatrix<double> matrix(dim, dim);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return matrix;
}

double hermiticity_residual(const Eigen::SparseMatrix<double>& matrix) {
  const Eigen::SparseMatrix<double> difference = matrix - Eigen::SparseMatrix<double>(matrix.transpose());
  double largest = 0.0;
  for (int k = 0; k < difference.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(difference, k); it; ++it) {
      largest = std::max(largest, std::abs(it.value()));
    }
  }
  return largest;
}

LanczosResult lanczos_lowest(const Eigen::SparseMatrix<double>& matrix, int max_iterations, double tolerance) {
  const Eigen::Index dim = matrix.rows();
  if (dim == 0) throw std::invalid_argument("empty matrix");
  const int steps = static_cast<int>(std::min<Eigen::Index>(max_iterations, dim));

  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd start(dim);
  for (Eigen::Index k = 0; k < dim; ++k) start(k) = 1.0 + 0.1 * uniform(rng);
  start.normalize();

  Eigen::MatrixXd basis(dim, steps);
  std::vector<double> alpha;
  std::vector<double> beta;
  basis.col(0) = start;
  LanczosResult result;
  for (int k = 0; k < steps; ++k) {
    Eigen::VectorXd w = matrix * basis.col(k);
    alpha.push_back(basis.col(k).dot(w));
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    }
    const double b = w.norm();

    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k + 1);
    Eigen::VectorXd offdiag = Eigen::Map<const Eigen::VectorXd>(beta.data(), k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    result.eigenvalue = tri.eigenvalues()(0);
    result.iterations = k + 1;
    result.residual = b * std::abs(tri.eigenvectors()(k, 0));

    const bool exhausted = b <= 1e-14 * std::max(1.0, std::abs(result.eigenvalue)) || k + 1 == dim;
    if (result.residual <= tolerance * std::max(1.0, std::abs(result.eigenvalue)) || exhausted) return result;
    if (k + 1 < steps) {
      beta.push_back(b);
      basis.col(k + 1) = w / b;
    }
  }
  throw ConvergenceError(fmt::format("Lanczos did not converge in {} iterations (residual {:.3g})", steps,
                                     result.residual));
}

namespace {

double dense_lowest(const Eigen::SparseMatrix<double>& matrix) {
  const Eigen::MatrixXd full(matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(full, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace

double bh_ground_energy(const BoseHubbardParams& params, int n_max, const EdOptions& options) {
  const auto matrix = bose_hubbard_matrix(params, n_max);
  const auto dim = static_cast<std::size_t>(matrix.rows());
  if (options.solver == EdSolver::dense) return dense_lowest(matrix);
  if (options.solver == EdSolver::lanczos) {
    return lanczos_lowest(matrix, options.lanczos_max_iterations, options.lanczos_tolerance).eigenvalue;
  }

  // H conserves the total boson number, so diagonalize one sector at a time.
  const FockSpace space(params.n_sites, n_max);
  std::vector<std::vector<Eigen::Index>> sectors(static_cast<std::size_t>(params.n_sites * n_max + 1));
  std::vector<Eigen::Index> position(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    int total = 0;
    for (int i = 0; i < params.n_sites; ++i) total += space.occupation(idx, i);
    auto& sector = sectors[static_cast<std::size_t>(total)];
    position[idx] = static_cast<Eigen::Index>(sector.size());
    sector.push_back(static_cast<Eigen::Index>(idx));
  }

  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& sector : sectors) {
    const auto size = static_cast<Eigen::Index>(sector.size());
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index col = 0; col < size; ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, sector[static_cast<std::size_t>(col)]); it; ++it) {
        triplets.emplace_back(position[static_cast<std::size_t>(it.row())], col, it.value());
      }
    }
    Eigen::SparseMatrix<double> block(size, size);
    block.setFromTriplets(triplets.begin(), triplets.end());
    const double e = sector.size() < options.dense_threshold
                         ? dense_lowest(block)
                         : lanczos_lowest(block, options.lanczos_max_iterations, options.lanczos_tolerance).eigenvalue;
    lowest = std::min(lowest, e);
  }
  return lowest;
}

}  // namespace cvvqe
