#include "cvvqe/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace cvvqe {

namespace {

int modes_from_square(std::size_t count) {
  const auto root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
  if (root < 1 || static_cast<std::size_t>(root) * root != count) {
    throw std::invalid_argument(
        fmt::format("passive parameter count {} is not a positive perfect square N^2", count));
  }
  return root;
}

}  // namespace

RealMatrix symplectic_form(int n_modes) {
  RealMatrix omega = RealMatrix::Zero(2 * n_modes, 2 * n_modes);
  omega.topRightCorner(n_modes, n_modes).setIdentity();
  omega.bottomLeftCorner(n_modes, n_modes) = -RealMatrix::Identity(n_modes, n_modes);
  return omega;
}

// ---------------------------------------------------------------------------

CovarianceMatrix::CovarianceMatrix(RealMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0 || entries_.rows() % 2 != 0) {
    throw std::invalid_argument(fmt::format("covariance matrix must be 2N x 2N, got {} x {}",
                                            entries_.rows(), entries_.cols()));
  }
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, entries_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(fmt::format("covariance matrix is not symmetric (residual {:g})", asym));
  }
  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
}

SymplecticMatrix::SymplecticMatrix(RealMatrix entries, double tolerance)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0 || entries_.rows() % 2 != 0) {
    throw std::invalid_argument(fmt::format("symplectic matrix must be 2N x 2N, got {} x {}",
                                            entries_.rows(), entries_.cols()));
  }
  const double residual = symplectic_residual();
  if (!(residual <= tolerance * std::max(1.0, entries_.squaredNorm()))) {
    throw std::invalid_argument(fmt::format("matrix is not symplectic (residual {:g})", residual));
  }
}

SymplecticMatrix SymplecticMatrix::identity(int n_modes) {
  return {RealMatrix::Identity(2 * n_modes, 2 * n_modes), Unchecked{}};
}

SymplecticMatrix SymplecticMatrix::operator*(const SymplecticMatrix& rhs) const {
  if (rhs.n_modes() != n_modes()) {
    throw std::invalid_argument("cannot compose symplectic matrices of different mode counts");
  }
  return {entries_ * rhs.entries_, Unchecked{}};
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  // S^{-1} = Omega^T S^T Omega
  const RealMatrix omega = symplectic_form(n_modes());
  return {omega.transpose() * entries_.transpose() * omega, Unchecked{}};
}

double SymplecticMatrix::symplectic_residual() const {
  const RealMatrix omega = symplectic_form(n_modes());
  return (entries_ * omega * entries_.transpose() - omega).cwiseAbs().maxCoeff();
}

double SymplecticMatrix::orthogonality_residual() const {
  const auto dim = entries_.rows();
  return (entries_ * entries_.transpose() - RealMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

GaussianParams GaussianParams::zeros(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  return {RealVector::Zero(n_modes), RealVector::Zero(static_cast<Eigen::Index>(n_modes) * n_modes)};
}

GaussianParams GaussianParams::from_flat(std::span<const double> flat, int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  if (flat.size() != parameter_count(n_modes)) {
    throw std::invalid_argument(fmt::format("expected {} Gaussian parameters for {} modes, got {}",
                                            parameter_count(n_modes), n_modes, flat.size()));
  }
  GaussianParams params = zeros(n_modes);
  for (int j = 0; j < n_modes; ++j) params.squeezings(j) = flat[j];
  for (Eigen::Index k = 0; k < params.passive.size(); ++k) {
    params.passive(k) = flat[static_cast<std::size_t>(n_modes + k)];
  }
  return params;
}

std::vector<double> GaussianParams::flatten() const {
  std::vector<double> flat(squeezings.data(), squeezings.data() + squeezings.size());
  flat.insert(flat.end(), passive.data(), passive.data() + passive.size());
  return flat;
}

// ---------------------------------------------------------------------------

BogoliubovMap BogoliubovMap::identity(int n_modes) {
  return {ComplexMatrix::Identity(n_modes, n_modes), ComplexMatrix::Zero(n_modes, n_modes)};
}

BogoliubovMap BogoliubovMap::operator*(const BogoliubovMap& rhs) const {
  return {E * rhs.E + F * rhs.F.conjugate(), E * rhs.F + F * rhs.E.conjugate()};
}

BogoliubovMap BogoliubovMap::inverse() const {
  return {E.adjoint(), -F.transpose()};
}

double BogoliubovMap::canonical_residual() const {
  const auto n = E.rows();
  const double unitary = (E * E.adjoint() - F * F.adjoint() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  const double symmetric = (E * F.transpose() - F * E.transpose()).cwiseAbs().maxCoeff();
  return std::max(unitary, symmetric);
}

// ---------------------------------------------------------------------------

std::size_t mesh_element_count(int n_modes) {
  return static_cast<std::size_t>(n_modes) * (n_modes - 1) / 2;
}

std::vector<int> mesh_layout(int n_modes) {
  std::vector<int> firsts;
  firsts.reserve(mesh_element_count(n_modes));
  for (int column = 0; column < n_modes; ++column) {
    for (int first = column % 2; first + 1 < n_modes; first += 2) firsts.push_back(first);
  }
  return firsts;
}

std::vector<MeshElement> mesh_elements(std::span<const double> theta, int n_modes,
                                       std::vector<double>* output_phases) {
  if (theta.size() != static_cast<std::size_t>(n_modes) * n_modes) {
    throw std::invalid_argument(
        fmt::format("expected {} passive parameters, got {}", n_modes * n_modes, theta.size()));
  }
  const auto firsts = mesh_layout(n_modes);
  std::vector<MeshElement> elements;
  elements.reserve(firsts.size());
  std::size_t k = 0;
  for (int first : firsts) {
    elements.push_back({first, theta[k], theta[k + 1]});
    k += 2;
  }
  if (output_phases != nullptr) output_phases->assign(theta.begin() + static_cast<std::ptrdiff_t>(k), theta.end());
  return elements;
}

ComplexMatrix passive_unitary(std::span<const double> theta) {
  const int n = modes_from_square(theta.size());
  std::vector<double> phases;
  const auto elements = mesh_elements(theta, n, &phases);

  ComplexMatrix unitary = ComplexMatrix::Identity(n, n);
  for (const auto& element : elements) {
    const int i = element.first;
    const int j = i + 1;
    // phase on mode i, then rotation [[c, -s], [s, c]] on (i, j)
    unitary.row(i) *= std::polar(1.0, element.phase);
    const double c = std::cos(element.angle);
    const double s = std::sin(element.angle);
    const Eigen::RowVectorXcd row_i = unitary.row(i);
    const Eigen::RowVectorXcd row_j = unitary.row(j);
    unitary.row(i) = c * row_i - s * row_j;
    unitary.row(j) = s * row_i + c * row_j;
  }
  for (int m = 0; m < n; ++m) unitary.row(m) *= std::polar(1.0, phases[static_cast<std::size_t>(m)]);
  return unitary;
}

SymplecticMatrix passive_from_unitary(const ComplexMatrix& unitary) {
  const auto n = unitary.rows();
  RealMatrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = unitary.real();
  s.topRightCorner(n, n) = -unitary.imag();
  s.bottomLeftCorner(n, n) = unitary.imag();
  s.bottomRightCorner(n, n) = unitary.real();
  return SymplecticMatrix(std::move(s));
}

SymplecticMatrix passive_from_params(std::span<const double> theta) {
  return passive_from_unitary(passive_unitary(theta));
}

SymplecticMatrix squeezer_symplectic(std::span<const double> squeezings) {
  const auto n = static_cast<Eigen::Index>(squeezings.size());
  if (n == 0) throw std::invalid_argument("at least one squeezing parameter required");
  RealMatrix s = RealMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    s(j, j) = std::exp(-squeezings[static_cast<std::size_t>(j)]);
    s(j + n, j + n) = std::exp(squeezings[static_cast<std::size_t>(j)]);
  }
  return SymplecticMatrix(std::move(s));
}

SymplecticMatrix gaussian_symplectic(const GaussianParams& params) {
  const std::span<const double> squeezings(params.squeezings.data(), static_cast<std::size_t>(params.squeezings.size()));
  const std::span<const double> passive(params.passive.data(), static_cast<std::size_t>(params.passive.size()));
  if (passive.size() != static_cast<std::size_t>(params.n_modes()) * params.n_modes()) {
    throw std::invalid_argument("passive parameter count must be N^2");
  }
  return passive_from_params(passive) * squeezer_symplectic(squeezings);
}

// ---------------------------------------------------------------------------

CovarianceMatrix vacuum_covariance(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  return CovarianceMatrix(RealMatrix::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix covariance_of(const SymplecticMatrix& symplectic) {
  const auto& s = symplectic.matrix();
  RealMatrix v = s * s.transpose();
  v = 0.5 * (v + v.transpose()).eval();
  return CovarianceMatrix(std::move(v));
}

CovarianceMatrix gaussian_covariance(const GaussianParams& params) {
  const auto passive = passive_from_params(
      std::span<const double>(params.passive.data(), static_cast<std::size_t>(params.passive.size())));
  RealVector diagonal(2 * params.n_modes());
  for (int j = 0; j < params.n_modes(); ++j) {
    diagonal(j) = std::exp(-2.0 * params.squeezings(j));
    diagonal(j + params.n_modes()) = std::exp(2.0 * params.squeezings(j));
  }
  const auto& o = passive.matrix();
  RealMatrix v = o * diagonal.asDiagonal() * o.transpose();
  v = 0.5 * (v + v.transpose()).eval();
  return CovarianceMatrix(std::move(v));
}

CovarianceMatrix transform(const CovarianceMatrix& covariance, const SymplecticMatrix& symplectic) {
  if (covariance.n_modes() != symplectic.n_modes()) {
    throw std::invalid_argument("mode count mismatch in covariance transform");
  }
  const auto& s = symplectic.matrix();
  RealMatrix v = s * covariance.matrix() * s.transpose();
  v = 0.5 * (v + v.transpose()).eval();
  return CovarianceMatrix(std::move(v));
}

double purity(const CovarianceMatrix& covariance) {
  const double det = covariance.matrix().determinant();
  if (!(det > 0.0)) {
    throw std::domain_error(fmt::format("unphysical covariance matrix: det V = {:g}", det));
  }
  return 1.0 / std::sqrt(det);
}

CovarianceMatrix apply_impurity(const CovarianceMatrix& covariance, double target_purity) {
  if (!(target_purity > 0.0 && target_purity <= 1.0)) {
    throw std::invalid_argument(fmt::format("purity target {} outside (0, 1]", target_purity));
  }
  const double det = covariance.matrix().determinant();
  if (!(std::abs(det - 1.0) <= 1e-6)) {
    throw std::domain_error(fmt::format("apply_impurity requires a pure state, det V = {:.12g}", det));
  }
  if (target_purity == 1.0) return covariance;
  const double scale = std::pow(target_purity, -1.0 / covariance.n_modes());
  return CovarianceMatrix(scale * covariance.matrix());
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& covariance) {
  const int n = covariance.n_modes();
  Eigen::SelfAdjointEigenSolver<RealMatrix> root(covariance.matrix());
  if (root.eigenvalues().minCoeff() <= 0.0) {
    throw std::domain_error("covariance matrix is not positive definite");
  }
  const RealMatrix sqrt_v = root.operatorSqrt();
  const ComplexMatrix hermitian =
      Complex(0.0, 1.0) * (sqrt_v * symplectic_form(n) * sqrt_v).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  std::vector<double> moduli;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    moduli.push_back(std::abs(solver.eigenvalues()(k)));
  }
  std::sort(moduli.begin(), moduli.end());
  std::vector<double> out;
  for (std::size_t k = 0; k < moduli.size(); k += 2) out.push_back(0.5 * (moduli[k] + moduli[k + 1]));
  return out;
}

std::vector<double> squeezing_spectrum(const CovarianceMatrix& covariance) {
  const double det = covariance.matrix().determinant();
  if (!(std::abs(det - 1.0) <= 1e-6)) {
    throw std::domain_error(fmt::format("squeezing spectrum requires a pure state, det V = {:.12g}", det));
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(covariance.matrix(), Eigen::EigenvaluesOnly);
  // Eigenvalues come in pairs (r, 1/r); the N smallest are the squeezed ones.
  std::vector<double> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(values.begin(), values.end());
  values.resize(static_cast<std::size_t>(covariance.n_modes()));
  for (auto& r : values) r = std::min(r, 1.0);
  return values;
}

// ---------------------------------------------------------------------------

BogoliubovMap bogoliubov_of(const SymplecticMatrix& symplectic) {
  const auto n = symplectic.n_modes();
  const auto& s = symplectic.matrix();
  const RealMatrix a = s.topLeftCorner(n, n);
  const RealMatrix b = s.topRightCorner(n, n);
  const RealMatrix c = s.bottomLeftCorner(n, n);
  const RealMatrix d = s.bottomRightCorner(n, n);
  BogoliubovMap map;
  map.E = 0.5 * ((a + d).cast<Complex>() + Complex(0.0, 1.0) * (b - c).cast<Complex>());
  map.F = 0.5 * ((a - d).cast<Complex>() - Complex(0.0, 1.0) * (b + c).cast<Complex>());
  return map;
}

BogoliubovMap bogoliubov_of(const GaussianParams& params) {
  return bogoliubov_of(gaussian_symplectic(params));
}

SymplecticMatrix symplectic_of(const BogoliubovMap& map) {
  const auto n = map.n_modes();
  RealMatrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = (map.E + map.F).real();
  s.topRightCorner(n, n) = (map.E - map.F).imag();
  s.bottomLeftCorner(n, n) = -(map.E + map.F).imag();
  s.bottomRightCorner(n, n) = (map.E - map.F).real();
  return SymplecticMatrix(std::move(s));
}

// ---------------------------------------------------------------------------

void write_covariance(std::ostream& out, const CovarianceMatrix& covariance) {
  const auto& v = covariance.matrix();
  out << "n_modes " << covariance.n_modes() << '\n';
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      out << (c == 0 ? "" : " ") << fmt::format("{:.17g}", v(r, c));
    }
    out << '\n';
  }
}

CovarianceMatrix read_covariance(std::istream& in) {
  std::string tag;
  int n_modes = 0;
  if (!(in >> tag >> n_modes) || tag != "n_modes" || n_modes < 1) {
    throw std::invalid_argument("covariance dump must start with 'n_modes N'");
  }
  RealMatrix v(2 * n_modes, 2 * n_modes);
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      if (!(in >> v(r, c))) throw std::invalid_argument("truncated covariance dump");
    }
  }
  return CovarianceMatrix(std::move(v));
}

}  // namespace cvvqe
