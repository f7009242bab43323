#include "cip/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

#include "cip/error.hpp"

namespace cip {

namespace {

// Bases whose Gram matrix deviates by more than this are rejected outright;
// between kDefaultTolOrtho and this value they are re-orthonormalized with a
// warning (matrices given to 4 decimals land here).
constexpr double kTolAccept = 1e-3;
constexpr double kExactOrtho = 1e-12;

void check_dimension(Eigen::Index n, const char* what) {
  if (n < 1 || n > kMaxDimension) {
    throw InputError(std::string(what) + ": dimension " + std::to_string(n) +
                     " outside [1, " + std::to_string(kMaxDimension) + "]");
  }
}

double gram_deviation(const ComplexMatrix& c) {
  const ComplexMatrix g = c.adjoint() * c;
  return (g - ComplexMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

ComplexMatrix gaussian_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  // Column-major fill order keeps streams reproducible.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

double hermiticity_error(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw InputError("hermiticity_error: matrix is not square");
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

OrthonormalizeResult orthonormalize(const ComplexMatrix& raw, std::string label) {
  if (raw.rows() != raw.cols()) throw InputError("orthonormalize: expected a square matrix");
  check_dimension(raw.cols(), "orthonormalize");
  if (!raw.allFinite()) throw InputError("orthonormalize: non-finite entry");

  Eigen::JacobiSVD<ComplexMatrix> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) < 1e-10 * sv(0)) {
    throw InputError("orthonormalize: input vectors are linearly dependent");
  }
  ComplexMatrix polar = svd.matrixU() * svd.matrixV().adjoint();

  OrthonormalizeResult out;
  out.gram_deviation_before = gram_deviation(raw);
  out.gram_deviation_after = gram_deviation(polar);
  out.max_shift = (polar - raw).cwiseAbs().maxCoeff();
  out.basis = MeasurementBasis(std::move(polar), std::move(label));
  return out;
}

MeasurementBasis MeasurementBasis::from_columns(const ComplexMatrix& columns, std::string label,
                                                double tol_ortho) {
  if (columns.rows() != columns.cols()) {
    throw InputError("basis '" + label + "': expected n vectors of length n");
  }
  check_dimension(columns.cols(), "basis");
  if (!columns.allFinite()) throw InputError("basis '" + label + "': non-finite amplitude");

  const double dev = gram_deviation(columns);
  if (dev <= kExactOrtho) return MeasurementBasis(columns, std::move(label));
  if (dev > std::max(tol_ortho, kTolAccept)) {
    std::ostringstream msg;
    msg << "basis '" << label << "' is not orthonormal (Gram deviation " << dev << ")";
    throw InputError(msg.str());
  }
  auto fixed = orthonormalize(columns, label);
  if (dev > tol_ortho) {
    std::cerr << "warning: basis '" << label << "' re-orthonormalized (Gram deviation " << dev
              << ", max entry shift " << fixed.max_shift << ")\n";
  }
  return std::move(fixed.basis);
}

MeasurementBasis MeasurementBasis::from_vectors(std::span<const ComplexVector> vectors,
                                                std::string label, double tol_ortho) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  check_dimension(n, "basis");
  ComplexMatrix c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (vectors[static_cast<std::size_t>(j)].size() != n) {
      throw InputError("basis '" + label + "': vector " + std::to_string(j) +
                       " has wrong length");
    }
    c.col(j) = vectors[static_cast<std::size_t>(j)];
  }
  return from_columns(c, std::move(label), tol_ortho);
}

MeasurementBasis MeasurementBasis::computational(int n, std::string label) {
  check_dimension(n, "computational basis");
  return MeasurementBasis(ComplexMatrix::Identity(n, n), std::move(label));
}

MeasurementBasis MeasurementBasis::qubit_rotation(double theta, std::string label) {
  ComplexMatrix c(2, 2);
  c << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return MeasurementBasis(std::move(c), std::move(label));
}

MeasurementBasis MeasurementBasis::random(std::uint64_t seed, int n, std::string label) {
  check_dimension(n, "random basis");
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return from_columns(q, std::move(label));
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("density matrix must be square");
  check_dimension(m.rows(), "density matrix");
  if (!m.allFinite()) throw InputError("density matrix has a non-finite entry");
  if (hermiticity_error(m) > 1e-9) throw InputError("density matrix is not Hermitian");
  m_ = 0.5 * (m + m.adjoint());
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw InputError("density matrix has trace " + std::to_string(tr) + ", expected 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-9) {
    throw InputError("density matrix is not positive semidefinite (min eigenvalue " +
                     std::to_string(es.eigenvalues()(0)) + ")");
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw InputError("pure state from a zero vector");
  const ComplexVector u = psi / norm;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  check_dimension(n, "maximally mixed state");
  return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
}

std::vector<double> DensityMatrix::spectrum() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + dim());
  std::reverse(out.begin(), out.end());
  for (double& x : out) x = std::max(0.0, x);
  return out;
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

FeasibleSetSpec::FeasibleSetSpec(MeasurementBasis m, ProbVector p)
    : basis(std::move(m)), target(std::move(p)) {
  if (static_cast<int>(target.size()) != basis.dim()) {
    throw InputError("feasible set: p has " + std::to_string(target.size()) +
                     " entries but the basis has dimension " + std::to_string(basis.dim()));
  }
}

std::vector<double> born_raw(const ComplexMatrix& rho, const MeasurementBasis& basis) {
  if (rho.rows() != basis.dim()) throw InputError("born: dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(basis.dim()));
  for (int j = 0; j < basis.dim(); ++j) {
    const ComplexVector u = basis.vector(j);
    out[static_cast<std::size_t>(j)] = std::clamp((u.adjoint() * rho * u)(0, 0).real(), 0.0, 1.0);
  }
  return out;
}

ProbVector born_probabilities(const DensityMatrix& rho, const MeasurementBasis& basis) {
  return ProbVector(born_raw(rho.matrix(), basis));
}

HermitianOperator projector_partial_sum(const MeasurementBasis& basis,
                                        std::span<const int> subset) {
  const int n = basis.dim();
  if (subset.empty()) throw InputError("projector_partial_sum: empty subset");
  HermitianOperator out = HermitianOperator::Zero(n, n);
  for (int l : subset) {
    if (l < 0 || l >= n) {
      throw InputError("projector_partial_sum: index " + std::to_string(l) + " out of range");
    }
    const ComplexVector v = basis.vector(l);
    out += v * v.adjoint();
  }
  return out;
}

Eigen::MatrixXd overlap_matrix(const MeasurementBasis& m, const MeasurementBasis& n) {
  if (m.dim() != n.dim()) throw InputError("overlap_matrix: dimension mismatch");
  return (m.matrix().adjoint() * n.matrix()).cwiseAbs2();
}

double max_overlap(const MeasurementBasis& m, const MeasurementBasis& n) {
  return std::sqrt(overlap_matrix(m, n).maxCoeff());
}

SupportReduction reduce_support(const FeasibleSetSpec& spec, double zero_threshold) {
  SupportReduction red;
  double kept = 0.0;
  for (int j = 0; j < spec.dim(); ++j) {
    const double c = spec.target[static_cast<std::size_t>(j)];
    if (c > zero_threshold) {
      red.support.push_back(j);
      red.target.push_back(c);
      kept += c;
    }
  }
  for (double& c : red.target) c /= kept;
  red.isometry.resize(spec.dim(), static_cast<Eigen::Index>(red.support.size()));
  for (std::size_t a = 0; a < red.support.size(); ++a) {
    red.isometry.col(static_cast<Eigen::Index>(a)) = spec.basis.vector(red.support[a]);
  }
  return red;
}

DensityMatrix sample_feasible_state(const FeasibleSetSpec& spec, std::uint64_t seed) {
  const SupportReduction red = reduce_support(spec);
  const int m = static_cast<int>(red.support.size());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> rank_dist(1, m);
  const int rank = rank_dist(rng);
  const ComplexMatrix g = gaussian_matrix(rng, m, rank);
  const ComplexMatrix sigma = g * g.adjoint();

  Eigen::VectorXcd scale(m);
  for (int j = 0; j < m; ++j) {
    const double d = sigma(j, j).real();
    scale(j) = std::sqrt(red.target[static_cast<std::size_t>(j)] / d);
  }
  ComplexMatrix reduced = scale.asDiagonal() * sigma * scale.asDiagonal();
  for (int j = 0; j < m; ++j) reduced(j, j) = red.target[static_cast<std::size_t>(j)];
  return DensityMatrix(red.isometry * reduced * red.isometry.adjoint());
}

DensityMatrix random_density(std::uint64_t seed, int n, int rank) {
  check_dimension(n, "random_density");
  if (rank < 1 || rank > n) {
    throw InputError("random_density: rank " + std::to_string(rank) + " outside [1, n]");
  }
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = gaussian_matrix(rng, n, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

}  // namespace cip
