#pragma once

// Small-dimension complex linear algebra: measurement bases, density
// matrices, Born-rule statistics, and the feasible-state sampler.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cip/majorization.hpp"

namespace cip {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using HermitianOperator = Eigen::MatrixXcd;

inline constexpr int kMaxDimension = 16;
inline constexpr double kDefaultTolOrtho = 1e-6;

/// Largest entrywise deviation of A from its conjugate transpose.
double hermiticity_error(const ComplexMatrix& a);

struct OrthonormalizeResult;

/// Ordered orthonormal basis stored as the columns of a unitary matrix.
class MeasurementBasis {
 public:
  MeasurementBasis() = default;

  /// Validates the Gram matrix against tol_ortho. Inputs that are close but
  /// not orthonormal to 1e-12 are replaced by their polar factor and a
  /// warning is written to stderr.
  static MeasurementBasis from_columns(const ComplexMatrix& columns, std::string label = {},
                                       double tol_ortho = kDefaultTolOrtho);
  static MeasurementBasis from_vectors(std::span<const ComplexVector> vectors,
                                       std::string label = {},
                                       double tol_ortho = kDefaultTolOrtho);
  static MeasurementBasis computational(int n, std::string label = "computational");
  /// Qubit basis {cos θ|0> - sin θ|1>, sin θ|0> + cos θ|1>}.
  static MeasurementBasis qubit_rotation(double theta, std::string label = {});
  /// Haar-random basis (QR of a complex Ginibre matrix), deterministic in seed.
  static MeasurementBasis random(std::uint64_t seed, int n, std::string label = "random");

  int dim() const { return static_cast<int>(columns_.cols()); }
  const ComplexMatrix& matrix() const { return columns_; }
  ComplexVector vector(int j) const { return columns_.col(j); }
  const std::string& label() const { return label_; }

 private:
  MeasurementBasis(ComplexMatrix columns, std::string label)
      : columns_(std::move(columns)), label_(std::move(label)) {}
  friend OrthonormalizeResult orthonormalize(const ComplexMatrix&, std::string);

  ComplexMatrix columns_;
  std::string label_;
};

struct OrthonormalizeResult {
  MeasurementBasis basis;
  double gram_deviation_before = 0.0;  // max |G - I| of the input
  double gram_deviation_after = 0.0;
  double max_shift = 0.0;              // max entrywise |output - input|
};

/// Nearest orthonormal frame (polar factor U V^† of the SVD). Throws
/// InputError on rank-deficient input.
OrthonormalizeResult orthonormalize(const ComplexMatrix& raw_columns, std::string label = {});

/// Unit-trace positive semidefinite operator.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Requires Hermitian within 1e-12 (after symmetrization of rounding
  /// noise up to 1e-9), trace 1 within 1e-9, eigenvalues >= -1e-9.
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix pure(const ComplexVector& psi);
  static DensityMatrix maximally_mixed(int n);

  int dim() const { return static_cast<int>(m_.rows()); }
  const HermitianOperator& matrix() const { return m_; }
  /// Descending eigenvalues.
  std::vector<double> spectrum() const;
  double purity() const;

 private:
  HermitianOperator m_;
};

/// S(M, p): all density matrices whose M-basis diagonal equals p.
struct FeasibleSetSpec {
  MeasurementBasis basis;
  ProbVector target;

  FeasibleSetSpec(MeasurementBasis m, ProbVector p);
  int dim() const { return basis.dim(); }
};

ProbVector born_probabilities(const DensityMatrix& rho, const MeasurementBasis& basis);
/// Born statistics of an arbitrary PSD unit-trace matrix (no validation).
std::vector<double> born_raw(const ComplexMatrix& rho, const MeasurementBasis& basis);

/// Σ_{ℓ∈subset} |v_ℓ><v_ℓ| (0-based indices).
HermitianOperator projector_partial_sum(const MeasurementBasis& basis,
                                        std::span<const int> subset);

/// |<u_j|v_k>|^2; doubly stochastic for two bases.
Eigen::MatrixXd overlap_matrix(const MeasurementBasis& m, const MeasurementBasis& n);
/// c1 = max_{j,k} |<u_j|v_k>|.
double max_overlap(const MeasurementBasis& m, const MeasurementBasis& n);

/// Restriction of S(M, p) to the support of p: the isometry onto the span of
/// {u_j : p_j > 0} and the corresponding sub-vector of p.
struct SupportReduction {
  ComplexMatrix isometry;           // n × m, columns u_j for j in support
  std::vector<int> support;         // indices j with p_j > threshold
  std::vector<double> target;       // p restricted to support (sums to 1)
};
SupportReduction reduce_support(const FeasibleSetSpec& spec, double zero_threshold = 0.0);

/// A random element of S(M, p): σ random PSD with positive diagonal d (in
/// the M basis) rescaled by diag(√(p_j/d_j)) on both sides. Zero entries of
/// p are handled by working in the support. Not uniform over S(M, p).
DensityMatrix sample_feasible_state(const FeasibleSetSpec& spec, std::uint64_t seed);

/// Normalized Gram matrix of `rank` complex Gaussian vectors.
DensityMatrix random_density(std::uint64_t seed, int n, int rank);

}  // namespace cip
