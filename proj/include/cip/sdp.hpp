#pragma once

// Dense primal-dual interior-point solver for small block-diagonal SDPs
// (PSD blocks plus one nonnegative-orthant block), and the two programs
// over S(M, p) built on top of it.
//
// Standard form (after sense normalization to minimization):
//
//   min <C, X>  s.t.  <A_i, X> = b_i,  X = diag(X_1, ..., X_B, x) ⪰ 0
//   max b^T y   s.t.  C - Σ y_i A_i = Z ⪰ 0
//
// Complex Hermitian variables are embedded as real symmetric matrices
// [[Re, -Im], [Im, Re]] of twice the size; traces double under the
// embedding, so the builders scale objective and constraint blocks by 1/2.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cip/quantum.hpp"

namespace cip::sdp {

struct BlockMatrix {
  std::vector<Eigen::MatrixXd> psd;
  Eigen::VectorXd nonneg;

  static BlockMatrix zeros(const std::vector<int>& psd_dims, int nonneg_dim);
};

double inner(const BlockMatrix& a, const BlockMatrix& b);

enum class Sense { minimize, maximize };
enum class Status { optimal, max_iter, infeasible };

std::string to_string(Status s);

struct Constraint {
  BlockMatrix a;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> psd_block_dims;
  int nonneg_block_dim = 0;
  BlockMatrix objective;
  std::vector<Constraint> constraints;
  Sense sense = Sense::minimize;

  /// Throws InputError on shape mismatches, asymmetric blocks, non-finite data.
  void validate() const;
};

struct SdpOptions {
  double tol_gap = 1e-8;   // relative duality gap
  double tol_feas = 1e-8;  // relative primal/dual residuals
  int max_iter = 200;
  double sigma = 0.5;      // centering parameter when predictor-corrector is off
  bool predictor_corrector = false;
  double step_fraction = 0.95;
  bool record_history = false;
};

struct IterationRecord {
  int iteration;
  double primal_objective;
  double dual_objective;
  double primal_infeasibility;
  double dual_infeasibility;
  double mu;
};

struct SdpSolution {
  BlockMatrix primal;
  Eigen::VectorXd dual;
  BlockMatrix dual_slack;
  double objective_value = 0.0;  // primal objective, original sense
  double dual_objective = 0.0;   // dual objective, original sense
  double duality_gap = 0.0;      // |objective_value - dual_objective|
  double primal_residual = 0.0;  // relative ||b - A(X)||
  double dual_residual = 0.0;    // relative ||C - A^T y - Z||
  int iterations = 0;
  Status status = Status::max_iter;
  std::vector<IterationRecord> history;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

/// Dense row-major JSON form for cross-checking against external solvers.
nlohmann::json to_json(const SdpProblem& problem);

// ---------------------------------------------------------------------------
// Programs over the feasible set S(M, p)

/// Real symmetric embedding [[Re, -Im], [Im, Re]].
Eigen::MatrixXd embed(const ComplexMatrix& h);
/// Inverse of the embedding for a (not necessarily structured) PSD block:
/// ρ = ½ W^† Y W with W = [I; -iI]. PSD whenever Y is.
ComplexMatrix extract_hermitian(const Eigen::MatrixXd& y);

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> k_subsets(int n, int k);

inline constexpr int kMaxSubsetDimension = 10;

struct FeasibleOptimum {
  double value = 0.0;  // objective at the recovered optimizer
  double bound = 0.0;  // certified side: upper bound for max, lower for min
  DensityMatrix optimizer;
  int iterations = 0;
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  Status status = Status::optimal;
};

/// SDP for max Tr(Aρ) over S(M, p), in the support of p.
SdpProblem build_max_expectation(const SupportReduction& red, const HermitianOperator& a);
/// Epigraph SDP for min γ s.t. γ >= Tr(N_I ρ) for every listed subset I.
SdpProblem build_min_max_gamma(const SupportReduction& red, const MeasurementBasis& post,
                               const std::vector<std::vector<int>>& subsets);

/// max Tr(Aρ) s.t. ρ ∈ S(M, p). Throws NumericalError if the solver does
/// not certify optimality.
FeasibleOptimum max_expectation(const FeasibleSetSpec& spec, const HermitianOperator& a,
                                const SdpOptions& options = {});

/// min over ρ ∈ S(M, p) of the largest Tr(N_{I_k} ρ) over k-subsets I_k.
/// `subset_order`, when given, replaces the lexicographic enumeration.
FeasibleOptimum min_max_gamma(const FeasibleSetSpec& spec, const MeasurementBasis& post, int k,
                              const SdpOptions& options = {},
                              const std::optional<std::vector<std::vector<int>>>& subset_order =
                                  std::nullopt);

}  // namespace cip::sdp
