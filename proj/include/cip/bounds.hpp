#pragma once

// Majorization bounds r ≺ q ≺ t on the post-measurement statistics q given
// the pre-measurement statistics p, plus the classical baselines they are
// compared against.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cip/majorization.hpp"
#include "cip/quantum.hpp"
#include "cip/sdp.hpp"

namespace cip {

struct BoundOptions {
  sdp::SdpOptions sdp;
  int parallel = 1;
  bool keep_certificates = false;
};

/// Optimizer witnessing one cumulative bound value.
struct Certificate {
  enum class Side { upper, lower };
  Side side;
  int k;                    // cumulative index, 1-based
  std::vector<int> subset;  // maximizing subset (upper side only)
  double value;
  DensityMatrix state;
};

struct SolverStats {
  int sdp_count = 0;
  int total_iterations = 0;
  double max_gap = 0.0;
  double max_residual = 0.0;

  void absorb(const sdp::FeasibleOptimum& opt);
  void merge(const SolverStats& other);
};

struct BoundSet {
  ProbVector p;
  ProbVector r;
  std::vector<double> s_raw;  // successive differences of s_k, possibly not sorted
  ProbVector t;
  std::vector<Certificate> certificates;
  bool flatten_applied = false;
  SolverStats stats;
};

struct UpperRaw {
  std::vector<double> s_raw;
  std::vector<Certificate> certificates;
  SolverStats stats;
};

struct LowerBound {
  ProbVector r;
  std::vector<Certificate> certificates;
  SolverStats stats;
};

/// S_k = s_k - s_{k-1}, with s_k the largest Tr(N_{I_k} ρ) over k-subsets and
/// ρ ∈ S(M, p). Each s_k uses the solver's dual (upper) bound.
UpperRaw upper_raw_s_detailed(const MeasurementBasis& m, const ProbVector& p,
                              const MeasurementBasis& n, const BoundOptions& opt = {});
std::vector<double> upper_raw_s(const MeasurementBasis& m, const ProbVector& p,
                                const MeasurementBasis& n, const BoundOptions& opt = {});

/// R_k = r_k - r_{k-1}, r_k = min_ρ max_{I_k} Tr(N_{I_k} ρ) via the epigraph
/// program, using the dual (lower) bound.
LowerBound lower_r_detailed(const MeasurementBasis& m, const ProbVector& p,
                            const MeasurementBasis& n, const BoundOptions& opt = {});
ProbVector lower_r(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n,
                   const BoundOptions& opt = {});

/// Flattened (optimal) upper bound from the raw differences.
ProbVector optimal_t(std::span<const double> s_raw);

BoundSet bounds(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n,
                const BoundOptions& opt = {});

// ---------------------------------------------------------------------------
// Qubit closed form

struct QubitClosedForm {
  double r1;
  double s1;
};

/// For M = {|0>, |1>}, N = {cos θ|0> - sin θ|1>, sin θ|0> + cos θ|1>} and
/// p = (λ, 1-λ): three-branch r1 and two-branch s1. Requires λ ∈ (0, 1/2)
/// and θ ∈ [0, π/2].
QubitClosedForm qubit_closed_form(double lambda, double theta);

/// The same formulas extended by symmetry and continuity to λ ∈ [0, 1].
QubitClosedForm qubit_closed_form_extended(double lambda, double theta);

/// (r, t) for arbitrary qubit bases via the overlap angle θ = arccos|<u_1|v_1>|.
struct BoundPair {
  ProbVector r;
  ProbVector t;
};
BoundPair qubit_bounds(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n);

// ---------------------------------------------------------------------------
// Baselines

inline constexpr int kMaxBaselineDimension = 6;

/// -2 log2 c1.
double mu_bound(const MeasurementBasis& m, const MeasurementBasis& n);

/// x_k = max over k-subsets of the joint 2n-element set of the largest
/// eigenvalue of the projector sum, k = 1..2n.
std::vector<double> joint_norms(const MeasurementBasis& m, const MeasurementBasis& n);
/// Successive differences of x_k (length 2n, mass 2).
std::vector<double> dsmur_w_plus(const MeasurementBasis& m, const MeasurementBasis& n);
/// ¼(x_2², x_3² - x_2², ..., x_{n+1}² - x_n²) padded with zeros to length n².
ProbVector uur_w_times(const MeasurementBasis& m, const MeasurementBasis& n);
/// Direct-sum bound using a known spectrum (nonincreasing, sums to 1).
std::vector<double> spectrum_w_plus(const MeasurementBasis& m, const MeasurementBasis& n,
                                    std::span<const double> spectrum);

struct BaselineBounds {
  std::vector<double> w_plus;
  ProbVector w_times;
  std::optional<std::vector<double>> w_plus_rho;
  double mu_constant = 0.0;
};

BaselineBounds baseline_bounds(const MeasurementBasis& m, const MeasurementBasis& n,
                               std::optional<std::span<const double>> spectrum = std::nullopt);

// ---------------------------------------------------------------------------
// Resource convertibility with partial information

enum class Convertibility { yes, no, lack_of_information };
enum class ConversionDirection {
  from,  // can a state with vector x be converted into the tested state?
  to     // can the tested state be converted into one with vector x?
};

std::string to_string(Convertibility c);

Convertibility convertibility(const BoundSet& bounds, const ProbVector& x,
                              ConversionDirection direction);

}  // namespace cip
