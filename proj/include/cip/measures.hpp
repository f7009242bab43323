#pragma once

// Rényi-family uncertainty measures (base-2 logarithms) and the joint
// measures built from them.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cip/majorization.hpp"

namespace cip {

struct MeasureSpec {
  double order = 1.0;  // α; +inf for the min-entropy, 1 for Shannon

  /// "renyi:<order>" with "inf" accepted.
  static MeasureSpec parse(const std::string& text);
  std::string to_string() const;
  double operator()(const ProbVector& p) const;
};

inline constexpr double kInfiniteOrder = std::numeric_limits<double>::infinity();

/// H_α(p) in bits. Throws InputError for α <= 0.
double renyi(const ProbVector& p, double order);
double renyi(std::span<const double> p, double order);
double shannon(const ProbVector& p);
double min_entropy(const ProbVector& p);

struct JointMeasureSpec {
  enum class Kind { sum, product, on_direct_sum, on_direct_product };
  Kind kind = Kind::sum;
  // sum/product take two components (f on p, g on q); the direct forms take one.
  std::vector<MeasureSpec> components;

  /// "sum:renyi:1,renyi:1", "product:...", "direct_sum:renyi:1", "direct_product:renyi:1"
  static JointMeasureSpec parse(const std::string& text);
};

double evaluate_joint(const JointMeasureSpec& spec, const ProbVector& p, const ProbVector& q);

struct SchurProbeReport {
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;  // min over trials of f(x) - f(y), x ≺ y
};

/// Draws y at random, mixes it by a random sequence of T-transforms into
/// x ≺ y and checks f(x) >= f(y) - 1e-12.
SchurProbeReport schur_concavity_probe(const MeasureSpec& measure, int trials, std::uint64_t seed,
                                       int max_dim = 6);

/// x ← T x with T = t·I + (1-t)·(swap of entries i, j).
void apply_t_transform(std::vector<double>& x, std::size_t i, std::size_t j, double t);

}  // namespace cip
