#include "cip/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cip/error.hpp"
#include "cip/parallel.hpp"

namespace cip {

namespace {

// Solver noise tolerated on a successive difference before it is an error.
constexpr double kNegativeDifferenceTol = 1e-7;

void require_compatible(const MeasurementBasis& m, const ProbVector& p,
                        const MeasurementBasis& n) {
  if (m.dim() != n.dim()) {
    throw InputError("pre- and post-measurement dimensions differ (" + std::to_string(m.dim()) +
                     " vs " + std::to_string(n.dim()) + ")");
  }
  if (static_cast<int>(p.size()) != m.dim()) {
    throw InputError("p has " + std::to_string(p.size()) + " entries, expected " +
                     std::to_string(m.dim()));
  }
}

std::string subset_string(const std::vector<int>& s) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i] + 1;
  out << '}';
  return out.str();
}

}  // namespace

void SolverStats::absorb(const sdp::FeasibleOptimum& opt) {
  ++sdp_count;
  total_iterations += opt.iterations;
  max_gap = std::max(max_gap, opt.duality_gap);
  max_residual = std::max(max_residual, opt.primal_residual);
}

void SolverStats::merge(const SolverStats& other) {
  sdp_count += other.sdp_count;
  total_iterations += other.total_iterations;
  max_gap = std::max(max_gap, other.max_gap);
  max_residual = std::max(max_residual, other.max_residual);
}

UpperRaw upper_raw_s_detailed(const MeasurementBasis& m, const ProbVector& p,
                              const MeasurementBasis& n, const BoundOptions& opt) {
  require_compatible(m, p, n);
  const int dim = m.dim();
  if (dim > sdp::kMaxSubsetDimension) {
    throw InputError("upper bound: dimension exceeds the subset-enumeration cap of " +
                     std::to_string(sdp::kMaxSubsetDimension));
  }
  const FeasibleSetSpec spec(m, p);

  struct Task {
    int k;
    std::vector<int> subset;
  };
  std::vector<Task> tasks;
  for (int k = 1; k < dim; ++k) {
    for (auto& s : sdp::k_subsets(dim, k)) tasks.push_back({k, std::move(s)});
  }
  std::vector<sdp::FeasibleOptimum> results(tasks.size());
  std::vector<std::string> failures(tasks.size());
  parallel_for(tasks.size(), opt.parallel, [&](std::size_t i) {
    try {
      results[i] = sdp::max_expectation(spec, projector_partial_sum(n, tasks[i].subset), opt.sdp);
    } catch (const NumericalError& e) {
      failures[i] = e.what();
    }
  });

  std::string failure_report;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!failures[i].empty()) {
      failure_report += " subset " + subset_string(tasks[i].subset) + ": " + failures[i] + ";";
    }
  }
  if (!failure_report.empty()) throw NumericalError("upper bound failed:" + failure_report);

  UpperRaw out;
  std::vector<double> cum(static_cast<std::size_t>(dim) + 1, 0.0);
  std::vector<std::size_t> argmax(static_cast<std::size_t>(dim) + 1, tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    out.stats.absorb(results[i]);
    const auto k = static_cast<std::size_t>(tasks[i].k);
    // Strict comparison keeps the lexicographically first maximizer.
    if (argmax[k] == tasks.size() || results[i].bound > cum[k]) {
      cum[k] = results[i].bound;
      argmax[k] = i;
    }
  }
  cum[static_cast<std::size_t>(dim)] = 1.0;

  out.s_raw.resize(static_cast<std::size_t>(dim));
  for (std::size_t k = 1; k <= static_cast<std::size_t>(dim); ++k) {
    const double capped = std::min(cum[k], 1.0);
    const double diff = capped - cum[k - 1];
    if (diff < -kNegativeDifferenceTol) {
      throw NumericalError("upper bound: s_k decreased by " + std::to_string(-diff) +
                           " at k = " + std::to_string(k));
    }
    // Raising s_k to s_{k-1} keeps the bound on the safe side.
    cum[k] = std::max(capped, cum[k - 1]);
    out.s_raw[k - 1] = cum[k] - cum[k - 1];
  }

  if (opt.keep_certificates) {
    for (int k = 1; k < dim; ++k) {
      const std::size_t i = argmax[static_cast<std::size_t>(k)];
      out.certificates.push_back({Certificate::Side::upper, k, tasks[i].subset,
                                  results[i].value, results[i].optimizer});
    }
  }
  return out;
}

std::vector<double> upper_raw_s(const MeasurementBasis& m, const ProbVector& p,
                                const MeasurementBasis& n, const BoundOptions& opt) {
  return upper_raw_s_detailed(m, p, n, opt).s_raw;
}

LowerBound lower_r_detailed(const MeasurementBasis& m, const ProbVector& p,
                            const MeasurementBasis& n, const BoundOptions& opt) {
  require_compatible(m, p, n);
  const int dim = m.dim();
  const FeasibleSetSpec spec(m, p);
  const auto count = static_cast<std::size_t>(dim - 1);
  std::vector<sdp::FeasibleOptimum> results(count);
  parallel_for(count, opt.parallel, [&](std::size_t i) {
    results[i] = sdp::min_max_gamma(spec, n, static_cast<int>(i) + 1, opt.sdp);
  });

  LowerBound out{ProbVector::uniform(static_cast<std::size_t>(dim)), {}, {}};
  std::vector<double> cum(static_cast<std::size_t>(dim) + 1, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    out.stats.absorb(results[i]);
    // Any k entries of a probability vector's top-k sum is at least k/n.
    const double floor = static_cast<double>(i + 1) / dim;
    cum[i + 1] = std::clamp(results[i].bound, floor, 1.0);
  }
  cum[static_cast<std::size_t>(dim)] = 1.0;

  std::vector<double> diffs(static_cast<std::size_t>(dim));
  for (std::size_t k = 1; k <= static_cast<std::size_t>(dim); ++k) {
    const double d = cum[k] - cum[k - 1];
    if (d < -kNegativeDifferenceTol) {
      throw NumericalError("lower bound: r_k decreased at k = " + std::to_string(k));
    }
    diffs[k - 1] = std::max(0.0, d);
  }
  // The exact differences are nonincreasing; sorting removes solver noise.
  std::sort(diffs.begin(), diffs.end(), std::greater<>());
  double total = 0.0;
  for (double d : diffs) total += d;
  for (double& d : diffs) d /= total;
  out.r = ProbVector(std::move(diffs));

  if (opt.keep_certificates) {
    for (std::size_t i = 0; i < count; ++i) {
      out.certificates.push_back({Certificate::Side::lower, static_cast<int>(i) + 1, {},
                                  results[i].value, results[i].optimizer});
    }
  }
  return out;
}

ProbVector lower_r(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n,
                   const BoundOptions& opt) {
  return lower_r_detailed(m, p, n, opt).r;
}

ProbVector optimal_t(std::span<const double> s_raw) { return flatten(s_raw); }

BoundSet bounds(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n,
                const BoundOptions& opt) {
  UpperRaw upper = upper_raw_s_detailed(m, p, n, opt);
  LowerBound lower = lower_r_detailed(m, p, n, opt);

  BoundSet out;
  out.p = p;
  out.r = std::move(lower.r);
  out.t = optimal_t(upper.s_raw);
  out.flatten_applied = !std::is_sorted(upper.s_raw.begin(), upper.s_raw.end(), std::greater<>());
  out.s_raw = std::move(upper.s_raw);
  out.certificates = std::move(upper.certificates);
  for (auto& c : lower.certificates) out.certificates.push_back(std::move(c));
  out.stats = upper.stats;
  out.stats.merge(lower.stats);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

QubitClosedForm closed_form_unchecked(double lambda, double theta) {
  const double sl = std::sqrt(lambda);
  const double sc = std::sqrt(1.0 - lambda);
  const double sin_t = std::sin(theta);
  const double cos_t = std::cos(theta);

  QubitClosedForm out{};
  if (theta < std::numbers::pi / 4.0) {
    out.s1 = std::pow(sl * sin_t + sc * cos_t, 2);
  } else {
    out.s1 = std::pow(sc * sin_t + sl * cos_t, 2);
  }

  // cot(2θ) against ±2√(λ(1-λ))/(1-2λ), multiplied through by
  // sin(2θ)(1-2λ) >= 0 so that θ ∈ {0, π/2} and λ = 1/2 need no special case.
  const double lhs = std::cos(2.0 * theta) * (1.0 - 2.0 * lambda);
  const double rhs = 2.0 * std::sqrt(lambda * (1.0 - lambda)) * std::sin(2.0 * theta);
  if (lhs < -rhs) {
    out.r1 = std::pow(sc * sin_t - sl * cos_t, 2);
  } else if (lhs > rhs) {
    out.r1 = std::pow(sl * sin_t - sc * cos_t, 2);
  } else {
    out.r1 = 0.5;
  }
  return out;
}

}  // namespace

QubitClosedForm qubit_closed_form(double lambda, double theta) {
  if (!(lambda > 0.0 && lambda < 0.5)) {
    throw InputError("qubit closed form: lambda must lie in the open interval (0, 1/2)");
  }
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0)) {
    throw InputError("qubit closed form: theta must lie in [0, pi/2]");
  }
  return closed_form_unchecked(lambda, theta);
}

QubitClosedForm qubit_closed_form_extended(double lambda, double theta) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("qubit closed form: lambda outside [0, 1]");
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0)) {
    throw InputError("qubit closed form: theta must lie in [0, pi/2]");
  }
  // (λ, 1-λ) and (1-λ, λ) give the same bounds.
  return closed_form_unchecked(std::min(lambda, 1.0 - lambda), theta);
}

BoundPair qubit_bounds(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n) {
  require_compatible(m, p, n);
  if (m.dim() != 2) throw InputError("qubit_bounds: dimension must be 2");
  const double overlap = std::min(1.0, std::abs(m.vector(0).dot(n.vector(0))));
  const double theta = std::acos(overlap);
  const auto cf = qubit_closed_form_extended(p[0], theta);
  const double r1 = std::max(cf.r1, 1.0 - cf.r1);
  const double s1 = std::max(cf.s1, 1.0 - cf.s1);
  return {ProbVector({r1, 1.0 - r1}), ProbVector({s1, 1.0 - s1})};
}

// ---------------------------------------------------------------------------

double mu_bound(const MeasurementBasis& m, const MeasurementBasis& n) {
  const double c1 = max_overlap(m, n);
  return std::max(0.0, -2.0 * std::log2(c1));
}

namespace {

std::vector<ComplexVector> joint_set(const MeasurementBasis& m, const MeasurementBasis& n) {
  if (m.dim() != n.dim()) throw InputError("baseline bounds: dimension mismatch");
  if (m.dim() > kMaxBaselineDimension) {
    throw InputError("baseline bounds: dimension " + std::to_string(m.dim()) +
                     " exceeds the subset-enumeration cap of " +
                     std::to_string(kMaxBaselineDimension));
  }
  std::vector<ComplexVector> out;
  for (int j = 0; j < m.dim(); ++j) out.push_back(m.vector(j));
  for (int j = 0; j < n.dim(); ++j) out.push_back(n.vector(j));
  return out;
}

Eigen::VectorXd descending_eigenvalues(const std::vector<ComplexVector>& set,
                                       const std::vector<int>& subset) {
  const auto dim = set.front().size();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (int i : subset) sum += set[static_cast<std::size_t>(i)] * set[static_cast<std::size_t>(i)].adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sum, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

std::vector<double> successive_differences(const std::vector<double>& cum) {
  std::vector<double> out(cum.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < cum.size(); ++k) {
    out[k] = std::max(0.0, cum[k] - prev);
    prev = cum[k];
  }
  return out;
}

}  // namespace

std::vector<double> joint_norms(const MeasurementBasis& m, const MeasurementBasis& n) {
  const auto set = joint_set(m, n);
  const int total = static_cast<int>(set.size());
  std::vector<double> x(static_cast<std::size_t>(total));
  for (int k = 1; k <= total; ++k) {
    double best = 0.0;
    for (const auto& s : sdp::k_subsets(total, k)) {
      best = std::max(best, descending_eigenvalues(set, s)(0));
    }
    x[static_cast<std::size_t>(k - 1)] = best;
  }
  return x;
}

std::vector<double> dsmur_w_plus(const MeasurementBasis& m, const MeasurementBasis& n) {
  return successive_differences(joint_norms(m, n));
}

ProbVector uur_w_times(const MeasurementBasis& m, const MeasurementBasis& n) {
  const auto x = joint_norms(m, n);
  const auto dim = static_cast<std::size_t>(m.dim());
  std::vector<double> w(dim * dim, 0.0);
  double prev = 0.0;
  // Entries use x_2 .. x_{n+1}.
  for (std::size_t k = 0; k < dim; ++k) {
    const double sq = 0.25 * x[k + 1] * x[k + 1];
    w[k] = std::max(0.0, sq - prev);
    prev = sq;
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return ProbVector(std::move(w));
}

std::vector<double> spectrum_w_plus(const MeasurementBasis& m, const MeasurementBasis& n,
                                    std::span<const double> spectrum) {
  const auto set = joint_set(m, n);
  if (static_cast<int>(spectrum.size()) != m.dim()) {
    throw InputError("spectrum has " + std::to_string(spectrum.size()) + " entries, expected " +
                     std::to_string(m.dim()));
  }
  const ProbVector lam(std::vector<double>(spectrum.begin(), spectrum.end()));
  if (!std::is_sorted(lam.vec().begin(), lam.vec().end(), std::greater<>())) {
    throw InputError("spectrum must be in nonincreasing order");
  }
  const int total = static_cast<int>(set.size());
  std::vector<double> y(static_cast<std::size_t>(total));
  for (int k = 1; k <= total; ++k) {
    double best = 0.0;
    for (const auto& s : sdp::k_subsets(total, k)) {
      const Eigen::VectorXd ev = descending_eigenvalues(set, s);
      double dot = 0.0;
      for (int i = 0; i < m.dim(); ++i) dot += lam[static_cast<std::size_t>(i)] * ev(i);
      best = std::max(best, dot);
    }
    y[static_cast<std::size_t>(k - 1)] = best;
  }
  return successive_differences(y);
}

BaselineBounds baseline_bounds(const MeasurementBasis& m, const MeasurementBasis& n,
                               std::optional<std::span<const double>> spectrum) {
  BaselineBounds out{dsmur_w_plus(m, n), uur_w_times(m, n), std::nullopt, mu_bound(m, n)};
  if (spectrum) out.w_plus_rho = spectrum_w_plus(m, n, *spectrum);
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Convertibility c) {
  switch (c) {
    case Convertibility::yes: return "yes";
    case Convertibility::no: return "no";
    case Convertibility::lack_of_information: return "lack_of_information";
  }
  return "unknown";
}

Convertibility convertibility(const BoundSet& b, const ProbVector& x,
                              ConversionDirection direction) {
  if (x.size() != b.r.size()) throw InputError("convertibility: dimension mismatch");
  if (direction == ConversionDirection::from) {
    // x ≺ r ≺ q guarantees x ≺ q; x ⊀ t rules out x ≺ q for every q ≺ t.
    if (majorized_by(x, b.r)) return Convertibility::yes;
    if (!majorized_by(x, b.t)) return Convertibility::no;
  } else {
    if (majorized_by(b.t, x)) return Convertibility::yes;
    if (!majorized_by(b.r, x)) return Convertibility::no;
  }
  return Convertibility::lack_of_information;
}

}  // namespace cip
