#include "cip/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cip/error.hpp"

namespace cip::sdp {

BlockMatrix BlockMatrix::zeros(const std::vector<int>& psd_dims, int nonneg_dim) {
  BlockMatrix out;
  out.psd.reserve(psd_dims.size());
  for (int d : psd_dims) out.psd.push_back(Eigen::MatrixXd::Zero(d, d));
  out.nonneg = Eigen::VectorXd::Zero(nonneg_dim);
  return out;
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = a.nonneg.dot(b.nonneg);
  for (std::size_t k = 0; k < a.psd.size(); ++k) s += a.psd[k].cwiseProduct(b.psd[k]).sum();
  return s;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::max_iter: return "max_iter";
    case Status::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

double norm(const BlockMatrix& a) { return std::sqrt(inner(a, a)); }

void axpy(double alpha, const BlockMatrix& x, BlockMatrix& y) {
  y.nonneg += alpha * x.nonneg;
  for (std::size_t k = 0; k < x.psd.size(); ++k) y.psd[k] += alpha * x.psd[k];
}

BlockMatrix scaled(const BlockMatrix& a, double s) {
  BlockMatrix out = a;
  out.nonneg *= s;
  for (auto& m : out.psd) m *= s;
  return out;
}

void check_shape(const BlockMatrix& a, const SdpProblem& p, const std::string& what) {
  if (a.psd.size() != p.psd_block_dims.size() || a.nonneg.size() != p.nonneg_block_dim) {
    throw InputError("sdp: " + what + " has the wrong block structure");
  }
  for (std::size_t k = 0; k < a.psd.size(); ++k) {
    const int d = p.psd_block_dims[k];
    if (a.psd[k].rows() != d || a.psd[k].cols() != d) {
      throw InputError("sdp: " + what + " block " + std::to_string(k) + " has the wrong size");
    }
    if (!a.psd[k].allFinite()) throw InputError("sdp: " + what + " has non-finite entries");
    if ((a.psd[k] - a.psd[k].transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw InputError("sdp: " + what + " block " + std::to_string(k) + " is not symmetric");
    }
  }
  if (!a.nonneg.allFinite()) throw InputError("sdp: " + what + " has non-finite entries");
}

// Largest step α with V + α dV ⪰ 0 (+inf if unbounded).
double max_step_psd(const Eigen::MatrixXd& v, const Eigen::MatrixXd& dv) {
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(dv);
  w = l.triangularView<Eigen::Lower>().solve(w.transpose()).transpose();
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step(const BlockMatrix& v, const BlockMatrix& dv) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.psd.size(); ++k) {
    alpha = std::min(alpha, max_step_psd(v.psd[k], dv.psd[k]));
  }
  for (Eigen::Index i = 0; i < v.nonneg.size(); ++i) {
    if (dv.nonneg(i) < 0.0) alpha = std::min(alpha, -v.nonneg(i) / dv.nonneg(i));
  }
  return alpha;
}

class Solver {
 public:
  Solver(const SdpProblem& p, const SdpOptions& o) : p_(p), opt_(o) {
    sign_ = p.sense == Sense::maximize ? -1.0 : 1.0;
    c_ = scaled(p.objective, sign_);
    m_ = static_cast<int>(p.constraints.size());
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_(i) = p.constraints[static_cast<std::size_t>(i)].rhs;
    n_cone_ = p.nonneg_block_dim;
    for (int d : p.psd_block_dims) n_cone_ += d;
  }

  SdpSolution run() {
    initialize();
    SdpSolution best;
    double best_merit = std::numeric_limits<double>::infinity();
    int stalled = 0;

    for (int iter = 0;; ++iter) {
      const Eigen::VectorXd rp = b_ - apply(x_);
      BlockMatrix rd = c_;
      axpy(-1.0, adjoint(y_), rd);
      axpy(-1.0, z_, rd);

      const double pobj = inner(c_, x_);
      const double dobj = b_.dot(y_);
      const double pinf = rp.norm() / (1.0 + b_.norm());
      const double dinf = norm(rd) / (1.0 + norm(c_));
      const double rel_gap =
          std::abs(pobj - dobj) / std::max({1.0, std::abs(pobj), std::abs(dobj)});
      const double mu = inner(x_, z_) / static_cast<double>(n_cone_);

      if (opt_.record_history) {
        history_.push_back({iter, sign_ * pobj, sign_ * dobj, pinf, dinf, mu});
      }
      const double merit = std::max({rel_gap / opt_.tol_gap, pinf / opt_.tol_feas,
                                     dinf / opt_.tol_feas});
      if (merit < best_merit) {
        best_merit = merit;
        best = snapshot(iter, pobj, dobj, pinf, dinf);
      }
      if (rel_gap <= opt_.tol_gap && pinf <= opt_.tol_feas && dinf <= opt_.tol_feas) {
        best.status = Status::optimal;
        break;
      }
      if (norm(x_) > 1e10 || y_.norm() > 1e10 || norm(z_) > 1e12) {
        best.status = Status::infeasible;
        break;
      }
      if (iter >= opt_.max_iter || stalled >= 5) {
        best.status = Status::max_iter;
        break;
      }

      double alpha_taken = 0.0;
      try {
        alpha_taken = step(rp, rd, mu);
      } catch (const NumericalError&) {
        // Factorization breakdown near the boundary: keep the best iterate.
        best.status = best_merit <= 1.0 ? Status::optimal : Status::max_iter;
        break;
      }
      stalled = alpha_taken < 1e-10 ? stalled + 1 : 0;
    }
    best.history = std::move(history_);
    return best;
  }

 private:
  Eigen::VectorXd apply(const BlockMatrix& x) const {
    Eigen::VectorXd out(m_);
    for (int i = 0; i < m_; ++i) out(i) = inner(p_.constraints[static_cast<std::size_t>(i)].a, x);
    return out;
  }

  BlockMatrix adjoint(const Eigen::VectorXd& y) const {
    BlockMatrix out = BlockMatrix::zeros(p_.psd_block_dims, p_.nonneg_block_dim);
    for (int i = 0; i < m_; ++i) axpy(y(i), p_.constraints[static_cast<std::size_t>(i)].a, out);
    return out;
  }

  void initialize() {
    double scale_b = 1.0;
    double norm_a = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double na = norm(p_.constraints[static_cast<std::size_t>(i)].a);
      norm_a = std::max(norm_a, na);
      scale_b = std::max(scale_b, (1.0 + std::abs(b_(i))) / (1.0 + na));
    }
    const double root_n = std::sqrt(static_cast<double>(n_cone_));
    const double xi = root_n * scale_b;
    const double eta = std::max({1.0, norm_a, norm(c_)}) / root_n * 10.0;
    x_ = BlockMatrix::zeros(p_.psd_block_dims, p_.nonneg_block_dim);
    z_ = x_;
    for (std::size_t k = 0; k < x_.psd.size(); ++k) {
      const int d = p_.psd_block_dims[k];
      x_.psd[k] = xi * Eigen::MatrixXd::Identity(d, d);
      z_.psd[k] = eta * Eigen::MatrixXd::Identity(d, d);
    }
    x_.nonneg.setConstant(xi);
    z_.nonneg.setConstant(eta);
    y_ = Eigen::VectorXd::Zero(m_);
  }

  SdpSolution snapshot(int iter, double pobj, double dobj, double pinf, double dinf) const {
    SdpSolution s;
    s.primal = x_;
    s.dual = y_;
    s.dual_slack = z_;
    s.objective_value = sign_ * pobj;
    s.dual_objective = sign_ * dobj;
    s.duality_gap = std::abs(pobj - dobj);
    s.primal_residual = pinf;
    s.dual_residual = dinf;
    s.iterations = iter;
    return s;
  }

  struct Direction {
    BlockMatrix dx;
    Eigen::VectorXd dy;
    BlockMatrix dz;
  };

  // HKM direction for target σμ. `corr` holds the second-order term
  // dX_aff dZ_aff Z^{-1} (and dx∘dz/z) of a Mehrotra corrector, if any.
  Direction direction(const Eigen::VectorXd& rp, const BlockMatrix& rd, double target,
                      const BlockMatrix* corr) const {
    // K = target Z^{-1} - X - X Rd Z^{-1} - corr; then M dy = rp - A(K).
    BlockMatrix k = BlockMatrix::zeros(p_.psd_block_dims, p_.nonneg_block_dim);
    for (std::size_t b = 0; b < x_.psd.size(); ++b) {
      const Eigen::MatrixXd& zi = zinv_[b];
      Eigen::MatrixXd kb = target * zi - x_.psd[b] - x_.psd[b] * rd.psd[b] * zi;
      if (corr) kb -= corr->psd[b];
      k.psd[b] = 0.5 * (kb + kb.transpose());
    }
    for (Eigen::Index i = 0; i < x_.nonneg.size(); ++i) {
      const double zi = 1.0 / z_.nonneg(i);
      double ki = target * zi - x_.nonneg(i) - x_.nonneg(i) * rd.nonneg(i) * zi;
      if (corr) ki -= corr->nonneg(i);
      k.nonneg(i) = ki;
    }
    Direction d;
    d.dy = schur_.solve(rp - apply(k));
    d.dz = rd;
    axpy(-1.0, adjoint(d.dy), d.dz);
    // dX = K + sym(X (A^T dy) Z^{-1}), and A^T dy = Rd - dZ.
    d.dx = k;
    for (std::size_t b = 0; b < x_.psd.size(); ++b) {
      Eigen::MatrixXd full = k.psd[b] + x_.psd[b] * (rd.psd[b] - d.dz.psd[b]) * zinv_[b];
      d.dx.psd[b] = 0.5 * (full + full.transpose());
    }
    for (Eigen::Index i = 0; i < x_.nonneg.size(); ++i) {
      d.dx.nonneg(i) =
          k.nonneg(i) + x_.nonneg(i) * (rd.nonneg(i) - d.dz.nonneg(i)) / z_.nonneg(i);
    }
    return d;
  }

  void factor() {
    zinv_.clear();
    for (const auto& zb : z_.psd) {
      Eigen::LLT<Eigen::MatrixXd> llt(zb);
      if (llt.info() != Eigen::Success) throw NumericalError("sdp: dual slack lost definiteness");
      zinv_.push_back(llt.solve(Eigen::MatrixXd::Identity(zb.rows(), zb.cols())));
    }
    // Schur complement M_ij = <A_i, X A_j Z^{-1}> + Σ a_i x a_j / z.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m_, m_);
    const Eigen::VectorXd xz = x_.nonneg.cwiseQuotient(z_.nonneg);
    for (int j = 0; j < m_; ++j) {
      const BlockMatrix& aj = p_.constraints[static_cast<std::size_t>(j)].a;
      BlockMatrix g = aj;
      for (std::size_t b = 0; b < aj.psd.size(); ++b) g.psd[b] = x_.psd[b] * aj.psd[b] * zinv_[b];
      g.nonneg = aj.nonneg.cwiseProduct(xz);
      for (int i = 0; i <= j; ++i) {
        const double v = inner(p_.constraints[static_cast<std::size_t>(i)].a, g);
        schur(i, j) = v;
        schur(j, i) = v;
      }
    }
    schur_.compute(schur);
    // Degenerate problems drive M towards singularity at high accuracy; a
    // tiny ridge keeps the direction usable, the residuals absorb the error.
    double ridge = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; schur_.info() != Eigen::Success && attempt < 4; ++attempt) {
      schur_.compute(schur + ridge * Eigen::MatrixXd::Identity(m_, m_));
      ridge *= 100.0;
    }
    if (schur_.info() != Eigen::Success) throw NumericalError("sdp: Schur complement is singular");
  }

  double step(const Eigen::VectorXd& rp, const BlockMatrix& rd, double mu) {
    factor();
    Direction d;
    if (opt_.predictor_corrector) {
      const Direction aff = direction(rp, rd, 0.0, nullptr);
      const double ap = std::min(1.0, max_step(x_, aff.dx));
      const double ad = std::min(1.0, max_step(z_, aff.dz));
      BlockMatrix xa = x_;
      axpy(ap, aff.dx, xa);
      BlockMatrix za = z_;
      axpy(ad, aff.dz, za);
      const double mu_aff = inner(xa, za) / static_cast<double>(n_cone_);
      const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
      BlockMatrix corr = BlockMatrix::zeros(p_.psd_block_dims, p_.nonneg_block_dim);
      for (std::size_t b = 0; b < x_.psd.size(); ++b) {
        corr.psd[b] = aff.dx.psd[b] * aff.dz.psd[b] * zinv_[b];
      }
      corr.nonneg = aff.dx.nonneg.cwiseProduct(aff.dz.nonneg).cwiseQuotient(z_.nonneg);
      d = direction(rp, rd, sigma * mu, &corr);
    } else {
      d = direction(rp, rd, opt_.sigma * mu, nullptr);
    }
    const double ap = std::min(1.0, opt_.step_fraction * max_step(x_, d.dx));
    const double ad = std::min(1.0, opt_.step_fraction * max_step(z_, d.dz));
    axpy(ap, d.dx, x_);
    y_ += ad * d.dy;
    axpy(ad, d.dz, z_);
    for (auto& xb : x_.psd) xb = 0.5 * (xb + xb.transpose());
    for (auto& zb : z_.psd) zb = 0.5 * (zb + zb.transpose());
    return std::min(ap, ad);
  }

  const SdpProblem& p_;
  const SdpOptions& opt_;
  double sign_ = 1.0;
  BlockMatrix c_;
  Eigen::VectorXd b_;
  int m_ = 0;
  int n_cone_ = 0;
  BlockMatrix x_, z_;
  Eigen::VectorXd y_;
  std::vector<Eigen::MatrixXd> zinv_;
  Eigen::LDLT<Eigen::MatrixXd> schur_;
  std::vector<IterationRecord> history_;
};

}  // namespace

void SdpProblem::validate() const {
  if (psd_block_dims.empty() && nonneg_block_dim == 0) throw InputError("sdp: no variables");
  for (int d : psd_block_dims) {
    if (d < 1) throw InputError("sdp: PSD block dimension must be positive");
  }
  if (nonneg_block_dim < 0) throw InputError("sdp: negative nonnegative-block dimension");
  check_shape(objective, *this, "objective");
  std::size_t total = static_cast<std::size_t>(nonneg_block_dim);
  for (int d : psd_block_dims) total += static_cast<std::size_t>(d);
  if (constraints.size() > total * total) throw InputError("sdp: too many constraints");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    check_shape(constraints[i].a, *this, "constraint " + std::to_string(i));
    if (!std::isfinite(constraints[i].rhs)) throw InputError("sdp: non-finite right-hand side");
  }
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  if (problem.constraints.empty()) throw InputError("sdp: at least one constraint is required");
  Solver solver(problem, options);
  return solver.run();
}

nlohmann::json to_json(const SdpProblem& problem) {
  auto block_json = [](const BlockMatrix& a) {
    nlohmann::json j;
    j["psd"] = nlohmann::json::array();
    for (const auto& m : a.psd) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
      }
      j["psd"].push_back(rows);
    }
    j["nonneg"] = std::vector<double>(a.nonneg.data(), a.nonneg.data() + a.nonneg.size());
    return j;
  };
  nlohmann::json j;
  j["sense"] = problem.sense == Sense::maximize ? "max" : "min";
  j["psd_block_dims"] = problem.psd_block_dims;
  j["nonneg_block_dim"] = problem.nonneg_block_dim;
  j["objective"] = block_json(problem.objective);
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : problem.constraints) {
    j["constraints"].push_back({{"a", block_json(c.a)}, {"rhs", c.rhs}});
  }
  return j;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd embed(const ComplexMatrix& h) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

ComplexMatrix extract_hermitian(const Eigen::MatrixXd& y) {
  const Eigen::Index n = y.rows() / 2;
  const Eigen::MatrixXd re = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  const Eigen::MatrixXd im = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  ComplexMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = Complex(re(r, c), im(r, c));
  }
  return 0.5 * (out + out.adjoint());
}

std::vector<std::vector<int>> k_subsets(int n, int k) {
  if (k < 1 || k > n) throw InputError("k_subsets: need 1 <= k <= n");
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

namespace {

// Diagonal constraints <u_j|ρ|u_j> = p_j in the reduced coordinates, where
// the retained basis vectors are the unit vectors.
void add_diagonal_constraints(SdpProblem& prob, const SupportReduction& red) {
  const int m = static_cast<int>(red.support.size());
  for (int j = 0; j < m; ++j) {
    Constraint c;
    c.a = BlockMatrix::zeros(prob.psd_block_dims, prob.nonneg_block_dim);
    c.a.psd[0](j, j) = 0.5;
    c.a.psd[0](m + j, m + j) = 0.5;
    c.rhs = red.target[static_cast<std::size_t>(j)];
    prob.constraints.push_back(std::move(c));
  }
}

ComplexMatrix compress(const SupportReduction& red, const HermitianOperator& a) {
  ComplexMatrix out = red.isometry.adjoint() * a * red.isometry;
  return 0.5 * (out + out.adjoint());
}

DensityMatrix lift(const SupportReduction& red, const ComplexMatrix& reduced) {
  ComplexMatrix rho = red.isometry * reduced * red.isometry.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  // Clip rounding-level negative eigenvalues and renormalize.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

FeasibleOptimum from_solution(const SdpSolution& sol, const SupportReduction& red) {
  FeasibleOptimum out;
  out.value = sol.objective_value;
  out.bound = sol.dual_objective;
  out.optimizer = lift(red, extract_hermitian(sol.primal.psd[0]));
  out.iterations = sol.iterations;
  out.duality_gap = sol.duality_gap;
  out.primal_residual = sol.primal_residual;
  out.status = sol.status;
  if (sol.status != Status::optimal) {
    throw NumericalError("sdp: solver finished with status " + to_string(sol.status) +
                         " (gap " + std::to_string(sol.duality_gap) + ", residual " +
                         std::to_string(sol.primal_residual) + ")");
  }
  return out;
}

}  // namespace

SdpProblem build_max_expectation(const SupportReduction& red, const HermitianOperator& a) {
  const int m = static_cast<int>(red.support.size());
  SdpProblem prob;
  prob.sense = Sense::maximize;
  prob.psd_block_dims = {2 * m};
  prob.nonneg_block_dim = 0;
  prob.objective = BlockMatrix::zeros(prob.psd_block_dims, 0);
  prob.objective.psd[0] = 0.5 * embed(compress(red, a));
  add_diagonal_constraints(prob, red);
  return prob;
}

SdpProblem build_min_max_gamma(const SupportReduction& red, const MeasurementBasis& post,
                               const std::vector<std::vector<int>>& subsets) {
  const int m = static_cast<int>(red.support.size());
  const int count = static_cast<int>(subsets.size());
  SdpProblem prob;
  prob.sense = Sense::minimize;
  prob.psd_block_dims = {2 * m};
  // nonneg block: [γ, slack_1, ..., slack_count]
  prob.nonneg_block_dim = 1 + count;
  prob.objective = BlockMatrix::zeros(prob.psd_block_dims, prob.nonneg_block_dim);
  prob.objective.nonneg(0) = 1.0;
  add_diagonal_constraints(prob, red);
  for (int s = 0; s < count; ++s) {
    // Tr(N_I ρ) - γ + slack_I = 0
    Constraint c;
    c.a = BlockMatrix::zeros(prob.psd_block_dims, prob.nonneg_block_dim);
    c.a.psd[0] = 0.5 * embed(compress(red, projector_partial_sum(
                                                post, subsets[static_cast<std::size_t>(s)])));
    c.a.nonneg(0) = -1.0;
    c.a.nonneg(1 + s) = 1.0;
    c.rhs = 0.0;
    prob.constraints.push_back(std::move(c));
  }
  return prob;
}

FeasibleOptimum max_expectation(const FeasibleSetSpec& spec, const HermitianOperator& a,
                                const SdpOptions& options) {
  if (a.rows() != spec.dim() || a.cols() != spec.dim()) {
    throw InputError("max_expectation: operator dimension does not match the basis");
  }
  if (hermiticity_error(a) > 1e-10) throw InputError("max_expectation: operator is not Hermitian");
  const SupportReduction red = reduce_support(spec);
  if (red.support.size() == 1) {
    // S(M, p) is the single pure state |u_j><u_j|.
    FeasibleOptimum out;
    out.optimizer = lift(red, ComplexMatrix::Ones(1, 1));
    out.value = (red.isometry.adjoint() * a * red.isometry)(0, 0).real();
    out.bound = out.value;
    return out;
  }
  return from_solution(solve(build_max_expectation(red, a), options), red);
}

FeasibleOptimum min_max_gamma(const FeasibleSetSpec& spec, const MeasurementBasis& post, int k,
                              const SdpOptions& options,
                              const std::optional<std::vector<std::vector<int>>>& subset_order) {
  const int n = spec.dim();
  if (post.dim() != n) throw InputError("min_max_gamma: post-measurement dimension mismatch");
  if (k < 1 || k > n) throw InputError("min_max_gamma: need 1 <= k <= n");
  if (n > kMaxSubsetDimension) {
    throw InputError("min_max_gamma: dimension " + std::to_string(n) +
                     " exceeds the subset-enumeration cap of " +
                     std::to_string(kMaxSubsetDimension) +
                     "; the epigraph program needs C(n,k) constraints");
  }
  const auto subsets = subset_order ? *subset_order : k_subsets(n, k);
  const SupportReduction red = reduce_support(spec);
  if (red.support.size() == 1) {
    FeasibleOptimum out;
    out.optimizer = lift(red, ComplexMatrix::Ones(1, 1));
    double best = 0.0;
    for (const auto& s : subsets) {
      best = std::max(best, (out.optimizer.matrix() * projector_partial_sum(post, s)).trace().real());
    }
    out.value = best;
    out.bound = best;
    return out;
  }
  return from_solution(solve(build_min_max_gamma(red, post, subsets), options), red);
}

}  // namespace cip::sdp
