#pragma once

// Independent reference computations used to check the library. None of
// these call the code path they are compared against.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

/// Least concave majorant of the points (k, S_1 + ... + S_k), k = 0..n,
/// via an upper convex hull; returns its successive differences.
inline std::vector<double> concave_majorant(const std::vector<double>& s) {
  const std::size_t n = s.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) cum[k + 1] = cum[k] + s[k];
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k <= n; ++k) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      // Drop b if it lies on or below the chord a -> k.
      const double cross = (static_cast<double>(b) - a) * (cum[k] - cum[a]) -
                           (cum[b] - cum[a]) * (static_cast<double>(k) - a);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }
  std::vector<double> out(n);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t a = hull[h];
    const std::size_t b = hull[h + 1];
    const double slope = (cum[b] - cum[a]) / static_cast<double>(b - a);
    for (std::size_t k = a; k < b; ++k) out[k] = slope;
  }
  return out;
}

inline std::vector<double> partial_sums_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = acc += v[i];
  return out;
}

inline bool majorized(const std::vector<double>& x, const std::vector<double>& y,
                      double tol = 1e-10) {
  const auto cx = partial_sums_desc(x);
  const auto cy = partial_sums_desc(y);
  for (std::size_t k = 0; k < cx.size(); ++k) {
    if (cx[k] > cy[k] + tol) return false;
  }
  return true;
}

/// Partial sums of s taken in the given order never exceed those of the
/// nonincreasing vector z.
inline bool dominated_in_order(const std::vector<double>& s, const std::vector<double>& z,
                               double tol = 1e-10) {
  double cs = 0.0, cz = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cs += s[k];
    cz += z[k];
    if (cs > cz + tol) return false;
  }
  return true;
}

/// <v|rho|v> for each column v of `basis`.
inline std::vector<double> born(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& basis) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    out.push_back((basis.col(j).adjoint() * rho * basis.col(j))(0, 0).real());
  }
  return out;
}

/// Feasible state with M-basis matrix ρ_ij = √(c_i c_j) <g_i, g_j> for unit
/// vectors g_i (the columns of g after normalization).
inline Eigen::MatrixXcd state_from_gram(const std::vector<double>& c, Eigen::MatrixXcd g,
                                        const Eigen::MatrixXcd& m_basis) {
  const auto n = static_cast<Eigen::Index>(c.size());
  for (Eigen::Index j = 0; j < n; ++j) g.col(j).normalize();
  Eigen::MatrixXcd rho_m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      rho_m(i, j) = std::sqrt(c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)]) *
                    g.col(i).dot(g.col(j));
    }
  }
  return m_basis * rho_m * m_basis.adjoint();
}

/// Random search plus shrinking-step hill climb over the Gram
/// parameterization of S(M, p), minimizing (or maximizing) `objective`
/// of the post-measurement statistics.
inline double hill_climb(const std::vector<double>& c, const Eigen::MatrixXcd& m_basis,
                         const Eigen::MatrixXcd& n_basis,
                         const std::function<double(const std::vector<double>&)>& objective,
                         bool minimize, unsigned seed, int restarts = 20, int iters = 4000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const auto n = static_cast<Eigen::Index>(c.size());
  auto random_g = [&] {
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cd(gauss(rng), gauss(rng));
    return g;
  };
  auto value = [&](const Eigen::MatrixXcd& g) {
    const double v = objective(born(state_from_gram(c, g, m_basis), n_basis));
    return minimize ? v : -v;
  };
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXcd g = random_g();
    double cur = value(g);
    double step = 0.5;
    for (int it = 0; it < iters; ++it) {
      Eigen::MatrixXcd cand = g + step * random_g();
      const double v = value(cand);
      if (v < cur) {
        cur = v;
        g = cand;
      } else if (it % 50 == 49) {
        step *= 0.7;
      }
      if (step < 1e-9) break;
    }
    best = std::min(best, cur);
  }
  return minimize ? best : -best;
}

/// Qubit feasible states realizing the extreme post-measurement vectors.
/// In the M basis ρ = [[λ, z], [z*, 1-λ]] with |z| <= √(λ(1-λ)), and
/// q_1 = λ|a0|² + (1-λ)|a1|² + 2 Re(conj(a0) z a1), a_j = <u_j|v_1>.
struct QubitExtremes {
  Eigen::MatrixXcd top;     // maximizes max(q_1, q_2)
  Eigen::MatrixXcd bottom;  // minimizes max(q_1, q_2)
};

inline QubitExtremes qubit_extreme_states(double lambda, const Eigen::MatrixXcd& m_basis,
                                          const Eigen::MatrixXcd& n_basis) {
  const cd a0 = m_basis.col(0).dot(n_basis.col(0));
  const cd a1 = m_basis.col(1).dot(n_basis.col(0));
  const double radius = std::sqrt(lambda * (1.0 - lambda));
  const double base = lambda * std::norm(a0) + (1.0 - lambda) * std::norm(a1);
  const cd w = std::conj(a0) * a1;
  const double amp = 2.0 * std::abs(w) * radius;
  // z = s · radius · conj(w)/|w| moves q_1 by s · amp, s ∈ [-1, 1].
  const cd dir = std::abs(w) > 0.0 ? std::conj(w) / std::abs(w) : cd(1.0, 0.0);
  auto make = [&](double s) {
    Eigen::MatrixXcd rho_m(2, 2);
    const cd z = s * radius * dir;
    rho_m << lambda, z, std::conj(z), 1.0 - lambda;
    return Eigen::MatrixXcd(m_basis * rho_m * m_basis.adjoint());
  };
  const double lo = base - amp;
  const double hi = base + amp;
  QubitExtremes out;
  // The largest |q_1 - 1/2| sits at an end of [lo, hi].
  out.top = make(std::abs(hi - 0.5) >= std::abs(lo - 0.5) ? 1.0 : -1.0);
  const double target = std::clamp(0.5, lo, hi);
  out.bottom = make(amp > 0.0 ? (target - base) / amp : 0.0);
  return out;
}

}  // namespace oracle
