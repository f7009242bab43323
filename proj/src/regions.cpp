#include "cip/regions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "cip/error.hpp"
#include "cip/parallel.hpp"

namespace cip {

namespace {

void compose(int remaining, int parts, int min_part, std::vector<int>& prefix,
             std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    if (remaining >= min_part) {
      prefix.push_back(remaining);
      out.push_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  for (int first = remaining - min_part * (parts - 1); first >= min_part; --first) {
    prefix.push_back(first);
    compose(remaining - first, parts - 1, min_part, prefix, out);
    prefix.pop_back();
  }
}

long long binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

RegionOptions inner_options(const RegionOptions& opt) {
  RegionOptions inner = opt;
  // One level of threading: grid points in parallel, SDPs serial per point.
  if (opt.parallel > 1) inner.bounds.parallel = 1;
  return inner;
}

}  // namespace

std::size_t SimplexGrid::size() const {
  if (n < 1 || m < 1) throw InputError("simplex grid: dimension and resolution must be positive");
  if (m == 1) return 1;
  if (include_boundary) return static_cast<std::size_t>(binomial(m + n - 1, n - 1));
  return static_cast<std::size_t>(binomial(m - 1, n - 1));
}

std::vector<std::vector<int>> SimplexGrid::compositions() const {
  if (n < 1 || m < 1) throw InputError("simplex grid: dimension and resolution must be positive");
  std::vector<std::vector<int>> out;
  if (m == 1) return out;
  std::vector<int> prefix;
  compose(m, n, include_boundary ? 0 : 1, prefix, out);
  return out;
}

std::vector<ProbVector> SimplexGrid::points() const {
  if (m == 1) {
    if (n < 1) throw InputError("simplex grid: dimension must be positive");
    return {ProbVector::uniform(static_cast<std::size_t>(n))};
  }
  std::vector<ProbVector> out;
  for (const auto& c : compositions()) {
    std::vector<double> v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) v[i] = static_cast<double>(c[i]) / m;
    out.emplace_back(std::move(v));
  }
  return out;
}

BoundPair bound_pair(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n,
                     const RegionOptions& opt) {
  if (m.dim() == 2 && !opt.force_sdp) return qubit_bounds(m, p, n);
  BoundSet b = bounds(m, p, n, opt.bounds);
  return {std::move(b.r), std::move(b.t)};
}

RegionSample fine_grained_interval(const MeasurementBasis& m, const ProbVector& p,
                                   const MeasurementBasis& n, const MeasureSpec& f,
                                   const MeasureSpec& g, const RegionOptions& opt) {
  const BoundPair b = bound_pair(m, p, n, opt);
  RegionSample s;
  s.p = p;
  s.f_value = f(p);
  s.g_low = g(b.t);
  s.g_high = g(b.r);
  return s;
}

std::vector<RegionSample> sweep_region(const MeasurementBasis& m, const MeasurementBasis& n,
                                       const MeasureSpec& f, const MeasureSpec& g,
                                       const SimplexGrid& grid, const RegionOptions& opt) {
  if (grid.n != m.dim()) throw InputError("sweep: grid dimension does not match the bases");
  const auto points = grid.points();
  const RegionOptions inner = inner_options(opt);
  std::vector<RegionSample> out(points.size());
  parallel_for(points.size(), opt.parallel, [&](std::size_t i) {
    try {
      out[i] = fine_grained_interval(m, points[i], n, f, g, inner);
    } catch (const NumericalError& e) {
      out[i].p = points[i];
      out[i].ok = false;
      out[i].error = e.what();
      out[i].f_value = out[i].g_low = out[i].g_high = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return out;
}

void write_region_csv(std::ostream& out, const std::vector<RegionSample>& samples, int n) {
  for (int i = 1; i <= n; ++i) out << "p_" << i << ',';
  out << "f_value,g_low,g_high\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out << buf;
  };
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.p.size(); ++i) {
      put(s.p[i]);
      out << ',';
    }
    put(s.f_value);
    out << ',';
    put(s.g_low);
    out << ',';
    put(s.g_high);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

RegionRaster::RegionRaster(double x_max, double y_max, int resolution)
    : x_max_(x_max), y_max_(y_max), res_(resolution) {
  if (!(x_max > 0.0) || !(y_max > 0.0) || resolution < 1) {
    throw InputError("raster: ranges and resolution must be positive");
  }
  cells_.assign(static_cast<std::size_t>(res_) * static_cast<std::size_t>(res_), false);
}

int RegionRaster::to_ix(double x) const {
  return std::clamp(static_cast<int>(std::floor(x / x_max_ * res_)), 0, res_ - 1);
}

int RegionRaster::to_iy(double y) const {
  return std::clamp(static_cast<int>(std::floor(y / y_max_ * res_)), 0, res_ - 1);
}

void RegionRaster::fill_column(double x, double y_lo, double y_hi) {
  const int ix = to_ix(x);
  const int a = to_iy(std::min(y_lo, y_hi));
  const int b = to_iy(std::max(y_lo, y_hi));
  for (int iy = a; iy <= b; ++iy) set(ix, iy);
}

void RegionRaster::fill_row(double y, double x_lo, double x_hi) {
  const int iy = to_iy(y);
  const int a = to_ix(std::min(x_lo, x_hi));
  const int b = to_ix(std::max(x_lo, x_hi));
  for (int ix = a; ix <= b; ++ix) set(ix, iy);
}

void RegionRaster::fill_vertical_trapezoid(double x0, double lo0, double hi0, double x1,
                                           double lo1, double hi1) {
  if (x1 < x0) {
    std::swap(x0, x1);
    std::swap(lo0, lo1);
    std::swap(hi0, hi1);
  }
  const int a = to_ix(x0);
  const int b = to_ix(x1);
  if (a == b) {
    fill_column(x0, std::min(lo0, lo1), std::max(hi0, hi1));
    return;
  }
  fill_column(x0, lo0, hi0);
  fill_column(x1, lo1, hi1);
  for (int ix = a + 1; ix < b; ++ix) {
    const double xc = (ix + 0.5) * x_max_ / res_;
    const double w = std::clamp((xc - x0) / (x1 - x0), 0.0, 1.0);
    fill_column(xc, lo0 + w * (lo1 - lo0), hi0 + w * (hi1 - hi0));
  }
}

void RegionRaster::fill_horizontal_trapezoid(double y0, double lo0, double hi0, double y1,
                                             double lo1, double hi1) {
  if (y1 < y0) {
    std::swap(y0, y1);
    std::swap(lo0, lo1);
    std::swap(hi0, hi1);
  }
  const int a = to_iy(y0);
  const int b = to_iy(y1);
  if (a == b) {
    fill_row(y0, std::min(lo0, lo1), std::max(hi0, hi1));
    return;
  }
  fill_row(y0, lo0, hi0);
  fill_row(y1, lo1, hi1);
  for (int iy = a + 1; iy < b; ++iy) {
    const double yc = (iy + 0.5) * y_max_ / res_;
    const double w = std::clamp((yc - y0) / (y1 - y0), 0.0, 1.0);
    fill_row(yc, lo0 + w * (lo1 - lo0), hi0 + w * (hi1 - hi0));
  }
}

bool RegionRaster::contains(double x, double y, int tolerance_cells) const {
  const double cx = x_max_ / res_;
  const double cy = y_max_ / res_;
  if (x < -tolerance_cells * cx || x > x_max_ + tolerance_cells * cx) return false;
  if (y < -tolerance_cells * cy || y > y_max_ + tolerance_cells * cy) return false;
  const int ix = to_ix(x);
  const int iy = to_iy(y);
  for (int dy = -tolerance_cells; dy <= tolerance_cells; ++dy) {
    for (int dx = -tolerance_cells; dx <= tolerance_cells; ++dx) {
      const int jx = ix + dx;
      const int jy = iy + dy;
      if (jx >= 0 && jx < res_ && jy >= 0 && jy < res_ && cell(jx, jy)) return true;
    }
  }
  return false;
}

std::size_t RegionRaster::filled_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), true));
}

RegionRaster RegionRaster::intersect(const RegionRaster& other) const {
  if (other.res_ != res_ || other.x_max_ != x_max_ || other.y_max_ != y_max_) {
    throw InputError("raster intersection: grids differ");
  }
  RegionRaster out(x_max_, y_max_, res_);
  for (std::size_t i = 0; i < cells_.size(); ++i) out.cells_[i] = cells_[i] && other.cells_[i];
  return out;
}

bool RegionRaster::subset_of(const RegionRaster& other) const {
  if (other.res_ != res_) return false;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] && !other.cells_[i]) return false;
  }
  return true;
}

namespace {

// Fills each sample's interval and a box along each simplex-grid edge
// (compositions differing by one unit moved between two parts).
void rasterize_into(RegionRaster& raster, const std::vector<RegionSample>& samples,
                    const SimplexGrid& grid, bool vertical) {
  auto fill_one = [&](const RegionSample& s) {
    if (vertical) {
      raster.fill_column(s.f_value, s.g_low, s.g_high);
    } else {
      raster.fill_row(s.f_value, s.g_low, s.g_high);
    }
  };
  const auto comps = grid.compositions();
  if (comps.size() != samples.size()) {
    for (const auto& s : samples) {
      if (s.ok) fill_one(s);
    }
    return;
  }
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < comps.size(); ++i) index.emplace(comps[i], i);

  for (std::size_t i = 0; i < comps.size(); ++i) {
    const RegionSample& a = samples[i];
    if (!a.ok) continue;
    fill_one(a);
    for (int from = 0; from < grid.n; ++from) {
      if (comps[i][static_cast<std::size_t>(from)] == 0) continue;
      for (int to = 0; to < grid.n; ++to) {
        if (to == from) continue;
        auto c = comps[i];
        --c[static_cast<std::size_t>(from)];
        ++c[static_cast<std::size_t>(to)];
        const auto it = index.find(c);
        if (it == index.end() || it->second < i) continue;
        const RegionSample& b = samples[it->second];
        if (!b.ok) continue;
        // Box spanned by both intervals: endpoints can move like √ε near the
        // boundary while f moves like ε log ε, so the chord would undercover.
        const double lo = std::min(a.g_low, b.g_low);
        const double hi = std::max(a.g_high, b.g_high);
        if (vertical) {
          raster.fill_vertical_trapezoid(a.f_value, lo, hi, b.f_value, lo, hi);
        } else {
          raster.fill_horizontal_trapezoid(a.f_value, lo, hi, b.f_value, lo, hi);
        }
      }
    }
  }
}

}  // namespace

RegionRaster rasterize_region(const std::vector<RegionSample>& samples, const SimplexGrid& grid,
                              double x_max, double y_max, int resolution) {
  RegionRaster raster(x_max, y_max, resolution);
  rasterize_into(raster, samples, grid, true);
  return raster;
}

IntersectedRegion swapped_and_intersected(const MeasurementBasis& m, const MeasurementBasis& n,
                                          const MeasureSpec& f, const MeasureSpec& g,
                                          const SimplexGrid& grid, const RegionOptions& opt,
                                          int resolution) {
  const double range = std::log2(static_cast<double>(m.dim()));
  if (!(range > 0.0)) throw InputError("region raster needs dimension >= 2");
  const auto forward = sweep_region(m, n, f, g, grid, opt);
  // Roles exchanged: q runs over the grid, and the sample's "f_value" is g(q)
  // while its interval bounds f(p).
  const auto swapped = sweep_region(n, m, g, f, grid, opt);

  IntersectedRegion out{RegionRaster(range, range, resolution),
                        RegionRaster(range, range, resolution),
                        RegionRaster(range, range, resolution)};
  rasterize_into(out.forward, forward, grid, true);
  rasterize_into(out.swapped, swapped, grid, false);
  out.combined = out.forward.intersect(out.swapped);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<MultiSample> multi_measurement_sweep(const MeasurementBasis& m,
                                                 const std::vector<MeasurementBasis>& posts,
                                                 const MeasureSpec& f,
                                                 const std::vector<MeasureSpec>& gs,
                                                 const SimplexGrid& grid,
                                                 const RegionOptions& opt) {
  if (posts.empty()) throw InputError("multi-measurement sweep needs at least one measurement");
  if (posts.size() != gs.size()) {
    throw InputError("multi-measurement sweep: one measure per post-measurement required");
  }
  for (const auto& b : posts) {
    if (b.dim() != m.dim()) throw InputError("multi-measurement sweep: dimension mismatch");
  }
  if (grid.n != m.dim()) throw InputError("sweep: grid dimension does not match the bases");

  const auto points = grid.points();
  const RegionOptions inner = inner_options(opt);
  std::vector<MultiSample> out(points.size());
  parallel_for(points.size(), opt.parallel, [&](std::size_t i) {
    MultiSample& s = out[i];
    s.p = points[i];
    try {
      s.f_value = f(points[i]);
      for (std::size_t k = 0; k < posts.size(); ++k) {
        const BoundPair b = bound_pair(m, points[i], posts[k], inner);
        s.g_low.push_back(gs[k](b.t));
        s.g_high.push_back(gs[k](b.r));
      }
    } catch (const NumericalError& e) {
      s.ok = false;
      s.error = e.what();
    }
  });
  return out;
}

namespace {

constexpr double kGolden = 0.6180339887498949;

double safe_eval(const std::function<double(const ProbVector&)>& objective, const ProbVector& p,
                 bool minimize) {
  try {
    const double v = objective(p);
    if (std::isfinite(v)) return minimize ? v : -v;
  } catch (const NumericalError&) {
  }
  return std::numeric_limits<double>::infinity();
}

ProbVector make_point(std::vector<double> v) {
  for (double& x : v) x = std::max(0.0, x);
  double total = 0.0;
  for (double x : v) total += x;
  for (double& x : v) x /= total;
  return ProbVector(std::move(v));
}

}  // namespace

SimplexOptimum optimize_on_simplex(const std::function<double(const ProbVector&)>& objective,
                                   const SimplexGrid& grid, bool minimize, int parallel) {
  const auto points = grid.points();
  std::vector<double> values(points.size());
  // Objective is minimized internally; maximization negates it.
  parallel_for(points.size(), parallel,
               [&](std::size_t i) { values[i] = safe_eval(objective, points[i], minimize); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  if (!std::isfinite(values[best])) {
    throw NumericalError("simplex optimization: objective failed at every grid point");
  }

  double best_value = values[best];
  ProbVector best_point = points[best];
  const double grid_value = best_value;

  if (grid.m > 1 && grid.n == 2) {
    const double h = 1.0 / grid.m;
    double lo = std::max(0.0, best_point[0] - h);
    double hi = std::min(1.0, best_point[0] + h);
    auto eval_at = [&](double x) {
      return safe_eval(objective, make_point({x, 1.0 - x}), minimize);
    };
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = eval_at(x1);
    double f2 = eval_at(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kGolden * (hi - lo);
        f1 = eval_at(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kGolden * (hi - lo);
        f2 = eval_at(x2);
      }
    }
    const double x = f1 <= f2 ? x1 : x2;
    const double v = std::min(f1, f2);
    if (v < best_value) {
      best_value = v;
      best_point = make_point({x, 1.0 - x});
    }
  } else if (grid.m > 1 && grid.n >= 3) {
    double step = 1.0 / grid.m;
    const auto n = static_cast<std::size_t>(grid.n);
    for (int round = 0; round < 4000 && step > 1e-9; ++round) {
      bool improved = false;
      for (std::size_t i = 0; i < n && !improved; ++i) {
        for (std::size_t j = 0; j < n && !improved; ++j) {
          if (i == j || best_point[j] <= 0.0) continue;
          std::vector<double> v = best_point.vec();
          const double move = std::min(step, v[j]);
          v[i] += move;
          v[j] -= move;
          const ProbVector cand = make_point(std::move(v));
          const double cv = safe_eval(objective, cand, minimize);
          if (cv < best_value - 1e-15) {
            best_value = cv;
            best_point = cand;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }

  return {minimize ? best_value : -best_value, best_point, minimize ? grid_value : -grid_value};
}

SimplexOptimum multi_additive_constant(const MeasurementBasis& m,
                                       const std::vector<MeasurementBasis>& posts,
                                       const MeasureSpec& f, const std::vector<MeasureSpec>& gs,
                                       const SimplexGrid& grid, const RegionOptions& opt) {
  if (posts.size() != gs.size() || posts.empty()) {
    throw InputError("additive constant: one measure per post-measurement required");
  }
  for (const auto& b : posts) {
    if (b.dim() != m.dim()) throw InputError("additive constant: dimension mismatch");
  }
  if (grid.n != m.dim()) throw InputError("additive constant: grid dimension mismatch");
  const RegionOptions inner = inner_options(opt);
  auto objective = [&](const ProbVector& p) {
    double v = f(p);
    for (std::size_t k = 0; k < posts.size(); ++k) v += gs[k](bound_pair(m, p, posts[k], inner).t);
    return v;
  };
  return optimize_on_simplex(objective, grid, true, opt.parallel);
}

double optimal_additive_constant(const MeasurementBasis& m, const MeasurementBasis& n,
                                 const MeasureSpec& f, const MeasureSpec& g,
                                 const SimplexGrid& grid, const RegionOptions& opt) {
  return multi_additive_constant(m, {n}, f, {g}, grid, opt).value;
}

JointBounds joint_bounds(const MeasurementBasis& m, const MeasurementBasis& n,
                         const JointMeasureSpec& j, const SimplexGrid& grid,
                         const RegionOptions& opt) {
  if (m.dim() != n.dim()) throw InputError("joint bounds: dimension mismatch");
  if (grid.n != m.dim()) throw InputError("joint bounds: grid dimension mismatch");
  const RegionOptions inner = inner_options(opt);

  auto fwd_low = [&](const ProbVector& p) { return evaluate_joint(j, p, bound_pair(m, p, n, inner).t); };
  auto fwd_high = [&](const ProbVector& p) { return evaluate_joint(j, p, bound_pair(m, p, n, inner).r); };
  auto swp_low = [&](const ProbVector& q) { return evaluate_joint(j, bound_pair(n, q, m, inner).t, q); };
  auto swp_high = [&](const ProbVector& q) { return evaluate_joint(j, bound_pair(n, q, m, inner).r, q); };

  const auto b_fwd = optimize_on_simplex(fwd_low, grid, true, opt.parallel);
  const auto b_swp = optimize_on_simplex(swp_low, grid, true, opt.parallel);
  const auto a_fwd = optimize_on_simplex(fwd_high, grid, false, opt.parallel);
  const auto a_swp = optimize_on_simplex(swp_high, grid, false, opt.parallel);

  JointBounds out;
  out.b_from_swapped = b_swp.value > b_fwd.value;
  out.b = out.b_from_swapped ? b_swp.value : b_fwd.value;
  out.b_witness = out.b_from_swapped ? b_swp.argument : b_fwd.argument;
  out.a_from_swapped = a_swp.value < a_fwd.value;
  out.a = out.a_from_swapped ? a_swp.value : a_fwd.value;
  out.a_witness = out.a_from_swapped ? a_swp.argument : a_fwd.argument;
  return out;
}

}  // namespace cip
