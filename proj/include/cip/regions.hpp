#pragma once

// Uncertainty regions: sweeps of p over a simplex grid, the resulting
// outer approximations in the (f, g) plane and the constants derived from
// them.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cip/bounds.hpp"
#include "cip/measures.hpp"

namespace cip {

/// All compositions of m into n parts, divided by m. Resolution 1 is the
/// degenerate grid holding only the uniform vector.
struct SimplexGrid {
  int n = 2;
  int m = 1;
  bool include_boundary = true;

  std::size_t size() const;
  /// Integer compositions in enumeration order (first part descending).
  std::vector<std::vector<int>> compositions() const;
  std::vector<ProbVector> points() const;
};

struct RegionOptions {
  BoundOptions bounds;
  bool force_sdp = false;  // skip the qubit closed form
  int parallel = 1;        // worker threads across grid points
};

/// (r, t) via the closed form when n = 2, otherwise via the SDPs.
BoundPair bound_pair(const MeasurementBasis& m, const ProbVector& p, const MeasurementBasis& n,
                     const RegionOptions& opt = {});

struct RegionSample {
  ProbVector p;
  double f_value = 0.0;
  double g_low = 0.0;   // g(t)
  double g_high = 0.0;  // g(r)
  bool ok = true;
  std::string error;
};

RegionSample fine_grained_interval(const MeasurementBasis& m, const ProbVector& p,
                                   const MeasurementBasis& n, const MeasureSpec& f,
                                   const MeasureSpec& g, const RegionOptions& opt = {});

std::vector<RegionSample> sweep_region(const MeasurementBasis& m, const MeasurementBasis& n,
                                       const MeasureSpec& f, const MeasureSpec& g,
                                       const SimplexGrid& grid, const RegionOptions& opt = {});

/// Header p_1..p_n,f_value,g_low,g_high; 9 significant digits.
void write_region_csv(std::ostream& out, const std::vector<RegionSample>& samples, int n);

// ---------------------------------------------------------------------------
// Rasterized regions in the (f, g) plane

class RegionRaster {
 public:
  RegionRaster(double x_max, double y_max, int resolution = 512);

  int resolution() const { return res_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }

  void fill_column(double x, double y_lo, double y_hi);
  void fill_row(double y, double x_lo, double x_hi);
  /// Fills between two vertical intervals, interpolating their endpoints.
  void fill_vertical_trapezoid(double x0, double lo0, double hi0, double x1, double lo1,
                               double hi1);
  void fill_horizontal_trapezoid(double y0, double lo0, double hi0, double y1, double lo1,
                                 double hi1);

  bool cell(int ix, int iy) const { return cells_[static_cast<std::size_t>(iy * res_ + ix)]; }
  /// True if some filled cell lies within `tolerance_cells` of the point.
  bool contains(double x, double y, int tolerance_cells = 1) const;
  std::size_t filled_count() const;

  RegionRaster intersect(const RegionRaster& other) const;
  /// Every filled cell of this raster is filled in `other`.
  bool subset_of(const RegionRaster& other) const;

 private:
  int to_ix(double x) const;
  int to_iy(double y) const;
  void set(int ix, int iy) { cells_[static_cast<std::size_t>(iy * res_ + ix)] = true; }

  double x_max_;
  double y_max_;
  int res_;
  std::vector<bool> cells_;
};

/// Outer approximation from an M-first sweep; intervals are vertical.
RegionRaster rasterize_region(const std::vector<RegionSample>& samples, const SimplexGrid& grid,
                              double x_max, double y_max, int resolution = 512);

struct IntersectedRegion {
  RegionRaster forward;   // p swept, intervals in g
  RegionRaster swapped;   // q swept with roles exchanged, intervals in f
  RegionRaster combined;  // forward ∩ swapped
};

IntersectedRegion swapped_and_intersected(const MeasurementBasis& m, const MeasurementBasis& n,
                                          const MeasureSpec& f, const MeasureSpec& g,
                                          const SimplexGrid& grid, const RegionOptions& opt = {},
                                          int resolution = 512);

// ---------------------------------------------------------------------------
// Multiple post-measurements and derived constants

struct MultiSample {
  ProbVector p;
  double f_value = 0.0;
  std::vector<double> g_low;
  std::vector<double> g_high;
  bool ok = true;
  std::string error;
};

std::vector<MultiSample> multi_measurement_sweep(const MeasurementBasis& m,
                                                 const std::vector<MeasurementBasis>& posts,
                                                 const MeasureSpec& f,
                                                 const std::vector<MeasureSpec>& gs,
                                                 const SimplexGrid& grid,
                                                 const RegionOptions& opt = {});

struct SimplexOptimum {
  double value = 0.0;
  ProbVector argument;
  double grid_value = 0.0;  // before refinement
};

/// Grid search followed by local refinement: golden section between the
/// grid neighbours for n = 2, compass search along edge directions e_i - e_j
/// for n >= 3. Points where the objective throws NumericalError are skipped.
SimplexOptimum optimize_on_simplex(const std::function<double(const ProbVector&)>& objective,
                                   const SimplexGrid& grid, bool minimize, int parallel = 1);

/// min_p f(p) + Σ_i g_i(t_i(p)).
SimplexOptimum multi_additive_constant(const MeasurementBasis& m,
                                       const std::vector<MeasurementBasis>& posts,
                                       const MeasureSpec& f, const std::vector<MeasureSpec>& gs,
                                       const SimplexGrid& grid, const RegionOptions& opt = {});

double optimal_additive_constant(const MeasurementBasis& m, const MeasurementBasis& n,
                                 const MeasureSpec& f, const MeasureSpec& g,
                                 const SimplexGrid& grid, const RegionOptions& opt = {});

struct JointBounds {
  double a = 0.0;  // upper limit on J(p, q)
  double b = 0.0;  // lower limit
  ProbVector a_witness;
  ProbVector b_witness;
  bool a_from_swapped = false;  // witness is q (post side) rather than p
  bool b_from_swapped = false;
};

/// b = max(min_p J(p, t(p)), min_q J(v(q), q)),
/// a = min(max_p J(p, r(p)), max_q J(u(q), q)),
/// with (u, v) the bounds for the swapped roles.
JointBounds joint_bounds(const MeasurementBasis& m, const MeasurementBasis& n,
                         const JointMeasureSpec& j, const SimplexGrid& grid,
                         const RegionOptions& opt = {});

}  // namespace cip
