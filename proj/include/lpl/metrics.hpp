#pragma once

#include <functional>

#include "lpl/common.hpp"
#include "lpl/gaussian_mixture.hpp"
#include "lpl/rng.hpp"

namespace lpl {

/// Weighted point cloud (weights sum to 1, uniform by default).
struct EmpiricalMeasure {
  Matrix points;   // n x d
  Vector weights;  // n, nonnegative, sums to 1

  static EmpiricalMeasure uniform(Matrix points);
  static EmpiricalMeasure weighted(Matrix points, Vector weights);
  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  void validate() const;
};

/// Normalized density on a regular grid, d <= 2. values is cells0 x cells1
/// (cells1 == 1 in 1D); cell-sum times cell volume equals 1 within 1e-8.
struct GridDensity {
  int d = 1;
  Vector lo, hi;    // per-axis bounds
  int cells0 = 0, cells1 = 1;
  Matrix values;

  double cell_volume() const;
  double center(int axis, int idx) const;
  void validate() const;
  /// Evaluate an unnormalized density at cell centers and normalize.
  static GridDensity from_function(const std::function<double(const Vector&)>& density,
                                   const Vector& lo, const Vector& hi, int cells0, int cells1);
  static GridDensity from_function_1d(const std::function<double(double)>& density, double lo,
                                      double hi, int cells);
  /// Inverse-CDF sampling over cells (uniform within a cell).
  Matrix sample(const GaussianStream& stream, int n) const;
};

/// Exact p-Wasserstein via integer-scaled (1e9) min-cost flow / assignment
/// with a verified optimality certificate. Uniform equal-size measures use
/// the assignment path; otherwise weights are quantized to 1e9 flow units.
/// Requires n_a * n_b <= 4e6 (use wasserstein_sliced beyond that).
double wasserstein_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p);

/// Average 1D W_p over n_proj random unit directions (quantile coupling).
/// Deterministic given seed.
double wasserstein_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p, int n_proj,
                          std::uint64_t seed);

/// Exact W_p between two weighted 1D samples (sorted quantile coupling).
double wasserstein_1d(const Vector& xa, const Vector& wa, const Vector& xb, const Vector& wb,
                      int p);

/// sqrt( sum_cells (kde - truth)^2 * cell_volume ) with Gaussian kernels.
/// bandwidth may be per-axis (size d) or scalar (broadcast).
double kde_l2_error(const EmpiricalMeasure& a, const GridDensity& truth, const Vector& bandwidth);
double kde_l2_error(const EmpiricalMeasure& a, const GridDensity& truth, double bandwidth);
/// 1.06 sigma_hat n^{-1/5}, per axis.
Vector silverman_bandwidth(const EmpiricalMeasure& a);
/// KDE evaluated at the cell centers of `geom`; true density values (mass
/// that falls off the grid is not renormalized away).
GridDensity kde_on_grid(const EmpiricalMeasure& a, const GridDensity& geom,
                        const Vector& bandwidth);

/// Half L1 distance between cell-mass histograms on the given geometry;
/// in [0, 1]. Points outside the bounds are clamped into edge cells.
double tv_on_grid(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const GridDensity& geom);
double tv_on_grid(const EmpiricalMeasure& a, const GridDensity& truth);

/// || b1 - b2 ||_{l2(mu)}: weighted RMS drift difference over mu's points.
double drift_l2_mismatch(const std::function<Vector(const Vector&)>& b1,
                         const std::function<Vector(const Vector&)>& b2,
                         const EmpiricalMeasure& mu);

/// Batch-means standard error of the mean of a (possibly autocorrelated)
/// scalar series, with n_batches batches.
double batch_means_se(const Vector& series, int n_batches);

}  // namespace lpl
