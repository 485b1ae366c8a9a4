// Test-only reference implementations, independent of the library paths
// they check: permutation-enumeration optimal transport, Monte-Carlo
// posterior means, grid searches.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lpl/common.hpp"
#include "lpl/rng.hpp"

namespace lpl::testing {

/// Exact W_p for two uniform n-point clouds by enumerating all n! couplings.
inline double wasserstein_bruteforce(const Matrix& a, const Matrix& b, int p) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) cost += std::pow((a.row(i) - b.row(perm[i])).norm(), p);
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(best / n, 1.0 / p);
}

/// Self-normalized Monte-Carlo estimate of E[X | X + eps Z = x] for a prior
/// sampler; returns the estimate and a rough standard error scale.
template <class PriorSampler>
std::pair<Vector, double> mc_posterior_mean(const PriorSampler& draw_prior, double eps,
                                            const Vector& x, int n, std::uint64_t seed) {
  const GaussianStream stream(seed);
  Vector num = Vector::Zero(x.size());
  double den = 0.0;
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<Vector> xs(n);
  std::vector<double> logw(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = draw_prior(stream, i);
    logw[i] = -(x - xs[i]).squaredNorm() / (2.0 * eps * eps);
    max_log = std::max(max_log, logw[i]);
  }
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(logw[i] - max_log);
    num += w * xs[i];
    den += w;
  }
  const Vector mean = num / den;
  // crude effective-sample-size-based error scale
  double w2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(logw[i] - max_log) / den;
    w2 += w * w;
  }
  const double ess = 1.0 / w2;
  return {mean, eps / std::sqrt(std::max(ess, 1.0))};
}

/// 2D grid search over two pixel values for the prox of lam |u1 - u2|.
inline std::pair<double, double> two_pixel_prox_oracle(double a, double b, double lam, double gamma,
                                                       double span, int steps) {
  double bu = a, bv = b, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j) {
      const double u = a - span + 2.0 * span * i / steps;
      const double v = b - span + 2.0 * span * j / steps;
      const double cost =
          ((u - a) * (u - a) + (v - b) * (v - b)) / (2.0 * gamma) + lam * std::abs(u - v);
      if (cost < best) {
        best = cost;
        bu = u;
        bv = v;
      }
    }
  return {bu, bv};
}

/// Trapezoid quadrature of fn over [lo, hi].
template <class Fn>
double quadrature(const Fn& fn, double lo, double hi, int cells) {
  const double h = (hi - lo) / cells;
  double acc = 0.5 * (fn(lo) + fn(hi));
  for (int i = 1; i < cells; ++i) acc += fn(lo + i * h);
  return acc * h;
}

}  // namespace lpl::testing
