#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "lpl/common.hpp"
#include "lpl/rng.hpp"

namespace lpl {

/// Weighted mixture of multivariate Gaussians with cached Cholesky
/// factorizations. Immutable after construction; safe to share across chains.
///
/// Densities, scores and responsibilities are evaluated in log space with
/// log-sum-exp, so tail queries (||x|| up to ~100 in d <= 10) do not underflow.
/// Components with weight exactly 0 are allowed and skipped.
class GaussianMixture {
 public:
  GaussianMixture(Vector weights, std::vector<Vector> means, std::vector<Matrix> covariances);

  int dim() const { return d_; }
  int components() const { return static_cast<int>(weights_.size()); }
  const Vector& weights() const { return weights_; }
  const std::vector<Vector>& means() const { return means_; }
  const std::vector<Matrix>& covariances() const { return covs_; }

  /// log p(x)
  double log_density(const Vector& x) const;

  /// grad log p(x) = -(sum_i p_i Sigma_i^{-1}(x-m_i) N_i) / (sum_i p_i N_i)
  Vector grad_log_density(const Vector& x) const;

  /// Per-component posterior responsibilities at x (log-space softmax).
  /// Zero-weight components get responsibility 0.
  Vector responsibilities(const Vector& x) const;

  /// Mixture with every covariance replaced by Sigma_i + eps^2 I.
  GaussianMixture smoothed(double eps) const;

  /// Component-then-Gaussian draw; variate j consumes stream steps
  /// [j*(d+1), (j+1)*(d+1)): one uniform for the component, d normals.
  Vector sample(const GaussianStream& stream, std::uint64_t index) const;
  Matrix sample_matrix(const GaussianStream& stream, int n) const;

 private:
  // log of p_i * N(x; m_i, Sigma_i); -inf for zero weight
  double component_log_term(int i, const Vector& x) const;

  int d_;
  Vector weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> covs_;
  std::vector<Eigen::LLT<Matrix>> llts_;
  std::vector<double> log_norm_;    // -d/2 log(2 pi) - 1/2 log det Sigma_i
  std::vector<double> log_weight_;  // log p_i, -inf when p_i == 0
};

/// Closed-form MMSE denoiser for a Gaussian-mixture prior:
/// D_eps(x) = x + eps^2 * grad log p_eps(x), with p_eps = p * N(0, eps^2 I).
/// The smoothed mixture (and its factorizations) is built once at
/// construction; apply() is then two mixture passes per call.
class MmseDenoiser {
 public:
  MmseDenoiser(const GaussianMixture& prior, double eps);
  Vector operator()(const Vector& x) const { return x + eps2_ * smoothed_.grad_log_density(x); }
  double noise_level() const { return eps_; }
  const GaussianMixture& smoothed() const { return smoothed_; }

 private:
  double eps_, eps2_;
  GaussianMixture smoothed_;
};

/// One-shot convenience wrapper around MmseDenoiser.
Vector gmm_mmse_denoise(const GaussianMixture& prior, double eps, const Vector& x);

/// Fraction of mass of (points, weights) assigned to each mixture component
/// by maximum responsibility. Entries sum to 1; zero-weight components stay 0.
Vector mode_occupancy(const Matrix& points, const Vector& weights, const GaussianMixture& gmm);

}  // namespace lpl
