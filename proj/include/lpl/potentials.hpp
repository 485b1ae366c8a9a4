#pragma once

#include <functional>
#include <optional>

#include "lpl/common.hpp"
#include "lpl/gaussian_mixture.hpp"

namespace lpl {

/// Smooth term f with its gradient and a declared gradient Lipschitz constant.
struct SmoothPotential {
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  double lipschitz_grad = 0.0;

  Vector gradient(const Vector& x) const {
    require(x.size() == dim, "SmoothPotential: dimension mismatch");
    return grad(x);
  }
};

/// f(x) = (alpha/2) ||x - center||^2
SmoothPotential quadratic_potential(int dim, double alpha, const Vector& center);
SmoothPotential quadratic_potential(int dim, double alpha);
SmoothPotential zero_potential(int dim);
/// 1D double well c*(x^2-1)^2 plus (tail/2) x^2; strongly convex at infinity.
SmoothPotential double_well_potential(double c, double tail);
/// -log of a Gaussian mixture (up to the additive constant), L declared by caller.
SmoothPotential gmm_neg_log_potential(const GaussianMixture& gmm, double lipschitz);

/// Central finite differences of `value` at x, step h = 1e-5 (1 + ||x||).
Vector finite_difference_gradient(const std::function<double(const Vector&)>& value,
                                  const Vector& x);

/// Max relative gradient error vs finite differences over `probes` points
/// drawn from the stream in [-2, 2]^d.
double max_gradient_fd_error(const SmoothPotential& f, int probes, std::uint64_t seed);

/// A (possibly matrix-free) linear map with its adjoint.
struct LinearOperator {
  int rows = 0;  // m
  int cols = 0;  // d
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> adjoint;

  static LinearOperator identity(int dim);
  static LinearOperator from_matrix(const Matrix& a);
  /// Selects the entries where keep[i] != 0 (rows = number kept).
  static LinearOperator masking(const std::vector<int>& keep_indices, int dim);
};

/// Max adjoint-identity error |<Ax,y> - <x,A^T y>| over random probes.
double max_adjoint_error(const LinearOperator& op, int probes, std::uint64_t seed);

/// Data term f(x) = (1/sigma^2) ||Ax - y||^2. The exponent carries
/// 1/sigma^2, not 1/(2 sigma^2), so the effective Gaussian noise
/// covariance is (sigma^2/2) I.
struct GaussianLikelihood {
  LinearOperator op;
  Vector observation;
  double sigma = 1.0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Wraps value/gradient; lipschitz must bound 2 ||A||^2 / sigma^2.
  SmoothPotential as_potential(double lipschitz) const;
};

Vector likelihood_grad(const GaussianLikelihood& lik, const Vector& x);

/// Exact posterior of a GMM prior under a Gaussian-linear likelihood, i.e. the
/// mixture proportional to exp(-f(x)) p(x). Per component (conjugacy with
/// noise covariance (sigma^2/2) I):
///   Sigma_post = (Sigma^{-1} + (2/sigma^2) A^T A)^{-1}
///   m_post     = Sigma_post (Sigma^{-1} m + (2/sigma^2) A^T y)
///   weight    ~= p_i N(y; A m_i, (sigma^2/2) I + A Sigma_i A^T)
/// Requires a matrix-backed operator (uses A explicitly).
GaussianMixture gmm_exact_posterior(const GaussianMixture& prior, const Matrix& a,
                                    const Vector& y, double sigma);
GaussianMixture gmm_exact_posterior(const GaussianMixture& prior, const GaussianLikelihood& lik,
                                    const Matrix& a);

}  // namespace lpl
