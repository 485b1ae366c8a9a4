#pragma once

#include <functional>
#include <optional>
#include <string>

#include "lpl/common.hpp"

namespace lpl {

/// A regularizer g with its proximal map and weak-convexity modulus rho.
/// prox(gamma, x) must be defined whenever gamma * rho < 1; value may return
/// +infinity (indicators). grad is set only when g is differentiable.
struct ProxRegularizer {
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(double, const Vector&)> prox;  // (gamma, x)
  double weak_convexity = 0.0;                        // rho
  std::optional<double> lipschitz_on_prox_image;      // L_g, when known
  std::function<Vector(const Vector&)> grad;          // optional
  std::string name;

  Vector prox_at(double gamma, const Vector& x) const {
    require(gamma > 0.0, "prox: gamma must be positive");
    require(gamma * weak_convexity < 1.0, "prox: gamma * rho must be < 1");
    require(x.size() == dim, "prox: dimension mismatch");
    return prox(gamma, x);
  }
};

// Closed-form proximal maps.
Vector prox_quadratic(double alpha, double gamma, const Vector& x);  // g = (alpha/2)||x||^2
Vector prox_l1(double weight, double gamma, const Vector& x);        // soft threshold
Vector prox_box_indicator(const Vector& lo, const Vector& hi, double gamma, const Vector& x);

/// Approximate prox of lam * TV_iso(image) with step gamma: Chambolle dual
/// projected gradient, step size 1/8, run exactly inner_iters iterations.
/// Forward differences, Neumann boundary. Deterministic. The returned image
/// never has larger objective ||x-u||^2/(2 gamma) + lam TV(u) than u = x.
Matrix prox_tv2d(double lam, double gamma, const Matrix& image, int inner_iters);

/// Isotropic discrete TV (forward differences, Neumann boundary).
double tv_isotropic(const Matrix& image);

/// Safeguarded Newton solve of (y - x)/gamma + g'(y) = 0 for scalar smooth g.
/// Requires 1/gamma + inf g'' > 0 (unique root).
double newton_prox_1d(const std::function<double(double)>& dg,
                      const std::function<double(double)>& ddg, double gamma, double x);

// Shipped regularizer instances.
ProxRegularizer zero_regularizer(int dim);
ProxRegularizer quadratic_regularizer(int dim, double alpha);
ProxRegularizer l1_regularizer(int dim, double weight);
ProxRegularizer box_indicator_regularizer(const Vector& lo, const Vector& hi);
/// g(y) = c (y^2 - 1)^2 in 1D, declared rho = 8c (true negative curvature is
/// bounded by 4c; the doubled modulus keeps test gammas safely in rho*gamma<1).
ProxRegularizer double_well_regularizer(double c);
/// g(y) = a cos(y) in 1D: globally smooth with rho = L_g = a.
ProxRegularizer cosine_regularizer(double a);
/// lam * TV_iso on rows x cols images flattened row-major into vectors.
ProxRegularizer tv2d_regularizer(int rows, int cols, double lam, int inner_iters);

/// Grid minimization of ||x - y||^2/(2 gamma) + g(y) over [lo, hi] (d <= 2),
/// followed by 3 refinement rounds of 10x grid shrink around the incumbent.
/// Accurate to ~resolution/1000. Throws "box too small" if the minimizer
/// lands on the search boundary.
Vector prox_bruteforce_oracle(const std::function<double(const Vector&)>& g_value, double gamma,
                              const Vector& x, const Vector& lo, const Vector& hi,
                              double resolution);

/// || prox(gamma, x + gamma g'(x)) - x ||; near zero when g is differentiable
/// at x (fixed-point identity of the prox of weakly convex g).
double prox_fixed_point_check(const ProxRegularizer& g, double gamma, const Vector& x);

}  // namespace lpl
