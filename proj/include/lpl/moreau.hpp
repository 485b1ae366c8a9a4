#pragma once

#include "lpl/potentials.hpp"
#include "lpl/prox.hpp"

namespace lpl {

/// Moreau envelope g^gamma(x) = inf_y ||x-y||^2/(2 gamma) + g(y), evaluated
/// through the prox point. Valid for gamma * rho < 1.
struct MoreauEnvelope {
  ProxRegularizer base;
  double gamma = 0.0;

  MoreauEnvelope(ProxRegularizer g, double gamma_) : base(std::move(g)), gamma(gamma_) {
    require(gamma > 0.0, "MoreauEnvelope: gamma must be positive");
    require(gamma * base.weak_convexity < 1.0, "MoreauEnvelope: gamma * rho must be < 1");
  }

  double value(const Vector& x) const {
    const Vector p = base.prox_at(gamma, x);
    return (x - p).squaredNorm() / (2.0 * gamma) + base.value(p);
  }

  /// grad g^gamma(x) = (x - prox(gamma, x)) / gamma
  Vector grad(const Vector& x) const { return (x - base.prox_at(gamma, x)) / gamma; }
};

double moreau_value(const MoreauEnvelope& env, const Vector& x);
Vector moreau_grad(const MoreauEnvelope& env, const Vector& x);

/// Hessian of the envelope from the curvature of g at the prox point:
/// (1/gamma)(I - (I + gamma hess_g)^{-1}). Exact when g is C^2 there.
Matrix moreau_hessian_formula(double gamma, const Matrix& hess_g_at_prox);

/// Drift of the PSGLA shadow sequence:
/// b(y) = grad f(prox(gamma, y)) + (y - prox(gamma, y)) / gamma.
struct ShadowDrift {
  SmoothPotential f;
  ProxRegularizer g;
  double gamma = 0.0;

  Vector eval(const Vector& y) const {
    const Vector p = g.prox_at(gamma, y);
    return f.gradient(p) + (y - p) / gamma;
  }
};

Vector shadow_drift_eval(const ShadowDrift& sd, const Vector& y);

}  // namespace lpl
