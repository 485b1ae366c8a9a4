#include "lpl/moreau.hpp"

namespace lpl {

double moreau_value(const MoreauEnvelope& env, const Vector& x) { return env.value(x); }

Vector moreau_grad(const MoreauEnvelope& env, const Vector& x) { return env.grad(x); }

Matrix moreau_hessian_formula(double gamma, const Matrix& hess_g_at_prox) {
  require(gamma > 0.0, "moreau_hessian_formula: gamma must be positive");
  const int d = static_cast<int>(hess_g_at_prox.rows());
  const Matrix inner = Matrix::Identity(d, d) + gamma * hess_g_at_prox;
  const Matrix inv = inner.partialPivLu().solve(Matrix::Identity(d, d));
  return (Matrix::Identity(d, d) - inv) / gamma;
}

Vector shadow_drift_eval(const ShadowDrift& sd, const Vector& y) { return sd.eval(y); }

}  // namespace lpl
