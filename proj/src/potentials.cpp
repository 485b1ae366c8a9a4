#include "lpl/potentials.hpp"

#include <cmath>
#include <limits>

namespace lpl {

SmoothPotential quadratic_potential(int dim, double alpha, const Vector& center) {
  require(dim >= 1 && center.size() == dim, "quadratic_potential: bad dimension");
  require(alpha >= 0.0, "quadratic_potential: alpha must be nonnegative");
  SmoothPotential f;
  f.dim = dim;
  f.value = [alpha, center](const Vector& x) { return 0.5 * alpha * (x - center).squaredNorm(); };
  f.grad = [alpha, center](const Vector& x) { return (alpha * (x - center)).eval(); };
  f.lipschitz_grad = alpha;
  return f;
}

SmoothPotential quadratic_potential(int dim, double alpha) {
  return quadratic_potential(dim, alpha, Vector::Zero(dim));
}

SmoothPotential zero_potential(int dim) {
  SmoothPotential f;
  f.dim = dim;
  f.value = [](const Vector&) { return 0.0; };
  f.grad = [dim](const Vector&) { return Vector::Zero(dim).eval(); };
  f.lipschitz_grad = 0.0;
  return f;
}

SmoothPotential double_well_potential(double c, double tail) {
  require(c > 0.0 && tail >= 0.0, "double_well_potential: c > 0, tail >= 0");
  SmoothPotential f;
  f.dim = 1;
  f.value = [c, tail](const Vector& x) {
    const double t = x[0] * x[0] - 1.0;
    return c * t * t + 0.5 * tail * x[0] * x[0];
  };
  f.grad = [c, tail](const Vector& x) {
    Vector g(1);
    g[0] = 4.0 * c * x[0] * (x[0] * x[0] - 1.0) + tail * x[0];
    return g;
  };
  f.lipschitz_grad = 0.0;  // quartic tails: globally Lipschitz only on compacts
  return f;
}

SmoothPotential gmm_neg_log_potential(const GaussianMixture& gmm, double lipschitz) {
  SmoothPotential f;
  f.dim = gmm.dim();
  f.value = [gmm](const Vector& x) { return -gmm.log_density(x); };
  f.grad = [gmm](const Vector& x) { return (-gmm.grad_log_density(x)).eval(); };
  f.lipschitz_grad = lipschitz;
  return f;
}

Vector finite_difference_gradient(const std::function<double(const Vector&)>& value,
                                  const Vector& x) {
  const double h = 1e-5 * (1.0 + x.norm());
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (value(xp) - value(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

double max_gradient_fd_error(const SmoothPotential& f, int probes, std::uint64_t seed) {
  GaussianStream stream(seed);
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    Vector x(f.dim);
    for (int i = 0; i < f.dim; ++i)
      x[i] = 4.0 * stream.uniform(static_cast<std::uint64_t>(k) * f.dim + i) - 2.0;
    const Vector g = f.gradient(x);
    const Vector fd = finite_difference_gradient(f.value, x);
    worst = std::max(worst, (g - fd).norm() / (1.0 + g.norm()));
  }
  return worst;
}

LinearOperator LinearOperator::identity(int dim) {
  LinearOperator op;
  op.rows = dim;
  op.cols = dim;
  op.apply = [](const Vector& x) { return x; };
  op.adjoint = [](const Vector& y) { return y; };
  return op;
}

LinearOperator LinearOperator::from_matrix(const Matrix& a) {
  LinearOperator op;
  op.rows = static_cast<int>(a.rows());
  op.cols = static_cast<int>(a.cols());
  op.apply = [a](const Vector& x) { return (a * x).eval(); };
  op.adjoint = [a](const Vector& y) { return (a.transpose() * y).eval(); };
  return op;
}

LinearOperator LinearOperator::masking(const std::vector<int>& keep, int dim) {
  for (int idx : keep) require(idx >= 0 && idx < dim, "masking: index out of range");
  LinearOperator op;
  op.rows = static_cast<int>(keep.size());
  op.cols = dim;
  op.apply = [keep](const Vector& x) {
    Vector y(static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) y[static_cast<int>(i)] = x[keep[i]];
    return y;
  };
  op.adjoint = [keep, dim](const Vector& y) {
    Vector x = Vector::Zero(dim);
    for (std::size_t i = 0; i < keep.size(); ++i) x[keep[i]] = y[static_cast<int>(i)];
    return x;
  };
  return op;
}

double max_adjoint_error(const LinearOperator& op, int probes, std::uint64_t seed) {
  GaussianStream stream(seed);
  double worst = 0.0;
  std::uint64_t c = 0;
  for (int k = 0; k < probes; ++k) {
    Vector x(op.cols), y(op.rows);
    for (int i = 0; i < op.cols; ++i) x[i] = stream.normal(c++);
    for (int i = 0; i < op.rows; ++i) y[i] = stream.normal(c++);
    const double lhs = op.apply(x).dot(y);
    const double rhs = x.dot(op.adjoint(y));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double GaussianLikelihood::value(const Vector& x) const {
  require(x.size() == op.cols, "GaussianLikelihood: dimension mismatch");
  return (op.apply(x) - observation).squaredNorm() / (sigma * sigma);
}

Vector GaussianLikelihood::gradient(const Vector& x) const {
  require(x.size() == op.cols, "GaussianLikelihood: dimension mismatch");
  return (2.0 / (sigma * sigma)) * op.adjoint(op.apply(x) - observation);
}

SmoothPotential GaussianLikelihood::as_potential(double lipschitz) const {
  SmoothPotential f;
  f.dim = op.cols;
  f.value = [*this](const Vector& x) { return value(x); };
  f.grad = [*this](const Vector& x) { return gradient(x); };
  f.lipschitz_grad = lipschitz;
  return f;
}

Vector likelihood_grad(const GaussianLikelihood& lik, const Vector& x) { return lik.gradient(x); }

GaussianMixture gmm_exact_posterior(const GaussianMixture& prior, const Matrix& a, const Vector& y,
                                    double sigma) {
  require(sigma > 0.0, "gmm_exact_posterior: sigma must be positive");
  require(a.cols() == prior.dim(), "gmm_exact_posterior: operator/prior dimension mismatch");
  require(a.rows() == y.size(), "gmm_exact_posterior: operator/observation mismatch");
  const int k = prior.components();
  const int d = prior.dim();
  const int m = static_cast<int>(a.rows());
  const double noise_var = 0.5 * sigma * sigma;  // exp(-||Ax-y||^2/sigma^2)
  const double prec = 1.0 / noise_var;

  std::vector<Vector> means(k);
  std::vector<Matrix> covs(k);
  Vector log_w(k);
  constexpr double kLog2Pi = 1.8378770664093454836;
  for (int i = 0; i < k; ++i) {
    const Matrix& sig = prior.covariances()[i];
    const Vector& mu = prior.means()[i];
    const Matrix sig_inv = sig.llt().solve(Matrix::Identity(d, d));
    const Matrix post_prec = sig_inv + prec * a.transpose() * a;
    Eigen::LLT<Matrix> llt(post_prec);
    require(llt.info() == Eigen::Success, "gmm_exact_posterior: singular posterior covariance");
    covs[i] = llt.solve(Matrix::Identity(d, d));
    covs[i] = 0.5 * (covs[i] + covs[i].transpose());  // resymmetrize
    means[i] = llt.solve(sig_inv * mu + prec * a.transpose() * y);

    if (prior.weights()[i] == 0.0) {
      log_w[i] = -std::numeric_limits<double>::infinity();
      continue;
    }
    // evidence_i = N(y; A mu_i, noise_var I + A Sigma_i A^T)
    const Matrix s = noise_var * Matrix::Identity(m, m) + a * sig * a.transpose();
    Eigen::LLT<Matrix> sllt(s);
    double log_det = 0.0;
    for (int j = 0; j < m; ++j) log_det += 2.0 * std::log(sllt.matrixL()(j, j));
    const Vector r = y - a * mu;
    const double quad = sllt.matrixL().solve(r).squaredNorm();
    log_w[i] = std::log(prior.weights()[i]) - 0.5 * (m * kLog2Pi + log_det + quad);
  }
  const double mx = log_w.maxCoeff();
  Vector w(k);
  for (int i = 0; i < k; ++i) w[i] = std::isfinite(log_w[i]) ? std::exp(log_w[i] - mx) : 0.0;
  const double total = w.sum();
  w /= total;
  // pin the largest weight so the sum is exactly 1 for the constructor check
  int imax = 0;
  w.maxCoeff(&imax);
  double rest = 0.0;
  for (int i = 0; i < k; ++i)
    if (i != imax) rest += w[i];
  w[imax] = 1.0 - rest;
  return GaussianMixture(w, std::move(means), std::move(covs));
}

GaussianMixture gmm_exact_posterior(const GaussianMixture& prior, const GaussianLikelihood& lik,
                                    const Matrix& a) {
  return gmm_exact_posterior(prior, a, lik.observation, lik.sigma);
}

}  // namespace lpl
