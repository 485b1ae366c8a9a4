#include "lpl/gaussian_mixture.hpp"

#include <cmath>
#include <limits>

namespace lpl {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a stray +inf/nan propagates)
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}
}  // namespace

GaussianMixture::GaussianMixture(Vector weights, std::vector<Vector> means,
                                 std::vector<Matrix> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covs_(std::move(covariances)) {
  const int k = static_cast<int>(weights_.size());
  require(k >= 1, "GaussianMixture: needs at least one component");
  require(static_cast<int>(means_.size()) == k && static_cast<int>(covs_.size()) == k,
          "GaussianMixture: weights/means/covariances length mismatch");
  d_ = static_cast<int>(means_[0].size());
  require(d_ >= 1, "GaussianMixture: dimension must be >= 1");

  double wsum = 0.0;
  for (int i = 0; i < k; ++i) {
    require(weights_[i] >= 0.0, "GaussianMixture: negative weight");
    wsum += weights_[i];
    require(means_[i].size() == d_, "GaussianMixture: mean dimension mismatch");
    require(covs_[i].rows() == d_ && covs_[i].cols() == d_,
            "GaussianMixture: covariance dimension mismatch");
    require((covs_[i] - covs_[i].transpose()).cwiseAbs().maxCoeff() <= 1e-12,
            "GaussianMixture: covariance not symmetric");
  }
  require(std::abs(wsum - 1.0) <= 1e-12, "GaussianMixture: weights must sum to 1");

  llts_.reserve(k);
  log_norm_.reserve(k);
  log_weight_.reserve(k);
  for (int i = 0; i < k; ++i) {
    llts_.emplace_back(covs_[i]);
    require(llts_[i].info() == Eigen::Success,
            "GaussianMixture: covariance not positive definite");
    double log_det = 0.0;
    const auto& L = llts_[i].matrixL();
    for (int j = 0; j < d_; ++j) {
      require(L(j, j) > 0.0, "GaussianMixture: covariance not positive definite");
      log_det += 2.0 * std::log(L(j, j));
    }
    log_norm_.push_back(-0.5 * d_ * kLog2Pi - 0.5 * log_det);
    log_weight_.push_back(weights_[i] > 0.0 ? std::log(weights_[i]) : kNegInf);
  }
}

double GaussianMixture::component_log_term(int i, const Vector& x) const {
  if (weights_[i] == 0.0) return kNegInf;
  const Vector r = x - means_[i];
  // quadratic form r^T Sigma^{-1} r via the cached Cholesky: ||L^{-1} r||^2
  const Vector half = llts_[i].matrixL().solve(r);
  return log_weight_[i] + log_norm_[i] - 0.5 * half.squaredNorm();
}

double GaussianMixture::log_density(const Vector& x) const {
  require(x.size() == d_, "gmm log_density: dimension mismatch");
  Vector terms(components());
  for (int i = 0; i < components(); ++i) terms[i] = component_log_term(i, x);
  return log_sum_exp(terms);
}

Vector GaussianMixture::responsibilities(const Vector& x) const {
  require(x.size() == d_, "gmm responsibilities: dimension mismatch");
  const int k = components();
  Vector terms(k);
  for (int i = 0; i < k; ++i) terms[i] = component_log_term(i, x);
  const double lse = log_sum_exp(terms);
  Vector resp(k);
  for (int i = 0; i < k; ++i) resp[i] = std::isfinite(terms[i]) ? std::exp(terms[i] - lse) : 0.0;
  return resp;
}

Vector GaussianMixture::grad_log_density(const Vector& x) const {
  require(x.size() == d_, "gmm grad_log_density: dimension mismatch");
  const Vector resp = responsibilities(x);
  Vector grad = Vector::Zero(d_);
  for (int i = 0; i < components(); ++i) {
    if (resp[i] == 0.0) continue;
    grad -= resp[i] * llts_[i].solve(x - means_[i]);
  }
  return grad;
}

GaussianMixture GaussianMixture::smoothed(double eps) const {
  require(eps > 0.0, "smoothed: eps must be positive");
  std::vector<Matrix> covs = covs_;
  for (auto& c : covs) c += eps * eps * Matrix::Identity(d_, d_);
  return GaussianMixture(weights_, means_, std::move(covs));
}

Vector GaussianMixture::sample(const GaussianStream& stream, std::uint64_t index) const {
  // Normal index `block` is reserved for the component draw (its raw
  // counter 2*block is used as a uniform); indices block+1..block+d feed z.
  const std::uint64_t block = index * static_cast<std::uint64_t>(d_ + 1);
  const double u = stream.uniform(2 * block);
  int comp = components() - 1;
  double acc = 0.0;
  for (int i = 0; i < components(); ++i) {
    acc += weights_[i];
    if (u <= acc) {
      comp = i;
      break;
    }
  }
  Vector z(d_);
  for (int i = 0; i < d_; ++i) z[i] = stream.normal(block + 1 + i);
  return means_[comp] + llts_[comp].matrixL() * z;
}

Matrix GaussianMixture::sample_matrix(const GaussianStream& stream, int n) const {
  Matrix out(n, d_);
  for (int j = 0; j < n; ++j) out.row(j) = sample(stream, static_cast<std::uint64_t>(j)).transpose();
  return out;
}

MmseDenoiser::MmseDenoiser(const GaussianMixture& prior, double eps)
    : eps_(eps), eps2_(eps * eps), smoothed_(prior.smoothed(eps)) {
  require(eps > 0.0, "MmseDenoiser: eps must be positive");
}

Vector gmm_mmse_denoise(const GaussianMixture& prior, double eps, const Vector& x) {
  return MmseDenoiser(prior, eps)(x);
}

Vector mode_occupancy(const Matrix& points, const Vector& weights, const GaussianMixture& gmm) {
  require(points.cols() == gmm.dim(), "mode_occupancy: dimension mismatch");
  require(points.rows() == weights.size(), "mode_occupancy: weight count mismatch");
  Vector occ = Vector::Zero(gmm.components());
  for (int j = 0; j < points.rows(); ++j) {
    const Vector resp = gmm.responsibilities(points.row(j).transpose());
    int best = 0;
    resp.maxCoeff(&best);
    occ[best] += weights[j];
  }
  const double total = occ.sum();
  if (total > 0.0) occ /= total;
  return occ;
}

}  // namespace lpl
