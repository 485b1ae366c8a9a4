#include "lpl/samplers.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace lpl {

namespace {
constexpr double kDivergenceRadius = 1e8;

using PostMap = std::function<Vector(const Vector&)>;

ChainRun run_kernel(const DriftFn& drift, const PostMap& post, const ChainConfig& cfg,
                    bool record_shadow) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int d = static_cast<int>(cfg.x0.size());
  const GaussianStream stream(cfg.seed);
  const double sqrt_2g = std::sqrt(2.0 * cfg.gamma);

  const std::int64_t retained = cfg.retained_count();
  ChainRun run;
  run.config = cfg;
  run.samples.resize(retained, d);
  if (record_shadow) run.shadow.emplace(retained, d);
  std::vector<KahanSum> mean_acc(d), second_acc(d);

  Vector x = cfg.x0;
  std::int64_t row = 0;
  for (std::int64_t k = 0; k < cfg.n_steps; ++k) {
    const Vector z = stream.normal_vector(static_cast<std::uint64_t>(k), d);
    const Vector y = x - cfg.gamma * drift(x) + sqrt_2g * z;
    x = post(y);
    if (!x.allFinite() || x.norm() > kDivergenceRadius)
      throw DivergenceError("chain diverged", k + 1);
    const std::int64_t idx = k + 1;  // state index of X_{k+1}
    if (idx > cfg.burn_in && (idx - cfg.burn_in) % cfg.thinning == 0 && row < retained) {
      run.samples.row(row) = x.transpose();
      if (record_shadow) run.shadow->row(row) = y.transpose();
      for (int i = 0; i < d; ++i) {
        mean_acc[i].add(x[i]);
        second_acc[i].add(x[i] * x[i]);
      }
      ++row;
    }
  }
  run.running_mean.resize(d);
  run.running_second_moment.resize(d);
  for (int i = 0; i < d; ++i) {
    run.running_mean[i] = retained > 0 ? mean_acc[i].value() / retained : 0.0;
    run.running_second_moment[i] = retained > 0 ? second_acc[i].value() / retained : 0.0;
  }
  run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

const PostMap kIdentity = [](const Vector& v) { return v; };
}  // namespace

ChainConfig default_chain_config(std::int64_t n_steps, double gamma, std::uint64_t seed,
                                 const Vector& x0) {
  ChainConfig cfg;
  cfg.n_steps = n_steps;
  cfg.gamma = gamma;
  cfg.seed = seed;
  cfg.x0 = x0;
  cfg.burn_in = n_steps / 10;
  cfg.thinning = 1;
  return cfg;
}

Denoiser Denoiser::identity(int, double noise_level) {
  Denoiser den;
  den.noise_level = noise_level;
  den.apply = [](const Vector& x) { return x; };
  return den;
}

Denoiser Denoiser::from_gmm(const GaussianMixture& prior, double eps) {
  Denoiser den;
  den.noise_level = eps;
  den.apply = MmseDenoiser(prior, eps);
  return den;
}

Denoiser Denoiser::tv(int rows, int cols, double lam_tv, double gamma_denoise, int inner_iters) {
  require(gamma_denoise > 0.0, "Denoiser::tv: gamma_denoise must be positive");
  Denoiser den;
  den.noise_level = std::sqrt(gamma_denoise);
  const ProxRegularizer tv = tv2d_regularizer(rows, cols, lam_tv, inner_iters);
  den.apply = [tv, gamma_denoise](const Vector& x) { return tv.prox(gamma_denoise, x); };
  return den;
}

ChainRun run_iula(const DriftFn& drift, const ChainConfig& cfg) {
  return run_kernel(drift, kIdentity, cfg, false);
}

ChainRun run_ula(const SmoothPotential& f, const SmoothPotential& g_smooth,
                 const ChainConfig& cfg) {
  require(f.dim == g_smooth.dim, "run_ula: f/g dimension mismatch");
  const DriftFn drift = [&f, &g_smooth](const Vector& x) {
    return (f.grad(x) + g_smooth.grad(x)).eval();
  };
  return run_kernel(drift, kIdentity, cfg, false);
}

ChainRun run_psgla(const SmoothPotential& f, const ProxRegularizer& g, const ChainConfig& cfg,
                   bool record_shadow) {
  require(f.dim == g.dim, "run_psgla: f/g dimension mismatch");
  require(cfg.gamma * g.weak_convexity < 1.0, "run_psgla: gamma * rho must be < 1");
  const DriftFn drift = [&f](const Vector& x) { return f.grad(x); };
  const double gamma = cfg.gamma;
  const PostMap post = [&g, gamma](const Vector& y) { return g.prox(gamma, y); };
  return run_kernel(drift, post, cfg, record_shadow);
}

ChainRun run_inexact_psgla(const SmoothPotential& f,
                           const std::function<Vector(double, const Vector&)>& s,
                           const ChainConfig& cfg, bool record_shadow) {
  const DriftFn drift = [&f](const Vector& x) { return f.grad(x); };
  const double gamma = cfg.gamma;
  const PostMap post = [&s, gamma](const Vector& y) { return s(gamma, y); };
  return run_kernel(drift, post, cfg, record_shadow);
}

ChainRun run_myula(const SmoothPotential& f, const ProxRegularizer& g, double lam_my,
                   const ChainConfig& cfg) {
  require(f.dim == g.dim, "run_myula: f/g dimension mismatch");
  require(lam_my > 0.0 && lam_my * g.weak_convexity < 1.0, "run_myula: lam_my * rho must be < 1");
  const DriftFn drift = [&f, &g, lam_my](const Vector& x) {
    return (f.grad(x) + (x - g.prox(lam_my, x)) / lam_my).eval();
  };
  return run_kernel(drift, kIdentity, cfg, false);
}

ChainRun run_pnp_ula(const SmoothPotential& f, const Denoiser& d, const PnpUlaOptions& opts,
                     const ChainConfig& cfg) {
  require(opts.eps > 0.0, "run_pnp_ula: eps must be positive");
  require(opts.alpha > 0.0, "run_pnp_ula: alpha must be positive (or infinity)");
  const bool project = std::isfinite(opts.alpha);
  require(!project || opts.box.has_value(), "run_pnp_ula: finite alpha needs a box");
  const double prior_scale = opts.lam / opts.eps;
  DriftFn drift;
  if (project) {
    const Vector lo = opts.box->first, hi = opts.box->second;
    const double inv_alpha = 1.0 / opts.alpha;
    drift = [&f, &d, prior_scale, lo, hi, inv_alpha](const Vector& x) {
      const Vector proj = x.cwiseMax(lo).cwiseMin(hi);
      return (f.grad(x) + prior_scale * (x - d.apply(x)) + inv_alpha * (x - proj)).eval();
    };
  } else {
    drift = [&f, &d, prior_scale](const Vector& x) {
      return (f.grad(x) + prior_scale * (x - d.apply(x))).eval();
    };
  }
  return run_kernel(drift, kIdentity, cfg, false);
}

ChainRun run_pnp_psgla(const SmoothPotential& f, const Denoiser& d, const ChainConfig& cfg) {
  const double level = std::sqrt(cfg.gamma);
  if (std::abs(d.noise_level - level) > 1e-9)
    std::cerr << "[lpl] warning: pnp-psgla denoiser level " << d.noise_level
              << " != sqrt(gamma) = " << level << "\n";
  const double lambda = cfg.lambda;
  const DriftFn drift = [&f, lambda](const Vector& x) { return (f.grad(x) / lambda).eval(); };
  const PostMap post = [&d](const Vector& y) { return d.apply(y); };
  return run_kernel(drift, post, cfg, false);
}

}  // namespace lpl
