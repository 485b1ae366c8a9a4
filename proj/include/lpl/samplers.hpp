#pragma once

#include <functional>
#include <optional>

#include "lpl/moreau.hpp"
#include "lpl/potentials.hpp"
#include "lpl/prox.hpp"
#include "lpl/rng.hpp"

namespace lpl {

/// Shared configuration for one chain. Retained sample count is
/// floor((n_steps - burn_in) / thinning): state X_k is kept when
/// k > burn_in and (k - burn_in) % thinning == 0.
struct ChainConfig {
  double gamma = 0.1;
  std::int64_t n_steps = 1000;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;
  std::uint64_t seed = 0;
  Vector x0;
  double lambda = 1.0;

  void validate() const {
    require(gamma > 0.0, "ChainConfig: gamma must be positive");
    require(n_steps >= 1, "ChainConfig: n_steps must be >= 1");
    require(burn_in >= 0 && burn_in < n_steps, "ChainConfig: need 0 <= burn_in < n_steps");
    require(thinning >= 1, "ChainConfig: thinning must be >= 1");
    require(x0.size() >= 1, "ChainConfig: x0 must be set");
    require(lambda > 0.0, "ChainConfig: lambda must be positive");
  }
  std::int64_t retained_count() const { return (n_steps - burn_in) / thinning; }
};

/// Convention from long raw chains: burn_in = N/10, thinning 1.
ChainConfig default_chain_config(std::int64_t n_steps, double gamma, std::uint64_t seed,
                                 const Vector& x0);

/// One finished chain. samples has retained_count() rows; shadow (PSGLA only,
/// on request) holds the pre-prox points Y_k aligned row-by-row with samples,
/// so samples.row(r) == prox(gamma, shadow.row(r)) exactly.
struct ChainRun {
  ChainConfig config;
  Matrix samples;
  Vector running_mean;
  Vector running_second_moment;
  double wall_time = 0.0;
  std::optional<Matrix> shadow;
};

using DriftFn = std::function<Vector(const Vector&)>;

/// Noise-level-tagged denoiser (MMSE oracle, TV prox wrapper, ...).
struct Denoiser {
  double noise_level = 0.0;
  std::function<Vector(const Vector&)> apply;

  static Denoiser identity(int /*dim*/, double noise_level);
  static Denoiser from_gmm(const GaussianMixture& prior, double eps);
  /// prox of (gamma_denoise * lam_tv) TV on rows x cols images; noise level
  /// sqrt(gamma_denoise).
  static Denoiser tv(int rows, int cols, double lam_tv, double gamma_denoise, int inner_iters);
};

// Every sampler below is an Euler-Maruyama recursion driven by the same
// counter-based noise stream: step k uses Z = stream.normal_vector(k, d).
// X_{k+1} = post(X_k - gamma * drift(X_k) + sqrt(2 gamma) Z_{k+1}).
// Identical (config, inputs) give bit-identical runs; a reduction that makes
// two samplers structurally equal (g = 0, identity denoiser) therefore
// reproduces trajectories exactly. Divergence (||X|| > 1e8 or non-finite)
// aborts with the offending step index.

ChainRun run_iula(const DriftFn& drift, const ChainConfig& cfg);

/// Explicit-gradient ULA on f + g_smooth (drift = grad f + grad g).
ChainRun run_ula(const SmoothPotential& f, const SmoothPotential& g_smooth,
                 const ChainConfig& cfg);

/// Forward-backward step: X <- prox_{gamma g}(X - gamma grad f(X) + noise).
ChainRun run_psgla(const SmoothPotential& f, const ProxRegularizer& g, const ChainConfig& cfg,
                   bool record_shadow = false);

/// PSGLA with an approximate prox S(gamma, .) in place of the exact one.
ChainRun run_inexact_psgla(const SmoothPotential& f,
                           const std::function<Vector(double, const Vector&)>& s,
                           const ChainConfig& cfg, bool record_shadow = false);

/// Moreau-Yosida ULA: drift grad f + (X - prox_{lam_my g}(X)) / lam_my,
/// noise added outside the prox. Requires lam_my * rho < 1.
ChainRun run_myula(const SmoothPotential& f, const ProxRegularizer& g, double lam_my,
                   const ChainConfig& cfg);

struct PnpUlaOptions {
  double eps = 0.5;
  double lam = 1.0;
  double alpha = std::numeric_limits<double>::infinity();  // infinity drops the projection
  std::optional<std::pair<Vector, Vector>> box;            // required when alpha finite
};

/// Plug-and-Play ULA:
/// X <- X - gamma grad f - (gamma lam / eps)(X - D_eps(X))
///        - (gamma / alpha)(X - proj_box(X)) + sqrt(2 gamma) Z.
/// (The source recursion carries -sqrt(2 gamma) Z; equal in law, implemented
/// with +, as documented.)
ChainRun run_pnp_ula(const SmoothPotential& f, const Denoiser& d, const PnpUlaOptions& opts,
                     const ChainConfig& cfg);

/// Plug-and-Play PSGLA: X <- D(X - gamma (grad f(X)/lambda) + sqrt(2 gamma) Z).
/// lambda is cfg.lambda; warns (not fatal) when |D.noise_level - sqrt(gamma)|
/// exceeds 1e-9.
ChainRun run_pnp_psgla(const SmoothPotential& f, const Denoiser& d, const ChainConfig& cfg);

}  // namespace lpl
