#pragma once

#include <string>
#include <vector>

#include "lpl/io.hpp"
#include "lpl/metrics.hpp"
#include "lpl/samplers.hpp"

namespace lpl {

/// Parsed experiment invocation: shared fields plus experiment-specific
/// key=value options (unknown keys are rejected per experiment).
struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 1;  // seed base; replicate r uses derived seeds
  int replicates = 5;
  std::string out_dir = "lpl_out";
  KeyValueConfig options;

  static ExperimentConfig from_cli(const std::string& name, const std::string& config_path,
                                   std::uint64_t seed, const std::string& out_dir);
};

struct RawMeasurement {
  std::string metric;
  double param = 0.0;
  int replicate = 0;
  double value = 0.0;
  std::int64_t n_a = 0, n_b = 0;
  std::uint64_t seed = 0;
};

struct SweepRow {
  double param = 0.0;
  std::string metric;
  double value = 0.0;
  double se = 0.0;
  double runtime_s = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;       // replicate aggregates (mean, SE)
  std::vector<RawMeasurement> raw;  // one row per measurement

  const SweepRow* find(const std::string& metric, double param) const;
  double value_of(const std::string& metric, double param) const;
  std::vector<double> raw_values(const std::string& metric, double param) const;
  void add_aggregate(const std::string& metric, double param,
                     const std::vector<double>& replicate_values, double runtime_s);
};

/// Writes summary.csv (param,metric,value,se), metrics.csv
/// (metric,p_or_param,value,n_a,n_b,seed) and timings.txt (excluded from
/// byte-identity checks) into cfg.out_dir.
void write_sweep_outputs(const SweepResult& result, const ExperimentConfig& cfg);

/// Repository-chosen three-mode prior for the 2D experiments (the source
/// material does not publish its mixture parameters).
GaussianMixture default_three_mode_prior();

/// 2D Gaussian-mixture posterior sampling: PnP-ULA (gamma 0.1, lambda 1.5,
/// eps 0.5, alpha = inf) vs PnP-PSGLA (gamma 0.3, lambda 0.67), N = 1e4;
/// W1/W2 checkpoint traces against 2000 exact-posterior samples, final
/// KDE-L2, mode occupancy, scatter SVGs, CSV.
SweepResult exp_gmm2d(const ExperimentConfig& cfg);

/// Stability under constant drift shifts: OU (or double-well) base, common
/// random numbers per pair, W1 / TV / l2-mismatch per shift, log-log slope.
SweepResult exp_stability_sweep(const ExperimentConfig& cfg);

/// Discretization error sweep: OU closed form |sqrt(2/(2-gamma)) - 1| vs
/// measured, plus 1D double-well against a quadrature target.
SweepResult exp_discretization_sweep(const ExperimentConfig& cfg);

/// Quadrature-only Moreau approximation sweep for g = |.|, f quadratic:
/// W1(mu_gamma, pi) over a gamma grid plus the fitted E1 envelope.
SweepResult exp_moreau_sweep(const ExperimentConfig& cfg);

/// TV-inpainting toy: masked observation, PnP-PSGLA with the TV prox
/// (10 inner iterations), posterior mean / std images, PSNR.
SweepResult exp_inpaint_tv(const ExperimentConfig& cfg);

/// 64x64 piecewise-constant test image in [0,1].
Matrix synthetic_piecewise_image(int rows, int cols, std::uint64_t seed);

}  // namespace lpl
