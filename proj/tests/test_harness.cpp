#include <doctest.h>

#include <filesystem>

#include "lpl/experiments.hpp"

using namespace lpl;

namespace {
std::string fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p.string();
}

ExperimentConfig quick_config(const std::string& name, const std::string& dir,
                              const std::string& text) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.seed = 5;
  cfg.replicates = 2;
  cfg.out_dir = dir;
  cfg.options = KeyValueConfig::from_text(text, "<test>");
  return cfg;
}
}  // namespace

TEST_CASE("moreau sweep: decay, envelope, zero-g degenerate case") {
  const auto dir = fresh_dir("lpl_h_moreau");
  auto cfg = quick_config("moreau", dir, "cells = 40001\n");
  const SweepResult res = exp_moreau_sweep(cfg);
  double prev = 1e9;
  for (double g : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const double w1 = res.value_of("w1_mu_gamma_vs_pi", g);
    CHECK(w1 < prev);
    prev = w1;
  }
  CHECK(res.value_of("w1_mu_gamma_vs_pi", 1e-5) <= 1e-4);
  const double e1 = res.value_of("fitted_E1", 0.0);
  for (double g : {1e-1, 1e-2, 1e-3, 1e-4})
    CHECK(res.value_of("w1_mu_gamma_vs_pi", g) <= e1 * g + 1e-15);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "summary.csv"));

  auto zero_cfg = quick_config("moreau", fresh_dir("lpl_h_moreau0"), "g = zero\ncells = 20001\n");
  const SweepResult zres = exp_moreau_sweep(zero_cfg);
  CHECK(zres.value_of("w1_mu_gamma_vs_pi", 1e-2) < 1e-12);
}

TEST_CASE("moreau sweep: too-narrow grid raises the widen diagnostic") {
  auto cfg = quick_config("moreau", fresh_dir("lpl_h_moreau_narrow"),
                          "grid_lo = -1\ngrid_hi = 1\ncells = 2001\n");
  CHECK_THROWS_WITH_AS(exp_moreau_sweep(cfg), doctest::Contains("widen"), ContractViolation);
}

TEST_CASE("stability sweep: CRN pairs measure the exact shift") {
  const auto dir = fresh_dir("lpl_h_stab");
  auto cfg = quick_config("stability", dir, "steps = 20000\nburn_in = 1000\n");
  const SweepResult res = exp_stability_sweep(cfg);
  for (double c : {1e-3, 1e-2, 1e-1, 1.0}) {
    CHECK(std::abs(res.value_of("w1_shift", c) - c) <= 1e-6 * (1.0 + c));
    CHECK(std::abs(res.value_of("l2_mismatch", c) - c) <= 1e-12 * (1.0 + c));
  }
  const double slope = res.value_of("loglog_slope_w1_vs_mismatch", 0.0);
  CHECK(slope > 0.8);
  CHECK(slope < 1.2);
}

TEST_CASE("experiments: unknown config keys are rejected") {
  auto cfg = quick_config("stability", fresh_dir("lpl_h_badkey"), "bogus_key = 1\n");
  CHECK_THROWS_WITH_AS(exp_stability_sweep(cfg), doctest::Contains("unknown key"),
                       ContractViolation);
}

TEST_CASE("gmm2d smoke run: artifacts, occupancy bookkeeping, determinism") {
  const auto dir = fresh_dir("lpl_h_gmm");
  auto cfg = quick_config("gmm2d", dir, "steps = 300\nn_ref = 120\n");
  const SweepResult res = exp_gmm2d(cfg);

  const auto occ_sum = [&](const std::string& tag) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += res.value_of("occupancy_" + tag, i);
    return s;
  };
  CHECK(occ_sum("pnp_ula") == doctest::Approx(1.0));
  CHECK(occ_sum("pnp_psgla") == doctest::Approx(1.0));
  CHECK(res.value_of("w2_trace_pnp_psgla", 300.0) > 0.0);
  for (const char* f : {"summary.csv", "metrics.csv", "gmm2d_pnp_ula.svg", "gmm2d_pnp_psgla.svg",
                        "prior_used.gmm", "observation.csv", "gmm2d_pnp_ula_chain.csv"})
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / f));

  // byte-identical rerun
  const auto dir2 = fresh_dir("lpl_h_gmm_rerun");
  auto cfg2 = cfg;
  cfg2.out_dir = dir2;
  exp_gmm2d(cfg2);
  for (const char* f : {"summary.csv", "metrics.csv"}) {
    const std::string a = load_text((std::filesystem::path(dir) / f).string());
    const std::string b = load_text((std::filesystem::path(dir2) / f).string());
    CHECK(a == b);
  }
}

TEST_CASE("gmm2d single-mode prior far from y: both converge, psgla ends closer") {
  const auto dir = fresh_dir("lpl_h_gmm_single");
  // one component far from the observation
  Vector w(1);
  w << 1.0;
  Vector m(2);
  m << 4.0, 3.0;
  const GaussianMixture prior(w, {m}, {0.2 * Matrix::Identity(2, 2)});
  const std::string prior_path =
      (std::filesystem::temp_directory_path() / "lpl_single_mode.gmm").string();
  write_gmm_file(prior_path, prior);

  auto cfg = quick_config("gmm2d", dir, "prior = " + prior_path + "\nn_ref = 500\n");
  const SweepResult res = exp_gmm2d(cfg);
  for (const std::string tag : {"pnp_ula", "pnp_psgla"}) {
    const double first = res.value_of("w2_trace_" + tag, 100.0);
    const double last = res.value_of("w2_trace_" + tag, 10000.0);
    CHECK(last < first);  // chains start at y, far from the posterior
  }
  CHECK(res.value_of("w2_trace_pnp_psgla", 10000.0) <
        res.value_of("w2_trace_pnp_ula", 10000.0));
}

TEST_CASE("stability sweep: double-well base variant") {
  const auto dir = fresh_dir("lpl_h_stab_dw");
  auto cfg = quick_config("stability", dir,
                          "base = double_well\nsteps = 20000\nburn_in = 2000\ngamma = 0.05\n");
  const SweepResult res = exp_stability_sweep(cfg);
  // CRN pairs: the measured W1 tracks the drift response, within ~10% of |c|
  for (double c : {1e-2, 1e-1}) {
    CHECK(res.value_of("w1_shift", c) > 0.0);
    CHECK(res.value_of("l2_mismatch", c) == doctest::Approx(c).epsilon(1e-10));
  }
}

TEST_CASE("inpaint toy: improves over the observation, uncertainty on masked pixels") {
  const auto dir = fresh_dir("lpl_h_inpaint");
  auto cfg = quick_config("inpaint", dir, "steps = 400\nsigma = 0.08\n");
  const SweepResult res = exp_inpaint_tv(cfg);
  CHECK(res.value_of("psnr_posterior_mean", 0.0) >
        res.value_of("psnr_observed", 0.0) + 3.0);
  CHECK(res.value_of("mean_std_masked", 0.0) > res.value_of("mean_std_observed", 0.0));
  for (const char* f : {"truth.pgm", "observed.pgm", "posterior_mean.pgm", "posterior_std.pgm"})
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / f));
}

TEST_CASE("inpaint: identity problem with tiny noise returns the input") {
  const auto dir = fresh_dir("lpl_h_inpaint_id");
  auto cfg = quick_config("inpaint", dir,
                          "steps = 600\nmask_fraction = 0\nsigma = 0.06\nobs_noise = 0\n");
  const SweepResult res = exp_inpaint_tv(cfg);
  CHECK(res.value_of("rmse_posterior_mean", 0.0) <= 2.0 / 255.0);
}

TEST_CASE("inpaint: unstable sigma/gamma combinations are rejected with advice") {
  auto cfg = quick_config("inpaint", fresh_dir("lpl_h_inpaint_bad"), "sigma = 0.004\n");
  CHECK_THROWS_WITH_AS(exp_inpaint_tv(cfg), doctest::Contains("increase sigma"),
                       ContractViolation);
}
