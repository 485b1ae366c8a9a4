#include "lpl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "lpl/potentials.hpp"

namespace lpl {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::pair<double, double> mean_se(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  if (n == 0) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

Matrix evenly_subsample(const Matrix& rows, int m) {
  const int n = static_cast<int>(rows.rows());
  if (m >= n) return rows;
  Matrix out(m, rows.cols());
  for (int i = 0; i < m; ++i) {
    const int idx = static_cast<int>((static_cast<std::int64_t>(i) * n) / m);
    out.row(i) = rows.row(idx);
  }
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void ensure_out_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ContractViolation("cannot create output directory: " + cfg.out_dir);
  const auto probe = std::filesystem::path(cfg.out_dir) / ".write_probe";
  save_text(probe.string(), "ok");
  std::filesystem::remove(probe, ec);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.out_dir) / file).string();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_cli(const std::string& name, const std::string& config_path,
                                            std::uint64_t seed, const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.seed = seed;
  cfg.out_dir = out_dir;
  if (!config_path.empty()) cfg.options = KeyValueConfig::from_file(config_path);
  if (cfg.options.has("seed")) cfg.seed = static_cast<std::uint64_t>(cfg.options.get_int("seed", 1));
  if (cfg.options.has("replicates"))
    cfg.replicates = static_cast<int>(cfg.options.get_int("replicates", 5));
  if (cfg.options.has("out")) cfg.out_dir = cfg.options.get_string("out", out_dir);
  return cfg;
}

const SweepRow* SweepResult::find(const std::string& metric, double param) const {
  for (const auto& r : rows)
    if (r.metric == metric && r.param == param) return &r;
  return nullptr;
}

double SweepResult::value_of(const std::string& metric, double param) const {
  const SweepRow* r = find(metric, param);
  require(r != nullptr, "SweepResult: missing metric " + metric);
  return r->value;
}

std::vector<double> SweepResult::raw_values(const std::string& metric, double param) const {
  std::vector<double> out;
  for (const auto& r : raw)
    if (r.metric == metric && r.param == param) out.push_back(r.value);
  return out;
}

void SweepResult::add_aggregate(const std::string& metric, double param,
                                const std::vector<double>& replicate_values, double runtime_s) {
  const auto [m, se] = mean_se(replicate_values);
  rows.push_back({param, metric, m, se, runtime_s});
}

void write_sweep_outputs(const SweepResult& result, const ExperimentConfig& cfg) {
  ensure_out_dir(cfg);
  auto rows = result.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.metric != b.metric ? a.metric < b.metric : a.param < b.param;
  });
  CsvWriter summary({"param", "metric", "value", "se"});
  for (const auto& r : rows)
    summary.add_row({CsvWriter::format(r.param), r.metric, CsvWriter::format(r.value),
                     CsvWriter::format(r.se)});
  summary.save(out_path(cfg, "summary.csv"));

  auto raw = result.raw;
  std::stable_sort(raw.begin(), raw.end(), [](const RawMeasurement& a, const RawMeasurement& b) {
    if (a.metric != b.metric) return a.metric < b.metric;
    if (a.param != b.param) return a.param < b.param;
    return a.replicate < b.replicate;
  });
  CsvWriter metrics({"metric", "p_or_param", "value", "n_a", "n_b", "seed"});
  for (const auto& r : raw)
    metrics.add_row({r.metric, CsvWriter::format(r.param), CsvWriter::format(r.value),
                     std::to_string(r.n_a), std::to_string(r.n_b), std::to_string(r.seed)});
  metrics.save(out_path(cfg, "metrics.csv"));

  // wall times live outside the byte-identity contract
  std::string timings;
  for (const auto& r : rows)
    if (r.runtime_s > 0.0)
      timings += r.metric + " param=" + CsvWriter::format(r.param) + " " +
                 CsvWriter::format(r.runtime_s) + " s\n";
  save_text(out_path(cfg, "timings.txt"), timings);
}

GaussianMixture default_three_mode_prior() {
  // Repository-chosen: equilateral means keep the component evidences
  // balanced for observations near the origin; the tight covariances put
  // deep valleys between posterior modes, the regime where the two
  // samplers separate within 1e4 steps.
  Vector w(3);
  w << 0.34, 0.33, 0.33;
  const double r = 6.0;
  std::vector<Vector> means(3, Vector(2));
  means[0] << -r * std::sqrt(3.0) / 2.0, -r / 2.0;
  means[1] << r * std::sqrt(3.0) / 2.0, -r / 2.0;
  means[2] << 0.0, r;
  std::vector<Matrix> covs(3, 0.2 * Matrix::Identity(2, 2));
  return GaussianMixture(w, means, covs);
}

SweepResult exp_gmm2d(const ExperimentConfig& cfg) {
  cfg.options.validate_keys({"prior", "sigma", "steps", "y0", "y1", "y_seed", "n_ref", "seed",
                             "replicates", "out"});
  ensure_out_dir(cfg);
  const double t_start = now_seconds();

  const GaussianMixture prior = cfg.options.has("prior")
                                    ? parse_gmm_file(cfg.options.get_string("prior", ""))
                                    : default_three_mode_prior();
  require(prior.dim() == 2, "exp_gmm2d: prior must be 2D");
  const double sigma = cfg.options.get_double("sigma", 1.0);
  const std::int64_t steps = cfg.options.get_int("steps", 10000);
  const int n_ref = static_cast<int>(cfg.options.get_int("n_ref", 2000));

  // observation: the shipped default is pinned near the prior centroid so
  // every posterior mode keeps nontrivial weight; y0/y1 override it, and
  // y_seed regenerates one at scale 0.1 instead
  Vector y(2);
  y << 0.08, 0.04;
  if (cfg.options.has("y0") || cfg.options.has("y1")) {
    y << cfg.options.get_double("y0", 0.0), cfg.options.get_double("y1", 0.0);
  } else if (cfg.options.has("y_seed")) {
    const auto y_seed = static_cast<std::uint64_t>(cfg.options.get_int("y_seed", 7));
    const GaussianStream ys(y_seed);
    y = 0.1 * ys.normal_vector(0, 2);
  }

  const Matrix a = Matrix::Identity(2, 2);
  const GaussianLikelihood lik{LinearOperator::identity(2), y, sigma};
  const SmoothPotential f = lik.as_potential(2.0 / (sigma * sigma));
  const GaussianMixture posterior = gmm_exact_posterior(prior, a, y, sigma);

  Vector glo(2), ghi(2);
  glo << -8.0, -8.0;
  ghi << 8.0, 8.0;
  const GridDensity post_grid = GridDensity::from_function(
      [&posterior](const Vector& x) { return std::exp(posterior.log_density(x)); }, glo, ghi, 200,
      200);

  std::vector<std::int64_t> checkpoints;
  for (std::int64_t c : {std::int64_t{100}, std::int64_t{300}, std::int64_t{1000},
                         std::int64_t{3000}, std::int64_t{10000}})
    if (c < steps) checkpoints.push_back(c);
  checkpoints.push_back(steps);

  struct RepOut {
    std::vector<RawMeasurement> raw;
    ChainRun ula, psgla;
  };
  std::vector<RepOut> reps(cfg.replicates);

  const auto run_replicate = [&](int r) {
    const std::uint64_t seed_u = cfg.seed + 10 * static_cast<std::uint64_t>(r) + 1;
    const std::uint64_t seed_p = cfg.seed + 10 * static_cast<std::uint64_t>(r) + 2;
    const std::uint64_t seed_ref = cfg.seed + 10 * static_cast<std::uint64_t>(r) + 3;
    RepOut& out = reps[r];

    ChainConfig cu;
    cu.gamma = 0.1;
    cu.n_steps = steps;
    cu.burn_in = 0;  // the estimator is the uniform measure on all iterates
    cu.thinning = 1;
    cu.seed = seed_u;
    cu.x0 = y;
    const Denoiser d_ula = Denoiser::from_gmm(prior, 0.5);
    PnpUlaOptions opts;
    opts.eps = 0.5;
    opts.lam = 1.5;
    out.ula = run_pnp_ula(f, d_ula, opts, cu);

    ChainConfig cp = cu;
    cp.gamma = 0.3;
    cp.lambda = 0.67;
    cp.seed = seed_p;
    const Denoiser d_psgla = Denoiser::from_gmm(prior, std::sqrt(0.3));
    out.psgla = run_pnp_psgla(f, d_psgla, cp);

    const GaussianStream ref_stream(seed_ref);
    const Matrix ref = posterior.sample_matrix(ref_stream, n_ref);

    const auto trace = [&](const ChainRun& run, const std::string& tag) {
      for (std::int64_t k : checkpoints) {
        const int m = static_cast<int>(std::min<std::int64_t>(k, n_ref));
        const Matrix chain_sub = evenly_subsample(run.samples.topRows(k), m);
        const Matrix ref_sub = ref.topRows(m);
        for (int p : {1, 2}) {
          const double w = wasserstein_exact(EmpiricalMeasure::uniform(chain_sub),
                                             EmpiricalMeasure::uniform(ref_sub), p);
          out.raw.push_back({"w" + std::to_string(p) + "_trace_" + tag, static_cast<double>(k), r,
                             w, m, m, run.config.seed});
        }
      }
      const Matrix final_sub = evenly_subsample(run.samples, n_ref);
      const EmpiricalMeasure final_m = EmpiricalMeasure::uniform(final_sub);
      const double kde = kde_l2_error(final_m, post_grid, silverman_bandwidth(final_m));
      out.raw.push_back({"kde_l2_" + tag, 0.0, r, kde, final_sub.rows(), 0, run.config.seed});
      const Vector occ = mode_occupancy(run.samples,
                                        Vector::Constant(run.samples.rows(),
                                                         1.0 / run.samples.rows()),
                                        posterior);
      for (int i = 0; i < occ.size(); ++i)
        out.raw.push_back({"occupancy_" + tag, static_cast<double>(i), r, occ[i],
                           run.samples.rows(), 0, run.config.seed});
    };
    trace(out.ula, "pnp_ula");
    trace(out.psgla, "pnp_psgla");

    const auto final_w2 = [&](const RepOut& o, const std::string& tag) {
      for (const auto& m : o.raw)
        if (m.metric == "w2_trace_" + tag && m.param == static_cast<double>(steps))
          return m.value;
      return 0.0;
    };
    out.raw.push_back({"w2_final_gap", 0.0, r,
                       final_w2(out, "pnp_ula") - final_w2(out, "pnp_psgla"), n_ref, n_ref,
                       seed_u});
  };
  parallel_for(cfg.replicates, [&](int r) {
    try {
      run_replicate(r);
    } catch (const DivergenceError& e) {
      throw DivergenceError("exp_gmm2d replicate " + std::to_string(r) + ": " + e.what(),
                            e.step());
    }
  });

  SweepResult result;
  for (auto& rep : reps)
    result.raw.insert(result.raw.end(), rep.raw.begin(), rep.raw.end());

  // aggregate every (metric, param) pair across replicates
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& m : result.raw) {
    const auto key = std::make_pair(m.metric, m.param);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  const double elapsed = now_seconds() - t_start;
  for (const auto& [metric, param] : keys)
    result.add_aggregate(metric, param, result.raw_values(metric, param), elapsed);

  // artifacts from replicate 0
  {
    const std::vector<double> levels = {0.05, 0.2, 0.5, 0.8};
    const double vmax = post_grid.values.maxCoeff();
    std::vector<double> abs_levels;
    for (double l : levels) abs_levels.push_back(l * vmax);
    const auto scatter = [&](const ChainRun& run, const std::string& name) {
      SvgScatterSpec spec;
      spec.lo = glo;
      spec.hi = ghi;
      spec.contour_field = post_grid.values;
      spec.levels = abs_levels;
      spec.points = evenly_subsample(run.samples, 2000);
      spec.title = name;
      save_text(out_path(cfg, name + ".svg"), render_scatter_svg(spec));
      CsvWriter chain({"x_0", "x_1"});
      for (int i = 0; i < run.samples.rows(); ++i)
        chain.add_row({CsvWriter::format(run.samples(i, 0)), CsvWriter::format(run.samples(i, 1))});
      chain.save(out_path(cfg, name + "_chain.csv"));
    };
    scatter(reps[0].ula, "gmm2d_pnp_ula");
    scatter(reps[0].psgla, "gmm2d_pnp_psgla");
    write_gmm_file(out_path(cfg, "prior_used.gmm"), prior);
    write_gmm_file(out_path(cfg, "posterior_exact.gmm"), posterior);
    CsvWriter obs({"y_0", "y_1", "sigma"});
    obs.add_row({CsvWriter::format(y[0]), CsvWriter::format(y[1]), CsvWriter::format(sigma)});
    obs.save(out_path(cfg, "observation.csv"));
  }

  write_sweep_outputs(result, cfg);
  return result;
}

SweepResult exp_stability_sweep(const ExperimentConfig& cfg) {
  cfg.options.validate_keys({"base", "gamma", "steps", "burn_in", "seed", "replicates", "out"});
  ensure_out_dir(cfg);
  const std::string base = cfg.options.get_string("base", "ou");
  const double gamma = cfg.options.get_double("gamma", 0.1);
  const std::int64_t steps = cfg.options.get_int("steps", 200000);
  const std::int64_t burn = cfg.options.get_int("burn_in", 2000);

  DriftFn b1;
  if (base == "ou") {
    b1 = [](const Vector& x) { return x; };
  } else if (base == "double_well") {
    b1 = [](const Vector& x) {
      Vector g(1);
      g[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0) + 0.5 * x[0];
      return g;
    };
  } else {
    throw ContractViolation("exp_stability_sweep: base must be ou or double_well");
  }

  const std::vector<double> shifts = {1e-3, 1e-2, 1e-1, 1.0};
  Vector tlo(1), thi(1);
  tlo << -8.0;
  thi << 8.0;
  GridDensity geom;
  geom.d = 1;
  geom.lo = tlo;
  geom.hi = thi;
  geom.cells0 = 400;
  geom.cells1 = 1;
  geom.values = Matrix::Constant(400, 1, 1.0 / 16.0);  // geometry carrier only

  struct Cell {
    std::vector<RawMeasurement> raw;
    double runtime = 0.0;
  };
  std::vector<Cell> cells(shifts.size() * cfg.replicates);

  parallel_for(static_cast<int>(cells.size()), [&](int idx) {
    const int si = idx / cfg.replicates;
    const int r = idx % cfg.replicates;
    const double c = shifts[si];
    const double t0 = now_seconds();
    const std::uint64_t seed_r = cfg.seed + 10 * static_cast<std::uint64_t>(r) + 1;

    ChainConfig cc;
    cc.gamma = gamma;
    cc.n_steps = steps;
    cc.burn_in = burn;
    cc.thinning = 1;
    cc.seed = seed_r;
    cc.x0 = Vector::Zero(1);

    const DriftFn b2 = [&b1, c](const Vector& x) { return (b1(x).array() + c).matrix().eval(); };
    // common random numbers: the pair shares one noise stream, so the
    // empirical laws differ by the drift response alone
    const ChainRun run1 = run_iula(b1, cc);
    const ChainRun run2 = run_iula(b2, cc);

    const Vector u = Vector::Constant(run1.samples.rows(), 1.0 / run1.samples.rows());
    const double w1 = wasserstein_1d(run1.samples.col(0), u, run2.samples.col(0), u, 1);
    const EmpiricalMeasure e1 = EmpiricalMeasure::uniform(run1.samples);
    const EmpiricalMeasure e2 = EmpiricalMeasure::uniform(run2.samples);
    const double tv = tv_on_grid(e1, e2, geom);
    const EmpiricalMeasure esub = EmpiricalMeasure::uniform(evenly_subsample(run1.samples, 20000));
    const double mism = drift_l2_mismatch(b1, b2, esub);

    Cell& cell = cells[idx];
    cell.raw.push_back({"w1_shift", c, r, w1, run1.samples.rows(), run2.samples.rows(), seed_r});
    cell.raw.push_back({"tv_shift", c, r, tv, run1.samples.rows(), run2.samples.rows(), seed_r});
    cell.raw.push_back({"l2_mismatch", c, r, mism, esub.size(), 0, seed_r});
    cell.runtime = now_seconds() - t0;
  });

  SweepResult result;
  for (auto& cell : cells)
    result.raw.insert(result.raw.end(), cell.raw.begin(), cell.raw.end());
  for (std::size_t si = 0; si < shifts.size(); ++si) {
    double rt = 0.0;
    for (int r = 0; r < cfg.replicates; ++r) rt += cells[si * cfg.replicates + r].runtime;
    for (const char* metric : {"w1_shift", "tv_shift", "l2_mismatch"})
      result.add_aggregate(metric, shifts[si], result.raw_values(metric, shifts[si]), rt);
  }

  std::vector<double> log_w1, log_mism;
  for (double c : shifts) {
    log_w1.push_back(std::log(result.value_of("w1_shift", c)));
    log_mism.push_back(std::log(result.value_of("l2_mismatch", c)));
  }
  result.rows.push_back(
      {0.0, "loglog_slope_w1_vs_mismatch", least_squares_slope(log_mism, log_w1), 0.0, 0.0});

  write_sweep_outputs(result, cfg);
  return result;
}

SweepResult exp_discretization_sweep(const ExperimentConfig& cfg) {
  cfg.options.validate_keys({"steps_ou", "steps_dw", "seed", "replicates", "out"});
  ensure_out_dir(cfg);
  const std::int64_t steps_ou = cfg.options.get_int("steps_ou", 2000000);
  const std::int64_t steps_dw = cfg.options.get_int("steps_dw", 1000000);

  const std::vector<double> gammas_ou = {0.05, 0.1, 0.2, 0.4, 0.8};
  // explicit Euler on the quartic drift overshoots past |x| ~ sqrt(1/(2 gamma))
  // and blows up; the grid stays at gamma <= 0.05, which holds 5e6-step runs
  const std::vector<double> gammas_dw = {0.003125, 0.00625, 0.0125, 0.025, 0.05};

  const GridDensity dw_grid = GridDensity::from_function_1d(
      [](double x) {
        const double t = x * x - 1.0;
        return std::exp(-t * t);
      },
      -2.8, 2.8, 2001);
  Vector dw_centers(dw_grid.cells0);
  Vector dw_mass(dw_grid.cells0);
  for (int i = 0; i < dw_grid.cells0; ++i) {
    dw_centers[i] = dw_grid.center(0, i);
    dw_mass[i] = dw_grid.values(i, 0) * dw_grid.cell_volume();
  }
  dw_mass /= dw_mass.sum();

  const GridDensity gauss_grid = GridDensity::from_function_1d(
      [](double x) { return std::exp(-0.5 * x * x); }, -8.0, 8.0, 2001);

  struct Cell {
    std::vector<RawMeasurement> raw;
    double runtime = 0.0;
  };
  const int n_ou = static_cast<int>(gammas_ou.size());
  const int n_dw = static_cast<int>(gammas_dw.size());
  std::vector<Cell> cells((n_ou + n_dw) * cfg.replicates);

  parallel_for(static_cast<int>(cells.size()), [&](int idx) {
    const int point = idx / cfg.replicates;
    const int r = idx % cfg.replicates;
    const double t0 = now_seconds();
    const std::uint64_t seed_r = cfg.seed + 10 * static_cast<std::uint64_t>(r) + 1;
    Cell& cell = cells[idx];

    if (point < n_ou) {
      const double gamma = gammas_ou[point];
      ChainConfig cc;
      cc.gamma = gamma;
      cc.n_steps = steps_ou;
      cc.burn_in = steps_ou / 10;
      cc.thinning = 1;
      cc.seed = seed_r;
      cc.x0 = Vector::Zero(1);
      const ChainRun run = run_iula([](const Vector& x) { return x; }, cc);
      // both laws Gaussian: W2 = |sqrt(vhat) - 1| (second-moment plug-in)
      const double w2 = std::abs(std::sqrt(run.running_second_moment[0]) - 1.0);
      const double closed = std::abs(std::sqrt(2.0 / (2.0 - gamma)) - 1.0);
      const EmpiricalMeasure emp =
          EmpiricalMeasure::uniform(evenly_subsample(run.samples, 100000));
      const double tv = tv_on_grid(emp, gauss_grid);
      cell.raw.push_back({"ou_w2_plugin", gamma, r, w2, run.samples.rows(), 0, seed_r});
      cell.raw.push_back({"ou_w2_closed", gamma, r, closed, 0, 0, seed_r});
      cell.raw.push_back({"ou_tv_to_pi", gamma, r, tv, emp.size(), 0, seed_r});
    } else {
      const double gamma = gammas_dw[point - n_ou];
      ChainConfig cc;
      cc.gamma = gamma;
      cc.n_steps = steps_dw;
      cc.burn_in = steps_dw / 10;
      cc.thinning = 1;
      cc.seed = seed_r;
      cc.x0 = Vector::Ones(1);
      const ChainRun run = run_iula(
          [](const Vector& x) {
            Vector g(1);
            g[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0);
            return g;
          },
          cc);
      const Matrix sub = evenly_subsample(run.samples, 200000);
      const Vector u = Vector::Constant(sub.rows(), 1.0 / sub.rows());
      const double w2 = wasserstein_1d(sub.col(0), u, dw_centers, dw_mass, 2);
      const double tv = tv_on_grid(EmpiricalMeasure::uniform(sub), dw_grid);
      cell.raw.push_back({"dw_w2_to_pi", gamma, r, w2, sub.rows(), dw_grid.cells0, seed_r});
      cell.raw.push_back({"dw_tv_to_pi", gamma, r, tv, sub.rows(), dw_grid.cells0, seed_r});
    }
    cell.runtime = now_seconds() - t0;
  });

  SweepResult result;
  for (auto& cell : cells)
    result.raw.insert(result.raw.end(), cell.raw.begin(), cell.raw.end());
  const auto aggregate_point = [&](const std::string& metric, double gamma, int point) {
    double rt = 0.0;
    for (int r = 0; r < cfg.replicates; ++r) rt += cells[point * cfg.replicates + r].runtime;
    result.add_aggregate(metric, gamma, result.raw_values(metric, gamma), rt);
  };
  for (int i = 0; i < n_ou; ++i) {
    aggregate_point("ou_w2_plugin", gammas_ou[i], i);
    aggregate_point("ou_w2_closed", gammas_ou[i], i);
    aggregate_point("ou_tv_to_pi", gammas_ou[i], i);
  }
  for (int i = 0; i < n_dw; ++i) {
    aggregate_point("dw_w2_to_pi", gammas_dw[i], n_ou + i);
    aggregate_point("dw_tv_to_pi", gammas_dw[i], n_ou + i);
  }

  // sqrt-gamma envelope constant for the double-well family
  double d_hat = 0.0;
  for (double g : gammas_dw)
    d_hat = std::max(d_hat, result.value_of("dw_w2_to_pi", g) / std::sqrt(g));
  result.rows.push_back({0.0, "dw_fitted_sqrt_envelope", d_hat, 0.0, 0.0});

  write_sweep_outputs(result, cfg);
  return result;
}

SweepResult exp_moreau_sweep(const ExperimentConfig& cfg) {
  cfg.options.validate_keys({"grid_lo", "grid_hi", "cells", "g", "seed", "replicates", "out"});
  ensure_out_dir(cfg);
  const double lo = cfg.options.get_double("grid_lo", -10.0);
  const double hi = cfg.options.get_double("grid_hi", 10.0);
  const int cells = static_cast<int>(cfg.options.get_int("cells", 100001));
  const std::string gname = cfg.options.get_string("g", "l1");
  require(gname == "l1" || gname == "zero", "exp_moreau_sweep: g must be l1 or zero");
  const bool zero_g = gname == "zero";

  const ProxRegularizer g = zero_g ? zero_regularizer(1) : l1_regularizer(1, 1.0);
  const auto f_value = [](double x) { return 0.5 * x * x; };
  const double dx = (hi - lo) / (cells - 1);

  // unnormalized target density on the grid
  Vector pi_density(cells);
  for (int i = 0; i < cells; ++i) {
    const double x = lo + i * dx;
    Vector xv(1);
    xv[0] = x;
    pi_density[i] = std::exp(-f_value(x) - g.value(xv));
  }
  const double pi_max = pi_density.maxCoeff();
  require(pi_density[0] <= 1e-12 * pi_max && pi_density[cells - 1] <= 1e-12 * pi_max,
          "exp_moreau_sweep: density mass touches the grid boundary; widen grid_lo/grid_hi");

  const auto cdf_of = [&](const Vector& density) {
    Vector cdf(cells);
    double acc = 0.0;
    for (int i = 0; i < cells; ++i) {
      acc += density[i];
      cdf[i] = acc;
    }
    cdf /= acc;
    return cdf;
  };
  const Vector pi_cdf = cdf_of(pi_density);

  const std::vector<double> gammas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  SweepResult result;
  for (double gamma : gammas) {
    const double t0 = now_seconds();
    const MoreauEnvelope env(g, gamma);
    Vector mu_density(cells);
    for (int i = 0; i < cells; ++i) {
      const double x = lo + i * dx;
      Vector xv(1);
      xv[0] = x;
      mu_density[i] = std::exp(-f_value(x) - moreau_value(env, xv));
    }
    const Vector mu_cdf = cdf_of(mu_density);
    // W1 = integral |F_mu - F_pi| dx (1D quantile-coupling identity)
    double w1 = 0.0;
    for (int i = 0; i < cells; ++i) w1 += std::abs(mu_cdf[i] - pi_cdf[i]) * dx;
    result.raw.push_back({"w1_mu_gamma_vs_pi", gamma, 0, w1, cells, cells, cfg.seed});
    result.rows.push_back({gamma, "w1_mu_gamma_vs_pi", w1, 0.0, now_seconds() - t0});
  }

  double e1 = 0.0;
  for (double gamma : {1e-1, 1e-2, 1e-3, 1e-4})
    e1 = std::max(e1, result.value_of("w1_mu_gamma_vs_pi", gamma) / gamma);
  result.rows.push_back({0.0, "fitted_E1", e1, 0.0, 0.0});

  write_sweep_outputs(result, cfg);
  return result;
}

Matrix synthetic_piecewise_image(int rows, int cols, std::uint64_t seed) {
  const GaussianStream stream(seed);
  Matrix img = Matrix::Constant(rows, cols, 0.25);
  // a few axis-aligned constant rectangles and a bright disc
  std::uint64_t c = 0;
  for (int b = 0; b < 3; ++b) {
    const int i0 = static_cast<int>(stream.uniform(c++) * rows * 0.6);
    const int j0 = static_cast<int>(stream.uniform(c++) * cols * 0.6);
    const int hgt = 4 + static_cast<int>(stream.uniform(c++) * rows * 0.35);
    const int wid = 4 + static_cast<int>(stream.uniform(c++) * cols * 0.35);
    const double val = 0.15 + 0.8 * stream.uniform(c++);
    for (int i = i0; i < std::min(rows, i0 + hgt); ++i)
      for (int j = j0; j < std::min(cols, j0 + wid); ++j) img(i, j) = val;
  }
  const double ci = rows * 0.7, cj = cols * 0.3, rad = 0.18 * std::min(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if ((i - ci) * (i - ci) + (j - cj) * (j - cj) <= rad * rad) img(i, j) = 0.9;
  return img;
}

SweepResult exp_inpaint_tv(const ExperimentConfig& cfg) {
  cfg.options.validate_keys({"image", "mask_fraction", "sigma", "obs_noise", "steps", "lam", "eps",
                             "inner_iters", "seed", "replicates", "out"});
  ensure_out_dir(cfg);
  const double t0 = now_seconds();

  const Matrix truth = cfg.options.has("image")
                           ? read_pgm(cfg.options.get_string("image", ""))
                           : synthetic_piecewise_image(64, 64, 99);
  const int rows = static_cast<int>(truth.rows());
  const int cols = static_cast<int>(truth.cols());
  const int d = rows * cols;
  const double mask_fraction = cfg.options.get_double("mask_fraction", 0.5);
  require(mask_fraction >= 0.0 && mask_fraction < 1.0, "exp_inpaint_tv: bad mask_fraction");
  const double sigma = cfg.options.get_double("sigma", 0.08);
  const double obs_noise = cfg.options.get_double("obs_noise", sigma);
  const std::int64_t steps = cfg.options.get_int("steps", 1000);
  const double lam = cfg.options.get_double("lam", 10.0);
  const double eps = cfg.options.get_double("eps", 10.0 / 255.0);
  const int inner = static_cast<int>(cfg.options.get_int("inner_iters", 10));
  const double gamma = eps * eps;

  // explicit step on grad f must be stable: gamma * (2/sigma^2) <= 1
  const double step_factor = gamma * 2.0 / (sigma * sigma);
  require(step_factor <= 1.0,
          "exp_inpaint_tv: gamma * L_f = " + std::to_string(step_factor) +
              " > 1; increase sigma (gamma is pinned to eps^2)");

  const GaussianStream mask_stream(cfg.seed + 101);
  std::vector<int> keep;
  for (int i = 0; i < d; ++i)
    if (mask_stream.uniform(static_cast<std::uint64_t>(i)) >= mask_fraction) keep.push_back(i);
  require(!keep.empty(), "exp_inpaint_tv: mask removed every pixel");
  const LinearOperator a = LinearOperator::masking(keep, d);

  const Vector x_true = Eigen::Map<const Vector>(truth.data(), d);
  const GaussianStream noise_stream(cfg.seed + 202);
  Vector y = a.apply(x_true);
  for (int i = 0; i < y.size(); ++i)
    y[i] += (obs_noise / std::sqrt(2.0)) * noise_stream.normal(static_cast<std::uint64_t>(i));

  const GaussianLikelihood lik{a, y, sigma};
  const SmoothPotential f = lik.as_potential(2.0 / (sigma * sigma));

  const Vector x0 = a.adjoint(y);  // zero-filled observation
  ChainConfig cc;
  cc.gamma = gamma;
  cc.n_steps = steps;
  cc.burn_in = steps / 10;
  cc.thinning = 1;
  cc.seed = cfg.seed + 1;
  cc.x0 = x0;
  cc.lambda = lam;
  // target e^{-f - lam TV}: inexact prox of the lam-scaled TV regularizer
  const ProxRegularizer tv = tv2d_regularizer(rows, cols, lam, inner);
  const ChainRun run = run_inexact_psgla(
      f, [&tv](double g, const Vector& v) { return tv.prox(g, v); }, cc);

  const Vector mean = run.samples.colwise().mean().transpose();
  Vector var(d);
  for (int i = 0; i < d; ++i)
    var[i] = (run.samples.col(i).array() - mean[i]).square().mean();
  const Vector stddev = var.cwiseSqrt();

  const auto psnr = [&](const Vector& img) {
    const double mse = (img - x_true).squaredNorm() / d;
    return mse <= 0.0 ? 99.0 : 10.0 * std::log10(1.0 / mse);
  };
  const double psnr_mean = psnr(mean);
  const double psnr_obs = psnr(x0);
  const double rmse = std::sqrt((mean - x_true).squaredNorm() / d);

  std::vector<char> observed(d, 0);
  for (int i : keep) observed[i] = 1;
  double std_masked = 0.0, std_obs = 0.0;
  int n_masked = 0, n_obs = 0;
  for (int i = 0; i < d; ++i) {
    if (observed[i]) {
      std_obs += stddev[i];
      ++n_obs;
    } else {
      std_masked += stddev[i];
      ++n_masked;
    }
  }
  if (n_obs > 0) std_obs /= n_obs;
  if (n_masked > 0) std_masked /= n_masked;

  const auto to_image = [&](const Vector& v) {
    return Matrix(Eigen::Map<const Matrix>(v.data(), rows, cols));
  };
  write_pgm(out_path(cfg, "truth.pgm"), truth);
  write_pgm(out_path(cfg, "observed.pgm"), to_image(x0));
  write_pgm(out_path(cfg, "posterior_mean.pgm"), to_image(mean));
  // std image stretched to its own max for visibility
  const double smax = stddev.maxCoeff();
  write_pgm(out_path(cfg, "posterior_std.pgm"),
            to_image(smax > 0 ? (stddev / smax).eval() : stddev));

  SweepResult result;
  const double elapsed = now_seconds() - t0;
  const auto push = [&](const std::string& metric, double value) {
    result.raw.push_back({metric, 0.0, 0, value, run.samples.rows(), 0, cfg.seed});
    result.rows.push_back({0.0, metric, value, 0.0, elapsed});
  };
  push("psnr_posterior_mean", psnr_mean);
  push("psnr_observed", psnr_obs);
  push("rmse_posterior_mean", rmse);
  push("mean_std_masked", std_masked);
  push("mean_std_observed", std_obs);
  push("mask_fraction_realized", 1.0 - static_cast<double>(keep.size()) / d);

  write_sweep_outputs(result, cfg);
  return result;
}

}  // namespace lpl
