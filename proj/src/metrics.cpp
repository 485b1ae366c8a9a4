#include "lpl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpl/min_cost_flow.hpp"

namespace lpl {

namespace {
constexpr double kCostScale = 1e9;  // integer scaling of OT costs

double pow_cost(double dist, int p) {
  if (p == 1) return dist;
  if (p == 2) return dist * dist;
  return std::pow(dist, p);
}
}  // namespace

EmpiricalMeasure EmpiricalMeasure::uniform(Matrix points) {
  const int n = static_cast<int>(points.rows());
  EmpiricalMeasure m{std::move(points), Vector::Constant(n, 1.0 / n)};
  m.validate();
  return m;
}

EmpiricalMeasure EmpiricalMeasure::weighted(Matrix points, Vector weights) {
  EmpiricalMeasure m{std::move(points), std::move(weights)};
  m.validate();
  return m;
}

void EmpiricalMeasure::validate() const {
  require(points.rows() >= 1, "EmpiricalMeasure: needs at least one point");
  require(points.rows() == weights.size(), "EmpiricalMeasure: weight count mismatch");
  require(points.allFinite(), "EmpiricalMeasure: non-finite points");
  require((weights.array() >= 0.0).all(), "EmpiricalMeasure: negative weight");
  require(std::abs(weights.sum() - 1.0) <= 1e-10, "EmpiricalMeasure: weights must sum to 1");
}

double GridDensity::cell_volume() const {
  double v = (hi[0] - lo[0]) / cells0;
  if (d == 2) v *= (hi[1] - lo[1]) / cells1;
  return v;
}

double GridDensity::center(int axis, int idx) const {
  const int cells = axis == 0 ? cells0 : cells1;
  return lo[axis] + (idx + 0.5) * (hi[axis] - lo[axis]) / cells;
}

void GridDensity::validate() const {
  require(d == 1 || d == 2, "GridDensity: d must be 1 or 2");
  require(cells0 >= 1 && cells1 >= 1, "GridDensity: empty grid");
  require((values.array() >= 0.0).all(), "GridDensity: negative density values");
  require(std::abs(values.sum() * cell_volume() - 1.0) <= 1e-8, "GridDensity: not normalized");
}

GridDensity GridDensity::from_function(const std::function<double(const Vector&)>& density,
                                       const Vector& lo, const Vector& hi, int cells0, int cells1) {
  GridDensity g;
  g.d = static_cast<int>(lo.size());
  require(g.d == 1 || g.d == 2, "GridDensity: d must be 1 or 2");
  g.lo = lo;
  g.hi = hi;
  g.cells0 = cells0;
  g.cells1 = g.d == 2 ? cells1 : 1;
  g.values.resize(g.cells0, g.cells1);
  Vector x(g.d);
  for (int i = 0; i < g.cells0; ++i) {
    x[0] = g.center(0, i);
    for (int j = 0; j < g.cells1; ++j) {
      if (g.d == 2) x[1] = g.center(1, j);
      const double v = density(x);
      require(std::isfinite(v) && v >= 0.0, "GridDensity: invalid density value");
      g.values(i, j) = v;
    }
  }
  const double mass = g.values.sum() * g.cell_volume();
  require(mass > 0.0, "GridDensity: zero mass on grid");
  g.values /= mass;
  return g;
}

GridDensity GridDensity::from_function_1d(const std::function<double(double)>& density, double lo,
                                          double hi, int cells) {
  Vector l(1), h(1);
  l[0] = lo;
  h[0] = hi;
  return from_function([&density](const Vector& x) { return density(x[0]); }, l, h, cells, 1);
}

Matrix GridDensity::sample(const GaussianStream& stream, int n) const {
  // cumulative cell masses, row-major
  const int cells = cells0 * cells1;
  std::vector<double> cdf(cells);
  double acc = 0.0;
  for (int i = 0; i < cells0; ++i)
    for (int j = 0; j < cells1; ++j) {
      acc += values(i, j) * cell_volume();
      cdf[i * cells1 + j] = acc;
    }
  Matrix out(n, d);
  const double w0 = (hi[0] - lo[0]) / cells0;
  const double w1 = d == 2 ? (hi[1] - lo[1]) / cells1 : 0.0;
  for (int s = 0; s < n; ++s) {
    const double u = stream.uniform(3 * static_cast<std::uint64_t>(s)) * acc;
    const int c = static_cast<int>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const int ci = std::min(c, cells - 1);
    const int i = ci / cells1, j = ci % cells1;
    out(s, 0) = lo[0] + (i + stream.uniform(3 * static_cast<std::uint64_t>(s) + 1)) * w0;
    if (d == 2) out(s, 1) = lo[1] + (j + stream.uniform(3 * static_cast<std::uint64_t>(s) + 2)) * w1;
  }
  return out;
}

double wasserstein_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p) {
  require(p >= 1, "wasserstein_exact: p must be >= 1");
  require(a.dim() == b.dim(), "wasserstein_exact: dimension mismatch");
  const std::int64_t na = a.size(), nb = b.size();
  require(na * nb <= 4'000'000,
          "wasserstein_exact: instance too large (n_a * n_b > 4e6); use wasserstein_sliced");

  const bool uniform_equal = na == nb &&
                             (a.weights.array() - 1.0 / na).abs().maxCoeff() <= 1e-15 &&
                             (b.weights.array() - 1.0 / nb).abs().maxCoeff() <= 1e-15;

  // integer costs pick the optimal plan; the reported value re-evaluates that
  // plan with the exact double costs, so quantization never leaks into it
  std::vector<std::int64_t> cost(static_cast<std::size_t>(na * nb));
  std::vector<double> dcost(static_cast<std::size_t>(na * nb));
  double max_cost = 0.0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      const double dist = (a.points.row(i) - b.points.row(j)).norm();
      const double c = pow_cost(dist, p);
      max_cost = std::max(max_cost, c);
      dcost[static_cast<std::size_t>(i) * nb + j] = c;
      cost[static_cast<std::size_t>(i) * nb + j] =
          static_cast<std::int64_t>(std::llround(c * kCostScale));
    }
  // node potentials accumulate shortest-path lengths; keep them in int64 range
  require(max_cost * kCostScale * static_cast<double>(na + nb) <= 4.0e18,
          "wasserstein_exact: cost range too large for the 1e9 integer scale");

  double mean_cost = 0.0;
  if (uniform_equal) {
    __int128 total = 0;
    const std::vector<int> match = solve_assignment(cost, static_cast<int>(na), &total);
    for (int i = 0; i < na; ++i) mean_cost += dcost[static_cast<std::size_t>(i) * nb + match[i]];
    mean_cost /= static_cast<double>(na);
  } else {
    // quantize weights to 1e9 units; pin the largest to absorb rounding drift
    const std::int64_t units = 1'000'000'000;
    const auto quantize = [units](const Vector& w) {
      std::vector<std::int64_t> q(w.size());
      std::int64_t sum = 0;
      int imax = 0;
      for (int i = 0; i < w.size(); ++i) {
        q[i] = std::llround(w[i] * static_cast<double>(units));
        sum += q[i];
        if (w[i] > w[imax]) imax = i;
      }
      q[imax] += units - sum;
      require(q[imax] >= 0, "wasserstein_exact: degenerate weight quantization");
      return q;
    };
    std::vector<std::vector<std::int64_t>> flow;
    solve_transport(cost, quantize(a.weights), quantize(b.weights), &flow);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j)
        if (flow[i][j] > 0)
          mean_cost += static_cast<double>(flow[i][j]) / static_cast<double>(units) *
                       dcost[static_cast<std::size_t>(i) * nb + j];
  }
  return std::pow(std::max(mean_cost, 0.0), 1.0 / p);
}

double wasserstein_1d(const Vector& xa, const Vector& wa, const Vector& xb, const Vector& wb,
                      int p) {
  require(p >= 1, "wasserstein_1d: p must be >= 1");
  const int na = static_cast<int>(xa.size()), nb = static_cast<int>(xb.size());
  std::vector<int> ia(na), ib(nb);
  std::iota(ia.begin(), ia.end(), 0);
  std::iota(ib.begin(), ib.end(), 0);
  std::sort(ia.begin(), ia.end(), [&](int u, int v) { return xa[u] < xa[v]; });
  std::sort(ib.begin(), ib.end(), [&](int u, int v) { return xb[u] < xb[v]; });

  double cost = 0.0;
  int i = 0, j = 0;
  double ra = wa[ia[0]], rb = wb[ib[0]];
  while (i < na && j < nb) {
    const double m = std::min(ra, rb);
    if (m > 0.0) cost += m * pow_cost(std::abs(xa[ia[i]] - xb[ib[j]]), p);
    ra -= m;
    rb -= m;
    if (ra <= 0.0) {
      ++i;
      if (i < na) ra = wa[ia[i]];
    }
    if (rb <= 0.0) {
      ++j;
      if (j < nb) rb = wb[ib[j]];
    }
  }
  return std::pow(std::max(cost, 0.0), 1.0 / p);
}

double wasserstein_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p, int n_proj,
                          std::uint64_t seed) {
  require(n_proj >= 1, "wasserstein_sliced: n_proj must be >= 1");
  require(a.dim() == b.dim(), "wasserstein_sliced: dimension mismatch");
  const GaussianStream stream(seed);
  double acc = 0.0;
  for (int k = 0; k < n_proj; ++k) {
    const Vector theta = stream.unit_vector(static_cast<std::uint64_t>(k), a.dim());
    const Vector pa = a.points * theta;
    const Vector pb = b.points * theta;
    acc += wasserstein_1d(pa, a.weights, pb, b.weights, p);
  }
  return acc / n_proj;
}

Vector silverman_bandwidth(const EmpiricalMeasure& a) {
  const int n = a.size(), d = a.dim();
  Vector h(d);
  for (int k = 0; k < d; ++k) {
    const double mean = a.points.col(k).dot(a.weights);
    const double var = (a.points.col(k).array() - mean).square().matrix().dot(a.weights);
    const double sd = std::sqrt(std::max(var, 1e-300));
    h[k] = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
  }
  return h;
}

GridDensity kde_on_grid(const EmpiricalMeasure& a, const GridDensity& geom,
                        const Vector& bandwidth) {
  require(a.dim() == geom.d, "kde_on_grid: dimension mismatch");
  require((bandwidth.array() > 0.0).all(), "kde_on_grid: bandwidth must be positive");
  GridDensity out = geom;
  out.values.setZero();
  const double inv_sqrt_2pi = 0.3989422804014327;
  Vector k0(geom.cells0), k1(geom.cells1);
  for (int s = 0; s < a.size(); ++s) {
    for (int i = 0; i < geom.cells0; ++i) {
      const double t = (geom.center(0, i) - a.points(s, 0)) / bandwidth[0];
      k0[i] = std::exp(-0.5 * t * t) * inv_sqrt_2pi / bandwidth[0];
    }
    if (geom.d == 2) {
      for (int j = 0; j < geom.cells1; ++j) {
        const double t = (geom.center(1, j) - a.points(s, 1)) / bandwidth[1];
        k1[j] = std::exp(-0.5 * t * t) * inv_sqrt_2pi / bandwidth[1];
      }
      out.values.noalias() += a.weights[s] * (k0 * k1.transpose());
    } else {
      out.values.col(0) += a.weights[s] * k0;
    }
  }
  return out;  // not renormalized: these are true KDE density values
}

double kde_l2_error(const EmpiricalMeasure& a, const GridDensity& truth, const Vector& bandwidth) {
  truth.validate();
  const GridDensity kde = kde_on_grid(a, truth, bandwidth);
  return std::sqrt((kde.values - truth.values).array().square().sum() * truth.cell_volume());
}

double kde_l2_error(const EmpiricalMeasure& a, const GridDensity& truth, double bandwidth) {
  return kde_l2_error(a, truth, Vector::Constant(truth.d, bandwidth));
}

namespace {
Matrix histogram_mass(const EmpiricalMeasure& a, const GridDensity& geom) {
  Matrix mass = Matrix::Zero(geom.cells0, geom.cells1);
  for (int s = 0; s < a.size(); ++s) {
    int i = static_cast<int>((a.points(s, 0) - geom.lo[0]) / (geom.hi[0] - geom.lo[0]) *
                             geom.cells0);
    i = std::clamp(i, 0, geom.cells0 - 1);
    int j = 0;
    if (geom.d == 2) {
      j = static_cast<int>((a.points(s, 1) - geom.lo[1]) / (geom.hi[1] - geom.lo[1]) * geom.cells1);
      j = std::clamp(j, 0, geom.cells1 - 1);
    }
    mass(i, j) += a.weights[s];
  }
  return mass;
}
}  // namespace

double tv_on_grid(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const GridDensity& geom) {
  require(geom.d == a.dim() && geom.d == b.dim(), "tv_on_grid: dimension mismatch");
  return 0.5 * (histogram_mass(a, geom) - histogram_mass(b, geom)).cwiseAbs().sum();
}

double tv_on_grid(const EmpiricalMeasure& a, const GridDensity& truth) {
  require(truth.d == a.dim(), "tv_on_grid: dimension mismatch");
  truth.validate();
  const Matrix mass_b = truth.values * truth.cell_volume();
  return 0.5 * (histogram_mass(a, truth) - mass_b).cwiseAbs().sum();
}

double drift_l2_mismatch(const std::function<Vector(const Vector&)>& b1,
                         const std::function<Vector(const Vector&)>& b2,
                         const EmpiricalMeasure& mu) {
  double acc = 0.0;
  for (int s = 0; s < mu.size(); ++s) {
    const Vector x = mu.points.row(s).transpose();
    const Vector d1 = b1(x), d2 = b2(x);
    require(d1.allFinite() && d2.allFinite(), "drift_l2_mismatch: drift not finite on support");
    acc += mu.weights[s] * (d1 - d2).squaredNorm();
  }
  return std::sqrt(acc);
}

double batch_means_se(const Vector& series, int n_batches) {
  const int n = static_cast<int>(series.size());
  require(n_batches >= 2 && n >= n_batches, "batch_means_se: bad batch count");
  const int len = n / n_batches;
  Vector means(n_batches);
  for (int b = 0; b < n_batches; ++b) means[b] = series.segment(b * len, len).mean();
  const double grand = means.mean();
  const double var = (means.array() - grand).square().sum() / (n_batches - 1);
  return std::sqrt(var / n_batches);
}

}  // namespace lpl
