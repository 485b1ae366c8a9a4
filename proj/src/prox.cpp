#include "lpl/prox.hpp"

#include <cmath>
#include <limits>

namespace lpl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

inline Eigen::Map<const Matrix> as_image(const Vector& v, int rows, int cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}
}  // namespace

Vector prox_quadratic(double alpha, double gamma, const Vector& x) {
  require(alpha > 0.0 && gamma > 0.0, "prox_quadratic: alpha, gamma must be positive");
  return x / (1.0 + gamma * alpha);
}

Vector prox_l1(double weight, double gamma, const Vector& x) {
  require(weight > 0.0 && gamma > 0.0, "prox_l1: weight, gamma must be positive");
  const double t = gamma * weight;
  Vector out(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]) - t;
    out[i] = mag > 0.0 ? (x[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

Vector prox_box_indicator(const Vector& lo, const Vector& hi, double gamma, const Vector& x) {
  require(gamma > 0.0, "prox_box_indicator: gamma must be positive");
  require(lo.size() == x.size() && hi.size() == x.size(), "prox_box_indicator: size mismatch");
  require((lo.array() <= hi.array()).all(), "prox_box_indicator: lo > hi in some coordinate");
  return x.cwiseMax(lo).cwiseMin(hi);
}

double tv_isotropic(const Matrix& u) {
  const int r = static_cast<int>(u.rows());
  const int c = static_cast<int>(u.cols());
  double tv = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      const double dx = (i + 1 < r) ? u(i + 1, j) - u(i, j) : 0.0;
      const double dy = (j + 1 < c) ? u(i, j + 1) - u(i, j) : 0.0;
      tv += std::sqrt(dx * dx + dy * dy);
    }
  return tv;
}

Matrix prox_tv2d(double lam, double gamma, const Matrix& image, int inner_iters) {
  require(lam > 0.0 && gamma > 0.0, "prox_tv2d: lam, gamma must be positive");
  require(inner_iters >= 1, "prox_tv2d: inner_iters must be >= 1");
  require(image.allFinite(), "prox_tv2d: non-finite pixels");
  const int r = static_cast<int>(image.rows());
  const int c = static_cast<int>(image.cols());
  const double w = lam * gamma;  // solves min_u ||x-u||^2/2 + w TV(u)
  const double tau = 0.125;      // classical contraction bound for the 2D gradient

  Matrix p1 = Matrix::Zero(r, c), p2 = Matrix::Zero(r, c);
  Matrix div(r, c), g1(r, c), g2(r, c);
  for (int it = 0; it < inner_iters; ++it) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        double v = 0.0;
        if (i + 1 < r) v += p1(i, j);
        if (i > 0) v -= p1(i - 1, j);
        if (j + 1 < c) v += p2(i, j);
        if (j > 0) v -= p2(i, j - 1);
        div(i, j) = v;
      }
    // s = div p - x / w; dual ascent step on grad s
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        const double s = div(i, j) - image(i, j) / w;
        const double si1 = (i + 1 < r) ? div(i + 1, j) - image(i + 1, j) / w : s;
        const double sj1 = (j + 1 < c) ? div(i, j + 1) - image(i, j + 1) / w : s;
        g1(i, j) = (i + 1 < r) ? si1 - s : 0.0;
        g2(i, j) = (j + 1 < c) ? sj1 - s : 0.0;
      }
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        const double mag = std::sqrt(g1(i, j) * g1(i, j) + g2(i, j) * g2(i, j));
        const double denom = 1.0 + tau * mag;
        p1(i, j) = (p1(i, j) + tau * g1(i, j)) / denom;
        p2(i, j) = (p2(i, j) + tau * g2(i, j)) / denom;
      }
  }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      double v = 0.0;
      if (i + 1 < r) v += p1(i, j);
      if (i > 0) v -= p1(i - 1, j);
      if (j + 1 < c) v += p2(i, j);
      if (j > 0) v -= p2(i, j - 1);
      div(i, j) = v;
    }
  Matrix out = image - w * div;
  // dual iterates can only improve the objective; guard the contract exactly
  const double e_out = (image - out).squaredNorm() / (2.0 * gamma) + lam * tv_isotropic(out);
  const double e_in = lam * tv_isotropic(image);
  if (e_out > e_in) return image;
  return out;
}

double newton_prox_1d(const std::function<double(double)>& dg,
                      const std::function<double(double)>& ddg, double gamma, double x) {
  const auto h = [&](double y) { return (y - x) / gamma + dg(y); };
  // expand a bracket around x; h is strictly increasing
  double step = gamma * (std::abs(dg(x)) + 1.0) + 1.0;
  double a = x - step, b = x + step;
  for (int i = 0; i < 200 && !(h(a) <= 0.0 && h(b) >= 0.0); ++i) {
    step *= 2.0;
    a = x - step;
    b = x + step;
  }
  require(h(a) <= 0.0 && h(b) >= 0.0, "newton_prox_1d: failed to bracket the prox point");
  double y = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double hy = h(y);
    if (hy > 0.0)
      b = y;
    else
      a = y;
    const double hp = 1.0 / gamma + ddg(y);
    double ynext = (hp > 0.0) ? y - hy / hp : 0.5 * (a + b);
    if (!(ynext > a && ynext < b)) ynext = 0.5 * (a + b);
    if (std::abs(ynext - y) <= 1e-16 * (1.0 + std::abs(y))) {
      y = ynext;
      break;
    }
    y = ynext;
  }
  return y;
}

ProxRegularizer zero_regularizer(int dim) {
  ProxRegularizer g;
  g.dim = dim;
  g.name = "zero";
  g.value = [](const Vector&) { return 0.0; };
  g.prox = [](double, const Vector& x) { return x; };
  g.weak_convexity = 0.0;
  g.lipschitz_on_prox_image = 0.0;
  g.grad = [dim](const Vector&) { return Vector::Zero(dim).eval(); };
  return g;
}

ProxRegularizer quadratic_regularizer(int dim, double alpha) {
  require(alpha > 0.0, "quadratic_regularizer: alpha must be positive");
  ProxRegularizer g;
  g.dim = dim;
  g.name = "quadratic";
  g.value = [alpha](const Vector& x) { return 0.5 * alpha * x.squaredNorm(); };
  g.prox = [alpha](double gamma, const Vector& x) { return prox_quadratic(alpha, gamma, x); };
  g.weak_convexity = 0.0;
  g.grad = [alpha](const Vector& x) { return (alpha * x).eval(); };
  return g;
}

ProxRegularizer l1_regularizer(int dim, double weight) {
  require(weight > 0.0, "l1_regularizer: weight must be positive");
  ProxRegularizer g;
  g.dim = dim;
  g.name = "l1";
  g.value = [weight](const Vector& x) { return weight * x.lpNorm<1>(); };
  g.prox = [weight](double gamma, const Vector& x) { return prox_l1(weight, gamma, x); };
  g.weak_convexity = 0.0;
  g.lipschitz_on_prox_image = weight;
  return g;
}

ProxRegularizer box_indicator_regularizer(const Vector& lo, const Vector& hi) {
  require(lo.size() == hi.size(), "box_indicator_regularizer: size mismatch");
  require((lo.array() <= hi.array()).all(), "box_indicator_regularizer: lo > hi");
  ProxRegularizer g;
  g.dim = static_cast<int>(lo.size());
  g.name = "box_indicator";
  g.value = [lo, hi](const Vector& x) {
    const bool inside = (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    return inside ? 0.0 : kInf;
  };
  g.prox = [lo, hi](double gamma, const Vector& x) { return prox_box_indicator(lo, hi, gamma, x); };
  g.weak_convexity = 0.0;
  return g;
}

ProxRegularizer double_well_regularizer(double c) {
  require(c > 0.0, "double_well_regularizer: c must be positive");
  ProxRegularizer g;
  g.dim = 1;
  g.name = "double_well";
  g.value = [c](const Vector& x) {
    const double t = x[0] * x[0] - 1.0;
    return c * t * t;
  };
  const auto dg = [c](double y) { return 4.0 * c * y * (y * y - 1.0); };
  const auto ddg = [c](double y) { return c * (12.0 * y * y - 4.0); };
  g.prox = [dg, ddg](double gamma, const Vector& x) {
    Vector out(1);
    out[0] = newton_prox_1d(dg, ddg, gamma, x[0]);
    return out;
  };
  g.weak_convexity = 8.0 * c;
  g.grad = [dg](const Vector& x) {
    Vector out(1);
    out[0] = dg(x[0]);
    return out;
  };
  return g;
}

ProxRegularizer cosine_regularizer(double a) {
  require(a > 0.0, "cosine_regularizer: a must be positive");
  ProxRegularizer g;
  g.dim = 1;
  g.name = "cosine";
  g.value = [a](const Vector& x) { return a * std::cos(x[0]); };
  const auto dg = [a](double y) { return -a * std::sin(y); };
  const auto ddg = [a](double y) { return -a * std::cos(y); };
  g.prox = [dg, ddg](double gamma, const Vector& x) {
    Vector out(1);
    out[0] = newton_prox_1d(dg, ddg, gamma, x[0]);
    return out;
  };
  g.weak_convexity = a;
  g.lipschitz_on_prox_image = a;
  g.grad = [dg](const Vector& x) {
    Vector out(1);
    out[0] = dg(x[0]);
    return out;
  };
  return g;
}

ProxRegularizer tv2d_regularizer(int rows, int cols, double lam, int inner_iters) {
  require(rows >= 1 && cols >= 1, "tv2d_regularizer: bad image shape");
  ProxRegularizer g;
  g.dim = rows * cols;
  g.name = "tv2d";
  g.value = [rows, cols, lam](const Vector& x) {
    return lam * tv_isotropic(as_image(x, rows, cols));
  };
  g.prox = [rows, cols, lam, inner_iters](double gamma, const Vector& x) {
    const Matrix out = prox_tv2d(lam, gamma, as_image(x, rows, cols), inner_iters);
    return Vector(Eigen::Map<const Vector>(out.data(), out.size()));
  };
  g.weak_convexity = 0.0;
  return g;
}

Vector prox_bruteforce_oracle(const std::function<double(const Vector&)>& g_value, double gamma,
                              const Vector& x, const Vector& lo, const Vector& hi,
                              double resolution) {
  const int d = static_cast<int>(x.size());
  require(d >= 1 && d <= 2, "prox_bruteforce_oracle: only d <= 2 supported");
  require(lo.size() == d && hi.size() == d, "prox_bruteforce_oracle: box size mismatch");
  require((lo.array() < hi.array()).all(), "prox_bruteforce_oracle: empty box");
  require(resolution > 0.0 && gamma > 0.0, "prox_bruteforce_oracle: bad resolution/gamma");

  const auto objective = [&](const Vector& y) {
    return (x - y).squaredNorm() / (2.0 * gamma) + g_value(y);
  };
  const auto scan = [&](const Vector& a, const Vector& b, double step, Vector& best,
                        double& best_val) {
    Vector y(d);
    const int n0 = static_cast<int>(std::floor((b[0] - a[0]) / step)) + 1;
    const int n1 = d == 2 ? static_cast<int>(std::floor((b[1] - a[1]) / step)) + 1 : 1;
    for (int i = 0; i < n0; ++i) {
      y[0] = std::min(a[0] + i * step, b[0]);
      for (int j = 0; j < n1; ++j) {
        if (d == 2) y[1] = std::min(a[1] + j * step, b[1]);
        const double v = objective(y);
        if (v < best_val) {
          best_val = v;
          best = y;
        }
      }
    }
  };

  Vector best = lo;
  double best_val = kInf;
  double step = resolution;
  scan(lo, hi, step, best, best_val);
  for (int round = 0; round < 3; ++round) {
    for (int i = 0; i < d; ++i)
      require(best[i] > lo[i] + 0.51 * step && best[i] < hi[i] - 0.51 * step,
              "prox_bruteforce_oracle: box too small (minimizer on boundary)");
    const Vector a = (best.array() - step).max(lo.array());
    const Vector b = (best.array() + step).min(hi.array());
    step /= 10.0;
    scan(a, b, step, best, best_val);
  }
  for (int i = 0; i < d; ++i)
    require(best[i] > lo[i] + 0.51 * step && best[i] < hi[i] - 0.51 * step,
            "prox_bruteforce_oracle: box too small (minimizer on boundary)");
  return best;
}

double prox_fixed_point_check(const ProxRegularizer& g, double gamma, const Vector& x) {
  require(static_cast<bool>(g.grad), "prox_fixed_point_check: g has no gradient");
  const Vector shifted = x + gamma * g.grad(x);
  return (g.prox_at(gamma, shifted) - x).norm();
}

}  // namespace lpl
