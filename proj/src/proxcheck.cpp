#include "lpl/proxcheck.hpp"

#include <cmath>
#include <sstream>

#include "lpl/moreau.hpp"
#include "lpl/rng.hpp"

namespace lpl {

namespace {

Vector random_point(const GaussianStream& stream, std::uint64_t& ctr, int d, double scale) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = scale * (2.0 * stream.uniform(ctr++) - 1.0);
  return x;
}

PropertyCheck fixed_point_check_for(const ProxRegularizer& g, double gamma, double bound,
                                    const GaussianStream& stream, std::uint64_t& ctr,
                                    const std::string& label) {
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vector x = random_point(stream, ctr, g.dim, 2.0);
    const double res = prox_fixed_point_check(g, gamma, x) / (1.0 + x.norm());
    worst = std::max(worst, res);
  }
  return {label, worst <= bound, worst, bound, "residual / (1+||x||), 50 probes"};
}

PropertyCheck moreau_grad_fd_check(const ProxRegularizer& g, double gamma,
                                   const GaussianStream& stream, std::uint64_t& ctr,
                                   const std::string& label) {
  const MoreauEnvelope env(g, gamma);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = random_point(stream, ctr, g.dim, 3.0);
    const Vector grad = env.grad(x);
    const Vector fd = finite_difference_gradient([&env](const Vector& y) { return env.value(y); },
                                                 x);
    worst = std::max(worst, (grad - fd).norm() / (1.0 + grad.norm()));
  }
  return {label, worst <= 1e-5, worst, 1e-5, "relative error vs central differences, 100 probes"};
}

PropertyCheck lipschitz_check(const ProxRegularizer& g, double gamma, const GaussianStream& stream,
                              std::uint64_t& ctr, const std::string& label) {
  const double bound = 1.0 / (1.0 - gamma * g.weak_convexity);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vector x = random_point(stream, ctr, g.dim, 3.0);
    const Vector y = random_point(stream, ctr, g.dim, 3.0);
    const double dx = (x - y).norm();
    if (dx < 1e-12) continue;
    const double dp = (g.prox_at(gamma, x) - g.prox_at(gamma, y)).norm();
    worst = std::max(worst, (dp - bound * dx));
  }
  return {label, worst <= 1e-8, worst, 1e-8,
          "||dprox|| - ||dx||/(1-gamma rho) over 1000 pairs"};
}

}  // namespace

std::vector<PropertyCheck> run_prox_property_suite(std::uint64_t seed) {
  std::vector<PropertyCheck> out;
  const GaussianStream stream(seed);
  std::uint64_t ctr = 0;

  const auto quad1 = quadratic_regularizer(1, 1.0);
  const auto quad2 = quadratic_regularizer(2, 0.7);
  const auto l1_1 = l1_regularizer(1, 1.0);
  const auto l1_3 = l1_regularizer(3, 1.0);
  const auto dwell = double_well_regularizer(0.25);  // rho = 2
  const auto cosg = cosine_regularizer(1.0);         // rho = L_g = 1
  Vector blo(2), bhi(2);
  blo << -0.5, -0.5;
  bhi << 1.0, 1.5;
  const auto box = box_indicator_regularizer(blo, bhi);
  const auto tv = tv2d_regularizer(4, 4, 1.0, 200);

  // fixed point: prox(gamma, x + gamma g'(x)) == x for differentiable g
  out.push_back(fixed_point_check_for(quad2, 0.8, 1e-10, stream, ctr, "fixed_point_quadratic"));
  out.push_back(fixed_point_check_for(dwell, 0.25, 1e-6, stream, ctr, "fixed_point_double_well"));
  out.push_back(fixed_point_check_for(cosg, 0.5, 1e-6, stream, ctr, "fixed_point_cosine"));

  // gradient identity (x - prox)/gamma vs finite differences of the value
  out.push_back(moreau_grad_fd_check(l1_1, 1.0, stream, ctr, "moreau_grad_fd_l1_1d"));
  out.push_back(moreau_grad_fd_check(l1_3, 0.5, stream, ctr, "moreau_grad_fd_l1_3d"));
  out.push_back(moreau_grad_fd_check(quad2, 0.8, stream, ctr, "moreau_grad_fd_quadratic_2d"));
  out.push_back(moreau_grad_fd_check(dwell, 0.25, stream, ctr, "moreau_grad_fd_double_well"));
  out.push_back(moreau_grad_fd_check(box, 0.7, stream, ctr, "moreau_grad_fd_box_2d"));

  // prox is 1/(1 - gamma rho) Lipschitz
  out.push_back(lipschitz_check(quad2, 0.8, stream, ctr, "prox_lipschitz_quadratic"));
  out.push_back(lipschitz_check(l1_3, 0.8, stream, ctr, "prox_lipschitz_l1"));
  out.push_back(lipschitz_check(box, 0.8, stream, ctr, "prox_lipschitz_box"));
  out.push_back(lipschitz_check(dwell, 0.25, stream, ctr, "prox_lipschitz_double_well"));
  out.push_back(lipschitz_check(cosg, 0.5, stream, ctr, "prox_lipschitz_cosine"));
  out.push_back(lipschitz_check(tv, 0.5, stream, ctr, "prox_lipschitz_tv2d"));

  // envelope monotone in gamma and squeezed below g
  {
    double worst = 0.0;
    for (const auto* g : {&l1_1, &dwell, &cosg}) {
      for (int k = 0; k < 40; ++k) {
        const Vector x = random_point(stream, ctr, g->dim, 3.0);
        const double gx = g->value(x);
        double prev = gx;
        for (double gamma : {0.05, 0.1, 0.2, 0.4}) {
          if (gamma * g->weak_convexity >= 1.0) continue;
          const double v = MoreauEnvelope(*g, gamma).value(x);
          worst = std::max(worst, v - prev);  // must be <= previous (decreasing in gamma)
          prev = v;
        }
      }
    }
    out.push_back({"moreau_monotone_in_gamma", worst <= 1e-12, worst, 1e-12,
                   "max increase along gamma grid, 40 probes x 3 regularizers"});
  }

  // gamma -> 0 approximation: |g^gamma - g| decreasing to 0 on continuous g.
  // The gap decays linearly in gamma, so 4 decades of gamma must shed at
  // least 3 decades of gap.
  {
    double worst_ratio = 0.0, worst_increase = 0.0;
    for (const auto* g : {&l1_1, &dwell, &cosg, &quad1}) {
      for (int k = 0; k < 25; ++k) {
        const Vector x = random_point(stream, ctr, g->dim, 3.0);
        const double gx = g->value(x);
        double prev = std::numeric_limits<double>::infinity();
        double first = 0.0, last = 0.0;
        bool got_first = false;
        for (double gamma : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
          if (gamma * g->weak_convexity >= 1.0) continue;
          const double diff = std::abs(MoreauEnvelope(*g, gamma).value(x) - gx);
          worst_increase = std::max(worst_increase, diff - prev);
          prev = diff;
          last = diff;
          if (!got_first) {
            first = diff;
            got_first = true;
          }
        }
        if (first > 1e-12) worst_ratio = std::max(worst_ratio, last / first);
      }
    }
    const bool pass = worst_increase <= 1e-12 && worst_ratio <= 1e-3;
    std::ostringstream det;
    det << "monotone decrease (max increase " << worst_increase << "), final/first gap ratio "
        << worst_ratio;
    out.push_back({"moreau_gamma_to_zero", pass, worst_ratio, 1e-3, det.str()});
  }

  // Lipschitz-g rate: 0 <= g - g^gamma <= gamma L^2 / 2, per coordinate of l1
  {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Vector x = random_point(stream, ctr, 1, 4.0);
      for (double gamma : {0.05, 0.2, 0.8}) {
        const double diff = l1_1.value(x) - MoreauEnvelope(l1_1, gamma).value(x);
        worst = std::max(worst, std::max(-diff, diff - gamma * 0.5));
      }
    }
    out.push_back({"lipschitz_rate_l1", worst <= 1e-12, worst, 1e-12,
                   "0 <= g - g^gamma <= gamma L^2/2 with L = 1"});
  }

  // smoothness transfer: spectrum of the envelope Hessian within [-2Lg, Lg]
  {
    const double a = 1.0, gamma = 0.5;  // gamma = 1/(2 Lg)
    const MoreauEnvelope env(cosg, gamma);
    double lo = 0.0, hi = 0.0;
    for (double x = -6.0; x <= 6.0; x += 0.05) {
      const double h = 1e-4;
      Vector xm(1), x0(1), xp(1);
      xm[0] = x - h;
      x0[0] = x;
      xp[0] = x + h;
      const double dd = (env.value(xp) - 2.0 * env.value(x0) + env.value(xm)) / (h * h);
      lo = std::min(lo, dd);
      hi = std::max(hi, dd);
    }
    const bool pass = lo >= -2.0 * a - 1e-3 && hi <= a + 1e-3;
    std::ostringstream det;
    det << "fd second derivative in [" << lo << ", " << hi << "]";
    out.push_back({"smoothness_transfer_cosine", pass, std::max(-lo - 2.0 * a, hi - a), 1e-3,
                   det.str()});
  }

  // Hessian formula, exact for quadratic g
  {
    const double alpha = 0.7, gamma = 0.8;
    const Matrix hess = alpha * Matrix::Identity(2, 2);
    const Matrix formula = moreau_hessian_formula(gamma, hess);
    const Matrix analytic = (alpha / (1.0 + gamma * alpha)) * Matrix::Identity(2, 2);
    const double err = (formula - analytic).cwiseAbs().maxCoeff();
    out.push_back({"hessian_formula_quadratic", err <= 1e-10, err, 1e-10,
                   "(1/g)(I-(I+g a I)^{-1}) vs a/(1+g a) I"});
  }

  // Hessian formula vs finite differences for smooth nonconvex g
  {
    const double gamma = 0.25, c = 0.25;
    const MoreauEnvelope env(dwell, gamma);
    double worst = 0.0;
    for (double x : {-1.7, -0.9, -0.3, 0.4, 1.1, 2.2}) {
      Vector xv(1);
      xv[0] = x;
      const double p = dwell.prox_at(gamma, xv)[0];
      Matrix hg(1, 1);
      hg(0, 0) = c * (12.0 * p * p - 4.0);
      const double formula = moreau_hessian_formula(gamma, hg)(0, 0);
      const double h = 1e-4;
      Vector xm(1), xp(1);
      xm[0] = x - h;
      xp[0] = x + h;
      const double fd = (env.value(xp) - 2.0 * env.value(xv) + env.value(xm)) / (h * h);
      worst = std::max(worst, std::abs(formula - fd));
    }
    out.push_back({"hessian_formula_double_well_fd", worst <= 1e-4, worst, 1e-4,
                   "formula vs fd second derivative"});
  }

  // weak-convexity transfer: envelope curvature >= -rho/(1 - gamma rho)
  {
    const double gamma = 0.25, rho = dwell.weak_convexity;
    const MoreauEnvelope env(dwell, gamma);
    const double floor = -rho / (1.0 - gamma * rho) - 1e-3;
    double lo = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.02) {
      const double h = 1e-4;
      Vector xm(1), x0(1), xp(1);
      xm[0] = x - h;
      x0[0] = x;
      xp[0] = x + h;
      lo = std::min(lo, (env.value(xp) - 2.0 * env.value(x0) + env.value(xm)) / (h * h));
    }
    out.push_back({"weak_convexity_transfer_double_well", lo >= floor, lo, floor,
                   "min fd curvature of the envelope on [-3, 3]"});
  }

  // strong convexity at infinity of the envelope, checked on the
  // quadratic-tail instances (certifying it for general g is out of reach)
  {
    const double gamma = 0.25;
    const MoreauEnvelope env(dwell, gamma);
    double lo = std::numeric_limits<double>::infinity();
    for (double s : {-1.0, 1.0})
      for (double x = 3.0; x <= 6.0; x += 0.25) {
        const double h = 1e-4;
        Vector xm(1), x0(1), xp(1);
        xm[0] = s * x - h;
        x0[0] = s * x;
        xp[0] = s * x + h;
        lo = std::min(lo, (env.value(xp) - 2.0 * env.value(x0) + env.value(xm)) / (h * h));
      }
    const double alpha = 0.7;
    const double quad_mu = alpha / (1.0 + 0.8 * alpha);  // exact, radius-free
    const bool pass = lo >= 1.0 && quad_mu > 0.0;
    std::ostringstream det;
    det << "double-well envelope curvature >= " << lo << " outside |x| < 3; quadratic envelope "
        << quad_mu << "-strongly convex";
    out.push_back({"strong_convexity_at_infinity", pass, lo, 1.0, det.str()});
  }

  // analytic proxes agree with the brute-force oracle
  {
    double worst = 0.0;
    for (int k = 0; k < 25; ++k) {
      Vector x1 = random_point(stream, ctr, 1, 2.5);
      Vector lo1 = Vector::Constant(1, x1[0] - 4.0), hi1 = Vector::Constant(1, x1[0] + 4.0);
      const Vector o_quad = prox_bruteforce_oracle(quad1.value, 0.9, x1, lo1, hi1, 0.01);
      worst = std::max(worst, (o_quad - quad1.prox_at(0.9, x1)).norm());
      const Vector o_l1 = prox_bruteforce_oracle(l1_1.value, 0.9, x1, lo1, hi1, 0.01);
      worst = std::max(worst, (o_l1 - l1_1.prox_at(0.9, x1)).norm());
      const Vector o_dw = prox_bruteforce_oracle(dwell.value, 0.25, x1, lo1, hi1, 0.01);
      worst = std::max(worst, (o_dw - dwell.prox_at(0.25, x1)).norm());
    }
    out.push_back({"oracle_agreement_1d", worst <= 1e-4, worst, 1e-4,
                   "analytic prox vs grid oracle, 25 probes x 3 regularizers"});
  }

  return out;
}

bool all_pass(const std::vector<PropertyCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string format_check_table(const std::vector<PropertyCheck>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
    for (std::size_t i = c.name.size(); i < 40; ++i) os << ' ';
    os << " measured " << c.measured << "  bound " << c.bound << "  (" << c.detail << ")\n";
  }
  return os.str();
}

}  // namespace lpl
