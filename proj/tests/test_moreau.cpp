#include <doctest.h>

#include <cmath>

#include "common/oracles.hpp"
#include "lpl/moreau.hpp"

using namespace lpl;

namespace {
Vector vec1(double x) {
  Vector v(1);
  v << x;
  return v;
}
}  // namespace

TEST_CASE("moreau value of |.| is the huber function") {
  const MoreauEnvelope env(l1_regularizer(1, 1.0), 1.0);
  CHECK(moreau_value(env, vec1(0.5)) == doctest::Approx(0.125).epsilon(1e-14));  // x^2 / (2 gamma)
  CHECK(moreau_value(env, vec1(3.0)) == doctest::Approx(2.5).epsilon(1e-14));    // |x| - gamma/2
}

TEST_CASE("moreau gradient of |.| is the huber derivative") {
  const MoreauEnvelope env(l1_regularizer(1, 1.0), 1.0);
  CHECK(moreau_grad(env, vec1(0.5))[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(moreau_grad(env, vec1(3.0))[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("moreau value of a nonconvex g matches the oracle grid minimum") {
  const auto dwell = double_well_regularizer(0.25);
  const double gamma = 0.25;
  const MoreauEnvelope env(dwell, gamma);
  const GaussianStream stream(21);
  for (int k = 0; k < 10; ++k) {
    const Vector x = vec1(5.0 * stream.uniform(k) - 2.5);
    const Vector p = prox_bruteforce_oracle(dwell.value, gamma, x, vec1(x[0] - 5.0),
                                            vec1(x[0] + 5.0), 0.001);
    const double oracle_min = (x - p).squaredNorm() / (2.0 * gamma) + dwell.value(p);
    CHECK(moreau_value(env, x) == doctest::Approx(oracle_min).epsilon(1e-6));
  }
}

TEST_CASE("moreau gradient matches finite differences for a nonconvex g") {
  const auto dwell = double_well_regularizer(0.25);
  const MoreauEnvelope env(dwell, 0.25);
  const GaussianStream stream(22);
  for (int k = 0; k < 40; ++k) {
    const Vector x = vec1(6.0 * stream.uniform(k) - 3.0);
    const Vector fd = finite_difference_gradient(
        [&env](const Vector& y) { return moreau_value(env, y); }, x);
    const Vector g = moreau_grad(env, x);
    CHECK((g - fd).norm() / (1.0 + g.norm()) < 1e-5);
  }
}

TEST_CASE("moreau envelope never exceeds g and decreases in gamma") {
  const auto l1 = l1_regularizer(2, 1.0);
  const GaussianStream stream(23);
  for (int k = 0; k < 30; ++k) {
    Vector x(2);
    x << 6.0 * stream.uniform(2 * k) - 3.0, 6.0 * stream.uniform(2 * k + 1) - 3.0;
    const double gx = l1.value(x);
    double prev = gx;
    for (double gamma : {0.1, 0.3, 0.9, 2.7}) {
      const double v = moreau_value(MoreauEnvelope(l1, gamma), x);
      CHECK(v <= prev + 1e-13);
      prev = v;
    }
  }
}

TEST_CASE("moreau envelope of an indicator stays finite") {
  Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
  const auto box = box_indicator_regularizer(lo, hi);
  const MoreauEnvelope env(box, 0.5);
  Vector x(2);
  x << 2.0, 0.5;  // distance 1 from the box
  CHECK(moreau_value(env, x) == doctest::Approx(1.0).epsilon(1e-12));  // d^2 / (2 gamma)
  CHECK(std::isfinite(box.value(Vector::Zero(2))));
  CHECK(std::isinf(box.value(x)));
}

TEST_CASE("envelope construction enforces gamma * rho < 1") {
  const auto dwell = double_well_regularizer(0.25);  // rho = 2
  CHECK_THROWS_AS(MoreauEnvelope(dwell, 0.5), ContractViolation);
  CHECK_NOTHROW(MoreauEnvelope(dwell, 0.49));
}

TEST_CASE("shadow drift composes gradient and envelope") {
  SUBCASE("zero regularizer reduces to the plain drift") {
    const ShadowDrift sd{quadratic_potential(2, 2.0), zero_regularizer(2), 0.3};
    Vector y(2);
    y << 1.0, -2.0;
    CHECK((shadow_drift_eval(sd, y) - 2.0 * y).norm() < 1e-15);
  }
  SUBCASE("zero potential reduces to the moreau gradient") {
    const auto l1 = l1_regularizer(2, 1.0);
    const ShadowDrift sd{zero_potential(2), l1, 0.5};
    Vector y(2);
    y << 2.0, -0.2;
    const MoreauEnvelope env(l1, 0.5);
    CHECK((shadow_drift_eval(sd, y) - moreau_grad(env, y)).norm() < 1e-15);
  }
  SUBCASE("quadratic f and g give the hand-composed affine map") {
    // f = (a/2)||x||^2, g = (b/2)||x||^2: prox = y/(1+gamma b),
    // drift = a y/(1+gamma b) + b y/(1+gamma b) = (a+b)/(1+gamma b) y
    const double a = 1.7, b = 0.8, gamma = 0.4;
    const ShadowDrift sd{quadratic_potential(2, a), quadratic_regularizer(2, b), gamma};
    Vector y(2);
    y << -1.1, 2.3;
    const Vector expect = ((a + b) / (1.0 + gamma * b)) * y;
    CHECK((shadow_drift_eval(sd, y) - expect).norm() < 1e-10);
  }
}

TEST_CASE("hessian formula: exact for quadratics, fd for the double well") {
  const double alpha = 1.3, gamma = 0.6;
  const Matrix formula = moreau_hessian_formula(gamma, alpha * Matrix::Identity(3, 3));
  CHECK((formula - (alpha / (1.0 + gamma * alpha)) * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-12);

  const auto dwell = double_well_regularizer(0.25);
  const MoreauEnvelope env(dwell, 0.25);
  for (double x : {-1.8, -0.6, 0.3, 1.4}) {
    const double p = dwell.prox_at(0.25, vec1(x))[0];
    Matrix hg(1, 1);
    hg(0, 0) = 0.25 * (12.0 * p * p - 4.0);
    const double pred = moreau_hessian_formula(0.25, hg)(0, 0);
    const double h = 1e-4;
    const double fd = (moreau_value(env, vec1(x + h)) - 2.0 * moreau_value(env, vec1(x)) +
                       moreau_value(env, vec1(x - h))) /
                      (h * h);
    CHECK(std::abs(pred - fd) < 1e-4);
  }
}

TEST_CASE("lipschitz rate for lipschitz g: 0 <= g - g^gamma <= gamma L^2 / 2") {
  const auto l1 = l1_regularizer(1, 1.0);
  for (double gamma : {0.05, 0.2, 1.0})
    for (double x : {-4.0, -0.3, 0.0, 0.7, 2.5}) {
      const double diff = l1.value(vec1(x)) - moreau_value(MoreauEnvelope(l1, gamma), vec1(x));
      CHECK(diff >= -1e-13);
      CHECK(diff <= gamma * 0.5 + 1e-13);
    }
}
