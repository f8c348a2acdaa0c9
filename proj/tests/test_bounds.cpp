#include <doctest.h>

#include <cmath>
#include <limits>

#include "kwp/bounds.hpp"
#include "kwp/quadrature.hpp"

using namespace kwp;

namespace {

// Independent oracle: K_nu(x) = \int_0^inf e^{-x cosh t} cosh(nu t) dt.
double bessel_k_oracle(int nu, double x) {
  double t_max = 1.0;
  while (x * std::cosh(t_max) - std::abs(nu) * t_max < 745.0 && t_max < 50.0)
    t_max += 1.0;
  auto f = [nu, x](double t) {
    return std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
  };
  return integrate_adaptive(f, 0.0, t_max, 1e-14).value;
}

}  // namespace

TEST_CASE("heat kernel lower bound formula") {
  // frozen from independent evaluation of the displayed formula
  CHECK(heat_kernel_lower_bound(1, 1.0, 0.0) ==
        doctest::Approx(std::exp(-0.25) / (2.0 * M_PI)).epsilon(1e-14));
  CHECK(heat_kernel_lower_bound(2, 1.0, 1.0) ==
        doctest::Approx(std::exp(-1.0) * std::exp(-0.75) /
                        std::pow(2.0 * M_PI, 2))
            .epsilon(1e-14));
}

TEST_CASE("heat kernel bound monotone decreasing in r") {
  double prev = std::numeric_limits<double>::max();
  for (double r = 0.0; r <= 5.0; r += 0.25) {
    const double q = heat_kernel_lower_bound(1, 1.0, r);
    CHECK(q > 0.0);
    CHECK(q < prev);
    prev = q;
  }
}

TEST_CASE("heat kernel bound domain errors") {
  CHECK_THROWS_AS(heat_kernel_lower_bound(1, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(heat_kernel_lower_bound(1, -1.0, 1.0), std::domain_error);
}

TEST_CASE("modified bessel k against oracle") {
  CHECK(modified_bessel_k(0, 1.0) ==
        doctest::Approx(0.42102443824070834).epsilon(1e-12));
  for (int nu : {0, 1, 2}) {
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
      CHECK(modified_bessel_k(nu, x) ==
            doctest::Approx(bessel_k_oracle(nu, x)).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(modified_bessel_k(0, 0.0), std::domain_error);
  CHECK_THROWS_AS(modified_bessel_k(0, -2.0), std::domain_error);
}

TEST_CASE("modified bessel k asymptotics and ordering") {
  const double x = 50.0;
  const double ratio =
      modified_bessel_k(0, x) * std::exp(x) * std::sqrt(2.0 * x / M_PI);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.0);
  for (double t = 0.25; t <= 8.0; t += 0.25)
    CHECK(modified_bessel_k(1, t) > modified_bessel_k(0, t));
}

TEST_CASE("resolvent lower bound matches K0 closed form at n=1") {
  // P_1(r) = (1/pi) K_0(sqrt(5) r): with a = r^2, b = 5/4 the identity
  // \int_0^inf t^{-1} e^{-a/t - b t} dt = 2 K_0(2 sqrt(a b)) applies.
  for (double r : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double expected = bessel_k_oracle(0, std::sqrt(5.0) * r) / M_PI;
    CHECK(resolvent_lower_bound_value(1, r) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("resolvent lower bound monotone and positive") {
  for (int n : {1, 2, 3}) {
    double prev = std::numeric_limits<double>::max();
    for (double r : {0.1, 0.3, 1.0, 2.0, 5.0, 10.0}) {
      const double p = resolvent_lower_bound_value(n, r);
      CHECK(p > 0.0);
      CHECK(p < prev);
      prev = p;
    }
  }
  // decreasing in n as well
  for (double r : {0.5, 1.0, 2.0}) {
    CHECK(resolvent_lower_bound_value(1, r) >
          resolvent_lower_bound_value(2, r));
    CHECK(resolvent_lower_bound_value(2, r) >
          resolvent_lower_bound_value(3, r));
  }
}

TEST_CASE("resolvent lower bound decays at infinity") {
  CHECK(resolvent_lower_bound_value(1, 50.0) < 1e-10);
}

TEST_CASE("resolvent lower bound diverges at r=0") {
  const auto res = resolvent_lower_bound({.n = 1, .r = 0.0});
  CHECK(std::isinf(res.value));
}

TEST_CASE("resolvent quadrature error bound is reported") {
  BoundParams p;
  p.n = 2;
  p.r = 1.0;
  const auto res = resolvent_lower_bound(p);
  CHECK(res.error_bound <= p.abs_tol);
  CHECK(res.value > 0.0);
}

TEST_CASE("truncation tail bound honored by quadrature") {
  // extending T_max beyond the automatic cut changes nothing above tolerance
  BoundParams p;
  p.n = 1;
  p.r = 0.5;
  const double v1 = resolvent_lower_bound(p).value;
  p.t_max = 200.0;
  const double v2 = resolvent_lower_bound(p).value;
  CHECK(std::abs(v1 - v2) < 2e-10);
}

TEST_CASE("bessel estimate equals quadrature at n=1 and bounds it for n>=2") {
  for (double r = 0.05; r <= 20.0; r *= 2.0) {
    CHECK(bessel_estimate(1, r) ==
          doctest::Approx(resolvent_lower_bound_value(1, r)).epsilon(1e-8));
  }
  for (int n : {1, 2, 3}) {
    for (double r = 0.1; r <= 10.0; r += 0.5) {
      CHECK(resolvent_lower_bound_value(n, r) >= bessel_estimate(n, r) - 1e-8);
    }
  }
}

TEST_CASE("bessel estimate monotone decreasing, r=0 rejected") {
  for (int n : {1, 2, 3}) {
    double prev = std::numeric_limits<double>::max();
    for (double r = 0.1; r <= 5.0; r += 0.1) {
      const double b = bessel_estimate(n, r);
      CHECK(b < prev);
      prev = b;
    }
  }
  CHECK_THROWS_AS(bessel_estimate(2, 0.0), std::domain_error);
}
