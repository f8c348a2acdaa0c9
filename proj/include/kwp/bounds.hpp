#pragma once

#include <stdexcept>
#include <string>

namespace kwp {

/// Parameters for the resolvent lower-bound quadrature.
struct BoundParams {
  int n = 1;           // fiber dimension, >= 1
  double r = 1.0;      // geodesic distance, >= 0
  double abs_tol = 1e-10;
  double t_max = 0.0;  // 0 = choose automatically from the tail bound
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;  // estimated absolute error incl. truncation tail
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_tol(achieved) {}
  double achieved_tol;
};

// Q_n(t,r) = (2 pi t)^{-n} exp(-r^2/t) exp(-(2n-1)t/4), valid for t > 0.
double heat_kernel_lower_bound(int n, double t, double r);

// P_n(r) = \int_0^inf e^{-t} Q_n(t,r) dt by adaptive quadrature.
// Diverges for n = 1, r = 0; returns +inf in that case.
QuadratureResult resolvent_lower_bound(const BoundParams& params);

double resolvent_lower_bound_value(int n, double r, double abs_tol = 1e-10);

// Closed form (2pi)^{-n} (2n+3)^{(n-1)/2} / 2^{n-2} r^{-(n-1)} K_{n-1}(sqrt(2n+3) r).
double bessel_estimate(int n, double r);

// Modified Bessel function of the second kind, integer order, x > 0.
double modified_bessel_k(int order, double x);

// Truncation-tail bound |\int_T^inf e^{-t} Q_n| <= e^{-cT} (2 pi T)^{-n} / c,
// where c = 1 + (2n-1)/4.
double resolvent_tail_bound(int n, double t_cut);

}  // namespace kwp
