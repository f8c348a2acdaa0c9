#include "kwp/bounds.hpp"

#include <cmath>
#include <limits>

#include "kwp/quadrature.hpp"

namespace kwp {

namespace {

// Kronrod 15-point nodes/weights on [-1,1] with embedded Gauss-7.
constexpr double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};
constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};
constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

void gk15(const std::function<double(double)>& f, double a, double b,
          double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sk = 0.0, sg = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * kKronrodNodes[i]);
    sk += kKronrodWeights[i] * fx;
    if (i % 2 == 1) sg += kGaussWeights[i / 2] * fx;
  }
  value = sk * h;
  error = std::abs((sk - sg) * h);
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double tol, int depth, AdaptiveResult& acc) {
  double v, e;
  gk15(f, a, b, v, e);
  // stop on the roundoff floor: the error estimate cannot resolve below
  // ~50 eps relative to the local value
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() *
                       std::abs(v);
  if (e <= std::max(tol, floor) || depth <= 0) {
    acc.value += v;
    acc.error += e;
    if (e > tol) acc.converged = false;
    return;
  }
  const double c = 0.5 * (a + b);
  adapt(f, a, c, 0.5 * tol, depth - 1, acc);
  adapt(f, c, b, 0.5 * tol, depth - 1, acc);
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth) {
  AdaptiveResult acc;
  acc.converged = true;
  adapt(f, a, b, abs_tol, max_depth, acc);
  return acc;
}

double heat_kernel_lower_bound(int n, double t, double r) {
  if (n < 1) throw std::domain_error("heat_kernel_lower_bound: n must be >= 1");
  if (!(t > 0.0)) throw std::domain_error("heat_kernel_lower_bound: t must be > 0");
  if (r < 0.0) throw std::domain_error("heat_kernel_lower_bound: r must be >= 0");
  const double log_q = -n * std::log(2.0 * M_PI * t) - r * r / t -
                       0.25 * (2.0 * n - 1.0) * t;
  return std::exp(log_q);
}

double resolvent_tail_bound(int n, double t_cut) {
  const double c = 1.0 + 0.25 * (2.0 * n - 1.0);
  return std::exp(-c * t_cut) * std::pow(2.0 * M_PI * t_cut, -n) / c;
}

QuadratureResult resolvent_lower_bound(const BoundParams& params) {
  const int n = params.n;
  const double r = params.r;
  if (n < 1) throw std::domain_error("resolvent_lower_bound: n must be >= 1");
  if (r < 0.0) throw std::domain_error("resolvent_lower_bound: r must be >= 0");
  if (r == 0.0) {
    // \int_0^eps t^{-n} dt diverges with no Gaussian damping.
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  const double tol = params.abs_tol;
  const double c = 1.0 + 0.25 * (2.0 * n - 1.0);

  double t_max = params.t_max;
  if (t_max <= 0.0) {
    t_max = 10.0;
    while (resolvent_tail_bound(n, t_max) > 0.25 * tol) t_max += 5.0;
  }

  auto integrand = [n, r, c](double t) {
    return std::exp(-n * std::log(2.0 * M_PI * t) - r * r / t - c * t);
  };

  // Substitution t = e^u tames the t^{-n} factor near 0; the Gaussian
  // factor then decays double-exponentially as u -> -inf.
  double t_min = std::min(1.0, r * r);
  while (t_min > 1e-280 && integrand(t_min) * t_min > 1e-4 * tol) t_min *= 0.5;

  auto g = [&integrand](double u) {
    const double t = std::exp(u);
    return integrand(t) * t;
  };
  AdaptiveResult res =
      integrate_adaptive(g, std::log(t_min), std::log(t_max), 0.5 * tol);

  QuadratureResult out;
  out.value = res.value;
  out.error_bound = res.error + resolvent_tail_bound(n, t_max) +
                    integrand(t_min) * t_min;
  if (!res.converged || out.error_bound > tol) {
    throw QuadratureError("resolvent_lower_bound: tolerance not met",
                          out.error_bound);
  }
  return out;
}

double resolvent_lower_bound_value(int n, double r, double abs_tol) {
  BoundParams p;
  p.n = n;
  p.r = r;
  p.abs_tol = abs_tol;
  return resolvent_lower_bound(p).value;
}

double modified_bessel_k(int order, double x) {
  if (order < 0) order = -order;  // K_{-nu} = K_nu
  if (!(x > 0.0)) throw std::domain_error("modified_bessel_k: x must be > 0");
  return std::cyl_bessel_k(static_cast<double>(order), x);
}

double bessel_estimate(int n, double r) {
  if (n < 1) throw std::domain_error("bessel_estimate: n must be >= 1");
  if (!(r > 0.0)) throw std::domain_error("bessel_estimate: r must be > 0");
  const double k = modified_bessel_k(n - 1, std::sqrt(2.0 * n + 3.0) * r);
  return std::pow(2.0 * M_PI, -n) * std::pow(2.0 * n + 3.0, 0.5 * (n - 1)) /
         std::pow(2.0, n - 2) * std::pow(r, -(n - 1.0)) * k;
}

}  // namespace kwp
