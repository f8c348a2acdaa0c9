#pragma once

#include <cmath>
#include <functional>

namespace kwp {

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth = 40);

}  // namespace kwp
