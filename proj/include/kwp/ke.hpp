#pragma once

#include <vector>

#include "kwp/fiber.hpp"
#include "kwp/report.hpp"
#include "kwp/spectral.hpp"

namespace kwp {

/// Background volume form and reference metric for the fiberwise
/// Monge-Ampere problem at n=1. All fields live on fiber dofs.
struct BackgroundData {
  Eigen::VectorXd Omega0;         // background volume density, > 0
  Eigen::VectorXd omega0_density;  // reference metric density, > 0
  Eigen::VectorXd F;               // log(Omega0 / omega0_density)
  double epsilon = 0.0;
};

// Omega0 = hyperbolic density * exp(eps*h); omega0 = hyperbolic metric plus
// eps times the i del delbar of h (computed with the flat stiffness, with
// the convention i del delbar u = -box0(u) * omega0).
BackgroundData make_background(const DiscreteFiber& fiber, const RealField& h,
                               double epsilon);

// box0 u = (1/2) M0^{-1} K u, the non-negative Laplacian of omega0 in the
// convention above (M0 = lumped mass of omega0_density, K = cotan stiffness).
RealField box0_apply(const DiscreteFiber& fiber, const BackgroundData& bg,
                     const RealField& u);

// Lumped mass vector for the omega0 metric.
Eigen::VectorXd omega0_weights(const DiscreteFiber& fiber,
                               const BackgroundData& bg);

struct KESolution {
  RealField u;
  std::vector<double> residual_history;  // volume-weighted RMS per iteration
  int newton_steps = 0;
};

// Solves 1 - box0 u = e^{u+F} by damped Newton iteration; the residual is
// the volume-weighted RMS of the pointwise defect.
KESolution solve_ke(const DiscreteFiber& fiber, const BackgroundData& bg,
                    double tol, const RealField* initial_guess = nullptr,
                    int max_iter = 50);

// Verifies u + F <= -box0 u pointwise and sup u <= sup(-F); returns the two
// reports (pointwise margin, sup margin).
std::vector<BoundReport> check_c0_estimate(const DiscreteFiber& fiber,
                                           const BackgroundData& bg,
                                           const RealField& u);

}  // namespace kwp
