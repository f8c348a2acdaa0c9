#include "kwp/ke.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

namespace kwp {

namespace {

double weighted_rms(const Eigen::VectorXd& w, const RealField& r) {
  return std::sqrt((w.array() * r.array().square()).sum() / w.sum());
}

}  // namespace

Eigen::VectorXd omega0_weights(const DiscreteFiber& fiber,
                               const BackgroundData& bg) {
  // vertex-sampled lumped mass: flat cell area times the omega0 density at
  // the representative position
  return fiber.flat_weights.array() * bg.omega0_density.array();
}

BackgroundData make_background(const DiscreteFiber& fiber, const RealField& h,
                               double epsilon) {
  const int n = fiber.num_dofs();
  if (h.size() != n)
    throw std::invalid_argument("make_background: field size mismatch");

  BackgroundData bg;
  bg.epsilon = epsilon;
  bg.Omega0 =
      fiber.metric_density.array() * (epsilon * h.array()).exp();

  // i del delbar h has chart density -(1/2) M_flat^{-1} K h relative to the
  // non-negative stiffness K
  RealField kh = fiber.stiffness * h;
  RealField ddbar_h = -0.5 * (kh.array() / fiber.flat_weights.array());
  bg.omega0_density = fiber.metric_density + epsilon * ddbar_h;
  for (int i = 0; i < n; ++i) {
    if (!(bg.omega0_density[i] > 0.0)) {
      std::ostringstream msg;
      msg << "make_background: reference metric not positive at vertex " << i
          << " (density " << bg.omega0_density[i] << ")";
      throw std::runtime_error(msg.str());
    }
  }
  bg.F = (bg.Omega0.array() / bg.omega0_density.array()).log();
  return bg;
}

RealField box0_apply(const DiscreteFiber& fiber, const BackgroundData& bg,
                     const RealField& u) {
  Eigen::VectorXd m0 = omega0_weights(fiber, bg);
  RealField ku = fiber.stiffness * u;
  return 0.5 * (ku.array() / m0.array());
}

KESolution solve_ke(const DiscreteFiber& fiber, const BackgroundData& bg,
                    double tol, const RealField* initial_guess, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_ke: tol must be > 0");
  const int n = fiber.num_dofs();
  Eigen::VectorXd m0 = omega0_weights(fiber, bg);

  RealField u = initial_guess ? *initial_guess : RealField::Zero(n);
  if (u.size() != n)
    throw std::invalid_argument("solve_ke: initial guess size mismatch");

  auto residual = [&](const RealField& v) -> RealField {
    RealField box = 0.5 * ((fiber.stiffness * v).array() / m0.array());
    return (1.0 - box.array() - (v.array() + bg.F.array()).exp()).matrix();
  };

  KESolution sol;
  RealField r = residual(u);
  double rnorm = weighted_rms(m0, r);
  sol.residual_history.push_back(rnorm);

  Eigen::SparseMatrix<double> half_k = 0.5 * fiber.stiffness;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  for (int it = 0; it < max_iter && rnorm >= tol; ++it) {
    // Newton system: (K/2 + M0 diag(e^{u+F})) du = M0 r
    Eigen::VectorXd diag =
        m0.array() * (u.array() + bg.F.array()).exp();
    Eigen::SparseMatrix<double> J = half_k;
    for (int i = 0; i < n; ++i) J.coeffRef(i, i) += diag[i];
    solver.compute(J);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("solve_ke: Newton linear solve failed");
    RealField du = solver.solve((m0.array() * r.array()).matrix());

    // backtracking line search on the residual norm
    double step = 1.0;
    RealField u_next;
    double rnorm_next = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      u_next = u + step * du;
      rnorm_next = weighted_rms(m0, residual(u_next));
      if (rnorm_next < rnorm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    u = u_next;
    rnorm = rnorm_next;
    r = residual(u);
    sol.residual_history.push_back(rnorm);
    ++sol.newton_steps;
  }

  if (rnorm >= tol) {
    std::ostringstream msg;
    msg << "solve_ke: Newton did not converge to " << tol << "; residuals:";
    for (double h : sol.residual_history) msg << " " << h;
    throw std::runtime_error(msg.str());
  }
  sol.u = u;
  return sol;
}

std::vector<BoundReport> check_c0_estimate(const DiscreteFiber& fiber,
                                           const BackgroundData& bg,
                                           const RealField& u) {
  RealField box = box0_apply(fiber, bg, u);

  BoundReport pointwise;
  pointwise.name = "c0-pointwise";
  pointwise.check_id = "eq:uplusF";
  // min over vertices of (-box0 u) - (u + F)
  double worst = std::numeric_limits<double>::max();
  int worst_at = 0;
  for (int i = 0; i < u.size(); ++i) {
    const double m = -box[i] - (u[i] + bg.F[i]);
    if (m < worst) {
      worst = m;
      worst_at = i;
    }
  }
  pointwise.lhs = -box[worst_at];
  pointwise.rhs = u[worst_at] + bg.F[worst_at];
  pointwise.margin = worst;
  pointwise.slack_used = 1e-8;
  pointwise.hard = true;
  pointwise.finalize();

  BoundReport sup;
  sup.name = "c0-sup";
  sup.check_id = "eq:uplusF";
  sup.lhs = (-bg.F.array()).maxCoeff();
  sup.rhs = u.maxCoeff();
  sup.margin = sup.lhs - sup.rhs;
  sup.slack_used = 1e-8;
  sup.hard = true;
  sup.finalize();

  return {pointwise, sup};
}

}  // namespace kwp
