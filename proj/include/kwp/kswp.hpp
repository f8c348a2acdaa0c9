#pragma once

#include <vector>

#include "kwp/bounds.hpp"
#include "kwp/fiber.hpp"
#include "kwp/report.hpp"
#include "kwp/spectral.hpp"

namespace kwp {

/// Kodaira-Spencer tensor at n=1: one complex coefficient field per dof.
struct KSForm {
  Field a;

  RealField pointwise_norm_sq() const { return a.cwiseAbs2(); }
};

// phi = (box + 1)^{-1} chi for non-negative chi; the solution is the
// geodesic-curvature function when chi = |A|^2.
RealField solve_phi(const SpectralDecomposition& spec, const RealField& chi);

// Checks min phi >= P_1(diameter) * \int chi g dV (positive lower bound for
// the geodesic-curvature function). Pass diameter <= 0 to compute it.
BoundReport check_phi_bound(const RealField& phi, const RealField& chi,
                            const DiscreteFiber& fiber, double fiber_diameter,
                            double slack = 1e-6);

// L2 inner product of KS forms under the hyperbolic volume; Hermitian.
Complex wp_inner_product(const DiscreteFiber& fiber, const KSForm& ai,
                         const KSForm& aj);

/// Metric data of a holomorphic family in one base direction: base-base
/// entry, mixed row, and the fiberwise Hermitian block.
struct BorderedMetric {
  double g_ss = 1.0;
  Eigen::VectorXcd g_sb;  // g_{s beta-bar}, length n
  Eigen::MatrixXcd g_ab;  // g_{alpha beta-bar}, Hermitian positive definite
};

struct BorderedResult {
  BoundReport report;   // determinant identity
  double phi = 0.0;     // Schur complement g_ss - g_sb g_ab^{-1} g_sb^*
  Eigen::VectorXcd horizontal_lift;  // a_s^alpha = -g^{beta-bar alpha} g_{s beta-bar}
};

// Verifies det [[g_ss, g_sb],[g_sb^*, g_ab]] = phi * det(g_ab) and returns
// the horizontal-lift coefficients.
BorderedResult bordered_determinant_check(const BorderedMetric& bm);

struct QDBasis {
  std::vector<Field> fields;        // holomorphic quadratic differentials, per dof
  Eigen::VectorXd singular_values;  // ascending residual spectrum
  double gap = 0.0;                 // sigma_4 / sigma_3
};

// Least-squares kernel of the discrete delbar operator on (dz)^2-weighted
// fields obeying the side-pairing chart factors; kernel dimension 3 = 3g-3.
QDBasis quadratic_differential_basis(const DiscreteFiber& fiber,
                                     int kernel_dim = 3);

// Harmonic Beltrami representative a = conj(q) / metric density.
KSForm harmonic_beltrami(const DiscreteFiber& fiber, const Field& q);

}  // namespace kwp
