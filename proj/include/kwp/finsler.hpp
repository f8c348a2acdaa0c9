#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kwp/curvature.hpp"
#include "kwp/report.hpp"
#include "kwp/spectral.hpp"

namespace kwp {

// Degree-p Weil-Petersson Finsler functions, grid-based curvature of
// conformal densities, the convex-sum curvature inequality, and the
// Ahlfors-Schwarz comparison checker.

/// |A|_p = |H(A wedge ... wedge A)|^{1/p} on a one-dimensional fiber:
/// the weighted L2 norm for p = 1, and 0 for p > 1 (the wedge vanishes).
double wp_degree_p(const Eigen::VectorXd& weights, const Field& a, int p);

/// Synthetic two-dimensional version; `wedge_slot` carries the designated
/// harmonic basis of the p-fold wedge slot (p = 1: the Beltrami slot,
/// p = 2: the degree-two slot). p > 2 returns 0.
double synthetic_wp_degree_p(const Eigen::VectorXd& node_weights,
                             const SyntheticKSForm& a, int p,
                             const SyntheticSlot& wedge_slot);

/// Positive density sampled on a uniform grid over the complex parameter;
/// ny == 1 encodes a one-real-parameter section.
struct CurveSample {
  double h = 0.0;       // grid spacing
  Eigen::MatrixXd G;    // nx x ny positive values
};

/// K(s) = -(lap log G)(s) / (4 G(s)) with the 5-point Laplacian (3-point
/// second difference when ny == 1). Boundary entries are NaN. Non-positive
/// G throws.
Eigen::MatrixXd discrete_curvature(const CurveSample& s);

/// Checks K_{sum_j a_j G_j} <= sum_j (a_j G_j / sum)^2 K_{a_j G_j} at every
/// interior grid point; all samples must share the grid.
BoundReport convex_sum_curvature_check(const std::vector<CurveSample>& gs,
                                       const std::vector<double>& coeffs,
                                       double slack = 1e-10);

/// Holomorphic curvature bound along a curve of Kodaira-Spencer fields on a
/// one-dimensional fiber (p = 1): for every sample with |A|_1 > 0,
///   K = R(A, conj A, A, conj A) / |A|_1^4  <=  -pn + slack,
/// the curvature evaluated through the dual tensor formula (the degree-two
/// norm vanishes, so only the heat-kernel constant remains on the right).
/// Samples with vanishing norm are excluded and reported.
BoundReport finsler_curvature_bound_check(const SpectralDecomposition& spec,
                                          double pn,
                                          const std::vector<Field>& a_family,
                                          double slack_rel = 1e-6);

/// Poincare density 2 R^2 / (R^2 - |s|^2)^2, normalized so that
/// ddbar log rho = rho.
double poincare_density(double radius, std::complex<double> s);

/// gamma sampled on the uniform grid [-R, R]^2 with (2n+1)^2 nodes;
/// entries at nodes outside the open disk are ignored (set them <= 0).
struct DiskGrid {
  double radius = 1.0;
  Eigen::MatrixXd gamma;  // square, odd size
};

struct AhlforsSchwarzResult {
  BoundReport hypothesis;  // min over interior nodes of (lap log gamma)/4 - A gamma
  BoundReport conclusion;  // min over nodes of rho/A - gamma
  bool conclusion_asserted = false;  // false when the hypothesis fails
};

/// Comparison with the Poincare density: if ddbar log gamma >= A gamma
/// holds on the grid (hypothesis), then gamma <= rho/A is asserted
/// (conclusion). When the hypothesis fails the conclusion is still
/// measured but explicitly not asserted.
AhlforsSchwarzResult ahlfors_schwarz_check(const DiskGrid& grid, double a,
                                           double slack = 1e-8);

/// Minimal line-plot emitter: one polyline per series over the common
/// abscissae, with axes and labels.
void write_curve_svg(const std::string& path, const std::vector<double>& xs,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& labels,
                     const std::string& title = "");

}  // namespace kwp
