#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

#include "kwp/report.hpp"

namespace kwp {

using Field = Eigen::VectorXcd;
using RealField = Eigen::VectorXd;

class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(const std::string& what, double eigenvalue, double mass)
      : std::runtime_error(what), eigenvalue(eigenvalue), mass(mass) {}
  double eigenvalue;
  double mass;
};

/// Eigenpairs of a discrete self-adjoint non-negative Laplacian together
/// with the volume weights that define the L2 structure. Immutable after
/// construction; all operations are read-only.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending, clamped to >= 0
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal w.r.t. weights
  Eigen::VectorXd weights;       // discrete g dV per node, > 0
  double total_volume = 0.0;
  int harmonic_dim = 0;  // modes with lambda below the zero threshold

  int num_nodes() const { return static_cast<int>(weights.size()); }
  int num_modes() const { return static_cast<int>(eigenvalues.size()); }

  // Volume-weighted inner products <x, y> = sum_i w_i x_i conj(y_i).
  std::complex<double> inner(const Field& x, const Field& y) const;
  double inner(const RealField& x, const RealField& y) const;
  double norm(const Field& x) const;

  // Expansion coefficients <x, psi_nu>.
  Field coefficients(const Field& x) const;
  Eigen::VectorXd coefficients(const RealField& x) const;
};

// Detect the zero threshold (1e-9 * lambda_max), clamp, sort ascending, and
// check Gram orthonormality; used by assembly code.
SpectralDecomposition make_decomposition(Eigen::VectorXd eigenvalues,
                                         Eigen::MatrixXd eigenvectors,
                                         Eigen::VectorXd weights);

// (Box + shift)^{-1} x. For shift = -m < 0 the caller must have removed the
// harmonic part; spectral mass at 0 < lambda <= m beyond 1e-8 * |x| raises
// ResonanceError.
Field resolvent_apply(const SpectralDecomposition& spec, double shift,
                      const Field& x);

// Orthogonal projection onto the lambda = 0 eigenspace; idempotent.
Field harmonic_project(const SpectralDecomposition& spec, const Field& x);

// Heat semigroup e^{-t Box} x, t > 0.
Field heat_apply(const SpectralDecomposition& spec, double t, const Field& x);

// Resolvent kernel P(z,w) = sum_nu psi_nu(z) psi_nu(w) / (1 + lambda_nu).
double resolvent_kernel(const SpectralDecomposition& spec, int z, int w,
                        int truncation_rank = -1);

// Heat kernel P(t,z,w) = sum_nu e^{-t lambda_nu} psi_nu(z) psi_nu(w).
double heat_kernel(const SpectralDecomposition& spec, double t, int z, int w);

// Checks P(z,w) = \int_0^inf e^{-t} P(t,z,w) dt by quadrature on the
// eigen-expansion.
BoundReport verify_resolvent_heat_identity(const SpectralDecomposition& spec,
                                           int z, int w,
                                           double quad_tol = 1e-10);

// Columnar cache format (CSV-like); see README for the layout.
void save_spectrum(const std::string& path, const SpectralDecomposition& spec);
SpectralDecomposition load_spectrum(const std::string& path);

}  // namespace kwp
