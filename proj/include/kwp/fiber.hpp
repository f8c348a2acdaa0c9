#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "kwp/spectral.hpp"

namespace kwp {

using Complex = std::complex<double>;

/// Disk automorphism z -> (a z + b)/(c z + d) stored as a 2x2 matrix.
struct Mobius {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();

  Complex apply(Complex z) const;
  Complex derivative(Complex z) const;
  Mobius compose(const Mobius& other) const;  // this after other
  Mobius inverse() const;

  static Mobius translate_to_origin(Complex a);  // a -> 0
  static Mobius rotation(double theta);
};

struct SidePairing {
  int side_from = 0;  // glued to side_to with reversed orientation
  int side_to = 0;
  Mobius map;  // sends points of side_from onto side_to
};

struct Triangle {
  std::array<int, 3> v;  // mesh vertex indices
};

/// Triangulated model fiber: flat calibration torus or the genus-2
/// hyperbolic octagon surface. Immutable after construction.
struct DiscreteFiber {
  enum class Kind { Torus, HyperbolicOctagon };

  Kind kind = Kind::Torus;
  int resolution = 0;
  double side = 1.0;  // torus side length

  // Mesh data. Vertices live in the chart (torus fundamental square or
  // Poincare disk); identified boundary vertices appear as separate mesh
  // vertices mapped to a common dof by `quotient`.
  std::vector<Complex> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::array<Complex, 3>> tri_pos;  // corner positions (torus:
                                                // unwrapped per triangle)
  std::vector<int> quotient;      // mesh vertex -> dof
  std::vector<int> dof_rep;       // dof -> representative mesh vertex
  std::vector<Complex> qd_factor;  // chart factor T'(z)^2 for quadratic
                                   // differentials, 1 at representatives
  std::vector<SidePairing> pairings;

  // Per-side boundary samples (octagon only): boundary[s][j] is the mesh
  // vertex at arclength fraction j / 2^resolution along side s.
  std::vector<std::vector<int>> boundary;

  Eigen::VectorXd metric_density;  // per dof, at the representative position
  Eigen::VectorXd area_weights;    // lumped metric mass per dof
  Eigen::VectorXd flat_weights;    // lumped flat (chart) mass per dof
  Eigen::SparseMatrix<double> stiffness;  // conformally invariant, on dofs
  double total_area = 0.0;

  int num_dofs() const { return static_cast<int>(dof_rep.size()); }
  double density_at(Complex z) const;
};

DiscreteFiber build_torus_fiber(double side, int resolution);
DiscreteFiber build_hyperbolic_octagon_fiber(int resolution);

// Dense generalized eigendecomposition of (stiffness, lumped mass).
SpectralDecomposition assemble_laplacian(const DiscreteFiber& fiber);

// Graph diameter with geodesic edge lengths; upper approximation of the
// Riemannian diameter.
double diameter(const DiscreteFiber& fiber);

// Geodesic distance in the chart metric (hyperbolic for the octagon).
double chart_distance(DiscreteFiber::Kind kind, Complex z, Complex w,
                      double side = 1.0);

// OFF-like text format with a pairings section; see README.
void save_fiber(const std::string& path, const DiscreteFiber& fiber);
DiscreteFiber load_fiber(const std::string& path);

}  // namespace kwp
