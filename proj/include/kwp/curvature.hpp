#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "kwp/report.hpp"
#include "kwp/spectral.hpp"

namespace kwp {

// Direct-image curvature tensors of the three variational formulas.
//
// Two evaluation modes share the tensor type:
//  - geometric mode: one-dimensional fibers; every bundle object is stored
//    in a normalized pointwise frame, so that it becomes a plain complex
//    field over the mesh nodes, all slots use the area weights, and the cup
//    and wedge products reduce to pointwise multiplication;
//  - synthetic mode: two-dimensional fibers over an abstract node set with
//    explicit component blocks and product tables.
//
// Bundle Laplacians are modeled by the function Laplacian with documented
// spectral shifts (geometric mode) or by a designated harmonic basis plus a
// single stand-in complement eigenvalue (synthetic mode).

using Complex = std::complex<double>;

/// (p, n-p)-form with values in the m-th canonical power, in the normalized
/// pointwise frame: one complex coefficient per node.
struct BundleForm {
  Field values;
  int p = 0;  // holomorphic degree
  int m = 1;  // canonical twist
};

/// Four-index curvature tensor R[i][j][k][l] (i, j base directions; k, l
/// section indices; j and l are the conjugated slots) with per-term storage.
struct CurvatureTensor {
  int na = 0;  // number of base directions
  int ns = 0;  // number of sections
  std::vector<Complex> term1, term2, term3, entries;

  CurvatureTensor() = default;
  CurvatureTensor(int na, int ns);

  int idx(int i, int j, int k, int l) const {
    return ((i * na + j) * ns + k) * ns + l;
  }
  Complex r(int i, int j, int k, int l) const {
    return entries[idx(i, j, k, l)];
  }

  // entries = term1 + term2 + term3
  void combine();
  // max |entry|
  double max_abs() const;
  // max over the three term arrays of max |.|; the natural size against
  // which cancellations are measured
  double scale() const;
};

/// R[i][j][k][l] == conj(R[j][i][l][k]) within tol * scale.
BoundReport hermitian_symmetry_check(const CurvatureTensor& t,
                                     double tol = 1e-10);

// ---------------------------------------------------------------------------
// Geometric mode (one-dimensional fibers)
// ---------------------------------------------------------------------------
//
// A Kodaira-Spencer form is its Beltrami coefficient field a (already frame
// normalized). A BundleForm of degree (p, 1-p) and twist m stores psi times
// rho^{-(m+1)/2} where rho is the metric density; in this frame:
//   lowering cup  (A  cup psi, p -> p-1):      a * psi
//   raising  cup  (conj(A) cup psi, p -> p+1): conj(a) * psi

enum class CupDirection { lowering, raising };

/// Cup product of a Kodaira-Spencer form with a bundle form. `lowering`
/// requires p > 0 and contracts with A itself; `raising` requires p < 1 and
/// contracts with the conjugate form. Degree violations throw.
BundleForm cup_contract(const Field& a, const BundleForm& psi,
                        CupDirection direction);

/// Curvature of the higher direct image of twisted p-forms:
///   R = m (box+1)^{-1}(A_i . conj(A_j)) paired with psi_k conj(psi_l)
///     + m (box+m)^{-1}(A_i cup psi_k) paired with conj(A_j cup psi_l)
///     + m (box-m)^{-1}(A_i cup conj(psi_l)) paired with conj(A_j cup conj(psi_k))
/// where the second term vanishes for p = 0 and the third for p = 1. In the
/// third term the slot's harmonic space is the designated span of the
/// Beltrami fields; its harmonic part enters with factor -1/m and the
/// complement is handled by the function resolvent shifted so that every
/// eigenvalue carrying mass exceeds m.
///
/// If `psi_harmonic_basis` is given, every psi must lie in its span within
/// 1e-8 relative defect; otherwise the provided psi themselves are the
/// designated harmonic basis of their slot.
CurvatureTensor curvature_direct_image(
    const SpectralDecomposition& spec, int m, int p,
    const std::vector<Field>& a, const std::vector<BundleForm>& psi,
    const Eigen::MatrixXcd* psi_harmonic_basis = nullptr);

/// Two-term curvature of the pushforward of the (m+1)-st canonical power
/// (the p = 1 case; the potentially negative third term is absent).
CurvatureTensor curvature_pluricanonical(const SpectralDecomposition& spec,
                                         int m, const std::vector<Field>& a,
                                         const std::vector<BundleForm>& psi);

/// Dual formula: curvature of the higher direct image of p-fold exterior
/// tangent powers (twist fixed at 1). All three terms carry minus signs:
///   R = - (box+1)^{-1}(A_i . conj(A_j)) paired with nu_k conj(nu_l)
///     - (box+1)^{-1}(A_i wedge conj(nu_l)) paired with (conj(A_j) wedge nu_k)
///     - (box-1)^{-1}(A_i wedge nu_k) paired with conj(A_j wedge nu_l)
/// At p = 1 the third term is absent; at p = 0 the second vanishes.
/// nu are Beltrami fields at p = 1 and scalar fields at p = 0.
CurvatureTensor curvature_tangent(const SpectralDecomposition& spec, int p,
                                  const std::vector<Field>& a,
                                  const std::vector<Field>& nu);

/// Single-direction estimate for the direct image of twisted p-forms:
///   R(A, conj A, psi, conj psi) >=
///     pn * |A|^2 |psi|^2 + |H(A cup psi)|^2 - |H(A cup conj psi)|^2 - slack
/// with pn the heat-kernel lower bound at the fiber diameter.
BoundReport direct_image_estimate_check(const SpectralDecomposition& spec,
                                        double pn, int m, int p,
                                        const Field& a, const BundleForm& psi,
                                        double slack_rel = 1e-6);

/// Nakano positivity certificate for the pluricanonical curvature:
///   R xi conj(xi) >= m * pn * (G_WP tensor H) xi conj(xi) - slack
/// checked on all coordinate vectors plus `num_random` random xi; the
/// report carries the worst margin.
BoundReport nakano_positivity_check(const SpectralDecomposition& spec, int m,
                                    double pn, const std::vector<Field>& a,
                                    const std::vector<BundleForm>& psi,
                                    int num_random = 100,
                                    std::uint64_t seed = 1,
                                    double slack_rel = 1e-6);

/// Holomorphic sectional bound for the dual formula at p = 1:
///   R(A, conj A, A, conj A) <= -pn * |A|^4 + slack.
BoundReport tangent_estimate_check(const SpectralDecomposition& spec,
                                   double pn, const Field& a,
                                   double slack_rel = 1e-6);

// ---------------------------------------------------------------------------
// Synthetic mode (two-dimensional fibers, abstract node set)
// ---------------------------------------------------------------------------
//
// Components are stored per node with strictly increasing multi-indices, so
// no skew-symmetrization factors appear. The fiber metric is the identity.
// Component layouts:
//   Kodaira-Spencer form A: N x 4, column 2*alpha + beta = A^alpha_{bar beta}
//   BundleForm p = 0: N x 1 (the (bar1, bar2) component)
//   BundleForm p = 1: N x 4 (column 2*alpha + beta)
//   BundleForm p = 2: N x 1 (the (1, 2) component)
//   tangent-valued nu, p = 0: N x 1 scalar; p = 1: N x 4

struct SyntheticKSForm {
  Eigen::MatrixXcd comp;  // N x 4
};

struct SyntheticBundleForm {
  int p = 0;
  int m = 1;
  Eigen::MatrixXcd comp;
};

/// Spectral stand-in for one bundle slot: a designated harmonic basis
/// (columns, flattened node-major) and a single complement eigenvalue.
struct SyntheticSlot {
  Eigen::MatrixXcd harmonic;            // may have zero columns
  double complement_eigenvalue = 0.0;
};

/// Pointwise full contraction A_i . conj(A_j), one complex value per node.
Eigen::VectorXcd synthetic_dot(const SyntheticKSForm& ai,
                               const SyntheticKSForm& aj);

/// Pointwise pairing psi_k . conj(psi_l).
Eigen::VectorXcd synthetic_pair(const SyntheticBundleForm& pk,
                                const SyntheticBundleForm& pl);

/// Cup products per the two contraction maps; raising contracts with the
/// conjugate form. Degree violations throw.
SyntheticBundleForm synthetic_cup(const SyntheticKSForm& a,
                                  const SyntheticBundleForm& psi,
                                  CupDirection direction);

/// Exterior product A wedge nu (raises p) and double contraction
/// A wedge conj-slot (lowers p) for tangent-valued forms.
Eigen::MatrixXcd synthetic_wedge_raise(const SyntheticKSForm& a,
                                       const Eigen::MatrixXcd& nu, int p);
Eigen::MatrixXcd synthetic_wedge_lower(const SyntheticKSForm& a,
                                       const Eigen::MatrixXcd& nu, int p);

/// (box + shift)^{-1} on a flattened slot field, shift > 0: harmonic part
/// scaled by 1/shift, complement by 1/(lambda_c + shift).
Eigen::VectorXcd synthetic_resolvent_plus(const SyntheticSlot& slot,
                                          const Eigen::VectorXd& weights,
                                          double shift,
                                          const Eigen::VectorXcd& x);

/// (box - m)^{-1} with the harmonic part entering as -(1/m) H(x); the
/// complement requires lambda_c > m, otherwise any complement mass above
/// 1e-8 |x| raises ResonanceError.
Eigen::VectorXcd synthetic_resolvent_minus(const SyntheticSlot& slot,
                                           const Eigen::VectorXd& weights,
                                           double m,
                                           const Eigen::VectorXcd& x);

/// Direct-image curvature on a synthetic two-dimensional fiber. Slots:
/// `function_slot` backs the (box+1)^{-1} on scalar contractions (its
/// harmonic basis should contain the constants), `plus_slot` the
/// (box+m)^{-1} on lowered cups, `minus_slot` the (box-m)^{-1} on raised
/// conjugate cups. Each psi must lie in the span of the psi list itself.
CurvatureTensor synthetic_curvature_direct_image(
    const Eigen::VectorXd& node_weights, int m, int p,
    const std::vector<SyntheticKSForm>& a,
    const std::vector<SyntheticBundleForm>& psi,
    const SyntheticSlot& function_slot, const SyntheticSlot& plus_slot,
    const SyntheticSlot& minus_slot);

/// Dual formula on a synthetic fiber; nu columns are scalar (p = 0) or
/// N x 4 Beltrami-type (p = 1) component blocks.
CurvatureTensor synthetic_curvature_tangent(
    const Eigen::VectorXd& node_weights, int p,
    const std::vector<SyntheticKSForm>& a,
    const std::vector<Eigen::MatrixXcd>& nu,
    const SyntheticSlot& function_slot, const SyntheticSlot& plus_slot,
    const SyntheticSlot& minus_slot);

// Tensor serialization: JSON object with dimensions and the four index
// blocks; complex numbers as [re, im] pairs.
std::string tensor_to_json(const CurvatureTensor& t);
void write_tensor_json(const std::string& path, const CurvatureTensor& t);

}  // namespace kwp
