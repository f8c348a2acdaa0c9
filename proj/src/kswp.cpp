#include "kwp/kswp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>

namespace kwp {

RealField solve_phi(const SpectralDecomposition& spec, const RealField& chi) {
  if (chi.minCoeff() < -1e-12)
    throw std::domain_error("solve_phi: chi must be non-negative");
  Field phi = resolvent_apply(spec, 1.0, chi.cast<Complex>());
  return phi.real();
}

BoundReport check_phi_bound(const RealField& phi, const RealField& chi,
                            const DiscreteFiber& fiber, double fiber_diameter,
                            double slack) {
  const double d = fiber_diameter > 0.0 ? fiber_diameter : diameter(fiber);
  const double pn = resolvent_lower_bound_value(1, d);
  const double total = (fiber.area_weights.array() * chi.array()).sum();

  BoundReport rep;
  rep.name = "phi-lower-bound";
  rep.check_id = "eq:est";
  rep.lhs = phi.minCoeff();
  rep.rhs = pn * total;
  rep.margin = rep.lhs - rep.rhs;
  rep.slack_used = slack;
  rep.hard = false;  // discretization-limited
  rep.finalize();
  return rep;
}

Complex wp_inner_product(const DiscreteFiber& fiber, const KSForm& ai,
                         const KSForm& aj) {
  if (ai.a.size() != fiber.num_dofs() || aj.a.size() != fiber.num_dofs())
    throw std::invalid_argument("wp_inner_product: field size mismatch");
  const Eigen::ArrayXcd prod = ai.a.array() * aj.a.array().conjugate();
  return Complex((fiber.area_weights.array() * prod.real()).sum(),
                 (fiber.area_weights.array() * prod.imag()).sum());
}

BorderedResult bordered_determinant_check(const BorderedMetric& bm) {
  const int n = static_cast<int>(bm.g_sb.size());
  if (bm.g_ab.rows() != n || bm.g_ab.cols() != n)
    throw std::invalid_argument("bordered_determinant_check: shape mismatch");
  const double hscale = bm.g_ab.norm();
  if ((bm.g_ab - bm.g_ab.adjoint()).norm() > 1e-10 * std::max(hscale, 1.0))
    throw std::invalid_argument(
        "bordered_determinant_check: block not Hermitian");

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(bm.g_ab);
  if (!lu.isInvertible())
    throw std::runtime_error("bordered_determinant_check: singular block");

  // Schur complement of the Hermitian block
  Eigen::VectorXcd hinv_vbar = lu.solve(bm.g_sb.conjugate());
  const Complex phi_c =
      Complex(bm.g_ss) - (bm.g_sb.transpose() * hinv_vbar).value();

  Eigen::MatrixXcd full(n + 1, n + 1);
  full(0, 0) = bm.g_ss;
  full.block(0, 1, 1, n) = bm.g_sb.transpose();
  full.block(1, 0, n, 1) = bm.g_sb.conjugate();
  full.block(1, 1, n, n) = bm.g_ab;

  const Complex det_full = full.determinant();
  const Complex det_block = lu.determinant();
  const Complex rhs = phi_c * det_block;
  const double scale =
      std::max(std::abs(det_full) + std::abs(rhs), 1e-300);

  BorderedResult out;
  out.phi = phi_c.real();
  // a_s^alpha = -g^{beta-bar alpha} g_{s beta-bar}
  out.horizontal_lift = -bm.g_ab.transpose().fullPivLu().solve(bm.g_sb);

  out.report.name = "bordered-determinant";
  out.report.check_id = "eq:varphi";
  out.report.lhs = det_full.real();
  out.report.rhs = rhs.real();
  out.report.margin = -std::abs(det_full - rhs) / scale;
  out.report.slack_used = 1e-12;
  out.report.hard = true;
  out.report.finalize();
  return out;
}

QDBasis quadratic_differential_basis(const DiscreteFiber& fiber,
                                     int kernel_dim) {
  if (fiber.kind != DiscreteFiber::Kind::HyperbolicOctagon)
    throw std::invalid_argument(
        "quadratic_differential_basis: octagon fiber required");
  const int n = fiber.num_dofs();
  const int n_tri = static_cast<int>(fiber.triangles.size());

  auto flat_area = [&](int t) {
    const auto& p = fiber.tri_pos[t];
    const Complex u = p[1] - p[0], v = p[2] - p[0];
    return 0.5 * std::abs(u.real() * v.imag() - u.imag() * v.real());
  };

  // One row per interior edge: fit {1, z, z-bar, z^2} through the four
  // corners of the two adjacent triangles; the z-bar coefficient is a
  // second-order-accurate delbar estimate (exact on holomorphic quadratics).
  // Corner values carry the chart factor linking each mesh copy to its
  // representative.
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (int t = 0; t < n_tri; ++t)
    for (int e = 0; e < 3; ++e) {
      int a = fiber.triangles[t].v[e], b = fiber.triangles[t].v[(e + 1) % 3];
      edge_tris[{std::min(a, b), std::max(a, b)}].push_back(t);
    }

  std::vector<Eigen::Triplet<Complex>> rows;
  int n_rows = 0;
  for (const auto& [edge, tris] : edge_tris) {
    if (tris.size() != 2) continue;
    int corners[4] = {edge.first, edge.second, -1, -1};
    for (int s = 0; s < 2; ++s)
      for (int k = 0; k < 3; ++k) {
        int mv = fiber.triangles[tris[s]].v[k];
        if (mv != edge.first && mv != edge.second) corners[2 + s] = mv;
      }
    // center and scale for conditioning
    Complex c0(0, 0);
    for (int mv : corners) c0 += fiber.vertices[mv];
    c0 *= 0.25;
    double h = 0.0;
    for (int mv : corners) h = std::max(h, std::abs(fiber.vertices[mv] - c0));
    Eigen::Matrix4cd vand;
    for (int k = 0; k < 4; ++k) {
      const Complex d = (fiber.vertices[corners[k]] - c0) / h;
      vand(k, 0) = 1.0;
      vand(k, 1) = d;
      vand(k, 2) = std::conj(d);
      vand(k, 3) = d * d;
    }
    Eigen::FullPivLU<Eigen::Matrix4cd> lu(vand);
    if (!lu.isInvertible()) continue;  // degenerate corner configuration
    const Eigen::Matrix4cd inv = lu.inverse();
    const double w =
        std::sqrt(flat_area(tris[0]) + flat_area(tris[1])) / h;
    for (int k = 0; k < 4; ++k) {
      const int mv = corners[k];
      rows.emplace_back(n_rows, fiber.quotient[mv],
                        w * inv(2, k) * fiber.qd_factor[mv]);
    }
    ++n_rows;
  }
  Eigen::MatrixXcd dbar = Eigen::MatrixXcd::Zero(n_rows, n);
  for (const auto& t : rows) dbar(t.row(), t.col()) += t.value();

  // Singular spectrum in the flat quadratic-differential norm: eigenvalues
  // of N^{-1/2} D^H D N^{-1/2} with N the lumped flat mass.
  Eigen::VectorXd nsqrt = fiber.flat_weights.cwiseSqrt();
  for (int j = 0; j < n; ++j) dbar.col(j) /= nsqrt[j];
  Eigen::MatrixXcd normal = dbar.adjoint() * dbar;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(normal);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("quadratic_differential_basis: eigensolver failed");

  QDBasis out;
  out.singular_values =
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  for (int k = 0; k < kernel_dim; ++k) {
    Field q = es.eigenvectors().col(k);
    q.array() /= nsqrt.array();
    // deterministic phase: largest-magnitude entry real positive
    int imax = 0;
    q.cwiseAbs().maxCoeff(&imax);
    q *= std::conj(q[imax]) / std::abs(q[imax]);
    out.fields.push_back(std::move(q));
  }
  if (out.singular_values.size() > kernel_dim) {
    const double s_low = std::max(out.singular_values[kernel_dim - 1], 1e-300);
    out.gap = out.singular_values[kernel_dim] / s_low;
  }
  return out;
}

KSForm harmonic_beltrami(const DiscreteFiber& fiber, const Field& q) {
  if (q.size() != fiber.num_dofs())
    throw std::invalid_argument("harmonic_beltrami: field size mismatch");
  KSForm mu;
  mu.a = (q.conjugate().array() / fiber.metric_density.array()).matrix();
  return mu;
}

}  // namespace kwp
