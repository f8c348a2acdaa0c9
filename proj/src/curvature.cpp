#include "kwp/curvature.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace kwp {

namespace {

// Gram-orthonormalize columns under the weight vector; near-dependent
// directions are dropped.
Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& cols,
                                const Eigen::VectorXd& w) {
  if (cols.cols() == 0) return cols;
  Eigen::MatrixXcd wcols =
      cols.array().colwise() * w.array().cast<Complex>();
  Eigen::MatrixXcd g = cols.adjoint() * wcols;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  const Eigen::VectorXd ev = es.eigenvalues();
  double cutoff = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::MatrixXcd q(cols.rows(), cols.cols());
  int rank = 0;
  for (int k = 0; k < ev.size(); ++k) {
    if (ev[k] <= cutoff) continue;
    q.col(rank++) = cols * (es.eigenvectors().col(k) / std::sqrt(ev[k]));
  }
  return q.leftCols(rank);
}

Eigen::VectorXcd project(const Eigen::MatrixXcd& q, const Eigen::VectorXd& w,
                         const Eigen::VectorXcd& x) {
  if (q.cols() == 0) return Eigen::VectorXcd::Zero(x.size());
  Eigen::VectorXcd wx = x.cwiseProduct(w.cast<Complex>());
  return q * (q.adjoint() * wx);
}

double wnorm(const Eigen::VectorXd& w, const Eigen::VectorXcd& x) {
  return std::sqrt((w.array() * x.array().abs2()).sum());
}

Complex wpair(const Eigen::VectorXd& w, const Eigen::VectorXcd& x,
              const Eigen::VectorXcd& y) {
  // bilinear volume pairing; conjugations are the caller's business
  return ((x.array() * y.array()) * w.array().cast<Complex>()).sum();
}

Eigen::VectorXcd flatten(const Eigen::MatrixXcd& comp) {
  return Eigen::Map<const Eigen::VectorXcd>(comp.data(), comp.size());
}

Eigen::VectorXd flat_weights(const Eigen::VectorXd& w, int components) {
  Eigen::VectorXd out(w.size() * components);
  for (int c = 0; c < components; ++c) out.segment(c * w.size(), w.size()) = w;
  return out;
}

void check_in_span(const Eigen::MatrixXcd& q, const Eigen::VectorXd& w,
                   const Eigen::VectorXcd& x, const std::string& label) {
  Eigen::VectorXcd defect = x - project(q, w, x);
  double d = wnorm(w, defect);
  double n = wnorm(w, x);
  if (d > 1e-8 * std::max(n, 1e-300)) {
    throw std::invalid_argument(label + " is not harmonic: defect norm " +
                                std::to_string(d) + " against field norm " +
                                std::to_string(n));
  }
}

}  // namespace

CurvatureTensor::CurvatureTensor(int na, int ns) : na(na), ns(ns) {
  std::size_t n = static_cast<std::size_t>(na) * na * ns * ns;
  term1.assign(n, Complex(0, 0));
  term2.assign(n, Complex(0, 0));
  term3.assign(n, Complex(0, 0));
  entries.assign(n, Complex(0, 0));
}

void CurvatureTensor::combine() {
  for (std::size_t n = 0; n < entries.size(); ++n)
    entries[n] = term1[n] + term2[n] + term3[n];
}

static double max_abs_of(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const Complex& z : v) m = std::max(m, std::abs(z));
  return m;
}

double CurvatureTensor::max_abs() const { return max_abs_of(entries); }

double CurvatureTensor::scale() const {
  return std::max({max_abs_of(term1), max_abs_of(term2), max_abs_of(term3)});
}

BoundReport hermitian_symmetry_check(const CurvatureTensor& t, double tol) {
  double worst = 0.0;
  for (int i = 0; i < t.na; ++i)
    for (int j = 0; j < t.na; ++j)
      for (int k = 0; k < t.ns; ++k)
        for (int l = 0; l < t.ns; ++l)
          worst = std::max(
              worst, std::abs(t.r(i, j, k, l) - std::conj(t.r(j, i, l, k))));
  double scale = std::max(t.scale(), 1e-300);
  BoundReport r;
  r.name = "curvature tensor Hermitian symmetry";
  r.check_id = "curv:hermitian";
  r.lhs = worst / scale;
  r.rhs = tol;
  r.margin = r.rhs - r.lhs;
  r.slack_used = 0.0;
  r.hard = true;
  r.provenance = {"max |R[i][j][k][l] - conj(R[j][i][l][k])| over entries,",
                  "relative to the largest per-term magnitude"};
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Geometric mode
// ---------------------------------------------------------------------------

BundleForm cup_contract(const Field& a, const BundleForm& psi,
                        CupDirection direction) {
  BundleForm out;
  out.m = psi.m;
  if (direction == CupDirection::lowering) {
    if (psi.p <= 0)
      throw std::invalid_argument("cup lowering requires degree p > 0");
    out.p = psi.p - 1;
    out.values = a.cwiseProduct(psi.values);
  } else {
    if (psi.p >= 1)
      throw std::invalid_argument("cup raising requires degree p < 1");
    out.p = psi.p + 1;
    out.values = a.conjugate().cwiseProduct(psi.values);
  }
  return out;
}

CurvatureTensor curvature_direct_image(
    const SpectralDecomposition& spec, int m, int p,
    const std::vector<Field>& a, const std::vector<BundleForm>& psi,
    const Eigen::MatrixXcd* psi_harmonic_basis) {
  if (m <= 0) throw std::invalid_argument("twist m must be positive");
  if (p != 0 && p != 1)
    throw std::invalid_argument("geometric mode supports degrees p = 0, 1");
  if (a.empty() || psi.empty())
    throw std::invalid_argument("need at least one A and one psi");
  const Eigen::VectorXd& w = spec.weights;
  for (const BundleForm& s : psi) {
    if (s.p != p || s.m != m)
      throw std::invalid_argument("psi degree/twist mismatch");
    if (s.values.size() != w.size())
      throw std::invalid_argument("psi node count mismatch");
  }
  if (psi_harmonic_basis) {
    Eigen::MatrixXcd q = orthonormalize(*psi_harmonic_basis, w);
    for (std::size_t k = 0; k < psi.size(); ++k)
      check_in_span(q, w, psi[k].values, "psi[" + std::to_string(k) + "]");
  }

  const int na = static_cast<int>(a.size());
  const int ns = static_cast<int>(psi.size());
  CurvatureTensor t(na, ns);
  const double dm = static_cast<double>(m);

  // scalar term: m (box+1)^{-1}(A_i . conj(A_j)) against psi_k conj(psi_l)
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      Field rf = resolvent_apply(spec, 1.0, a[i].cwiseProduct(a[j].conjugate()));
      for (int k = 0; k < ns; ++k)
        for (int l = 0; l < ns; ++l)
          t.term1[t.idx(i, j, k, l)] =
              dm * wpair(w, rf,
                         psi[k].values.cwiseProduct(psi[l].values.conjugate()));
    }
  }

  if (p > 0) {
    // lowered cups u_ik = A_i cup psi_k, paired through (box+m)^{-1}
    std::vector<Field> u(na * ns), ru(na * ns);
    for (int i = 0; i < na; ++i)
      for (int k = 0; k < ns; ++k) {
        u[i * ns + k] = cup_contract(a[i], psi[k], CupDirection::lowering).values;
        ru[i * ns + k] = resolvent_apply(spec, dm, u[i * ns + k]);
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term2[t.idx(i, j, k, l)] =
                dm * wpair(w, ru[i * ns + k], u[j * ns + l].conjugate());
  }

  if (p < 1) {
    // raised conjugate cups x_il = A_i cup conj(psi_l) = conj(conj(A_i) cup psi_l).
    // Their slot's designated harmonic space is the span of the Beltrami
    // fields; the complement is modeled by the function spectrum shifted by
    // 2m, so (box_slot - m)^{-1} acts there as (box + m)^{-1}.
    Eigen::MatrixXcd beltrami(w.size(), na);
    for (int i = 0; i < na; ++i) beltrami.col(i) = a[i];
    Eigen::MatrixXcd q = orthonormalize(beltrami, w);
    std::vector<Field> x(na * ns), r3(na * ns);
    for (int i = 0; i < na; ++i)
      for (int l = 0; l < ns; ++l) {
        Field xv =
            cup_contract(a[i], psi[l], CupDirection::raising).values.conjugate();
        Field h = project(q, w, xv);
        x[i * ns + l] = xv;
        r3[i * ns + l] = -h / dm + resolvent_apply(spec, dm, Field(xv - h));
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term3[t.idx(i, j, k, l)] =
                dm * wpair(w, r3[i * ns + l], x[j * ns + k].conjugate());
  }

  t.combine();
  return t;
}

CurvatureTensor curvature_pluricanonical(const SpectralDecomposition& spec,
                                         int m, const std::vector<Field>& a,
                                         const std::vector<BundleForm>& psi) {
  return curvature_direct_image(spec, m, 1, a, psi);
}

CurvatureTensor curvature_tangent(const SpectralDecomposition& spec, int p,
                                  const std::vector<Field>& a,
                                  const std::vector<Field>& nu) {
  if (p != 0 && p != 1)
    throw std::invalid_argument("geometric mode supports degrees p = 0, 1");
  if (a.empty() || nu.empty())
    throw std::invalid_argument("need at least one A and one nu");
  const Eigen::VectorXd& w = spec.weights;
  const int na = static_cast<int>(a.size());
  const int ns = static_cast<int>(nu.size());
  CurvatureTensor t(na, ns);

  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      Field rf = resolvent_apply(spec, 1.0, a[i].cwiseProduct(a[j].conjugate()));
      for (int k = 0; k < ns; ++k)
        for (int l = 0; l < ns; ++l)
          t.term1[t.idx(i, j, k, l)] =
              -wpair(w, rf, nu[k].cwiseProduct(nu[l].conjugate()));
    }
  }

  if (p > 0) {
    // contracted wedges v_il = A_i wedge conj(nu_l), scalar fields
    std::vector<Field> v(na * ns), rv(na * ns);
    for (int i = 0; i < na; ++i)
      for (int l = 0; l < ns; ++l) {
        v[i * ns + l] = a[i].cwiseProduct(nu[l].conjugate());
        rv[i * ns + l] = resolvent_apply(spec, 1.0, v[i * ns + l]);
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term2[t.idx(i, j, k, l)] =
                -wpair(w, rv[i * ns + l], v[j * ns + k].conjugate());
  }

  if (p < 1) {
    // exterior wedges x_ik = A_i wedge nu_k live in the Beltrami slot; same
    // designated harmonic space and spectral shift as in the direct image.
    Eigen::MatrixXcd beltrami(w.size(), na);
    for (int i = 0; i < na; ++i) beltrami.col(i) = a[i];
    Eigen::MatrixXcd q = orthonormalize(beltrami, w);
    std::vector<Field> x(na * ns), r3(na * ns);
    for (int i = 0; i < na; ++i)
      for (int k = 0; k < ns; ++k) {
        Field xv = a[i].cwiseProduct(nu[k]);
        Field h = project(q, w, xv);
        x[i * ns + k] = xv;
        r3[i * ns + k] = -h + resolvent_apply(spec, 1.0, Field(xv - h));
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term3[t.idx(i, j, k, l)] =
                -wpair(w, r3[i * ns + k], x[j * ns + l].conjugate());
  }

  t.combine();
  return t;
}

BoundReport direct_image_estimate_check(const SpectralDecomposition& spec,
                                        double pn, int m, int p,
                                        const Field& a, const BundleForm& psi,
                                        double slack_rel) {
  CurvatureTensor t = curvature_direct_image(spec, m, p, {a}, {psi});
  const Eigen::VectorXd& w = spec.weights;
  double na2 = (w.array() * a.array().abs2()).sum();
  double ns2 = (w.array() * psi.values.array().abs2()).sum();

  double h_low2 = 0.0, h_raise2 = 0.0;
  if (p > 0) {
    Field h = harmonic_project(
        spec, cup_contract(a, psi, CupDirection::lowering).values);
    h_low2 = (w.array() * h.array().abs2()).sum();
  }
  if (p < 1) {
    Eigen::MatrixXcd q = orthonormalize(Eigen::MatrixXcd(a), w);
    Field x = cup_contract(a, psi, CupDirection::raising).values.conjugate();
    Field h = project(q, w, x);
    h_raise2 = (w.array() * h.array().abs2()).sum();
  }

  BoundReport r;
  r.name = "single-direction curvature lower bound (direct image)";
  r.check_id = "eq:est1a";
  r.lhs = t.r(0, 0, 0, 0).real();
  r.rhs = pn * na2 * ns2 + h_low2 - h_raise2;
  r.margin = r.lhs - r.rhs;
  r.slack_used =
      slack_rel * std::max({std::abs(r.lhs), std::abs(r.rhs), t.scale()});
  r.hard = false;
  r.provenance = {
      "R(A, conj A, psi, conj psi) against the heat-kernel constant",
      "plus/minus the harmonic cup norms; slack covers discretization"};
  r.finalize();
  return r;
}

BoundReport nakano_positivity_check(const SpectralDecomposition& spec, int m,
                                    double pn, const std::vector<Field>& a,
                                    const std::vector<BundleForm>& psi,
                                    int num_random, std::uint64_t seed,
                                    double slack_rel) {
  CurvatureTensor t = curvature_pluricanonical(spec, m, a, psi);
  const Eigen::VectorXd& w = spec.weights;
  const int na = t.na, ns = t.ns;
  Eigen::MatrixXcd g(na, na), h(ns, ns);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      g(i, j) = wpair(w, a[i], a[j].conjugate());
  for (int k = 0; k < ns; ++k)
    for (int l = 0; l < ns; ++l)
      h(k, l) = wpair(w, psi[k].values, psi[l].values.conjugate());

  auto evaluate = [&](const Eigen::MatrixXcd& xi) {
    Complex lhs(0, 0), rhs(0, 0);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l) {
            Complex pair = xi(i, k) * std::conj(xi(j, l));
            lhs += t.r(i, j, k, l) * pair;
            rhs += static_cast<double>(m) * pn * g(i, j) * h(k, l) * pair;
          }
    return lhs.real() - rhs.real();
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd xi = Eigen::MatrixXcd::Zero(na, ns);
  for (int i = 0; i < na; ++i)
    for (int k = 0; k < ns; ++k) {
      xi.setZero();
      xi(i, k) = Complex(1, 0);
      worst = std::min(worst, evaluate(xi));
    }
  for (int trial = 0; trial < num_random; ++trial) {
    for (int i = 0; i < na; ++i)
      for (int k = 0; k < ns; ++k) xi(i, k) = Complex(gauss(rng), gauss(rng));
    xi /= std::max(xi.norm(), 1e-300);
    worst = std::min(worst, evaluate(xi));
  }

  BoundReport r;
  r.name = "Nakano positivity of the pluricanonical curvature";
  r.check_id = "co:curv1";
  r.lhs = worst;
  r.rhs = 0.0;
  r.margin = worst;
  r.slack_used = slack_rel * std::max(t.scale(), 1e-300);
  r.hard = false;
  r.provenance = {"worst value of R xi conj(xi) - m pn (G tensor H) xi conj(xi)",
                  "over coordinate and " + std::to_string(num_random) +
                      " random directions, seed " + std::to_string(seed)};
  r.finalize();
  return r;
}

BoundReport tangent_estimate_check(const SpectralDecomposition& spec,
                                   double pn, const Field& a,
                                   double slack_rel) {
  CurvatureTensor t = curvature_tangent(spec, 1, {a}, {a});
  const Eigen::VectorXd& w = spec.weights;
  double na2 = (w.array() * a.array().abs2()).sum();

  BoundReport r;
  r.name = "holomorphic sectional curvature upper bound (tangent image)";
  r.check_id = "eq:est1b";
  r.lhs = t.r(0, 0, 0, 0).real();
  r.rhs = -pn * na2 * na2;
  r.margin = r.rhs - r.lhs;  // need R <= rhs
  r.slack_used = slack_rel * std::max({std::abs(r.rhs), t.scale()});
  r.hard = false;
  r.provenance = {"R(A, conj A, A, conj A) <= -pn |A|^4;",
                  "the raised wedge vanishes in top degree"};
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Synthetic mode
// ---------------------------------------------------------------------------

Eigen::VectorXcd synthetic_dot(const SyntheticKSForm& ai,
                               const SyntheticKSForm& aj) {
  return (ai.comp.array() * aj.comp.array().conjugate()).rowwise().sum();
}

Eigen::VectorXcd synthetic_pair(const SyntheticBundleForm& pk,
                                const SyntheticBundleForm& pl) {
  if (pk.p != pl.p)
    throw std::invalid_argument("pairing requires equal degrees");
  return (pk.comp.array() * pl.comp.array().conjugate()).rowwise().sum();
}

SyntheticBundleForm synthetic_cup(const SyntheticKSForm& a,
                                  const SyntheticBundleForm& psi,
                                  CupDirection direction) {
  const Eigen::Index n = a.comp.rows();
  if (psi.comp.rows() != n)
    throw std::invalid_argument("node count mismatch in cup product");
  SyntheticBundleForm out;
  out.m = psi.m;
  auto A = [&](Eigen::Index node, int alpha, int beta) {
    return a.comp(node, 2 * alpha + beta);
  };
  if (direction == CupDirection::lowering) {
    if (psi.p == 0)
      throw std::invalid_argument("cup lowering requires degree p > 0");
    if (psi.p == 1) {
      out.p = 0;
      out.comp.resize(n, 1);
      for (Eigen::Index v = 0; v < n; ++v) {
        Complex s(0, 0);
        for (int al = 0; al < 2; ++al)
          s += A(v, al, 0) * psi.comp(v, 2 * al + 1) -
               A(v, al, 1) * psi.comp(v, 2 * al + 0);
        out.comp(v, 0) = s;
      }
    } else {  // p == 2
      out.p = 1;
      out.comp.resize(n, 4);
      for (Eigen::Index v = 0; v < n; ++v) {
        Complex d = psi.comp(v, 0);
        for (int be = 0; be < 2; ++be) {
          out.comp(v, 2 * 0 + be) = -d * A(v, 1, be);
          out.comp(v, 2 * 1 + be) = d * A(v, 0, be);
        }
      }
    }
  } else {
    if (psi.p == 2)
      throw std::invalid_argument("cup raising requires degree p < n");
    if (psi.p == 0) {
      out.p = 1;
      out.comp.resize(n, 4);
      for (Eigen::Index v = 0; v < n; ++v) {
        Complex c = psi.comp(v, 0);
        for (int be = 0; be < 2; ++be) {
          out.comp(v, 2 * be + 0) = -c * std::conj(A(v, 1, be));
          out.comp(v, 2 * be + 1) = c * std::conj(A(v, 0, be));
        }
      }
    } else {  // p == 1
      out.p = 2;
      out.comp.resize(n, 1);
      for (Eigen::Index v = 0; v < n; ++v) {
        Complex s(0, 0);
        for (int al = 0; al < 2; ++al)
          s += std::conj(A(v, al, 0)) * psi.comp(v, 2 * 1 + al) -
               std::conj(A(v, al, 1)) * psi.comp(v, 2 * 0 + al);
        out.comp(v, 0) = s;
      }
    }
  }
  return out;
}

Eigen::MatrixXcd synthetic_wedge_raise(const SyntheticKSForm& a,
                                       const Eigen::MatrixXcd& nu, int p) {
  const Eigen::Index n = a.comp.rows();
  if (nu.rows() != n)
    throw std::invalid_argument("node count mismatch in wedge product");
  if (p == 0) {
    Eigen::MatrixXcd out(n, 4);
    for (int c = 0; c < 4; ++c)
      out.col(c) = a.comp.col(c).cwiseProduct(nu.col(0));
    return out;
  }
  if (p == 1) {
    Eigen::MatrixXcd out(n, 1);
    out.col(0) = a.comp.col(0).cwiseProduct(nu.col(3)) -
                 a.comp.col(1).cwiseProduct(nu.col(2)) -
                 a.comp.col(2).cwiseProduct(nu.col(1)) +
                 a.comp.col(3).cwiseProduct(nu.col(0));
    return out;
  }
  throw std::invalid_argument("wedge raising vanishes in top degree");
}

Eigen::MatrixXcd synthetic_wedge_lower(const SyntheticKSForm& a,
                                       const Eigen::MatrixXcd& nu, int p) {
  if (p == 0)
    throw std::invalid_argument("wedge lowering vanishes in degree 0");
  if (p != 1)
    throw std::invalid_argument("synthetic wedge lowering supports p = 1");
  if (nu.rows() != a.comp.rows())
    throw std::invalid_argument("node count mismatch in wedge product");
  // double contraction of A with the conjugate of nu
  return (a.comp.array() * nu.array().conjugate()).rowwise().sum().matrix();
}

Eigen::VectorXcd synthetic_resolvent_plus(const SyntheticSlot& slot,
                                          const Eigen::VectorXd& weights,
                                          double shift,
                                          const Eigen::VectorXcd& x) {
  if (shift <= 0.0) throw std::invalid_argument("shift must be positive");
  if (slot.complement_eigenvalue + shift <= 0.0)
    throw std::invalid_argument("complement eigenvalue makes box + shift singular");
  Eigen::MatrixXcd q = orthonormalize(slot.harmonic, weights);
  Eigen::VectorXcd h = project(q, weights, x);
  return h / shift + (x - h) / (slot.complement_eigenvalue + shift);
}

Eigen::VectorXcd synthetic_resolvent_minus(const SyntheticSlot& slot,
                                           const Eigen::VectorXd& weights,
                                           double m,
                                           const Eigen::VectorXcd& x) {
  if (m <= 0.0) throw std::invalid_argument("m must be positive");
  Eigen::MatrixXcd q = orthonormalize(slot.harmonic, weights);
  Eigen::VectorXcd h = project(q, weights, x);
  Eigen::VectorXcd perp = x - h;
  double mass = wnorm(weights, perp);
  if (slot.complement_eigenvalue <= m) {
    if (mass > 1e-8 * std::max(wnorm(weights, x), 1e-300))
      throw ResonanceError(
          "complement eigenvalue does not exceed the twist: the shifted "
          "resolvent is not defined on the carried spectral mass",
          slot.complement_eigenvalue, mass);
    return -h / m;
  }
  return -h / m + perp / (slot.complement_eigenvalue - m);
}

CurvatureTensor synthetic_curvature_direct_image(
    const Eigen::VectorXd& node_weights, int m, int p,
    const std::vector<SyntheticKSForm>& a,
    const std::vector<SyntheticBundleForm>& psi,
    const SyntheticSlot& function_slot, const SyntheticSlot& plus_slot,
    const SyntheticSlot& minus_slot) {
  if (m <= 0) throw std::invalid_argument("twist m must be positive");
  if (p < 0 || p > 2)
    throw std::invalid_argument("synthetic mode supports degrees 0..2");
  if (a.empty() || psi.empty())
    throw std::invalid_argument("need at least one A and one psi");
  for (const SyntheticBundleForm& s : psi)
    if (s.p != p || s.m != m)
      throw std::invalid_argument("psi degree/twist mismatch");

  // every psi must lie in the designated harmonic span of its own family
  {
    const int components = static_cast<int>(psi[0].comp.cols());
    Eigen::VectorXd wf = flat_weights(node_weights, components);
    Eigen::MatrixXcd span(psi[0].comp.size(), psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k)
      span.col(static_cast<Eigen::Index>(k)) = flatten(psi[k].comp);
    Eigen::MatrixXcd q = orthonormalize(span, wf);
    for (std::size_t k = 0; k < psi.size(); ++k)
      check_in_span(q, wf, flatten(psi[k].comp),
                    "psi[" + std::to_string(k) + "]");
  }

  const int na = static_cast<int>(a.size());
  const int ns = static_cast<int>(psi.size());
  const double dm = static_cast<double>(m);
  CurvatureTensor t(na, ns);

  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      Eigen::VectorXcd rf = synthetic_resolvent_plus(
          function_slot, node_weights, 1.0, synthetic_dot(a[i], a[j]));
      for (int k = 0; k < ns; ++k)
        for (int l = 0; l < ns; ++l)
          t.term1[t.idx(i, j, k, l)] =
              dm * wpair(node_weights, rf, synthetic_pair(psi[k], psi[l]));
    }

  if (p > 0) {
    std::vector<Eigen::VectorXcd> u(na * ns), ru(na * ns);
    Eigen::VectorXd wf;
    for (int i = 0; i < na; ++i)
      for (int k = 0; k < ns; ++k) {
        SyntheticBundleForm low =
            synthetic_cup(a[i], psi[k], CupDirection::lowering);
        if (wf.size() == 0)
          wf = flat_weights(node_weights, static_cast<int>(low.comp.cols()));
        u[i * ns + k] = flatten(low.comp);
        ru[i * ns + k] =
            synthetic_resolvent_plus(plus_slot, wf, dm, u[i * ns + k]);
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term2[t.idx(i, j, k, l)] =
                dm * wpair(wf, ru[i * ns + k], u[j * ns + l].conjugate());
  }

  if (p < 2) {
    std::vector<Eigen::VectorXcd> x(na * ns), y(na * ns), r3(na * ns);
    Eigen::VectorXd wf;
    for (int i = 0; i < na; ++i)
      for (int l = 0; l < ns; ++l) {
        SyntheticBundleForm raised =
            synthetic_cup(a[i], psi[l], CupDirection::raising);
        if (wf.size() == 0)
          wf = flat_weights(node_weights, static_cast<int>(raised.comp.cols()));
        y[i * ns + l] = flatten(raised.comp);
        x[i * ns + l] = y[i * ns + l].conjugate();
        r3[i * ns + l] =
            synthetic_resolvent_minus(minus_slot, wf, dm, x[i * ns + l]);
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term3[t.idx(i, j, k, l)] =
                dm * wpair(wf, r3[i * ns + l], y[j * ns + k]);
  }

  t.combine();
  return t;
}

CurvatureTensor synthetic_curvature_tangent(
    const Eigen::VectorXd& node_weights, int p,
    const std::vector<SyntheticKSForm>& a,
    const std::vector<Eigen::MatrixXcd>& nu,
    const SyntheticSlot& function_slot, const SyntheticSlot& plus_slot,
    const SyntheticSlot& minus_slot) {
  if (p < 0 || p > 1)
    throw std::invalid_argument("synthetic tangent mode supports p = 0, 1");
  if (a.empty() || nu.empty())
    throw std::invalid_argument("need at least one A and one nu");
  const int na = static_cast<int>(a.size());
  const int ns = static_cast<int>(nu.size());
  CurvatureTensor t(na, ns);

  auto nu_pair = [&](int k, int l) {
    return (nu[k].array() * nu[l].array().conjugate())
        .rowwise()
        .sum()
        .matrix()
        .eval();
  };

  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      Eigen::VectorXcd rf = synthetic_resolvent_plus(
          function_slot, node_weights, 1.0, synthetic_dot(a[i], a[j]));
      for (int k = 0; k < ns; ++k)
        for (int l = 0; l < ns; ++l)
          t.term1[t.idx(i, j, k, l)] =
              -wpair(node_weights, rf, Eigen::VectorXcd(nu_pair(k, l)));
    }

  if (p > 0) {
    std::vector<Eigen::VectorXcd> v(na * ns), rv(na * ns);
    for (int i = 0; i < na; ++i)
      for (int l = 0; l < ns; ++l) {
        v[i * ns + l] = flatten(synthetic_wedge_lower(a[i], nu[l], p));
        rv[i * ns + l] = synthetic_resolvent_plus(plus_slot, node_weights, 1.0,
                                                  v[i * ns + l]);
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term2[t.idx(i, j, k, l)] = -wpair(node_weights, rv[i * ns + l],
                                                v[j * ns + k].conjugate());
  }

  // third term: present below top degree (p < n = 2)
  {
    std::vector<Eigen::VectorXcd> x(na * ns), r3(na * ns);
    Eigen::VectorXd wf;
    for (int i = 0; i < na; ++i)
      for (int k = 0; k < ns; ++k) {
        Eigen::MatrixXcd raised = synthetic_wedge_raise(a[i], nu[k], p);
        if (wf.size() == 0)
          wf = flat_weights(node_weights, static_cast<int>(raised.cols()));
        x[i * ns + k] = flatten(raised);
        r3[i * ns + k] =
            synthetic_resolvent_minus(minus_slot, wf, 1.0, x[i * ns + k]);
      }
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int k = 0; k < ns; ++k)
          for (int l = 0; l < ns; ++l)
            t.term3[t.idx(i, j, k, l)] =
                -wpair(wf, r3[i * ns + k], x[j * ns + l].conjugate());
  }

  t.combine();
  return t;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

static nlohmann::json complex_array(const std::vector<Complex>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Complex& z : v) arr.push_back({z.real(), z.imag()});
  return arr;
}

std::string tensor_to_json(const CurvatureTensor& t) {
  nlohmann::json j;
  j["na"] = t.na;
  j["ns"] = t.ns;
  j["index_order"] = "entries[((i*na+j)*ns+k)*ns+l], complex as [re, im]";
  j["entries"] = complex_array(t.entries);
  j["term1"] = complex_array(t.term1);
  j["term2"] = complex_array(t.term2);
  j["term3"] = complex_array(t.term3);
  return j.dump(2);
}

void write_tensor_json(const std::string& path, const CurvatureTensor& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << tensor_to_json(t) << "\n";
}

}  // namespace kwp
