#include "kwp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kwp/bounds.hpp"
#include "kwp/quadrature.hpp"

namespace kwp {

std::complex<double> SpectralDecomposition::inner(const Field& x,
                                                  const Field& y) const {
  return (weights.array() * (x.array() * y.array().conjugate()).real()).sum() +
         std::complex<double>(0, 1) *
             (weights.array() * (x.array() * y.array().conjugate()).imag())
                 .sum();
}

double SpectralDecomposition::inner(const RealField& x,
                                    const RealField& y) const {
  return (weights.array() * x.array() * y.array()).sum();
}

double SpectralDecomposition::norm(const Field& x) const {
  return std::sqrt((weights.array() * x.array().abs2()).sum());
}

Eigen::VectorXd SpectralDecomposition::coefficients(const RealField& x) const {
  return eigenvectors.transpose() * (weights.array() * x.array()).matrix();
}

Field SpectralDecomposition::coefficients(const Field& x) const {
  Eigen::VectorXd re = coefficients(RealField(x.real()));
  Eigen::VectorXd im = coefficients(RealField(x.imag()));
  Field c(re.size());
  c.real() = re;
  c.imag() = im;
  return c;
}

SpectralDecomposition make_decomposition(Eigen::VectorXd eigenvalues,
                                         Eigen::MatrixXd eigenvectors,
                                         Eigen::VectorXd weights) {
  SpectralDecomposition spec;
  const double lambda_max =
      eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double zero_tol = 1e-9 * std::max(lambda_max, 1.0);
  for (int i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] < -zero_tol)
      throw std::runtime_error("make_decomposition: negative eigenvalue " +
                               std::to_string(eigenvalues[i]));
    if (std::abs(eigenvalues[i]) < zero_tol) eigenvalues[i] = 0.0;
  }
  // sort ascending
  std::vector<int> order(eigenvalues.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return eigenvalues[a] < eigenvalues[b]; });
  Eigen::VectorXd ev(eigenvalues.size());
  Eigen::MatrixXd V(eigenvectors.rows(), eigenvectors.cols());
  for (size_t i = 0; i < order.size(); ++i) {
    ev[i] = eigenvalues[order[i]];
    V.col(i) = eigenvectors.col(order[i]);
  }
  spec.eigenvalues = std::move(ev);
  spec.eigenvectors = std::move(V);
  spec.weights = std::move(weights);
  spec.total_volume = spec.weights.sum();
  spec.harmonic_dim = 0;
  while (spec.harmonic_dim < spec.eigenvalues.size() &&
         spec.eigenvalues[spec.harmonic_dim] == 0.0)
    ++spec.harmonic_dim;
  return spec;
}

namespace {

Field reconstruct(const SpectralDecomposition& spec,
                  const Eigen::ArrayXd& factor, const Field& x) {
  Field c = spec.coefficients(x);
  Eigen::VectorXd re = (c.real().array() * factor).matrix();
  Eigen::VectorXd im = (c.imag().array() * factor).matrix();
  Field out(spec.num_nodes());
  out.real() = spec.eigenvectors * re;
  out.imag() = spec.eigenvectors * im;
  return out;
}

}  // namespace

Field resolvent_apply(const SpectralDecomposition& spec, double shift,
                      const Field& x) {
  Field c = spec.coefficients(x);
  const double xnorm = std::sqrt(c.squaredNorm());
  Eigen::ArrayXd factor(spec.num_modes());
  if (shift < 0.0) {
    const double m = -shift;
    for (int nu = 0; nu < spec.num_modes(); ++nu) {
      const double lam = spec.eigenvalues[nu];
      const double mass = std::abs(c[nu]);
      if (lam <= m + 1e-12 * std::max(m, 1.0)) {
        if (mass > 1e-8 * std::max(xnorm, 1e-300)) {
          throw ResonanceError(
              "resolvent_apply: spectral mass at eigenvalue " +
                  std::to_string(lam) + " <= shift magnitude " +
                  std::to_string(m),
              lam, mass);
        }
        factor[nu] = 0.0;
      } else {
        factor[nu] = 1.0 / (lam - m);
      }
    }
  } else {
    for (int nu = 0; nu < spec.num_modes(); ++nu) {
      const double lam = spec.eigenvalues[nu];
      if (lam + shift <= 0.0) {
        if (std::abs(c[nu]) > 1e-8 * std::max(xnorm, 1e-300))
          throw ResonanceError("resolvent_apply: zero shift on harmonic mass",
                               lam, std::abs(c[nu]));
        factor[nu] = 0.0;
      } else {
        factor[nu] = 1.0 / (lam + shift);
      }
    }
  }
  return reconstruct(spec, factor, x);
}

Field harmonic_project(const SpectralDecomposition& spec, const Field& x) {
  Eigen::ArrayXd factor = Eigen::ArrayXd::Zero(spec.num_modes());
  factor.head(spec.harmonic_dim) = 1.0;
  return reconstruct(spec, factor, x);
}

Field heat_apply(const SpectralDecomposition& spec, double t, const Field& x) {
  if (!(t > 0.0)) throw std::domain_error("heat_apply: t must be > 0");
  Eigen::ArrayXd factor = (-t * spec.eigenvalues.array()).exp();
  return reconstruct(spec, factor, x);
}

double resolvent_kernel(const SpectralDecomposition& spec, int z, int w,
                        int truncation_rank) {
  const int K = truncation_rank < 0
                    ? spec.num_modes()
                    : std::min(truncation_rank, spec.num_modes());
  double s = 0.0;
  for (int nu = 0; nu < K; ++nu)
    s += spec.eigenvectors(z, nu) * spec.eigenvectors(w, nu) /
         (1.0 + spec.eigenvalues[nu]);
  return s;
}

double heat_kernel(const SpectralDecomposition& spec, double t, int z, int w) {
  double s = 0.0;
  for (int nu = 0; nu < spec.num_modes(); ++nu)
    s += std::exp(-t * spec.eigenvalues[nu]) * spec.eigenvectors(z, nu) *
         spec.eigenvectors(w, nu);
  return s;
}

BoundReport verify_resolvent_heat_identity(const SpectralDecomposition& spec,
                                           int z, int w, double quad_tol) {
  const double lhs = resolvent_kernel(spec, z, w);

  // |P(t,z,w)| <= sqrt(P(t0,z,z) P(t0,w,w)) for t >= t0 bounds the tail.
  const double t0 = 1e-3;
  const double bound = std::sqrt(heat_kernel(spec, t0, z, z) *
                                 heat_kernel(spec, t0, w, w));
  double t_max = 5.0;
  while (bound * std::exp(-t_max) > 0.25 * quad_tol) t_max += 5.0;

  auto f = [&](double t) {
    return std::exp(-t) * heat_kernel(spec, std::max(t, 1e-300), z, w);
  };
  AdaptiveResult q = integrate_adaptive(f, 0.0, t_max, 0.5 * quad_tol);
  if (!q.converged)
    throw QuadratureError("verify_resolvent_heat_identity: quadrature failed",
                          q.error);
  const double rhs = q.value;

  BoundReport rep;
  rep.name = "resolvent-heat-identity@(" + std::to_string(z) + "," +
             std::to_string(w) + ")";
  rep.check_id = "eq:resheatest";
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.slack_used = quad_tol + bound * std::exp(-t_max);
  rep.margin = -std::abs(lhs - rhs);
  rep.hard = true;
  rep.finalize();
  return rep;
}

void save_spectrum(const std::string& path,
                   const SpectralDecomposition& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_spectrum: cannot open " + path);
  out.precision(17);
  out << "# kwp-spectrum v1\n";
  out << spec.num_nodes() << " " << spec.num_modes() << "\n";
  for (int i = 0; i < spec.num_nodes(); ++i)
    out << spec.weights[i] << (i + 1 < spec.num_nodes() ? ' ' : '\n');
  for (int nu = 0; nu < spec.num_modes(); ++nu) {
    out << spec.eigenvalues[nu];
    for (int i = 0; i < spec.num_nodes(); ++i)
      out << ' ' << spec.eigenvectors(i, nu);
    out << '\n';
  }
}

SpectralDecomposition load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_spectrum: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("# kwp-spectrum", 0) != 0)
    throw std::runtime_error("load_spectrum: bad header in " + path);
  int n = 0, k = 0;
  in >> n >> k;
  Eigen::VectorXd weights(n);
  for (int i = 0; i < n; ++i) in >> weights[i];
  Eigen::VectorXd ev(k);
  Eigen::MatrixXd V(n, k);
  for (int nu = 0; nu < k; ++nu) {
    in >> ev[nu];
    for (int i = 0; i < n; ++i) in >> V(i, nu);
  }
  if (!in) throw std::runtime_error("load_spectrum: truncated file " + path);
  return make_decomposition(std::move(ev), std::move(V), std::move(weights));
}

}  // namespace kwp
