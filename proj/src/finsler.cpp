#include "kwp/finsler.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kwp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double weighted_norm(const Eigen::VectorXd& w, const Eigen::VectorXcd& x) {
  return std::sqrt((w.array() * x.array().abs2()).sum());
}

}  // namespace

double wp_degree_p(const Eigen::VectorXd& weights, const Field& a, int p) {
  if (p < 1) throw std::invalid_argument("degree p must be >= 1");
  if (p > 1) return 0.0;  // the p-fold wedge vanishes on 1-dimensional fibers
  return weighted_norm(weights, a);
}

double synthetic_wp_degree_p(const Eigen::VectorXd& node_weights,
                             const SyntheticKSForm& a, int p,
                             const SyntheticSlot& wedge_slot) {
  if (p < 1) throw std::invalid_argument("degree p must be >= 1");
  if (p > 2) return 0.0;

  Eigen::MatrixXcd wedge;
  if (p == 1) {
    wedge = a.comp;
  } else {
    wedge = synthetic_wedge_raise(a, a.comp, 1);
  }
  const int components = static_cast<int>(wedge.cols());
  Eigen::VectorXd wf(node_weights.size() * components);
  for (int c = 0; c < components; ++c)
    wf.segment(c * node_weights.size(), node_weights.size()) = node_weights;
  Eigen::VectorXcd x =
      Eigen::Map<const Eigen::VectorXcd>(wedge.data(), wedge.size());
  if (wedge_slot.complement_eigenvalue <= 0.0)
    throw std::invalid_argument(
        "wedge slot needs a positive complement eigenvalue");
  // harmonic projection through the slot resolvent at shift 1:
  // r = H(x) + perp/(1+lambda_c)  =>  H(x) = (r (1+lambda_c) - x)/lambda_c
  Eigen::VectorXcd r = synthetic_resolvent_plus(wedge_slot, wf, 1.0, x);
  Eigen::VectorXcd h = (r * (1.0 + wedge_slot.complement_eigenvalue) - x) /
                       wedge_slot.complement_eigenvalue;
  return std::pow(weighted_norm(wf, h), 1.0 / static_cast<double>(p));
}

Eigen::MatrixXd discrete_curvature(const CurveSample& s) {
  const Eigen::Index nx = s.G.rows(), ny = s.G.cols();
  if (s.h <= 0.0) throw std::invalid_argument("grid spacing must be positive");
  if ((s.G.array() <= 0.0).any())
    throw std::invalid_argument("density must be positive on the grid");
  if (nx < 3) throw std::invalid_argument("need at least 3 grid points");
  Eigen::MatrixXd logg = s.G.array().log();
  Eigen::MatrixXd k = Eigen::MatrixXd::Constant(nx, ny, kNaN);
  const double h2 = s.h * s.h;
  if (ny == 1) {
    for (Eigen::Index i = 1; i + 1 < nx; ++i) {
      double lap = (logg(i - 1, 0) - 2.0 * logg(i, 0) + logg(i + 1, 0)) / h2;
      k(i, 0) = -lap / (4.0 * s.G(i, 0));
    }
  } else {
    for (Eigen::Index i = 1; i + 1 < nx; ++i)
      for (Eigen::Index j = 1; j + 1 < ny; ++j) {
        double lap = (logg(i - 1, j) + logg(i + 1, j) + logg(i, j - 1) +
                      logg(i, j + 1) - 4.0 * logg(i, j)) /
                     h2;
        k(i, j) = -lap / (4.0 * s.G(i, j));
      }
  }
  return k;
}

BoundReport convex_sum_curvature_check(const std::vector<CurveSample>& gs,
                                       const std::vector<double>& coeffs,
                                       double slack) {
  if (gs.empty() || gs.size() != coeffs.size())
    throw std::invalid_argument("need matching samples and coefficients");
  for (double c : coeffs)
    if (c <= 0.0) throw std::invalid_argument("coefficients must be positive");
  const Eigen::Index nx = gs[0].G.rows(), ny = gs[0].G.cols();
  CurveSample total;
  total.h = gs[0].h;
  total.G = Eigen::MatrixXd::Zero(nx, ny);
  std::vector<CurveSample> scaled(gs.size());
  for (std::size_t j = 0; j < gs.size(); ++j) {
    if (gs[j].G.rows() != nx || gs[j].G.cols() != ny || gs[j].h != total.h)
      throw std::invalid_argument("samples must share the grid");
    scaled[j].h = total.h;
    scaled[j].G = coeffs[j] * gs[j].G;
    total.G += scaled[j].G;
  }

  Eigen::MatrixXd k_total = discrete_curvature(total);
  std::vector<Eigen::MatrixXd> k(gs.size());
  for (std::size_t j = 0; j < gs.size(); ++j)
    k[j] = discrete_curvature(scaled[j]);

  double worst = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < nx; ++i)
    for (Eigen::Index jj = 0; jj < ny; ++jj) {
      if (std::isnan(k_total(i, jj))) continue;
      double rhs = 0.0;
      for (std::size_t j = 0; j < gs.size(); ++j) {
        double theta = scaled[j].G(i, jj) / total.G(i, jj);
        rhs += theta * theta * k[j](i, jj);
        scale = std::max(scale, std::abs(k[j](i, jj)));
      }
      worst = std::min(worst, rhs - k_total(i, jj));
      scale = std::max(scale, std::abs(k_total(i, jj)));
    }

  BoundReport r;
  r.name = "convex-sum curvature inequality";
  r.check_id = "eq:curvest";
  r.lhs = worst;
  r.rhs = 0.0;
  r.margin = worst;
  r.slack_used = slack * std::max(scale, 1.0);
  r.hard = true;  // exact for the shared discrete Laplacian
  r.provenance = {
      "min over interior grid points of sum_j theta_j^2 K_j - K_sum,",
      "theta_j the density fractions at the center point"};
  r.finalize();
  return r;
}

BoundReport finsler_curvature_bound_check(const SpectralDecomposition& spec,
                                          double pn,
                                          const std::vector<Field>& a_family,
                                          double slack_rel) {
  if (a_family.empty()) throw std::invalid_argument("empty curve");
  double worst = std::numeric_limits<double>::infinity();
  double scale = std::abs(pn);
  int excluded = 0;
  for (const Field& a : a_family) {
    double n1 = wp_degree_p(spec.weights, a, 1);
    if (n1 <= 1e-12) {
      ++excluded;
      continue;
    }
    CurvatureTensor t = curvature_tangent(spec, 1, {a}, {a});
    double kg = t.r(0, 0, 0, 0).real() / (n1 * n1 * n1 * n1);
    worst = std::min(worst, -pn - kg);
    scale = std::max(scale, std::abs(kg));
  }
  if (!std::isfinite(worst))
    throw std::invalid_argument("every sample had vanishing degree-1 norm");

  BoundReport r;
  r.name = "Finsler curvature bound along curve (degree 1)";
  r.check_id = "eq:curvgp";
  r.lhs = worst;
  r.rhs = 0.0;
  r.margin = worst;
  r.slack_used = slack_rel * std::max(scale, 1e-300);
  r.hard = false;
  r.provenance = {
      "min over samples of -pn - R(A, conj A, A, conj A)/|A|^4;",
      std::to_string(excluded) + " sample(s) excluded for vanishing norm"};
  r.finalize();
  return r;
}

double poincare_density(double radius, std::complex<double> s) {
  double r2 = radius * radius;
  double d = r2 - std::norm(s);
  if (d <= 0.0)
    throw std::invalid_argument("point outside the open disk");
  return 2.0 * r2 / (d * d);
}

AhlforsSchwarzResult ahlfors_schwarz_check(const DiskGrid& grid, double a,
                                           double slack) {
  if (a <= 0.0) throw std::invalid_argument("comparison constant must be positive");
  const Eigen::Index n = grid.gamma.rows();
  if (grid.gamma.cols() != n || n < 3 || n % 2 == 0)
    throw std::invalid_argument("gamma must be a square odd-sized grid");
  const double h = 2.0 * grid.radius / static_cast<double>(n - 1);

  auto node = [&](Eigen::Index i, Eigen::Index j) {
    return std::complex<double>(-grid.radius + h * static_cast<double>(i),
                                -grid.radius + h * static_cast<double>(j));
  };
  auto inside = [&](Eigen::Index i, Eigen::Index j) {
    return std::abs(node(i, j)) < grid.radius && grid.gamma(i, j) > 0.0;
  };

  double hyp_worst = std::numeric_limits<double>::infinity();
  double conc_worst = std::numeric_limits<double>::infinity();
  double hyp_scale = 0.0, conc_scale = 0.0;
  int hyp_points = 0, conc_points = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!inside(i, j)) continue;
      double g = grid.gamma(i, j);
      double rho = poincare_density(grid.radius, node(i, j));
      conc_worst = std::min(conc_worst, rho / a - g);
      conc_scale = std::max(conc_scale, rho / a);
      ++conc_points;
      if (i == 0 || j == 0 || i + 1 == n || j + 1 == n) continue;
      if (!inside(i - 1, j) || !inside(i + 1, j) || !inside(i, j - 1) ||
          !inside(i, j + 1))
        continue;
      double lap = (std::log(grid.gamma(i - 1, j)) +
                    std::log(grid.gamma(i + 1, j)) +
                    std::log(grid.gamma(i, j - 1)) +
                    std::log(grid.gamma(i, j + 1)) - 4.0 * std::log(g)) /
                   (h * h);
      hyp_worst = std::min(hyp_worst, lap / 4.0 - a * g);
      hyp_scale = std::max(hyp_scale, a * g);
      ++hyp_points;
    }
  if (hyp_points == 0 || conc_points == 0)
    throw std::invalid_argument("no usable grid points inside the disk");

  AhlforsSchwarzResult out;
  out.hypothesis.name = "Ahlfors-Schwarz hypothesis: ddbar log gamma >= A gamma";
  out.hypothesis.check_id = "pr:ahlschw/hyp";
  out.hypothesis.lhs = hyp_worst;
  out.hypothesis.rhs = 0.0;
  out.hypothesis.margin = hyp_worst;
  out.hypothesis.slack_used = slack * std::max(hyp_scale, 1.0);
  out.hypothesis.hard = false;
  out.hypothesis.provenance = {
      "min over " + std::to_string(hyp_points) +
      " interior nodes of (lap log gamma)/4 - A gamma"};
  out.hypothesis.finalize();

  out.conclusion.name = "Ahlfors-Schwarz conclusion: gamma <= rho/A";
  out.conclusion.check_id = "pr:ahlschw/concl";
  out.conclusion.lhs = conc_worst;
  out.conclusion.rhs = 0.0;
  out.conclusion.margin = conc_worst;
  out.conclusion.slack_used = slack * std::max(conc_scale, 1.0);
  out.conclusion.hard = false;
  out.conclusion.provenance = {"min over " + std::to_string(conc_points) +
                               " nodes of rho/A - gamma"};
  out.conclusion.finalize();

  out.conclusion_asserted = out.hypothesis.pass;
  if (!out.conclusion_asserted) {
    out.conclusion.provenance.push_back(
        "hypothesis not satisfied: conclusion measured but not asserted");
    out.conclusion.pass = false;
  }
  return out;
}

void write_curve_svg(const std::string& path, const std::vector<double>& xs,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& labels,
                     const std::string& title) {
  if (xs.size() < 2) throw std::invalid_argument("need at least two abscissae");
  for (const auto& s : series)
    if (s.size() != xs.size())
      throw std::invalid_argument("series length mismatch");

  double xmin = xs.front(), xmax = xs.back();
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& s : series)
    for (double v : s) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (!(ymax > ymin)) {
    ymax += 1.0;
    ymin -= 1.0;
  }
  const double w = 640.0, hgt = 400.0, pad = 50.0;
  auto px = [&](double x) {
    return pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad);
  };
  auto py = [&](double y) {
    return hgt - pad - (y - ymin) / (ymax - ymin) * (hgt - 2 * pad);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << hgt << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << pad << "\" y1=\"" << hgt - pad << "\" x2=\""
      << w - pad << "\" y2=\"" << hgt - pad
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad
      << "\" y2=\"" << hgt - pad << "\" stroke=\"black\"/>\n";
  if (!title.empty())
    svg << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\">"
        << title << "</text>\n";
  svg << "<text x=\"" << pad << "\" y=\"" << hgt - pad + 28 << "\">" << xmin
      << "</text>\n<text x=\"" << w - pad << "\" y=\"" << hgt - pad + 28
      << "\" text-anchor=\"end\">" << xmax << "</text>\n";
  svg << "<text x=\"" << pad - 6 << "\" y=\"" << hgt - pad
      << "\" text-anchor=\"end\">" << ymin << "</text>\n<text x=\""
      << pad - 6 << "\" y=\"" << pad << "\" text-anchor=\"end\">" << ymax
      << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      svg << px(xs[i]) << "," << py(series[s][i]) << " ";
    svg << "\"/>\n";
    if (s < labels.size())
      svg << "<text x=\"" << w - pad - 4 << "\" y=\"" << pad + 16.0 * (s + 1)
          << "\" text-anchor=\"end\" fill=\"" << color << "\">" << labels[s]
          << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << svg.str();
}

}  // namespace kwp
