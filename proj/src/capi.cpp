#include "kwp/capi.h"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "kwp/bounds.hpp"
#include "kwp/curvature.hpp"
#include "kwp/fiber.hpp"
#include "kwp/finsler.hpp"
#include "kwp/ke.hpp"
#include "kwp/kswp.hpp"
#include "kwp/spectral.hpp"
#include "kwp/suite.hpp"

using nlohmann::json;

struct kwp_fiber_s {
  kwp::DiscreteFiber f;
};

struct kwp_spectrum_s {
  kwp::SpectralDecomposition s;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

int map_exception() {
  try {
    throw;
  } catch (const kwp::ResonanceError& e) {
    return fail(KWP_ERR_RESONANCE, e.what());
  } catch (const kwp::QuadratureError& e) {
    return fail(KWP_ERR_QUADRATURE, e.what());
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error: caller passed bad parameters
    return fail(KWP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(KWP_ERR_IO, e.what());
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    bool io = what.find("cannot open") != std::string::npos ||
              what.find("file") != std::string::npos;
    return fail(io ? KWP_ERR_IO : KWP_ERR_RUNTIME, what);
  } catch (const std::exception& e) {
    return fail(KWP_ERR_RUNTIME, e.what());
  }
}

#define KWP_REQUIRE(cond, message) \
  if (!(cond)) return fail(KWP_ERR_INVALID_ARGUMENT, (message))

kwp::Complex to_complex(const json& pair) {
  if (!pair.is_array() || pair.size() != 2)
    throw std::invalid_argument("complex values must be [re, im] pairs");
  return {pair[0].get<double>(), pair[1].get<double>()};
}

// rows of node entries, each an array of [re, im] component pairs
Eigen::MatrixXcd to_component_matrix(const json& rows, int components) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("expected a non-empty array of node rows");
  Eigen::MatrixXcd out(rows.size(), components);
  for (std::size_t v = 0; v < rows.size(); ++v) {
    const json& row = rows[v];
    if (components == 1 && row.is_array() && row.size() == 2 &&
        row[0].is_number()) {
      out(v, 0) = to_complex(row);
      continue;
    }
    if (!row.is_array() || static_cast<int>(row.size()) != components)
      throw std::invalid_argument("node row has wrong component count");
    for (int c = 0; c < components; ++c) out(v, c) = to_complex(row[c]);
  }
  return out;
}

Eigen::VectorXcd to_flat_vector(const json& arr) {
  Eigen::VectorXcd out(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out[i] = to_complex(arr[i]);
  return out;
}

kwp::SyntheticSlot to_slot(const json& j, Eigen::Index rows) {
  kwp::SyntheticSlot slot;
  slot.complement_eigenvalue = j.at("complement_eigenvalue").get<double>();
  const json& cols = j.value("harmonic", json::array());
  slot.harmonic.resize(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    Eigen::VectorXcd col = to_flat_vector(cols[c]);
    if (col.size() != rows)
      throw std::invalid_argument("slot harmonic column has wrong length");
    slot.harmonic.col(static_cast<Eigen::Index>(c)) = col;
  }
  return slot;
}

Eigen::MatrixXd to_grid(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw std::invalid_argument("expected a 2-d array of grid values");
  Eigen::MatrixXd g(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument("ragged grid rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      g(i, j) = rows[i][j].get<double>();
  }
  return g;
}

json load_json(const char* path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + path);
  return json::parse(in);
}

int bundle_components(int p) { return (p == 0 || p == 2) ? 1 : 4; }

kwp::BundleForm geometric_section(const kwp::DiscreteFiber& fiber,
                                  const kwp::Field& f, int p, int m) {
  kwp::BundleForm psi;
  psi.p = p;
  psi.m = m;
  psi.values = f.array() /
               fiber.metric_density.array().pow(0.5 * (m + 1)).cast<kwp::Complex>();
  return psi;
}

void write_reports(const char* path,
                   const std::vector<kwp::BoundReport>& reports) {
  if (path && *path) kwp::write_json(path, reports);
}

int run_curvature_geometric(int m, int p, const json& in,
                            const char* out_tensor_json,
                            const char* report_json) {
  int resolution = in.value("resolution", 4);
  std::string formula = in.value("formula", "direct-image");
  kwp::DiscreteFiber fiber = kwp::build_hyperbolic_octagon_fiber(resolution);
  kwp::SpectralDecomposition spec = kwp::assemble_laplacian(fiber);
  kwp::QDBasis qd = kwp::quadratic_differential_basis(fiber);
  std::vector<kwp::Field> a;
  for (const kwp::Field& q : qd.fields)
    a.push_back(kwp::harmonic_beltrami(fiber, q).a);

  kwp::CurvatureTensor t;
  if (formula == "tangent") {
    std::vector<kwp::Field> nu;
    if (p == 0)
      nu.push_back(kwp::Field::Constant(spec.num_nodes(), kwp::Complex(1, 0)));
    else
      nu = a;
    t = kwp::curvature_tangent(spec, p, a, nu);
  } else if (formula == "direct-image") {
    std::vector<kwp::BundleForm> psi;
    if (p == 0) {
      psi.push_back(geometric_section(
          fiber, kwp::Field::Constant(spec.num_nodes(), kwp::Complex(1, 0)),
          0, m));
      psi.back().values.setConstant(kwp::Complex(1, 0));
    } else {
      if (m % 2 == 0)
        throw std::invalid_argument(
            "geometric sections at p = 1 need an odd twist (products of "
            "quadratic differentials)");
      for (const kwp::Field& q : qd.fields) {
        kwp::Field f = q;
        for (int k = 0; k < (m - 1) / 2; ++k)
          f = f.cwiseProduct(qd.fields[0]);
        psi.push_back(geometric_section(fiber, f, 1, m));
      }
    }
    t = kwp::curvature_direct_image(spec, m, p, a, psi);
  } else {
    throw std::invalid_argument("formula must be direct-image or tangent");
  }

  if (out_tensor_json && *out_tensor_json)
    kwp::write_tensor_json(out_tensor_json, t);
  write_reports(report_json, {kwp::hermitian_symmetry_check(t)});
  return KWP_OK;
}

int run_curvature_synthetic(int m, int p, const json& in,
                            const char* out_tensor_json,
                            const char* report_json) {
  Eigen::VectorXd w;
  {
    const json& jw = in.at("weights");
    w.resize(jw.size());
    for (std::size_t i = 0; i < jw.size(); ++i) w[i] = jw[i].get<double>();
  }
  const Eigen::Index n = w.size();
  std::string formula = in.value("formula", "direct-image");

  std::vector<kwp::SyntheticKSForm> a;
  for (const json& ja : in.at("a"))
    a.push_back({to_component_matrix(ja, 4)});

  kwp::SyntheticSlot function_slot =
      to_slot(in.at("function_slot"), n);
  kwp::CurvatureTensor t;
  if (formula == "direct-image") {
    std::vector<kwp::SyntheticBundleForm> psi;
    for (const json& jp : in.at("psi")) {
      kwp::SyntheticBundleForm f;
      f.p = p;
      f.m = m;
      f.comp = to_component_matrix(jp, bundle_components(p));
      psi.push_back(std::move(f));
    }
    kwp::SyntheticSlot plus =
        to_slot(in.at("plus_slot"), n * bundle_components(p - 1 < 0 ? 0 : p - 1));
    kwp::SyntheticSlot minus =
        to_slot(in.at("minus_slot"), n * bundle_components(p + 1 > 2 ? 2 : p + 1));
    t = kwp::synthetic_curvature_direct_image(w, m, p, a, psi, function_slot,
                                              plus, minus);
  } else if (formula == "tangent") {
    std::vector<Eigen::MatrixXcd> nu;
    int comp = p == 0 ? 1 : 4;
    for (const json& jn : in.at("nu"))
      nu.push_back(to_component_matrix(jn, comp));
    kwp::SyntheticSlot plus = to_slot(in.at("plus_slot"), n);
    kwp::SyntheticSlot minus =
        to_slot(in.at("minus_slot"), n * (p == 0 ? 4 : 1));
    t = kwp::synthetic_curvature_tangent(w, p, a, nu, function_slot, plus,
                                         minus);
  } else {
    throw std::invalid_argument("formula must be direct-image or tangent");
  }

  if (out_tensor_json && *out_tensor_json)
    kwp::write_tensor_json(out_tensor_json, t);
  write_reports(report_json, {kwp::hermitian_symmetry_check(t)});
  return KWP_OK;
}

}  // namespace

extern "C" {

const char* kwp_last_error_message(void) { return g_last_error.c_str(); }

int kwp_pn_value(int n, double r, double abs_tol, double* out) {
  KWP_REQUIRE(out, "null output pointer");
  try {
    *out = kwp::resolvent_lower_bound_value(n, r,
                                            abs_tol > 0 ? abs_tol : 1e-10);
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_bessel_estimate(int n, double r, double* out) {
  KWP_REQUIRE(out, "null output pointer");
  try {
    *out = kwp::bessel_estimate(n, r);
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_pn_table(int n, double r_min, double r_max, int steps,
                 const char* out_csv) {
  KWP_REQUIRE(out_csv, "null output path");
  try {
    kwp::write_pn_table(out_csv, n, r_min, r_max, steps);
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_fiber_build(const char* kind, int resolution, double side,
                    kwp_fiber** out) {
  KWP_REQUIRE(kind && out, "null argument");
  try {
    kwp::DiscreteFiber f;
    if (std::strcmp(kind, "torus") == 0)
      f = kwp::build_torus_fiber(side, resolution);
    else if (std::strcmp(kind, "octagon") == 0)
      f = kwp::build_hyperbolic_octagon_fiber(resolution);
    else
      return fail(KWP_ERR_INVALID_ARGUMENT,
                  "kind must be 'torus' or 'octagon'");
    *out = new kwp_fiber_s{std::move(f)};
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_fiber_load(const char* path, kwp_fiber** out) {
  KWP_REQUIRE(path && out, "null argument");
  try {
    *out = new kwp_fiber_s{kwp::load_fiber(path)};
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_fiber_save(const kwp_fiber* fiber, const char* path) {
  KWP_REQUIRE(fiber && path, "null argument");
  try {
    kwp::save_fiber(path, fiber->f);
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

void kwp_fiber_free(kwp_fiber* fiber) { delete fiber; }

int kwp_fiber_num_dofs(const kwp_fiber* fiber) {
  return fiber ? fiber->f.num_dofs() : -1;
}

double kwp_fiber_total_area(const kwp_fiber* fiber) {
  return fiber ? fiber->f.total_area : -1.0;
}

double kwp_fiber_diameter(const kwp_fiber* fiber) {
  if (!fiber) return -1.0;
  try {
    return kwp::diameter(fiber->f);
  } catch (...) {
    map_exception();
    return -1.0;
  }
}

int kwp_spectrum_compute(const kwp_fiber* fiber, kwp_spectrum** out) {
  KWP_REQUIRE(fiber && out, "null argument");
  try {
    *out = new kwp_spectrum_s{kwp::assemble_laplacian(fiber->f)};
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_spectrum_load(const char* path, kwp_spectrum** out) {
  KWP_REQUIRE(path && out, "null argument");
  try {
    *out = new kwp_spectrum_s{kwp::load_spectrum(path)};
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_spectrum_save(const kwp_spectrum* spec, const char* path) {
  KWP_REQUIRE(spec && path, "null argument");
  try {
    kwp::save_spectrum(path, spec->s);
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

void kwp_spectrum_free(kwp_spectrum* spec) { delete spec; }

int kwp_spectrum_num_modes(const kwp_spectrum* spec) {
  return spec ? spec->s.num_modes() : -1;
}

int kwp_spectrum_eigenvalue(const kwp_spectrum* spec, int index, double* out) {
  KWP_REQUIRE(spec && out, "null argument");
  KWP_REQUIRE(index >= 0 && index < spec->s.num_modes(),
              "eigenvalue index out of range");
  *out = spec->s.eigenvalues[index];
  return KWP_OK;
}

int kwp_ke_solve(const kwp_fiber* fiber, double epsilon, double tol,
                 const char* out_csv, const char* report_json) {
  KWP_REQUIRE(fiber, "null fiber");
  try {
    const kwp::DiscreteFiber& f = fiber->f;
    // smooth bump supported strictly inside the fundamental domain, so the
    // field descends to the glued surface
    const double r02 = 0.25;
    kwp::RealField h(f.num_dofs());
    for (int i = 0; i < h.size(); ++i) {
      double n2 = std::norm(f.vertices[f.dof_rep[i]]);
      h[i] = n2 < r02 ? std::exp(1.0 - r02 / (r02 - n2)) : 0.0;
    }
    kwp::BackgroundData bg = kwp::make_background(f, h, epsilon);
    kwp::KESolution sol = kwp::solve_ke(f, bg, tol);
    if (out_csv && *out_csv) {
      std::ofstream out(out_csv);
      if (!out)
        throw std::runtime_error(std::string("cannot open ") + out_csv);
      out << "dof,u,F\n";
      out.precision(17);
      for (int i = 0; i < sol.u.size(); ++i)
        out << i << "," << sol.u[i] << "," << bg.F[i] << "\n";
    }
    std::vector<kwp::BoundReport> reports =
        kwp::check_c0_estimate(f, bg, sol.u);
    kwp::BoundReport res;
    res.name = "Monge-Ampere Newton residual";
    res.check_id = "eq:MA";
    res.lhs = sol.residual_history.empty() ? 0.0
                                           : sol.residual_history.back();
    res.rhs = tol;
    res.margin = res.rhs - res.lhs;
    res.slack_used = 0.0;
    res.hard = true;
    res.provenance = {std::to_string(sol.newton_steps) + " Newton steps"};
    res.finalize();
    reports.insert(reports.begin(), res);
    write_reports(report_json, reports);
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

static int phi_run(const kwp_fiber* fiber, const kwp_spectrum* spec,
                   int direction, const char* out_csv,
                   const char* report_json, bool with_check) {
  KWP_REQUIRE(fiber, "null fiber");
  try {
    const kwp::DiscreteFiber& f = fiber->f;
    kwp::SpectralDecomposition local;
    const kwp::SpectralDecomposition* sp;
    if (spec) {
      sp = &spec->s;
    } else {
      local = kwp::assemble_laplacian(f);
      sp = &local;
    }
    kwp::QDBasis qd = kwp::quadratic_differential_basis(f);
    if (direction < 0 || direction >= static_cast<int>(qd.fields.size()))
      throw std::invalid_argument("direction index out of range");
    kwp::KSForm a = kwp::harmonic_beltrami(f, qd.fields[direction]);
    kwp::RealField chi = a.pointwise_norm_sq();
    kwp::RealField phi = kwp::solve_phi(*sp, chi);
    if (out_csv && *out_csv) {
      std::ofstream out(out_csv);
      if (!out)
        throw std::runtime_error(std::string("cannot open ") + out_csv);
      out << "dof,chi,phi\n";
      out.precision(17);
      for (int i = 0; i < phi.size(); ++i)
        out << i << "," << chi[i] << "," << phi[i] << "\n";
    }
    if (with_check) {
      kwp::BoundReport r = kwp::check_phi_bound(phi, chi, f, -1.0);
      write_reports(report_json, {r});
    }
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_phi_solve(const kwp_fiber* fiber, const kwp_spectrum* spec,
                  int direction, const char* out_csv) {
  return phi_run(fiber, spec, direction, out_csv, nullptr, false);
}

int kwp_phi_check(const kwp_fiber* fiber, const kwp_spectrum* spec,
                  int direction, const char* out_csv,
                  const char* report_json) {
  return phi_run(fiber, spec, direction, out_csv, report_json, true);
}

int kwp_wp_gram(const kwp_fiber* fiber, const char* out_csv,
                const char* report_json) {
  KWP_REQUIRE(fiber, "null fiber");
  try {
    const kwp::DiscreteFiber& f = fiber->f;
    kwp::QDBasis qd = kwp::quadratic_differential_basis(f);
    const int n = static_cast<int>(qd.fields.size());
    Eigen::MatrixXcd gram(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        gram(i, j) = kwp::wp_inner_product(
            f, kwp::KSForm{kwp::harmonic_beltrami(f, qd.fields[i]).a},
            kwp::KSForm{kwp::harmonic_beltrami(f, qd.fields[j]).a});
    if (out_csv && *out_csv) {
      std::ofstream out(out_csv);
      if (!out)
        throw std::runtime_error(std::string("cannot open ") + out_csv);
      out << "i,j,re,im\n";
      out.precision(17);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out << i << "," << j << "," << gram(i, j).real() << ","
              << gram(i, j).imag() << "\n";
    }
    double herm = (gram - gram.adjoint()).cwiseAbs().maxCoeff() /
                  gram.cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    kwp::BoundReport h;
    h.name = "Weil-Petersson Gram matrix is Hermitian";
    h.check_id = "eq:wpherm";
    h.lhs = herm;
    h.rhs = 1e-12;
    h.margin = h.rhs - h.lhs;
    h.hard = true;
    h.provenance = {"relative adjoint defect"};
    h.finalize();
    kwp::BoundReport p;
    p.name = "Weil-Petersson Gram matrix is positive";
    p.check_id = "eq:wpfib";
    p.lhs = es.eigenvalues().minCoeff();
    p.rhs = 0.0;
    p.margin = p.lhs;
    p.hard = true;
    p.provenance = {"smallest Gram eigenvalue"};
    p.finalize();
    write_reports(report_json, {h, p});
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_qdiff_basis(const kwp_fiber* fiber, const char* out_csv, double* gap) {
  KWP_REQUIRE(fiber, "null fiber");
  try {
    kwp::QDBasis qd = kwp::quadratic_differential_basis(fiber->f);
    if (gap) *gap = qd.gap;
    if (out_csv && *out_csv) {
      std::ofstream out(out_csv);
      if (!out)
        throw std::runtime_error(std::string("cannot open ") + out_csv);
      out << "index,singular_value\n";
      out.precision(17);
      for (int i = 0; i < qd.singular_values.size(); ++i)
        out << i << "," << qd.singular_values[i] << "\n";
      out << "# basis fields: dof,re,im per column\n";
      for (std::size_t k = 0; k < qd.fields.size(); ++k)
        for (int i = 0; i < qd.fields[k].size(); ++i)
          out << "q" << k << "," << i << "," << qd.fields[k][i].real() << ","
              << qd.fields[k][i].imag() << "\n";
    }
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

int kwp_curvature_run(const char* mode, int m, int p, const char* in_json,
                      const char* out_tensor_json, const char* report_json) {
  KWP_REQUIRE(mode, "null mode");
  try {
    json in = json::object();
    if (in_json && *in_json) in = load_json(in_json);
    if (std::strcmp(mode, "geom1d") == 0)
      return run_curvature_geometric(m, p, in, out_tensor_json, report_json);
    if (std::strcmp(mode, "synthetic") == 0)
      return run_curvature_synthetic(m, p, in, out_tensor_json, report_json);
    return fail(KWP_ERR_INVALID_ARGUMENT,
                "mode must be 'geom1d' or 'synthetic'");
  } catch (...) {
    return map_exception();
  }
}

int kwp_finsler_check(const char* kind, const char* in_json,
                      const char* report_json, const char* svg_path) {
  KWP_REQUIRE(kind && in_json, "null argument");
  try {
    json in = load_json(in_json);
    if (std::strcmp(kind, "convex-sum") == 0) {
      double h = in.at("h").get<double>();
      std::vector<double> coeffs;
      for (const json& c : in.at("coeffs")) coeffs.push_back(c.get<double>());
      std::vector<kwp::CurveSample> samples;
      for (const json& d : in.at("densities"))
        samples.push_back({h, to_grid(d)});
      write_reports(report_json,
                    {kwp::convex_sum_curvature_check(samples, coeffs)});
      return KWP_OK;
    }
    if (std::strcmp(kind, "curve-bound") == 0) {
      int resolution = in.value("resolution", 4);
      kwp::DiscreteFiber fiber =
          kwp::build_hyperbolic_octagon_fiber(resolution);
      kwp::SpectralDecomposition spec = kwp::assemble_laplacian(fiber);
      kwp::QDBasis qd = kwp::quadratic_differential_basis(fiber);
      std::vector<kwp::Field> basis;
      for (const kwp::Field& q : qd.fields)
        basis.push_back(kwp::harmonic_beltrami(fiber, q).a);
      std::vector<kwp::Field> family;
      for (const json& sample : in.at("samples")) {
        if (sample.size() != basis.size())
          throw std::invalid_argument(
              "each sample needs one coefficient per basis direction");
        kwp::Field a = kwp::Field::Zero(spec.num_nodes());
        for (std::size_t k = 0; k < basis.size(); ++k)
          a += to_complex(sample[k]) * basis[k];
        family.push_back(a);
      }
      double pn = kwp::resolvent_lower_bound_value(1, kwp::diameter(fiber));
      kwp::BoundReport r =
          kwp::finsler_curvature_bound_check(spec, pn, family);
      write_reports(report_json, {r});
      if (svg_path && *svg_path) {
        std::vector<double> xs, ks, bound;
        for (std::size_t i = 0; i < family.size(); ++i) {
          double n1 = kwp::wp_degree_p(spec.weights, family[i], 1);
          if (n1 <= 1e-12) continue;
          kwp::CurvatureTensor t =
              kwp::curvature_tangent(spec, 1, {family[i]}, {family[i]});
          xs.push_back(static_cast<double>(i));
          ks.push_back(t.r(0, 0, 0, 0).real() / (n1 * n1 * n1 * n1));
          bound.push_back(-pn);
        }
        if (xs.size() >= 2)
          kwp::write_curve_svg(svg_path, xs, {ks, bound},
                               {"sectional curvature", "-P_1(d)"},
                               "curvature along the curve");
      }
      return KWP_OK;
    }
    if (std::strcmp(kind, "ahlfors") == 0) {
      kwp::DiskGrid grid;
      grid.radius = in.at("radius").get<double>();
      grid.gamma = to_grid(in.at("gamma"));
      kwp::AhlforsSchwarzResult res =
          kwp::ahlfors_schwarz_check(grid, in.at("a").get<double>());
      write_reports(report_json, {res.hypothesis, res.conclusion});
      return KWP_OK;
    }
    return fail(KWP_ERR_INVALID_ARGUMENT,
                "kind must be convex-sum, curve-bound, or ahlfors");
  } catch (...) {
    return map_exception();
  }
}

int kwp_verify(const char* config_path, const char* suites_csv,
               int resolution, uint64_t seed, const char* out_dir,
               int* exit_code) {
  KWP_REQUIRE(exit_code, "null exit code pointer");
  try {
    kwp::SuiteConfig cfg;
    if (config_path && *config_path) cfg = kwp::parse_config(config_path);
    if (suites_csv && *suites_csv) {
      cfg.suites.clear();
      std::string s = suites_csv;
      std::size_t pos = 0;
      while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        std::string item = s.substr(pos, comma - pos);
        if (!item.empty()) cfg.suites.push_back(item);
        pos = comma + 1;
      }
    }
    if (resolution > 0) cfg.resolution = resolution;
    cfg.seed = seed;
    if (out_dir && *out_dir) cfg.out_dir = out_dir;
    kwp::SuiteBundle bundle = kwp::run_suite(cfg);
    *exit_code = kwp::write_bundle(bundle, cfg);
    return KWP_OK;
  } catch (...) {
    return map_exception();
  }
}

}  // extern "C"
