#include "kwp/suite.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ctime>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kwp/bounds.hpp"
#include "kwp/curvature.hpp"
#include "kwp/fiber.hpp"
#include "kwp/finsler.hpp"
#include "kwp/ke.hpp"
#include "kwp/kswp.hpp"
#include "kwp/spectral.hpp"

namespace kwp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<std::string> kAllSuites = {
    "resolvent", "spectral", "fiber", "ke", "phiwp", "curvature", "finsler"};

BoundReport make_report(const std::string& name, const std::string& check_id,
                        double lhs, double rhs, double margin, double slack,
                        bool hard, std::vector<std::string> provenance) {
  BoundReport r;
  r.name = name;
  r.check_id = check_id;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = margin;
  r.slack_used = slack;
  r.hard = hard;
  r.provenance = std::move(provenance);
  r.finalize();
  return r;
}

// Shared immutable artifacts, built once per run.
struct Shared {
  const SuiteConfig& cfg;
  DiscreteFiber octagon;
  SpectralDecomposition spec;
  QDBasis qd;
  std::vector<Field> beltrami;
  double fiber_diameter = 0.0;
  double pn = 0.0;
  bool built = false;

  explicit Shared(const SuiteConfig& c) : cfg(c) {}

  std::string cache_path() const {
    std::string dir = cfg.cache_dir;
    if (dir.empty()) {
      const char* env = std::getenv("KWP_CACHE_DIR");
      if (env) dir = env;
    }
    if (dir.empty()) return "";
    return dir + "/octagon-res" + std::to_string(cfg.resolution) + ".spectrum";
  }

  void build() {
    if (built) return;
    octagon = build_hyperbolic_octagon_fiber(cfg.resolution);
    std::string cache = cache_path();
    bool loaded = false;
    if (!cache.empty()) {
      try {
        spec = load_spectrum(cache);
        loaded = spec.num_nodes() == octagon.num_dofs();
      } catch (const std::exception&) {
        loaded = false;
      }
    }
    if (!loaded) {
      spec = assemble_laplacian(octagon);
      if (!cache.empty()) {
        try {
          save_spectrum(cache, spec);
        } catch (const std::exception&) {
          // cache is best-effort
        }
      }
    }
    qd = quadratic_differential_basis(octagon);
    for (const Field& q : qd.fields)
      beltrami.push_back(harmonic_beltrami(octagon, q).a);
    fiber_diameter = diameter(octagon);
    pn = resolvent_lower_bound_value(1, fiber_diameter);
    built = true;
  }
};

BundleForm canonical_section(const DiscreteFiber& fiber, const Field& f,
                             int m) {
  BundleForm psi;
  psi.p = 1;
  psi.m = m;
  psi.values =
      f.array() / fiber.metric_density.array().pow(0.5 * (m + 1)).cast<Complex>();
  return psi;
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

std::vector<BoundReport> suite_resolvent(Shared&) {
  std::vector<BoundReport> out;

  double worst = std::numeric_limits<double>::infinity();
  for (double r : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    double p = resolvent_lower_bound_value(1, r, 1e-11);
    double exact = modified_bessel_k(0, std::sqrt(5.0) * r) / M_PI;
    worst = std::min(worst, 1e-8 - std::abs(p - exact));
  }
  out.push_back(make_report(
      "resolvent bound closed form at n = 1", "eq:hker1", worst, 0.0, worst,
      0.0, true, {"quadrature P_1(r) against K_0(sqrt(5) r)/pi on 5 radii"}));

  for (int n : {2, 3}) {
    double w = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
      double r = 0.1 + (5.0 - 0.1) * i / 49.0;
      w = std::min(w, resolvent_lower_bound_value(n, r) - bessel_estimate(n, r));
    }
    out.push_back(make_report(
        "quadrature dominates the explicit Bessel estimate, n = " +
            std::to_string(n),
        "eq:hker2", w, 0.0, w, 1e-8, true,
        {"min of P_n(r) - bessel_estimate(n, r) over a 50-point grid"}));
  }

  double mono = std::numeric_limits<double>::infinity();
  double prev = resolvent_lower_bound_value(1, 0.1);
  for (int i = 1; i < 50; ++i) {
    double r = 0.1 + (5.0 - 0.1) * i / 49.0;
    double p = resolvent_lower_bound_value(1, r);
    mono = std::min(mono, prev - p);
    prev = p;
  }
  out.push_back(make_report("resolvent bound decreases with distance",
                            "eq:hker", mono, 0.0, mono, 0.0, true,
                            {"successive differences on the 50-point grid"}));
  return out;
}

std::vector<BoundReport> suite_spectral(Shared& sh) {
  std::vector<BoundReport> out;
  DiscreteFiber torus = build_torus_fiber(1.0, sh.cfg.torus_resolution);
  SpectralDecomposition spec = assemble_laplacian(torus);

  std::mt19937_64 rng(sh.cfg.seed);
  std::uniform_int_distribution<int> pick(0, spec.num_nodes() - 1);
  double worst = std::numeric_limits<double>::infinity();
  double slack = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    BoundReport r = verify_resolvent_heat_identity(spec, pick(rng), pick(rng));
    worst = std::min(worst, r.margin);
    slack = std::max(slack, r.slack_used);
  }
  out.push_back(make_report(
      "resolvent equals the Laplace transform of the heat kernel",
      "eq:resheatest", worst, 0.0, worst, slack, true,
      {"worst margin over 20 random node pairs, torus resolution " +
           std::to_string(sh.cfg.torus_resolution),
       "seed " + std::to_string(sh.cfg.seed)}));

  std::string tmp = sh.cfg.out_dir + "/spectrum-roundtrip.tmp";
  save_spectrum(tmp, spec);
  SpectralDecomposition back = load_spectrum(tmp);
  std::remove(tmp.c_str());
  double lam_max = std::max(spec.eigenvalues.maxCoeff(), 1.0);
  double diff =
      (back.eigenvalues - spec.eigenvalues).cwiseAbs().maxCoeff() / lam_max;
  out.push_back(make_report("spectrum cache round trip", "cache:spectrum",
                            diff, 1e-12, 1e-12 - diff, 0.0, true,
                            {"max relative eigenvalue drift through the "
                             "columnar text format"}));
  return out;
}

std::vector<BoundReport> suite_fiber(Shared& sh) {
  std::vector<BoundReport> out;
  DiscreteFiber torus = build_torus_fiber(1.0, sh.cfg.torus_resolution);
  SpectralDecomposition spec = assemble_laplacian(torus);
  double lam1 = 0.0;
  for (int i = 0; i < spec.num_modes(); ++i)
    if (spec.eigenvalues[i] > 1e-8) {
      lam1 = spec.eigenvalues[i];
      break;
    }
  double target = 4.0 * M_PI * M_PI;
  double rel = std::abs(lam1 - target) / target;
  out.push_back(make_report(
      "flat torus eigenvalue calibration", "fiber:torus", rel, 0.02,
      0.02 - rel, 0.0, false,
      {"first nonzero eigenvalue against 4 pi^2, resolution " +
       std::to_string(sh.cfg.torus_resolution)}));

  sh.build();
  double area_rel = std::abs(sh.octagon.total_area - 4.0 * M_PI) / (4.0 * M_PI);
  out.push_back(make_report("hyperbolic octagon area (Gauss-Bonnet)",
                            "fiber:area", area_rel, 0.01, 0.01 - area_rel, 0.0,
                            false,
                            {"total area against 4 pi at resolution " +
                             std::to_string(sh.cfg.resolution)}));

  std::set<std::pair<int, int>> edges;
  for (const Triangle& t : sh.octagon.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = sh.octagon.quotient[t.v[e]];
      int b = sh.octagon.quotient[t.v[(e + 1) % 3]];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  double chi = static_cast<double>(sh.octagon.num_dofs()) -
               static_cast<double>(edges.size()) +
               static_cast<double>(sh.octagon.triangles.size());
  out.push_back(make_report("octagon Euler characteristic", "fiber:euler",
                            chi, -2.0, -std::abs(chi + 2.0), 0.0, true,
                            {"V - E + F on the identified mesh"}));
  return out;
}

std::vector<BoundReport> suite_ke(Shared& sh) {
  sh.build();
  std::vector<BoundReport> out;
  // smooth bump supported strictly inside the fundamental domain, so the
  // field descends to the glued surface
  const double r02 = 0.25;
  RealField h(sh.octagon.num_dofs());
  for (int i = 0; i < h.size(); ++i) {
    double n2 = std::norm(sh.octagon.vertices[sh.octagon.dof_rep[i]]);
    h[i] = n2 < r02 ? std::exp(1.0 - r02 / (r02 - n2)) : 0.0;
  }
  BackgroundData bg = make_background(sh.octagon, h, 0.05);
  KESolution sol = solve_ke(sh.octagon, bg, 1e-11);
  double res = sol.residual_history.empty() ? 0.0
                                            : sol.residual_history.back();
  out.push_back(make_report(
      "Monge-Ampere Newton solve", "eq:MA", res, 1e-10, 1e-10 - res, 0.0, true,
      {"volume-weighted RMS residual after " +
       std::to_string(sol.newton_steps) + " Newton steps, epsilon 0.05"}));
  out.push_back(make_report("Newton step budget", "eq:ke1",
                            static_cast<double>(sol.newton_steps), 8.0,
                            8.0 - sol.newton_steps, 0.0, false,
                            {"iterations to residual tolerance 1e-11"}));
  for (BoundReport& r : check_c0_estimate(sh.octagon, bg, sol.u))
    out.push_back(std::move(r));
  return out;
}

std::vector<BoundReport> suite_phiwp(Shared& sh) {
  sh.build();
  std::vector<BoundReport> out;

  std::mt19937_64 rng(sh.cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 10; ++trial) {
    RealField chi(sh.spec.num_nodes());
    for (int i = 0; i < chi.size(); ++i) chi[i] = unif(rng);
    RealField phi = solve_phi(sh.spec, chi);
    BoundReport r =
        check_phi_bound(phi, chi, sh.octagon, sh.fiber_diameter);
    worst = std::min(worst, r.margin);
  }
  out.push_back(make_report(
      "geodesic-curvature function lower bound", "eq:est", worst, 0.0, worst,
      1e-6, false,
      {"worst margin over 10 random non-negative sources",
       "seed " + std::to_string(sh.cfg.seed)}));

  std::normal_distribution<double> gauss(0.0, 1.0);
  double det_worst = std::numeric_limits<double>::infinity();
  for (int n : {1, 2, 3, 5})
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXcd c(n + 1, n + 1);
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) c(i, j) = Complex(gauss(rng), gauss(rng));
      Eigen::MatrixXcd full =
          c * c.adjoint() + Eigen::MatrixXcd::Identity(n + 1, n + 1);
      BorderedMetric bm;
      bm.g_ss = full(0, 0).real();
      bm.g_sb = full.block(1, 0, n, 1);
      bm.g_ab = full.block(1, 1, n, n);
      det_worst =
          std::min(det_worst, bordered_determinant_check(bm).report.margin);
    }
  out.push_back(make_report(
      "bordered determinant identity", "eq:varphi", det_worst, 0.0, det_worst,
      1e-12, true,
      {"worst margin over 200 random Hermitian positive-definite metrics,",
       "block sizes 1, 2, 3, 5; seed " + std::to_string(sh.cfg.seed)}));

  out.push_back(make_report(
      "delbar kernel dimension", "qd:kernel",
      static_cast<double>(sh.qd.fields.size()), 3.0,
      -std::abs(static_cast<double>(sh.qd.fields.size()) - 3.0), 0.0, true,
      {"3 = 3g - 3 quadratic differentials on the genus-2 surface"}));
  out.push_back(make_report(
      "delbar kernel separation", "qd:gap", sh.qd.gap, 10.0,
      sh.qd.gap - 10.0, 0.0, false,
      {"singular-value ratio sigma_4 / sigma_3 at resolution " +
       std::to_string(sh.cfg.resolution)}));

  Eigen::MatrixXcd gram(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      gram(i, j) = wp_inner_product(sh.octagon,
                                    KSForm{Field(sh.beltrami[i])},
                                    KSForm{Field(sh.beltrami[j])});
  double herm = (gram - gram.adjoint()).cwiseAbs().maxCoeff() /
                gram.cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  double min_ev = es.eigenvalues().minCoeff();
  out.push_back(make_report("Weil-Petersson Gram matrix is Hermitian",
                            "eq:wpherm", herm, 1e-12, 1e-12 - herm, 0.0, true,
                            {"relative adjoint defect of the 3x3 Gram"}));
  out.push_back(make_report("Weil-Petersson Gram matrix is positive",
                            "eq:wpfib", min_ev, 0.0, min_ev, 0.0, true,
                            {"smallest eigenvalue of the 3x3 Gram"}));
  return out;
}

std::vector<BoundReport> suite_curvature(Shared& sh) {
  sh.build();
  std::vector<BoundReport> out;

  BundleForm one;
  one.p = 0;
  one.m = 1;
  one.values = Field::Constant(sh.spec.num_nodes(), Complex(1, 0));
  CurvatureTensor zero1 =
      curvature_direct_image(sh.spec, 1, 0, sh.beltrami, {one});
  double rel1 = zero1.max_abs() / zero1.scale();
  out.push_back(make_report(
      "direct-image curvature vanishes at the trivial twist", "eq:curvgen",
      rel1, 1e-8, 1e-8 - rel1, 0.0, true,
      {"|R| / scale for p = 0, m = 1 on the octagon family"}));

  std::vector<Field> nu = {Field::Constant(sh.spec.num_nodes(), Complex(1, 0))};
  CurvatureTensor zero2 = curvature_tangent(sh.spec, 0, sh.beltrami, nu);
  double rel2 = zero2.max_abs() / zero2.scale();
  out.push_back(make_report(
      "tangent-image curvature vanishes in degree zero", "eq:curvgendual",
      rel2, 1e-8, 1e-8 - rel2, 0.0, true,
      {"|R| / scale for p = 0 on the octagon family"}));

  std::vector<BundleForm> psi;
  for (const Field& q : sh.qd.fields)
    psi.push_back(canonical_section(sh.octagon, q, 1));
  CurvatureTensor pluri = curvature_pluricanonical(sh.spec, 1, sh.beltrami, psi);
  out.push_back(hermitian_symmetry_check(pluri));
  out.push_back(
      nakano_positivity_check(sh.spec, 1, sh.pn, sh.beltrami, psi, 100,
                              sh.cfg.seed));
  out.push_back(direct_image_estimate_check(sh.spec, sh.pn, 1, 1,
                                            sh.beltrami[0], psi[0]));
  out.push_back(tangent_estimate_check(sh.spec, sh.pn, sh.beltrami[0]));

  // adversarial resonance: all spectral mass below the twist must be refused
  std::mt19937_64 rng(sh.cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int n = 16;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0);
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = Complex(gauss(rng), gauss(rng));
  SyntheticSlot resonant;
  resonant.harmonic.resize(n, 0);
  resonant.complement_eigenvalue = 0.5;
  bool refused = false;
  double reported_mass = 0.0;
  try {
    synthetic_resolvent_minus(resonant, w, 1.0, x);
  } catch (const ResonanceError& e) {
    refused = e.eigenvalue == 0.5;
    reported_mass = e.mass;
  }
  out.push_back(make_report(
      "shifted resolvent refuses resonant spectral mass", "claim:resonance",
      refused ? 1.0 : 0.0, 1.0, refused ? 0.0 : -1.0, 0.0, true,
      {"adversarial synthetic spectrum with complement eigenvalue 0.5 <= m,",
       "refused with reported mass " + std::to_string(reported_mass)}));
  return out;
}

std::vector<BoundReport> suite_finsler(Shared& sh) {
  sh.build();
  std::vector<BoundReport> out;

  auto poincare_square = [](double radius, double half_side, int n) {
    CurveSample s;
    s.h = 2.0 * half_side / (n - 1);
    s.G.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s.G(i, j) = poincare_density(
            radius, {-half_side + s.h * i, -half_side + s.h * j});
    return s;
  };
  CurveSample g1 = poincare_square(1.0, 0.3, 13);
  CurveSample g2 = poincare_square(2.0, 0.3, 13);
  out.push_back(convex_sum_curvature_check({g1, g2}, {0.7, 1.3}));
  BoundReport single = convex_sum_curvature_check({g1}, {1.0});
  single.name += " (single-summand identity)";
  out.push_back(single);

  std::vector<Field> family = {sh.beltrami[0], 0.5 * sh.beltrami[1],
                               Field(sh.beltrami[0] + sh.beltrami[2])};
  out.push_back(finsler_curvature_bound_check(sh.spec, sh.pn, family));

  const int n = 41;
  const double radius = 1.0, h = 2.0 / (n - 1);
  DiskGrid grid;
  grid.radius = radius;
  grid.gamma.setZero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex z(-radius + h * i, -radius + h * j);
      if (std::abs(z) <= 0.7)
        grid.gamma(i, j) = 0.8 * poincare_density(radius, z);
    }
  AhlforsSchwarzResult ahl = ahlfors_schwarz_check(grid, 1.0);
  out.push_back(ahl.hypothesis);
  out.push_back(ahl.conclusion);
  return out;
}

nlohmann::json report_json(const BoundReport& r) {
  return nlohmann::json{
      {"name", r.name},       {"check_id", r.check_id},
      {"lhs", r.lhs},         {"rhs", r.rhs},
      {"margin", r.margin},   {"slack_used", r.slack_used},
      {"pass", r.pass},       {"hard", r.hard},
      {"provenance", r.provenance}};
}

}  // namespace

SuiteConfig config_from_text(const std::string& text) {
  SuiteConfig cfg;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    cfg.raw[section.empty() ? key : section + "." + key] = value;
  }

  auto get = [&](const std::string& key) -> const std::string* {
    auto it = cfg.raw.find(key);
    return it == cfg.raw.end() ? nullptr : &it->second;
  };
  if (const std::string* v = get("suite.suites")) cfg.suites = split_list(*v);
  if (const std::string* v = get("suite.resolution"))
    cfg.resolution = std::stoi(*v);
  if (const std::string* v = get("suite.torus_resolution"))
    cfg.torus_resolution = std::stoi(*v);
  if (const std::string* v = get("suite.seed")) cfg.seed = std::stoull(*v);
  if (const std::string* v = get("suite.soft_strict"))
    cfg.soft_strict = (*v == "true" || *v == "1");
  if (const std::string* v = get("suite.cache_dir")) cfg.cache_dir = *v;
  if (const std::string* v = get("suite.out_dir")) cfg.out_dir = *v;
  for (const std::string& s : cfg.suites) {
    bool known = false;
    for (const std::string& k : kAllSuites) known |= (s == k);
    if (!known) throw std::invalid_argument("unknown suite: " + s);
  }
  return cfg;
}

SuiteConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_text(buf.str());
}

SuiteBundle run_suite(const SuiteConfig& cfg) {
  static const std::map<std::string,
                        std::function<std::vector<BoundReport>(Shared&)>>
      runners = {{"resolvent", suite_resolvent}, {"spectral", suite_spectral},
                 {"fiber", suite_fiber},         {"ke", suite_ke},
                 {"phiwp", suite_phiwp},         {"curvature", suite_curvature},
                 {"finsler", suite_finsler}};

  std::vector<std::string> selected =
      cfg.suites.empty() ? kAllSuites : cfg.suites;
  std::filesystem::create_directories(cfg.out_dir);
  Shared sh(cfg);
  SuiteBundle bundle;
  bundle.hard_pass = true;
  bundle.all_pass = true;
  for (const std::string& name : selected) {
    auto it = runners.find(name);
    if (it == runners.end())
      throw std::invalid_argument("unknown suite: " + name);
    SuiteResult res;
    res.suite = name;
    try {
      res.reports = it->second(sh);
    } catch (const std::exception& e) {
      throw std::runtime_error("suite '" + name + "' failed: " + e.what());
    }
    for (const BoundReport& r : res.reports) {
      bundle.all_pass &= r.pass;
      if (r.hard) bundle.hard_pass &= r.pass;
    }
    bundle.results.push_back(std::move(res));
  }
  return bundle;
}

void write_pn_table(const std::string& path, int n, double r_min, double r_max,
                    int steps) {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (steps < 2 || !(r_max > r_min) || r_min <= 0.0)
    throw std::invalid_argument("need r_max > r_min > 0 and steps >= 2");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "r,P_n,bessel_estimate,margin\n";
  out.precision(17);
  for (int i = 0; i < steps; ++i) {
    double r = r_min + (r_max - r_min) * i / (steps - 1);
    double p = resolvent_lower_bound_value(n, r);
    double b = bessel_estimate(n, r);
    out << r << "," << p << "," << b << "," << (p - b) << "\n";
  }
}

int write_bundle(const SuiteBundle& bundle, const SuiteConfig& cfg) {
  nlohmann::json j;
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : cfg.raw) config[k] = v;
  config["resolution"] = cfg.resolution;
  config["torus_resolution"] = cfg.torus_resolution;
  config["seed"] = cfg.seed;
  config["soft_strict"] = cfg.soft_strict;
  j["config"] = config;
  {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;  // the only non-deterministic field
  }
  nlohmann::json suites = nlohmann::json::array();
  for (const SuiteResult& res : bundle.results) {
    nlohmann::json s;
    s["suite"] = res.suite;
    nlohmann::json reports = nlohmann::json::array();
    for (const BoundReport& r : res.reports) reports.push_back(report_json(r));
    s["reports"] = reports;
    suites.push_back(s);
  }
  j["suites"] = suites;
  j["hard_pass"] = bundle.hard_pass;
  j["all_pass"] = bundle.all_pass;

  std::ofstream out(cfg.out_dir + "/report.json");
  if (!out)
    throw std::runtime_error("cannot write report bundle in " + cfg.out_dir);
  out << j.dump(2) << "\n";
  out.close();

  std::ofstream csv(cfg.out_dir + "/margins.csv");
  csv << "suite,name,check_id,lhs,rhs,margin,slack_used,pass,hard\n";
  csv.precision(17);
  for (const SuiteResult& res : bundle.results)
    for (const BoundReport& r : res.reports)
      csv << res.suite << ",\"" << r.name << "\"," << r.check_id << ","
          << r.lhs << "," << r.rhs << "," << r.margin << "," << r.slack_used
          << "," << (r.pass ? 1 : 0) << "," << (r.hard ? 1 : 0) << "\n";
  csv.close();

  std::vector<double> xs;
  std::vector<double> p1, b2;
  for (int i = 0; i < 40; ++i) {
    double r = 0.2 + (4.0 - 0.2) * i / 39.0;
    xs.push_back(r);
    p1.push_back(std::log10(resolvent_lower_bound_value(1, r)));
    b2.push_back(std::log10(resolvent_lower_bound_value(2, r)));
  }
  write_curve_svg(cfg.out_dir + "/resolvent_bound.svg", xs, {p1, b2},
                  {"log10 P_1", "log10 P_2"},
                  "resolvent lower bound vs distance");

  bool ok = bundle.hard_pass && (!cfg.soft_strict || bundle.all_pass);
  return ok ? 0 : 1;
}

}  // namespace kwp
