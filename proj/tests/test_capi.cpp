#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kwp/capi.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "kwp-capi-test";
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string write_json_file(const TempDir& dir, const std::string& name,
                            const json& j) {
  std::string p = dir.file(name);
  std::ofstream out(p);
  out << j.dump();
  return p;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

json pair(double re, double im) { return json::array({re, im}); }

// n rows of c [re, im] component pairs, values varied but deterministic
json component_rows(int n, int c, double scale) {
  json rows = json::array();
  for (int v = 0; v < n; ++v) {
    json row = json::array();
    for (int k = 0; k < c; ++k)
      row.push_back(pair(scale * std::sin(1.0 + v + 2 * k),
                         scale * std::cos(2.0 + 3 * v - k)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("resolvent bound values and error reporting") {
  double value = 0.0;
  REQUIRE(kwp_pn_value(1, 1.0, 0.0, &value) == KWP_OK);
  CHECK(value ==
        doctest::Approx(std::cyl_bessel_k(0.0, std::sqrt(5.0)) / M_PI)
            .epsilon(1e-9));

  double est = 0.0;
  REQUIRE(kwp_bessel_estimate(2, 1.5, &est) == KWP_OK);
  CHECK(est > 0.0);

  CHECK(kwp_pn_value(0, 1.0, 0.0, &value) == KWP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(kwp_last_error_message()).size() > 0);
  CHECK(kwp_pn_value(1, 1.0, 0.0, nullptr) == KWP_ERR_INVALID_ARGUMENT);

  TempDir dir;
  std::string csv = dir.file("pn.csv");
  REQUIRE(kwp_pn_table(1, 0.5, 2.0, 4, csv.c_str()) == KWP_OK);
  std::ifstream in(csv);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "r,P_n,bessel_estimate,margin");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 4);

  CHECK(kwp_pn_table(1, 2.0, 0.5, 4, csv.c_str()) ==
        KWP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fiber handles: build, save, load, queries") {
  kwp_fiber* fiber = nullptr;
  REQUIRE(kwp_fiber_build("octagon", 3, 1.0, &fiber) == KWP_OK);
  REQUIRE(fiber != nullptr);
  int dofs = kwp_fiber_num_dofs(fiber);
  CHECK(dofs == 254);
  double area = kwp_fiber_total_area(fiber);
  CHECK(area == doctest::Approx(4.0 * M_PI).epsilon(0.02));
  CHECK(kwp_fiber_diameter(fiber) > 0.0);

  TempDir dir;
  std::string mesh = dir.file("mesh.txt");
  REQUIRE(kwp_fiber_save(fiber, mesh.c_str()) == KWP_OK);

  kwp_fiber* loaded = nullptr;
  REQUIRE(kwp_fiber_load(mesh.c_str(), &loaded) == KWP_OK);
  CHECK(kwp_fiber_num_dofs(loaded) == dofs);
  CHECK(kwp_fiber_total_area(loaded) == doctest::Approx(area).epsilon(1e-12));
  kwp_fiber_free(loaded);

  kwp_fiber* bad = nullptr;
  CHECK(kwp_fiber_build("sphere", 3, 1.0, &bad) == KWP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(kwp_last_error_message()).size() > 0);
  CHECK(kwp_fiber_load(dir.file("missing.txt").c_str(), &bad) == KWP_ERR_IO);

  kwp_fiber_free(fiber);
}

TEST_CASE("spectrum handles and fiberwise drivers") {
  kwp_fiber* fiber = nullptr;
  REQUIRE(kwp_fiber_build("octagon", 3, 1.0, &fiber) == KWP_OK);

  kwp_spectrum* spec = nullptr;
  REQUIRE(kwp_spectrum_compute(fiber, &spec) == KWP_OK);
  int modes = kwp_spectrum_num_modes(spec);
  CHECK(modes == kwp_fiber_num_dofs(fiber));
  double lam0 = -1.0, lam1 = -1.0;
  REQUIRE(kwp_spectrum_eigenvalue(spec, 0, &lam0) == KWP_OK);
  REQUIRE(kwp_spectrum_eigenvalue(spec, 1, &lam1) == KWP_OK);
  CHECK(std::abs(lam0) < 1e-8);
  CHECK(lam1 > 0.5);
  CHECK(kwp_spectrum_eigenvalue(spec, modes, &lam0) ==
        KWP_ERR_INVALID_ARGUMENT);

  TempDir dir;
  std::string cache = dir.file("spec.spectrum");
  REQUIRE(kwp_spectrum_save(spec, cache.c_str()) == KWP_OK);
  kwp_spectrum* reloaded = nullptr;
  REQUIRE(kwp_spectrum_load(cache.c_str(), &reloaded) == KWP_OK);
  double lam1b = -1.0;
  REQUIRE(kwp_spectrum_eigenvalue(reloaded, 1, &lam1b) == KWP_OK);
  CHECK(lam1b == doctest::Approx(lam1).epsilon(1e-12));
  kwp_spectrum_free(reloaded);
  kwp_spectrum* missing = nullptr;
  CHECK(kwp_spectrum_load(dir.file("absent.spectrum").c_str(), &missing) ==
        KWP_ERR_IO);

  std::string ke_csv = dir.file("ke.csv");
  std::string ke_report = dir.file("ke.json");
  REQUIRE(kwp_ke_solve(fiber, 0.05, 1e-11, ke_csv.c_str(),
                       ke_report.c_str()) == KWP_OK);
  CHECK(fs::exists(ke_csv));
  json ke = read_json_file(ke_report);
  REQUIRE(ke.is_array());
  REQUIRE(ke.size() >= 1);
  CHECK(ke[0].value("pass", false));

  std::string phi_csv = dir.file("phi.csv");
  std::string phi_report = dir.file("phi.json");
  REQUIRE(kwp_phi_solve(fiber, spec, 0, phi_csv.c_str()) == KWP_OK);
  CHECK(fs::exists(phi_csv));
  REQUIRE(kwp_phi_check(fiber, spec, 1, nullptr, phi_report.c_str()) ==
          KWP_OK);
  json phi = read_json_file(phi_report);
  REQUIRE(phi.is_array());
  CHECK(phi[0].value("check_id", std::string()) == "eq:est");
  CHECK(kwp_phi_solve(fiber, spec, 7, phi_csv.c_str()) ==
        KWP_ERR_INVALID_ARGUMENT);

  std::string gram_csv = dir.file("gram.csv");
  std::string gram_report = dir.file("gram.json");
  REQUIRE(kwp_wp_gram(fiber, gram_csv.c_str(), gram_report.c_str()) ==
          KWP_OK);
  json gram = read_json_file(gram_report);
  REQUIRE(gram.is_array());
  for (const json& r : gram) CHECK(r.value("pass", false));

  std::string qd_csv = dir.file("qd.csv");
  double gap = 0.0;
  REQUIRE(kwp_qdiff_basis(fiber, qd_csv.c_str(), &gap) == KWP_OK);
  CHECK(gap > 1.0);
  CHECK(fs::exists(qd_csv));

  kwp_spectrum_free(spec);
  kwp_fiber_free(fiber);
}

TEST_CASE("curvature driver: synthetic runs, resonance refusal, geometry") {
  TempDir dir;
  const int n = 6;

  json base;
  base["weights"] = std::vector<double>(n, 1.0);
  base["a"] = json::array({component_rows(n, 4, 1.0)});
  base["psi"] = json::array({component_rows(n, 4, 0.7)});
  base["function_slot"] = {{"harmonic", json::array()},
                           {"complement_eigenvalue", 5.0}};
  base["plus_slot"] = {{"harmonic", json::array()},
                       {"complement_eigenvalue", 5.0}};
  base["minus_slot"] = {{"harmonic", json::array()},
                        {"complement_eigenvalue", 5.0}};

  std::string in_path = write_json_file(dir, "synthetic.json", base);
  std::string tensor_path = dir.file("tensor.json");
  std::string report_path = dir.file("report.json");
  REQUIRE(kwp_curvature_run("synthetic", 2, 1, in_path.c_str(),
                            tensor_path.c_str(),
                            report_path.c_str()) == KWP_OK);
  json tensor = read_json_file(tensor_path);
  CHECK(tensor["na"].get<int>() == 1);
  CHECK(tensor["ns"].get<int>() == 1);
  REQUIRE(tensor["entries"].is_array());
  REQUIRE(tensor["entries"].size() == 1);
  // diagonal entries of a curvature form are real
  CHECK(std::abs(tensor["entries"][0][1].get<double>()) <
        1e-10 * (1.0 + std::abs(tensor["entries"][0][0].get<double>())));
  json report = read_json_file(report_path);
  CHECK(report[0].value("pass", false));

  // spectral mass at or below the twist must be refused, not inverted
  json resonant = base;
  resonant["minus_slot"] = {{"harmonic", json::array()},
                            {"complement_eigenvalue", 0.5}};
  std::string res_path = write_json_file(dir, "resonant.json", resonant);
  CHECK(kwp_curvature_run("synthetic", 1, 1, res_path.c_str(),
                          tensor_path.c_str(),
                          nullptr) == KWP_ERR_RESONANCE);
  CHECK(std::string(kwp_last_error_message()).size() > 0);

  json geom;
  geom["resolution"] = 3;
  std::string geom_path = write_json_file(dir, "geom.json", geom);
  std::string geom_tensor = dir.file("geom_tensor.json");
  REQUIRE(kwp_curvature_run("geom1d", 1, 1, geom_path.c_str(),
                            geom_tensor.c_str(),
                            report_path.c_str()) == KWP_OK);
  json gt = read_json_file(geom_tensor);
  CHECK(gt["na"].get<int>() == 3);
  CHECK(read_json_file(report_path)[0].value("pass", false));

  CHECK(kwp_curvature_run("bogus", 1, 1, geom_path.c_str(), nullptr,
                          nullptr) == KWP_ERR_INVALID_ARGUMENT);
  CHECK(kwp_curvature_run("synthetic", 1, 1,
                          dir.file("nope.json").c_str(), nullptr,
                          nullptr) == KWP_ERR_IO);
}

TEST_CASE("finsler driver kinds") {
  TempDir dir;
  std::string report_path = dir.file("finsler.json");

  // single poincare density: equality case of the convex combination bound
  const int m = 21;
  const double h = 0.04;
  json density = json::array();
  for (int i = 0; i < m; ++i) {
    json row = json::array();
    for (int j = 0; j < m; ++j) {
      double x = -0.4 + h * i, y = -0.4 + h * j;
      double R2 = 1.0, s2 = x * x + y * y;
      row.push_back(2.0 * R2 * R2 / ((R2 - s2) * (R2 - s2)));
    }
    density.push_back(row);
  }
  json convex = {{"h", h},
                 {"coeffs", json::array({1.0})},
                 {"densities", json::array({density})}};
  std::string convex_path = write_json_file(dir, "convex.json", convex);
  REQUIRE(kwp_finsler_check("convex-sum", convex_path.c_str(),
                            report_path.c_str(), nullptr) == KWP_OK);
  json r = read_json_file(report_path);
  CHECK(r[0].value("check_id", std::string()) == "eq:curvest");
  CHECK(r[0].value("pass", false));

  json ahlfors;
  ahlfors["radius"] = 1.0;
  ahlfors["a"] = 0.64;
  json gamma = json::array();
  const int ng = 41;
  const double hg = 2.0 / (ng - 1);
  for (int i = 0; i < ng; ++i) {
    json row = json::array();
    for (int j = 0; j < ng; ++j) {
      double x = -1.0 + hg * i, y = -1.0 + hg * j;
      double s2 = x * x + y * y;
      row.push_back(s2 <= 0.49 ? 0.8 * 2.0 / ((1.0 - s2) * (1.0 - s2))
                               : 0.0);
    }
    gamma.push_back(row);
  }
  ahlfors["gamma"] = gamma;
  std::string ahl_path = write_json_file(dir, "ahlfors.json", ahlfors);
  REQUIRE(kwp_finsler_check("ahlfors", ahl_path.c_str(), report_path.c_str(),
                            nullptr) == KWP_OK);
  json ar = read_json_file(report_path);
  REQUIRE(ar.size() == 2);
  CHECK(ar[0].value("pass", false));
  CHECK(ar[1].value("pass", false));

  json curve;
  curve["resolution"] = 3;
  curve["samples"] = json::array({
      json::array({pair(1, 0), pair(0, 0), pair(0, 0)}),
      json::array({pair(0, 0), pair(0.5, 0), pair(0, 0)}),
      json::array({pair(1, 0), pair(0, 0), pair(1, 0)}),
  });
  std::string curve_path = write_json_file(dir, "curve.json", curve);
  std::string svg_path = dir.file("curve.svg");
  REQUIRE(kwp_finsler_check("curve-bound", curve_path.c_str(),
                            report_path.c_str(), svg_path.c_str()) == KWP_OK);
  json cr = read_json_file(report_path);
  CHECK(cr[0].value("check_id", std::string()) == "eq:curvgp");
  std::ifstream svg(svg_path);
  std::stringstream buf;
  buf << svg.rdbuf();
  CHECK(buf.str().rfind("<svg", 0) == 0);

  CHECK(kwp_finsler_check("nope", convex_path.c_str(), nullptr, nullptr) ==
        KWP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("verification entry point is deterministic modulo timestamp") {
  TempDir dir;
  fs::create_directories(dir.path / "run1");
  fs::create_directories(dir.path / "run2");
  int exit_code = -1;
  REQUIRE(kwp_verify(nullptr, "resolvent", 3, 1,
                     dir.file("run1").c_str(), &exit_code) == KWP_OK);
  CHECK(exit_code == 0);
  REQUIRE(kwp_verify(nullptr, "resolvent", 3, 1,
                     dir.file("run2").c_str(), &exit_code) == KWP_OK);
  CHECK(exit_code == 0);

  json a = read_json_file(dir.file("run1/report.json"));
  json b = read_json_file(dir.file("run2/report.json"));
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(a == b);
  CHECK(fs::exists(dir.file("run1/margins.csv")));
  CHECK(fs::exists(dir.file("run1/resolvent_bound.svg")));

  CHECK(kwp_verify(nullptr, "made-up-suite", 3, 1, dir.file("run1").c_str(),
                   &exit_code) == KWP_ERR_INVALID_ARGUMENT);
}
