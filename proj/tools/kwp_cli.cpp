#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "kwp/capi.h"

namespace {

int report_error(int code) {
  std::fprintf(stderr, "error (%d): %s\n", code, kwp_last_error_message());
  return code == KWP_OK ? 0 : 2;
}

struct FiberArgs {
  std::string mesh;
  std::string kind = "octagon";
  int resolution = 4;
  double side = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mesh", mesh, "mesh file produced by 'fiber build'");
    cmd->add_option("--kind", kind, "torus or octagon (when no --mesh)");
    cmd->add_option("--resolution", resolution, "mesh resolution");
    cmd->add_option("--side", side, "torus side length");
  }

  int open(kwp_fiber** out) const {
    if (!mesh.empty()) return kwp_fiber_load(mesh.c_str(), out);
    return kwp_fiber_build(kind.c_str(), resolution, side, out);
  }
};

std::string cache_path(const std::string& kind, int resolution) {
  const char* dir = std::getenv("KWP_CACHE_DIR");
  if (!dir || !*dir) return "";
  return std::string(dir) + "/" + kind + "-res" + std::to_string(resolution) +
         ".spectrum";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks for fibered Kahler-Einstein geometry"};
  app.require_subcommand(1);

  // pn-table
  auto* pn = app.add_subcommand("pn-table",
                                "tabulate the resolvent lower bound P_n(r)");
  int pn_n = 1, pn_steps = 50;
  double pn_rmin = 0.1, pn_rmax = 5.0;
  std::string pn_out = "pn_table.csv";
  pn->add_option("--n", pn_n, "fiber dimension");
  pn->add_option("--r-min", pn_rmin, "smallest distance");
  pn->add_option("--r-max", pn_rmax, "largest distance");
  pn->add_option("--steps", pn_steps, "number of grid points");
  pn->add_option("--out", pn_out, "output CSV");

  // fiber build
  auto* fiber_cmd = app.add_subcommand("fiber", "model fiber operations");
  auto* fiber_build = fiber_cmd->add_subcommand("build", "triangulate a fiber");
  FiberArgs fb;
  fb.attach(fiber_build);
  std::string fb_out = "mesh.txt";
  fiber_build->add_option("--out", fb_out, "output mesh file");

  // spectrum
  auto* spectrum = app.add_subcommand(
      "spectrum", "compute and cache the Laplacian eigendecomposition");
  FiberArgs sp_args;
  sp_args.attach(spectrum);
  std::string sp_out;
  spectrum->add_option("--out", sp_out,
                       "output file (default: KWP_CACHE_DIR cache entry)");

  // ke solve
  auto* ke = app.add_subcommand("ke", "fiberwise Monge-Ampere solver");
  auto* ke_solve = ke->add_subcommand("solve", "solve the volume equation");
  FiberArgs ke_args;
  ke_args.attach(ke_solve);
  double ke_eps = 0.05, ke_tol = 1e-11;
  std::string ke_out, ke_report;
  ke_solve->add_option("--epsilon", ke_eps, "background perturbation size");
  ke_solve->add_option("--tol", ke_tol, "Newton residual tolerance");
  ke_solve->add_option("--out", ke_out, "solution CSV");
  ke_solve->add_option("--report", ke_report, "report JSON");

  // phi solve / check
  auto* phi = app.add_subcommand("phi", "geodesic-curvature function");
  auto* phi_solve = phi->add_subcommand("solve", "solve (box+1) phi = |A|^2");
  auto* phi_check =
      phi->add_subcommand("check", "solve and verify the lower bound");
  FiberArgs phi_args;
  int phi_dir = 0;
  std::string phi_out, phi_report;
  for (CLI::App* cmd : {phi_solve, phi_check}) {
    phi_args.attach(cmd);
    cmd->add_option("--direction", phi_dir, "deformation direction (0-based)");
    cmd->add_option("--out", phi_out, "solution CSV");
  }
  phi_check->add_option("--report", phi_report, "report JSON");

  // wp gram
  auto* wp = app.add_subcommand("wp", "Weil-Petersson metric");
  auto* wp_gram = wp->add_subcommand("gram", "Gram matrix of the basis");
  FiberArgs wp_args;
  wp_args.attach(wp_gram);
  std::string wp_out = "wp_gram.csv", wp_report;
  wp_gram->add_option("--out", wp_out, "Gram CSV");
  wp_gram->add_option("--report", wp_report, "report JSON");

  // qdiff basis
  auto* qd = app.add_subcommand("qdiff", "quadratic differentials");
  auto* qd_basis = qd->add_subcommand("basis", "delbar kernel basis");
  FiberArgs qd_args;
  qd_args.attach(qd_basis);
  std::string qd_out = "qdiff_basis.csv";
  qd_basis->add_option("--out", qd_out, "basis CSV");

  // curvature
  auto* curv = app.add_subcommand("curvature",
                                  "direct-image curvature tensors");
  std::string curv_mode = "geom1d", curv_in, curv_out = "tensor.json",
              curv_report;
  int curv_m = 1, curv_p = 1;
  curv->add_option("--mode", curv_mode, "geom1d or synthetic");
  curv->add_option("--m", curv_m, "canonical twist");
  curv->add_option("--p", curv_p, "holomorphic degree");
  curv->add_option("--in", curv_in, "bundle JSON (see README)");
  curv->add_option("--out", curv_out, "tensor JSON");
  curv->add_option("--report", curv_report, "report JSON");

  // finsler check
  auto* fin = app.add_subcommand("finsler", "Finsler hyperbolicity checks");
  auto* fin_check = fin->add_subcommand("check", "run one inequality check");
  std::string fin_kind, fin_in, fin_report = "finsler_report.json", fin_svg;
  fin_check->add_option("--kind", fin_kind,
                        "convex-sum, curve-bound, or ahlfors")
      ->required();
  fin_check->add_option("--in", fin_in, "input JSON (see README)")->required();
  fin_check->add_option("--report", fin_report, "report JSON");
  fin_check->add_option("--svg", fin_svg, "optional curvature plot");

  // verify all
  auto* verify = app.add_subcommand("verify", "run verification suites");
  auto* verify_all = verify->add_subcommand("all", "run the selected suites");
  std::string v_config, v_suites, v_out = ".";
  int v_resolution = 0;
  std::uint64_t v_seed = 1;
  verify_all->add_option("--config", v_config, "key-value config file");
  verify_all->add_option("--suites", v_suites,
                         "comma list (default: all suites)");
  verify_all->add_option("--resolution", v_resolution,
                         "octagon resolution override");
  verify_all->add_option("--seed", v_seed, "seed for randomized suites");
  verify_all->add_option("--out-dir", v_out, "report output directory");

  CLI11_PARSE(app, argc, argv);

  int rc = KWP_OK;
  if (*pn) {
    rc = kwp_pn_table(pn_n, pn_rmin, pn_rmax, pn_steps, pn_out.c_str());
    if (rc == KWP_OK) std::printf("wrote %s\n", pn_out.c_str());
  } else if (*fiber_build) {
    kwp_fiber* f = nullptr;
    rc = fb.open(&f);
    if (rc == KWP_OK) {
      rc = kwp_fiber_save(f, fb_out.c_str());
      if (rc == KWP_OK)
        std::printf("wrote %s (%d dofs, area %.6f)\n", fb_out.c_str(),
                    kwp_fiber_num_dofs(f), kwp_fiber_total_area(f));
    }
    kwp_fiber_free(f);
  } else if (*spectrum) {
    kwp_fiber* f = nullptr;
    rc = sp_args.open(&f);
    if (rc == KWP_OK) {
      std::string out = sp_out;
      if (out.empty()) out = cache_path(sp_args.kind, sp_args.resolution);
      if (out.empty()) {
        std::fprintf(stderr,
                     "no --out given and KWP_CACHE_DIR is not set\n");
        rc = KWP_ERR_INVALID_ARGUMENT;
      } else {
        kwp_spectrum* s = nullptr;
        rc = kwp_spectrum_compute(f, &s);
        if (rc == KWP_OK) rc = kwp_spectrum_save(s, out.c_str());
        if (rc == KWP_OK)
          std::printf("wrote %s (%d modes)\n", out.c_str(),
                      kwp_spectrum_num_modes(s));
        kwp_spectrum_free(s);
      }
    }
    kwp_fiber_free(f);
  } else if (*ke_solve) {
    kwp_fiber* f = nullptr;
    rc = ke_args.open(&f);
    if (rc == KWP_OK)
      rc = kwp_ke_solve(f, ke_eps, ke_tol,
                        ke_out.empty() ? nullptr : ke_out.c_str(),
                        ke_report.empty() ? nullptr : ke_report.c_str());
    if (rc == KWP_OK) std::printf("solved to tolerance %g\n", ke_tol);
    kwp_fiber_free(f);
  } else if (*phi_solve || *phi_check) {
    kwp_fiber* f = nullptr;
    rc = phi_args.open(&f);
    if (rc == KWP_OK) {
      if (*phi_check)
        rc = kwp_phi_check(f, nullptr, phi_dir,
                           phi_out.empty() ? nullptr : phi_out.c_str(),
                           phi_report.empty() ? nullptr : phi_report.c_str());
      else
        rc = kwp_phi_solve(f, nullptr, phi_dir,
                           phi_out.empty() ? nullptr : phi_out.c_str());
    }
    if (rc == KWP_OK) std::printf("done\n");
    kwp_fiber_free(f);
  } else if (*wp_gram) {
    kwp_fiber* f = nullptr;
    rc = wp_args.open(&f);
    if (rc == KWP_OK)
      rc = kwp_wp_gram(f, wp_out.c_str(),
                       wp_report.empty() ? nullptr : wp_report.c_str());
    if (rc == KWP_OK) std::printf("wrote %s\n", wp_out.c_str());
    kwp_fiber_free(f);
  } else if (*qd_basis) {
    kwp_fiber* f = nullptr;
    rc = qd_args.open(&f);
    double gap = 0.0;
    if (rc == KWP_OK) rc = kwp_qdiff_basis(f, qd_out.c_str(), &gap);
    if (rc == KWP_OK)
      std::printf("wrote %s (kernel gap %.3f)\n", qd_out.c_str(), gap);
    kwp_fiber_free(f);
  } else if (*curv) {
    rc = kwp_curvature_run(curv_mode.c_str(), curv_m, curv_p,
                           curv_in.empty() ? nullptr : curv_in.c_str(),
                           curv_out.c_str(),
                           curv_report.empty() ? nullptr : curv_report.c_str());
    if (rc == KWP_OK) std::printf("wrote %s\n", curv_out.c_str());
  } else if (*fin_check) {
    rc = kwp_finsler_check(fin_kind.c_str(), fin_in.c_str(),
                           fin_report.c_str(),
                           fin_svg.empty() ? nullptr : fin_svg.c_str());
    if (rc == KWP_OK) std::printf("wrote %s\n", fin_report.c_str());
  } else if (*verify_all) {
    int exit_code = 1;
    rc = kwp_verify(v_config.empty() ? nullptr : v_config.c_str(),
                    v_suites.empty() ? nullptr : v_suites.c_str(),
                    v_resolution, v_seed, v_out.c_str(), &exit_code);
    if (rc != KWP_OK) return report_error(rc);
    std::printf("report bundle written to %s (%s)\n", v_out.c_str(),
                exit_code == 0 ? "all hard checks pass" : "hard check FAILED");
    return exit_code;
  }

  if (rc != KWP_OK) return report_error(rc);
  return 0;
}
