#ifndef KWP_CAPI_H
#define KWP_CAPI_H

/* C interface of the kwp shared library. All functions returning int yield
 * an error code; 0 is success. On failure kwp_last_error_message() returns
 * a human-readable description (thread-local, valid until the next call on
 * the same thread). Handles are opaque and freed with the matching _free. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  KWP_OK = 0,
  KWP_ERR_INVALID_ARGUMENT = 1, /* bad parameters or malformed input data */
  KWP_ERR_RUNTIME = 2,          /* solver / numeric failure */
  KWP_ERR_RESONANCE = 3,        /* shifted resolvent refused spectral mass */
  KWP_ERR_QUADRATURE = 4,       /* quadrature tolerance not reached */
  KWP_ERR_IO = 5                /* file cannot be read or written */
};

const char* kwp_last_error_message(void);

/* ---- resolvent lower bounds ---- */

/* P_n(r) by adaptive quadrature to absolute tolerance abs_tol (<= 0 uses
 * the default 1e-10). */
int kwp_pn_value(int n, double r, double abs_tol, double* out);
int kwp_bessel_estimate(int n, double r, double* out);
/* CSV columns: r, P_n, bessel_estimate, margin. */
int kwp_pn_table(int n, double r_min, double r_max, int steps,
                 const char* out_csv);

/* ---- model fibers ---- */

typedef struct kwp_fiber_s kwp_fiber;

/* kind is "torus" or "octagon"; side is the torus side length (ignored for
 * the octagon). */
int kwp_fiber_build(const char* kind, int resolution, double side,
                    kwp_fiber** out);
int kwp_fiber_load(const char* path, kwp_fiber** out);
int kwp_fiber_save(const kwp_fiber* fiber, const char* path);
void kwp_fiber_free(kwp_fiber* fiber);
int kwp_fiber_num_dofs(const kwp_fiber* fiber);
double kwp_fiber_total_area(const kwp_fiber* fiber);
double kwp_fiber_diameter(const kwp_fiber* fiber);

/* ---- Laplacian spectra ---- */

typedef struct kwp_spectrum_s kwp_spectrum;

int kwp_spectrum_compute(const kwp_fiber* fiber, kwp_spectrum** out);
int kwp_spectrum_load(const char* path, kwp_spectrum** out);
int kwp_spectrum_save(const kwp_spectrum* spec, const char* path);
void kwp_spectrum_free(kwp_spectrum* spec);
int kwp_spectrum_num_modes(const kwp_spectrum* spec);
int kwp_spectrum_eigenvalue(const kwp_spectrum* spec, int index, double* out);

/* ---- fiberwise solvers and checks (file-to-file) ---- */

/* Monge-Ampere solve on the fiber with a built-in smooth perturbation of
 * size epsilon; writes u per dof to out_csv (optional) and the residual plus
 * both C0-estimate reports to report_json (optional). */
int kwp_ke_solve(const kwp_fiber* fiber, double epsilon, double tol,
                 const char* out_csv, const char* report_json);

/* Geodesic-curvature function of the direction-th quadratic-differential
 * deformation (0-based): solves (box+1) phi = |A|^2 and writes node, chi,
 * phi to out_csv (optional); kwp_phi_check also writes the positivity-bound
 * report. spec may be NULL (computed on the fly, octagon meshes only). */
int kwp_phi_solve(const kwp_fiber* fiber, const kwp_spectrum* spec,
                  int direction, const char* out_csv);
int kwp_phi_check(const kwp_fiber* fiber, const kwp_spectrum* spec,
                  int direction, const char* out_csv,
                  const char* report_json);

/* Weil-Petersson Gram matrix of the quadratic-differential basis; CSV rows
 * i, j, re, im plus Hermiticity/positivity reports. */
int kwp_wp_gram(const kwp_fiber* fiber, const char* out_csv,
                const char* report_json);

/* Quadratic-differential basis: CSV of the residual spectrum and the basis
 * fields; *gap receives sigma_4 / sigma_3 (may be NULL). */
int kwp_qdiff_basis(const kwp_fiber* fiber, const char* out_csv, double* gap);

/* ---- curvature and Finsler drivers (JSON-to-JSON, schemas in README) ---- */

int kwp_curvature_run(const char* mode, int m, int p, const char* in_json,
                      const char* out_tensor_json, const char* report_json);

/* kind is "convex-sum", "curve-bound", or "ahlfors"; svg_path optional. */
int kwp_finsler_check(const char* kind, const char* in_json,
                      const char* report_json, const char* svg_path);

/* ---- verification suites ---- */

/* Runs the suites (comma list, NULL or "" = all) with the given config file
 * (optional), octagon resolution (<= 0 keeps the config value), and seed;
 * writes report.json, margins.csv, and resolvent_bound.svg under out_dir.
 * *exit_code receives 0 iff all hard assertions pass. */
int kwp_verify(const char* config_path, const char* suites_csv,
               int resolution, uint64_t seed, const char* out_dir,
               int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* KWP_CAPI_H */
