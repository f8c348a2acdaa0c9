#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kwp/report.hpp"

namespace kwp {

// Orchestration: builds fibers, caches spectra, runs the verification
// suites, and emits a JSON report bundle plus CSV tables and SVG plots.

struct SuiteConfig {
  // suites to run; empty means all of: resolvent, spectral, fiber, ke,
  // phiwp, curvature, finsler
  std::vector<std::string> suites;
  int resolution = 4;        // octagon resolution
  int torus_resolution = 32; // calibration torus resolution
  std::uint64_t seed = 1;    // mandatory for randomized suites
  bool soft_strict = false;  // exit code also depends on soft margins
  std::string cache_dir;     // spectrum cache; empty = KWP_CACHE_DIR or off
  std::string out_dir = "."; // where the bundle, CSV, and SVG files go

  // raw section.key -> value pairs as parsed, echoed into provenance
  std::map<std::string, std::string> raw;
};

// Key-value config file: `key = value` lines, `#` comments, `[section]`
// headers prefixing subsequent keys as "section.key". Recognized keys:
// suite.suites (comma list), suite.resolution, suite.torus_resolution,
// suite.seed, suite.soft_strict, suite.cache_dir, suite.out_dir.
SuiteConfig parse_config(const std::string& path);
SuiteConfig config_from_text(const std::string& text);

struct SuiteResult {
  std::string suite;
  std::vector<BoundReport> reports;
};

struct SuiteBundle {
  std::vector<SuiteResult> results;
  bool hard_pass = false;  // every hard check passed
  bool all_pass = false;   // every check passed
};

// Runs the configured suites sequentially. Module errors surface as
// std::runtime_error tagged with the suite name.
SuiteBundle run_suite(const SuiteConfig& cfg);

// Bundle JSON (one object; `timestamp` is the only non-deterministic field),
// margins CSV, and a resolvent-bound SVG plot under cfg.out_dir. Returns the
// process exit code: 0 iff hard assertions pass (plus soft ones when
// soft_strict).
int write_bundle(const SuiteBundle& bundle, const SuiteConfig& cfg);

// CSV table r, P_n(r), bessel_estimate, margin; throws on bad ranges.
void write_pn_table(const std::string& path, int n, double r_min,
                    double r_max, int steps);

}  // namespace kwp
