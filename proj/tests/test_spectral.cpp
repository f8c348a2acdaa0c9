#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "kwp/spectral.hpp"

using namespace kwp;
using Complex = std::complex<double>;

namespace {

// Small synthetic decomposition from a random SPD pencil (L, M) with M
// diagonal; dense factorization is the oracle for resolvent_apply.
struct Pencil {
  Eigen::MatrixXd L;
  Eigen::VectorXd M;
  SpectralDecomposition spec;
};

Pencil random_pencil(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  // PSD stiffness with a known kernel (constants), like a Laplacian
  Eigen::MatrixXd P =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::MatrixXd L = P * (A * A.transpose()) * P;
  Eigen::VectorXd M(n);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < n; ++i) M[i] = u(rng);

  Eigen::VectorXd ds = M.cwiseSqrt();
  Eigen::MatrixXd B = L;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) /= ds[i] * ds[j];
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  Eigen::MatrixXd V = es.eigenvectors();
  for (int i = 0; i < n; ++i) V.row(i) /= ds[i];
  Pencil p;
  p.L = L;
  p.M = M;
  p.spec = make_decomposition(es.eigenvalues(), V, M);
  return p;
}

Field random_field(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Field x(n);
  for (int i = 0; i < n; ++i) x[i] = Complex(g(rng), g(rng));
  return x;
}

}  // namespace

TEST_CASE("decomposition invariants: gram identity and sorted spectrum") {
  auto p = random_pencil(40, 7);
  const auto& s = p.spec;
  Eigen::MatrixXd gram =
      s.eigenvectors.transpose() * s.weights.asDiagonal() * s.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() <
        1e-8);
  for (int i = 1; i < s.num_modes(); ++i)
    CHECK(s.eigenvalues[i] >= s.eigenvalues[i - 1]);
  CHECK(s.eigenvalues[0] == 0.0);
  CHECK(s.harmonic_dim == 1);
}

TEST_CASE("resolvent_apply: constants are fixed by shift 1") {
  auto p = random_pencil(30, 11);
  Field c = Field::Constant(30, Complex(2.5, -1.0));
  Field y = resolvent_apply(p.spec, 1.0, c);
  CHECK((y - c).norm() < 1e-9);
}

TEST_CASE("resolvent_apply matches dense linear solve") {
  auto p = random_pencil(60, 13);
  Field x = random_field(60, 17);
  for (double shift : {0.5, 1.0, 3.0}) {
    Field y = resolvent_apply(p.spec, shift, x);
    // oracle: (L + shift M) z = M x
    Eigen::MatrixXd A = p.L + shift * Eigen::MatrixXd(p.M.asDiagonal());
    Eigen::VectorXcd rhs = p.M.asDiagonal() * x;
    Eigen::VectorXd rr = rhs.real(), ri = rhs.imag();
    Eigen::VectorXcd z = A.ldlt().solve(rr).eval().cast<Complex>() +
                         Complex(0, 1) * A.ldlt().solve(ri).eval();
    CHECK((y - z).norm() < 1e-8 * (1.0 + z.norm()));
  }
}

TEST_CASE("resolvent_apply negative shift inverts on admissible subspace") {
  auto p = random_pencil(40, 19);
  const auto& s = p.spec;
  const double m = s.eigenvalues[10];  // forbid modes up to here
  // build x supported strictly above m
  Field x = Field::Zero(40);
  for (int nu = 0; nu < s.num_modes(); ++nu) {
    if (s.eigenvalues[nu] > m * 1.001)
      x += s.eigenvalues[nu] * s.eigenvectors.col(nu).cast<Complex>();
  }
  Field y = resolvent_apply(s, -m, x);
  // (Box - m) y should reproduce x
  Field box_y = Field::Zero(40);
  for (int nu = 0; nu < s.num_modes(); ++nu) {
    Complex c(s.eigenvectors.col(nu).dot((s.weights.array() *
                                          y.real().array()).matrix()),
              s.eigenvectors.col(nu).dot((s.weights.array() *
                                          y.imag().array()).matrix()));
    box_y += (s.eigenvalues[nu] - m) * c *
             s.eigenvectors.col(nu).cast<Complex>();
  }
  CHECK((box_y - x).norm() < 1e-8 * x.norm());
}

TEST_CASE("resolvent_apply resonance violation is rejected with context") {
  auto p = random_pencil(40, 23);
  const auto& s = p.spec;
  const double m = 0.5 * (s.eigenvalues[5] + s.eigenvalues[6]);
  Field bad = s.eigenvectors.col(3).cast<Complex>();  // eigenvalue below m
  bool threw = false;
  try {
    resolvent_apply(s, -m, bad);
  } catch (const ResonanceError& e) {
    threw = true;
    CHECK(e.eigenvalue == doctest::Approx(s.eigenvalues[3]));
    CHECK(e.mass > 0.9);
  }
  CHECK(threw);
}

TEST_CASE("harmonic projection: constants fixed, mean-zero killed, H o H = H") {
  auto p = random_pencil(35, 29);
  const auto& s = p.spec;
  Field c = Field::Constant(35, Complex(1.0, 2.0));
  CHECK((harmonic_project(s, c) - c).norm() < 1e-10);

  Field x = random_field(35, 31);
  // remove volume-weighted mean
  Complex mean = s.inner(x, Field::Constant(35, 1.0)) / s.total_volume;
  Field x0 = x.array() - mean;
  CHECK(harmonic_project(s, x0).norm() < 1e-10);

  Field h1 = harmonic_project(s, x);
  Field h2 = harmonic_project(s, h1);
  CHECK((h1 - h2).norm() < 1e-12);
}

TEST_CASE("heat semigroup properties") {
  auto p = random_pencil(30, 37);
  const auto& s = p.spec;
  Field x = random_field(30, 41);

  CHECK_THROWS_AS(heat_apply(s, 0.0, x), std::domain_error);

  // band-limited identity limit at t -> 0+
  Field xb = Field::Zero(30);
  for (int nu = 0; nu < 10; ++nu)
    xb += s.eigenvectors.col(nu).cast<Complex>();
  Field y = heat_apply(s, 1e-6, xb);
  CHECK((y - xb).norm() < 1e-4 * xb.norm());

  // mass conservation
  Field ones = Field::Constant(30, 1.0);
  Complex m0 = s.inner(x, ones);
  Complex m1 = s.inner(heat_apply(s, 0.7, x), ones);
  CHECK(std::abs(m0 - m1) < 1e-10 * std::abs(m0));

  // semigroup property
  Field a = heat_apply(s, 0.3, heat_apply(s, 0.4, x));
  Field b = heat_apply(s, 0.7, x);
  CHECK((a - b).norm() < 1e-10);
}

TEST_CASE("resolvent kernel symmetry and operator consistency") {
  auto p = random_pencil(45, 43);
  const auto& s = p.spec;
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> pick(0, 44);
  for (int k = 0; k < 20; ++k) {
    int z = pick(rng), w = pick(rng);
    CHECK(resolvent_kernel(s, z, w) ==
          doctest::Approx(resolvent_kernel(s, w, z)).epsilon(1e-12));
  }
  // kernel as integral operator reproduces resolvent_apply at shift 1
  Field chi = random_field(45, 53).cwiseAbs();
  Field via_kernel(45);
  for (int z = 0; z < 45; ++z) {
    Complex acc = 0.0;
    for (int w = 0; w < 45; ++w)
      acc += resolvent_kernel(s, z, w) * s.weights[w] * chi[w];
    via_kernel[z] = acc;
  }
  Field direct = resolvent_apply(s, 1.0, chi);
  CHECK((via_kernel - direct).norm() < 1e-8 * direct.norm());
}

TEST_CASE("self-adjointness and spectral mapping") {
  auto p = random_pencil(30, 59);
  const auto& s = p.spec;
  Field x = random_field(30, 61), y = random_field(30, 67);
  Complex a = s.inner(resolvent_apply(s, 1.0, x), y);
  Complex b = s.inner(x, resolvent_apply(s, 1.0, y));
  CHECK(std::abs(a - b) < 1e-10 * std::abs(a));

  for (int nu : {0, 5, 20}) {
    Field e = s.eigenvectors.col(nu).cast<Complex>();
    Field r = resolvent_apply(s, 1.0, e);
    CHECK((r - e / (1.0 + s.eigenvalues[nu])).norm() < 1e-10);
  }
}

TEST_CASE("resolvent-heat identity on synthetic spectrum") {
  auto p = random_pencil(40, 71);
  auto rep = verify_resolvent_heat_identity(p.spec, 3, 17, 1e-10);
  CHECK(rep.pass);
  CHECK(std::abs(rep.lhs - rep.rhs) < 1e-9);

  // single-mode sanity: 1/(1+lambda) = int e^{-t} e^{-lambda t} dt
  Eigen::VectorXd lam(1), w(1);
  lam << 2.5;
  w << 1.0;
  Eigen::MatrixXd v(1, 1);
  v << 1.0;
  auto single = make_decomposition(lam, v, w);
  auto rep1 = verify_resolvent_heat_identity(single, 0, 0, 1e-12);
  CHECK(rep1.pass);
}

TEST_CASE("spectrum save/load roundtrip") {
  auto p = random_pencil(20, 73);
  const std::string path = "/tmp/kwp_spec_test.csv";
  save_spectrum(path, p.spec);
  auto loaded = load_spectrum(path);
  CHECK((loaded.eigenvalues - p.spec.eigenvalues).norm() < 1e-12);
  CHECK((loaded.eigenvectors - p.spec.eigenvectors).norm() < 1e-12);
  CHECK((loaded.weights - p.spec.weights).norm() < 1e-12);
}
