#include "kwp/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <vector>

namespace kwp {

Complex Mobius::apply(Complex z) const {
  return (m(0, 0) * z + m(0, 1)) / (m(1, 0) * z + m(1, 1));
}

Complex Mobius::derivative(Complex z) const {
  const Complex den = m(1, 0) * z + m(1, 1);
  return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / (den * den);
}

Mobius Mobius::compose(const Mobius& other) const {
  Mobius out;
  out.m = m * other.m;
  return out;
}

Mobius Mobius::inverse() const {
  Mobius out;
  out.m << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return out;
}

Mobius Mobius::translate_to_origin(Complex a) {
  Mobius out;
  out.m << 1.0, -a, -std::conj(a), 1.0;
  return out;
}

Mobius Mobius::rotation(double theta) {
  Mobius out;
  out.m << std::polar(1.0, theta), 0.0, 0.0, 1.0;
  return out;
}

namespace {

double hyp_dist(Complex z, Complex w) {
  const double num = 2.0 * std::norm(z - w);
  const double den = (1.0 - std::norm(z)) * (1.0 - std::norm(w));
  return std::acosh(1.0 + num / den);
}

Complex hyp_midpoint(Complex z, Complex w) {
  const Mobius to0 = Mobius::translate_to_origin(z);
  const Complex wp = to0.apply(w);
  const double r = std::abs(wp);
  if (r < 1e-300) return z;
  const double rm = std::tanh(0.5 * std::atanh(r));
  return to0.inverse().apply(wp / r * rm);
}

// Isometry with X1 -> 0 and X2 on the positive real axis.
Mobius align(Complex x1, Complex x2) {
  const Mobius t = Mobius::translate_to_origin(x1);
  const double theta = std::arg(t.apply(x2));
  return Mobius::rotation(-theta).compose(t);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

double tri_area(const std::array<Complex, 3>& p) {
  const Complex u = p[1] - p[0], v = p[2] - p[0];
  return 0.5 * std::abs(u.real() * v.imag() - u.imag() * v.real());
}

// Cotan stiffness and lumped mass assembly; the conformal factor cancels in
// the 2-D stiffness, the mass carries the density via edge-midpoint
// quadrature.
void finalize(DiscreteFiber& f) {
  const int n_mesh = static_cast<int>(f.vertices.size());
  const int n_tri = static_cast<int>(f.triangles.size());

  // quotient / dof bookkeeping must already be present
  const int n = f.num_dofs();

  f.tri_pos.assign(n_tri, {});
  for (int t = 0; t < n_tri; ++t) {
    std::array<Complex, 3> p;
    for (int k = 0; k < 3; ++k) p[k] = f.vertices[f.triangles[t].v[k]];
    if (f.kind == DiscreteFiber::Kind::Torus) {
      // unwrap by minimum image relative to the first corner
      for (int k = 1; k < 3; ++k) {
        double dx = p[k].real() - p[0].real();
        double dy = p[k].imag() - p[0].imag();
        if (dx > 0.5 * f.side) dx -= f.side;
        if (dx < -0.5 * f.side) dx += f.side;
        if (dy > 0.5 * f.side) dy -= f.side;
        if (dy < -0.5 * f.side) dy += f.side;
        p[k] = p[0] + Complex(dx, dy);
      }
    }
    f.tri_pos[t] = p;
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * n_tri);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(n);

  for (int t = 0; t < n_tri; ++t) {
    const auto& p = f.tri_pos[t];
    const double area = tri_area(p);
    if (area <= 1e-15)
      throw std::runtime_error("degenerate triangle " + std::to_string(t));
    int dof[3];
    for (int k = 0; k < 3; ++k) dof[k] = f.quotient[f.triangles[t].v[k]];

    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      const Complex u = p[i] - p[k], v = p[j] - p[k];
      const double cross = u.real() * v.imag() - u.imag() * v.real();
      const double cot = (u.real() * v.real() + u.imag() * v.imag()) / cross;
      const double w = 0.5 * cot;
      trips.emplace_back(dof[i], dof[j], -w);
      trips.emplace_back(dof[j], dof[i], -w);
      trips.emplace_back(dof[i], dof[i], w);
      trips.emplace_back(dof[j], dof[j], w);

      // midpoint of edge (i,j); density quadrature, split between endpoints
      const Complex mid = 0.5 * (p[i] + p[j]);
      const double dm = area / 3.0 * f.density_at(mid);
      mass[dof[i]] += 0.5 * dm;
      mass[dof[j]] += 0.5 * dm;
      flat[dof[i]] += 0.5 * area / 3.0;
      flat[dof[j]] += 0.5 * area / 3.0;
    }
  }

  f.stiffness.resize(n, n);
  f.stiffness.setFromTriplets(trips.begin(), trips.end());
  f.area_weights = mass;
  f.flat_weights = flat;
  f.total_area = mass.sum();
  f.metric_density.resize(n);
  for (int d = 0; d < n; ++d)
    f.metric_density[d] = f.density_at(f.vertices[f.dof_rep[d]]);
  (void)n_mesh;
}

}  // namespace

double DiscreteFiber::density_at(Complex z) const {
  if (kind == Kind::Torus) return 1.0;
  const double s = 1.0 - std::norm(z);
  return 4.0 / (s * s);
}

double chart_distance(DiscreteFiber::Kind kind, Complex z, Complex w,
                      double side) {
  if (kind == DiscreteFiber::Kind::Torus) {
    double dx = std::abs(z.real() - w.real());
    double dy = std::abs(z.imag() - w.imag());
    dx = std::min(dx, side - dx);
    dy = std::min(dy, side - dy);
    return std::hypot(dx, dy);
  }
  return hyp_dist(z, w);
}

DiscreteFiber build_torus_fiber(double side, int resolution) {
  if (resolution < 8)
    throw std::invalid_argument("build_torus_fiber: resolution must be >= 8");
  if (!(side > 0.0))
    throw std::invalid_argument("build_torus_fiber: side must be > 0");
  DiscreteFiber f;
  f.kind = DiscreteFiber::Kind::Torus;
  f.side = side;
  f.resolution = resolution;
  const int n = resolution;
  const double h = side / n;
  f.vertices.resize(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      f.vertices[j * n + i] = Complex(i * h, j * h);
  auto idx = [n](int i, int j) { return ((j + n) % n) * n + ((i + n) % n); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      f.triangles.push_back({{idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)}});
      f.triangles.push_back({{idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)}});
    }
  f.quotient.resize(n * n);
  std::iota(f.quotient.begin(), f.quotient.end(), 0);
  f.dof_rep = f.quotient;
  f.qd_factor.assign(n * n, Complex(1.0, 0.0));
  finalize(f);
  return f;
}

DiscreteFiber build_hyperbolic_octagon_fiber(int resolution) {
  if (resolution < 3)
    throw std::invalid_argument(
        "build_hyperbolic_octagon_fiber: resolution must be >= 3");
  DiscreteFiber f;
  f.kind = DiscreteFiber::Kind::HyperbolicOctagon;
  f.resolution = resolution;

  // Regular octagon, vertex angles pi/4: corner distance c from the center
  // satisfies cosh(c) = cot^2(pi/8).
  const double cot8 = 1.0 + std::sqrt(2.0);
  const double c = std::acosh(cot8 * cot8);
  const double rc = std::tanh(0.5 * c);  // Euclidean radius in the disk

  f.vertices.push_back(Complex(0.0, 0.0));
  std::array<Complex, 8> corner;
  for (int k = 0; k < 8; ++k) {
    corner[k] = std::polar(rc, M_PI * (2.0 * k + 1.0) / 8.0);
    f.vertices.push_back(corner[k]);
  }
  for (int k = 0; k < 8; ++k)
    f.triangles.push_back({{0, 1 + k, 1 + (k + 1) % 8}});
  f.boundary.assign(8, {});
  for (int k = 0; k < 8; ++k) f.boundary[k] = {1 + k, 1 + (k + 1) % 8};

  // Refine by hyperbolic edge midpoints; boundary midpoints stay on the
  // geodesic sides and keep the arclength-dyadic parametrization.
  for (int level = 0; level < resolution; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid_of = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(f.vertices.size());
      f.vertices.push_back(hyp_midpoint(f.vertices[a], f.vertices[b]));
      midpoint[key] = idx;
      return idx;
    };
    std::vector<Triangle> next;
    next.reserve(4 * f.triangles.size());
    for (const auto& t : f.triangles) {
      const int a = t.v[0], b = t.v[1], cc = t.v[2];
      const int ab = mid_of(a, b), bc = mid_of(b, cc), ca = mid_of(cc, a);
      next.push_back({{a, ab, ca}});
      next.push_back({{ab, b, bc}});
      next.push_back({{ca, bc, cc}});
      next.push_back({{ab, bc, ca}});
    }
    f.triangles = std::move(next);
    for (int s = 0; s < 8; ++s) {
      std::vector<int> nb;
      nb.reserve(2 * f.boundary[s].size() - 1);
      for (size_t j = 0; j + 1 < f.boundary[s].size(); ++j) {
        nb.push_back(f.boundary[s][j]);
        nb.push_back(mid_of(f.boundary[s][j], f.boundary[s][j + 1]));
      }
      nb.push_back(f.boundary[s].back());
      f.boundary[s] = std::move(nb);
    }
  }

  // Side pairings a b a^-1 b^-1 c d c^-1 d^-1: sides (0,2), (1,3), (4,6),
  // (5,7), each glued with reversed orientation.
  const int pair_of[4][2] = {{0, 2}, {1, 3}, {4, 6}, {5, 7}};
  for (const auto& pr : pair_of) {
    const int i = pr[0], j = pr[1];
    const Mobius from = align(corner[i], corner[(i + 1) % 8]);
    const Mobius to = align(corner[(j + 1) % 8], corner[j]);
    SidePairing sp;
    sp.side_from = i;
    sp.side_to = j;
    sp.map = to.inverse().compose(from);
    f.pairings.push_back(sp);
  }

  // Quotient: fraction t on side i matches fraction 1-t on side j.
  const int n_mesh = static_cast<int>(f.vertices.size());
  UnionFind uf(n_mesh);
  const size_t segs = f.boundary[0].size() - 1;
  for (const auto& sp : f.pairings)
    for (size_t t = 0; t <= segs; ++t)
      uf.unite(f.boundary[sp.side_from][t],
               f.boundary[sp.side_to][segs - t]);

  f.quotient.assign(n_mesh, -1);
  f.dof_rep.clear();
  for (int v = 0; v < n_mesh; ++v) {
    if (uf.find(v) == v) {
      f.quotient[v] = static_cast<int>(f.dof_rep.size());
      f.dof_rep.push_back(v);
    }
  }
  for (int v = 0; v < n_mesh; ++v) f.quotient[v] = f.quotient[uf.find(v)];

  // Chart factors for quadratic differentials: accumulate pairing maps from
  // each vertex copy to its representative along a BFS tree.
  f.qd_factor.assign(n_mesh, Complex(1.0, 0.0));
  std::vector<std::vector<std::pair<int, Mobius>>> rel(n_mesh);
  for (const auto& sp : f.pairings)
    for (size_t t = 0; t <= segs; ++t) {
      const int a = f.boundary[sp.side_from][t];
      const int b = f.boundary[sp.side_to][segs - t];
      if (a == b) continue;
      rel[a].push_back({b, sp.map});            // map(pos_a) = pos_b
      rel[b].push_back({a, sp.map.inverse()});  // inverse(pos_b) = pos_a
    }
  std::vector<char> visited(n_mesh, 0);
  std::vector<Mobius> acc(n_mesh);  // acc[v](pos_v) = pos_rep
  for (int r : f.dof_rep) {
    if (rel[r].empty()) continue;
    std::queue<int> q;
    q.push(r);
    visited[r] = 1;
    acc[r] = Mobius();
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const auto& [u, m_vu] : rel[v]) {
        if (visited[u]) continue;
        visited[u] = 1;
        // m_vu(pos_v) = pos_u, so pos_u -> pos_v -> pos_rep
        acc[u] = acc[v].compose(m_vu.inverse());
        const Complex d = acc[u].derivative(f.vertices[u]);
        f.qd_factor[u] = d * d;
        q.push(u);
      }
    }
  }

  finalize(f);
  return f;
}

SpectralDecomposition assemble_laplacian(const DiscreteFiber& fiber) {
  const int n = fiber.num_dofs();
  Eigen::VectorXd dsqrt = fiber.area_weights.cwiseSqrt();
  Eigen::MatrixXd B = Eigen::MatrixXd(fiber.stiffness);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) /= dsqrt[i] * dsqrt[j];
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("assemble_laplacian: eigensolver failed");
  Eigen::MatrixXd V = es.eigenvectors();
  for (int i = 0; i < n; ++i) V.row(i) /= dsqrt[i];
  return make_decomposition(es.eigenvalues(), std::move(V),
                            fiber.area_weights);
}

double diameter(const DiscreteFiber& fiber) {
  const int n = fiber.num_dofs();
  std::map<std::pair<int, int>, double> edge;
  for (size_t t = 0; t < fiber.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = fiber.quotient[fiber.triangles[t].v[k]];
      const int b = fiber.quotient[fiber.triangles[t].v[(k + 1) % 3]];
      if (a == b) continue;
      const double len =
          fiber.kind == DiscreteFiber::Kind::Torus
              ? std::abs(fiber.tri_pos[t][k] - fiber.tri_pos[t][(k + 1) % 3])
              : hyp_dist(fiber.tri_pos[t][k], fiber.tri_pos[t][(k + 1) % 3]);
      auto key = std::minmax(a, b);
      auto it = edge.find(key);
      if (it == edge.end() || len < it->second) edge[key] = len;
    }
  }
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& [k, len] : edge) {
    adj[k.first].push_back({k.second, len});
    adj[k.second].push_back({k.first, len});
  }

  double diam = 0.0;
  std::vector<double> dist(n);
  using Item = std::pair<double, int>;
  for (int src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::max());
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    int reached = 0;
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      ++reached;
      for (const auto& [u, len] : adj[v]) {
        if (d + len < dist[u]) {
          dist[u] = d + len;
          pq.push({dist[u], u});
        }
      }
    }
    if (reached < n) throw std::runtime_error("diameter: disconnected fiber");
    diam = std::max(diam, *std::max_element(dist.begin(), dist.end()));
  }
  return diam;
}

void save_fiber(const std::string& path, const DiscreteFiber& fiber) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_fiber: cannot open " + path);
  out.precision(17);
  out << "KWPMESH 1\n";
  out << (fiber.kind == DiscreteFiber::Kind::Torus ? "torus" : "octagon")
      << " " << fiber.resolution << " " << fiber.side << "\n";
  out << fiber.vertices.size() << " " << fiber.triangles.size() << "\n";
  for (const auto& v : fiber.vertices)
    out << v.real() << " " << v.imag() << "\n";
  for (const auto& t : fiber.triangles)
    out << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
  out << "quotient\n";
  for (size_t i = 0; i < fiber.quotient.size(); ++i)
    out << fiber.quotient[i] << (i + 1 < fiber.quotient.size() ? ' ' : '\n');
  out << "reps\n";
  for (size_t i = 0; i < fiber.dof_rep.size(); ++i)
    out << fiber.dof_rep[i] << (i + 1 < fiber.dof_rep.size() ? ' ' : '\n');
  out << "qdfactor\n";
  for (const auto& q : fiber.qd_factor)
    out << q.real() << " " << q.imag() << "\n";
  out << "pairings " << fiber.pairings.size() << "\n";
  for (const auto& p : fiber.pairings) {
    out << p.side_from << " " << p.side_to;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out << " " << p.map.m(i, j).real() << " " << p.map.m(i, j).imag();
    out << "\n";
  }
  out << "boundary " << fiber.boundary.size() << "\n";
  for (const auto& side : fiber.boundary) {
    out << side.size();
    for (int v : side) out << " " << v;
    out << "\n";
  }
}

DiscreteFiber load_fiber(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_fiber: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "KWPMESH")
    throw std::runtime_error("load_fiber: bad magic in " + path);
  DiscreteFiber f;
  std::string kind;
  in >> kind >> f.resolution >> f.side;
  f.kind = kind == "torus" ? DiscreteFiber::Kind::Torus
                           : DiscreteFiber::Kind::HyperbolicOctagon;
  size_t nv = 0, nt = 0;
  in >> nv >> nt;
  f.vertices.resize(nv);
  for (auto& v : f.vertices) {
    double re, im;
    in >> re >> im;
    v = Complex(re, im);
  }
  f.triangles.resize(nt);
  for (auto& t : f.triangles) in >> t.v[0] >> t.v[1] >> t.v[2];
  std::string tag;
  in >> tag;  // quotient
  f.quotient.resize(nv);
  int max_dof = -1;
  for (auto& q : f.quotient) {
    in >> q;
    max_dof = std::max(max_dof, q);
  }
  in >> tag;  // reps
  f.dof_rep.assign(max_dof + 1, -1);
  for (auto& r : f.dof_rep) in >> r;
  in >> tag;  // qdfactor
  f.qd_factor.resize(nv);
  for (auto& q : f.qd_factor) {
    double re, im;
    in >> re >> im;
    q = Complex(re, im);
  }
  size_t np = 0;
  in >> tag >> np;  // pairings
  f.pairings.resize(np);
  for (auto& p : f.pairings) {
    in >> p.side_from >> p.side_to;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double re, im;
        in >> re >> im;
        p.map.m(i, j) = Complex(re, im);
      }
  }
  size_t nb = 0;
  in >> tag >> nb;  // boundary
  f.boundary.resize(nb);
  for (auto& side : f.boundary) {
    size_t sz = 0;
    in >> sz;
    side.resize(sz);
    for (auto& v : side) in >> v;
  }
  if (!in) throw std::runtime_error("load_fiber: truncated file " + path);
  finalize(f);
  return f;
}

}  // namespace kwp
