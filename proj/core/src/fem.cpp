#include "rfk/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

#include "rfk/error.hpp"

namespace rfk::fem {

using geometry::cross;
using geometry::dot;
using geometry::norm;

double Mesh::signed_area(std::size_t tri) const {
  const auto& t = triangles[tri];
  return 0.5 * cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]);
}

double Mesh::min_angle_degrees() const {
  double worst = 180.0;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Point a = nodes[t[k]];
      const Point b = nodes[t[(k + 1) % 3]];
      const Point c = nodes[t[(k + 2) % 3]];
      const Point u = b - a;
      const Point v = c - a;
      const double ang = std::atan2(std::abs(cross(u, v)), dot(u, v));
      worst = std::min(worst, ang * 180.0 / std::numbers::pi);
    }
  }
  return worst;
}

double Mesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += signed_area(t);
  return a;
}

double Mesh::boundary_length(geometry::Side side) const {
  const auto& edges = side == geometry::Side::Inner ? inner_edges : outer_edges;
  double len = 0.0;
  for (const auto& e : edges) len += norm(nodes[e[1]] - nodes[e[0]]);
  return len;
}

namespace {

/// Radial layer fractions 0 = s_0 < ... < s_n = 1.
std::vector<double> layer_fractions(int n, double grading) {
  const int half = (n + 1) / 2;
  const double q = half > 1 ? std::pow(grading, 1.0 / static_cast<double>(half - 1)) : 1.0;
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = std::pow(q, static_cast<double>(std::min(j, n - 1 - j)));
  std::vector<double> s(n + 1, 0.0);
  for (int j = 0; j < n; ++j) s[j + 1] = s[j] + w[j];
  for (double& x : s) x /= s[n];
  s[n] = 1.0;
  return s;
}

}  // namespace

Mesh build_mesh(const geometry::DomainSpec& domain, int n_theta, int n_radial, const MeshOptions& opts) {
  if (n_theta < 16 || n_radial < 4) {
    throw Error(ErrorCode::MeshingFailure, "mesh needs n_theta >= 16 and n_radial >= 4");
  }
  if (!(opts.grading >= 1.0)) throw Error(ErrorCode::MeshingFailure, "grading ratio must be >= 1");
  Mesh mesh;
  mesh.n_theta = n_theta;
  mesh.n_radial = n_radial;
  const auto s = layer_fractions(n_radial, opts.grading);
  const std::size_t n_nodes = static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_radial + 1);
  mesh.nodes.resize(n_nodes);
  mesh.node_kinds.assign(n_nodes, NodeKind::Interior);
  const bool stagger = opts.pattern == MeshPattern::Staggered;
  const double phase = domain.outer().phase();
  for (int j = 0; j <= n_radial; ++j) {
    const double shift = stagger && (j % 2 == 1) ? 0.5 : 0.0;
    for (int i = 0; i < n_theta; ++i) {
      const double theta = phase + geometry::kTwoPi * (static_cast<double>(i) + shift) / static_cast<double>(n_theta);
      const std::size_t id = static_cast<std::size_t>(j) * n_theta + i;
      mesh.nodes[id] = (1.0 - s[j]) * domain.inner().point(theta) + s[j] * domain.outer().point(theta);
      if (j == 0) mesh.node_kinds[id] = NodeKind::InnerBoundary;
      if (j == n_radial) mesh.node_kinds[id] = NodeKind::OuterBoundary;
    }
  }
  auto id = [n_theta](int i, int j) { return j * n_theta + (i % n_theta); };
  mesh.triangles.reserve(2 * static_cast<std::size_t>(n_theta) * n_radial);
  for (int j = 0; j < n_radial; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      // Counterclockwise means (low ring i, apex, low ring i+1) since theta runs counterclockwise.
      const int a = id(i, j);
      const int b = id(i + 1, j);
      const int c = id(i + 1, j + 1);
      const int d = id(i, j + 1);
      if (stagger) {
        if (j % 2 == 0) {
          mesh.triangles.push_back({a, d, b});
          mesh.triangles.push_back({d, c, b});
        } else {
          mesh.triangles.push_back({a, c, b});
          mesh.triangles.push_back({d, c, a});
        }
      } else if (norm(mesh.nodes[c] - mesh.nodes[a]) <= norm(mesh.nodes[d] - mesh.nodes[b])) {
        mesh.triangles.push_back({a, c, b});
        mesh.triangles.push_back({a, d, c});
      } else {
        mesh.triangles.push_back({a, d, b});
        mesh.triangles.push_back({b, d, c});
      }
      for (std::size_t t = mesh.triangles.size() - 2; t < mesh.triangles.size(); ++t) {
        if (!(mesh.signed_area(t) > 0.0)) {
          throw Error(ErrorCode::MeshingFailure, "inverted element at theta index " + std::to_string(i) +
                                                     ", s index " + std::to_string(j));
        }
      }
    }
  }
  for (int i = 0; i < n_theta; ++i) {
    mesh.inner_edges.push_back({id(i, 0), id(i + 1, 0)});
    mesh.outer_edges.push_back({id(i, n_radial), id(i + 1, n_radial)});
  }
  const double min_angle = mesh.min_angle_degrees();
  if (min_angle < opts.min_angle_degrees) {
    throw Error(ErrorCode::MeshingFailure,
                "minimum angle " + std::to_string(min_angle) + " deg below " + std::to_string(opts.min_angle_degrees));
  }
  return mesh;
}

namespace {

struct LocalP1 {
  double area;
  std::array<Point, 3> grad_phi;
};

LocalP1 local_p1(const Mesh& mesh, const std::array<int, 3>& t) {
  const Point p0 = mesh.nodes[t[0]];
  const Point p1 = mesh.nodes[t[1]];
  const Point p2 = mesh.nodes[t[2]];
  const double twice = cross(p1 - p0, p2 - p0);
  LocalP1 out;
  out.area = 0.5 * twice;
  // grad phi_k = rot90(opposite edge) / (2 area)
  out.grad_phi[0] = {(p1.y - p2.y) / twice, (p2.x - p1.x) / twice};
  out.grad_phi[1] = {(p2.y - p0.y) / twice, (p0.x - p2.x) / twice};
  out.grad_phi[2] = {(p0.y - p1.y) / twice, (p1.x - p0.x) / twice};
  return out;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_edge_mass(const Mesh& mesh, const std::vector<std::array<int, 2>>& edges, Triplets& out) {
  for (const auto& e : edges) {
    const double len = norm(mesh.nodes[e[1]] - mesh.nodes[e[0]]);
    out.emplace_back(e[0], e[0], len / 3.0);
    out.emplace_back(e[1], e[1], len / 3.0);
    out.emplace_back(e[0], e[1], len / 6.0);
    out.emplace_back(e[1], e[0], len / 6.0);
  }
}

}  // namespace

Components assemble_components(const Mesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
  Triplets k;
  Triplets m;
  k.reserve(9 * mesh.triangles.size());
  m.reserve(9 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const LocalP1 loc = local_p1(mesh, t);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k.emplace_back(t[a], t[b], loc.area * dot(loc.grad_phi[a], loc.grad_phi[b]));
        m.emplace_back(t[a], t[b], loc.area * (a == b ? 2.0 : 1.0) / 12.0);
      }
    }
  }
  Triplets bin;
  Triplets bout;
  add_edge_mass(mesh, mesh.inner_edges, bin);
  add_edge_mass(mesh, mesh.outer_edges, bout);
  Components c;
  c.stiffness.resize(n, n);
  c.mass.resize(n, n);
  c.inner_mass.resize(n, n);
  c.outer_mass.resize(n, n);
  c.stiffness.setFromTriplets(k.begin(), k.end());
  c.mass.setFromTriplets(m.begin(), m.end());
  c.inner_mass.setFromTriplets(bin.begin(), bin.end());
  c.outer_mass.setFromTriplets(bout.begin(), bout.end());
  return c;
}

Eigen::VectorXd System::restrict(std::span<const double> nodal) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(node_of_dof.size()));
  for (std::size_t d = 0; d < node_of_dof.size(); ++d) x[static_cast<Eigen::Index>(d)] = nodal[node_of_dof[d]];
  return x;
}

std::vector<double> System::prolong(const Eigen::VectorXd& dofs) const {
  std::vector<double> out(dof_of_node.size(), 0.0);
  for (std::size_t d = 0; d < node_of_dof.size(); ++d) out[node_of_dof[d]] = dofs[static_cast<Eigen::Index>(d)];
  return out;
}

System assemble(const Mesh& mesh, const RobinPair& robin) {
  const Components c = assemble_components(mesh);
  SparseMatrix a = c.stiffness;
  if (robin.inner.is_finite() && robin.inner.value() != 0.0) a += robin.inner.value() * c.inner_mass;
  if (robin.outer.is_finite() && robin.outer.value() != 0.0) a += robin.outer.value() * c.outer_mass;

  System sys;
  sys.dof_of_node.assign(mesh.nodes.size(), -1);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const NodeKind kind = mesh.node_kinds[i];
    const bool fixed = (kind == NodeKind::InnerBoundary && robin.inner.is_dirichlet()) ||
                       (kind == NodeKind::OuterBoundary && robin.outer.is_dirichlet());
    if (!fixed) {
      sys.dof_of_node[i] = static_cast<int>(sys.node_of_dof.size());
      sys.node_of_dof.push_back(static_cast<int>(i));
    }
  }
  if (sys.node_of_dof.size() == mesh.nodes.size()) {
    sys.A = std::move(a);
    sys.M = c.mass;
    return sys;
  }
  const auto n = static_cast<Eigen::Index>(sys.node_of_dof.size());
  auto reduce = [&](const SparseMatrix& full) {
    Triplets t;
    t.reserve(static_cast<std::size_t>(full.nonZeros()));
    for (int col = 0; col < full.outerSize(); ++col) {
      const int dc = sys.dof_of_node[col];
      if (dc < 0) continue;
      for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
        const int dr = sys.dof_of_node[it.row()];
        if (dr >= 0) t.emplace_back(dr, dc, it.value());
      }
    }
    SparseMatrix out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  sys.A = reduce(a);
  sys.M = reduce(c.mass);
  return sys;
}

namespace {

using Factor = Eigen::SimplicialLDLT<SparseMatrix>;

/// Factorizes A - mu M; succeeds only if the shifted matrix is positive definite, which
/// certifies mu < lambda1 by Sylvester's law of inertia.
bool factor_below_spectrum(Factor& f, const SparseMatrix& A, const SparseMatrix& M, double mu) {
  SparseMatrix shifted = A - mu * M;
  f.compute(shifted);
  if (f.info() != Eigen::Success) return false;
  return (f.vectorD().array() > 0.0).all();
}

double quotient(const SparseMatrix& A, const SparseMatrix& M, const Eigen::VectorXd& x) {
  return x.dot(A * x) / x.dot(M * x);
}

}  // namespace

EigenPair smallest_eig(const SparseMatrix& A, const SparseMatrix& M, double shift_margin, bool nonnegative_spectrum,
                       const EigenOptions& opts) {
  const Eigen::Index n = A.rows();
  if (n == 0 || A.cols() != n || M.rows() != n || M.cols() != n) {
    throw Error(ErrorCode::InvalidArgument, "eigenproblem matrices must be square and non-empty");
  }
  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  // Probe vectors: constant, and constant with fixed-seed perturbations.
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double q_min = quotient(A, M, x);
  for (int p = 0; p < 3; ++p) {
    Eigen::VectorXd probe(n);
    for (Eigen::Index i = 0; i < n; ++i) probe[i] = 1.0 + 0.5 * unit(rng);
    q_min = std::min(q_min, quotient(A, M, probe));
  }
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * unit(rng);

  double mu = q_min - shift_margin;
  if (nonnegative_spectrum) mu = std::min(mu, -1.0);
  auto factor = std::make_unique<Factor>();
  int retries = 0;
  while (!factor_below_spectrum(*factor, A, M, mu)) {
    if (++retries > opts.max_shift_retries) {
      throw Error(ErrorCode::FactorizationFailure, "could not place the shift below the spectrum");
    }
    mu -= shift_margin * std::pow(4.0, retries) + std::abs(mu);
  }

  EigenPair out;
  double lambda = quotient(A, M, x);
  double prev = lambda;
  bool refined = false;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Eigen::VectorXd mx = M * x;
    x = factor->solve(mx);
    x /= std::sqrt(x.dot(M * x));
    prev = lambda;
    const Eigen::VectorXd ax = A * x;
    const Eigen::VectorXd mxn = M * x;
    lambda = x.dot(ax);  // x is M-normalized
    const double res = (ax - lambda * mxn).norm() / mxn.norm();
    const double change = std::abs(lambda - prev);
    const double scale = std::max(1.0, std::abs(lambda));
    out.iterations = it;
    out.residual = res;
    if (change < opts.rq_tol * scale && res < opts.residual_tol) break;
    if (it == opts.max_iterations) {
      throw Error(ErrorCode::NotConverged, "inverse iteration did not converge");
    }
    // Once the quotient has settled, move the shift close below it; the inertia check keeps
    // any accepted shift under lambda1.
    if (!refined && change < 1e-3 * scale) {
      const double gap = lambda - mu;
      for (double frac : {0.98, 0.9, 0.5}) {
        const double candidate = lambda - (1.0 - frac) * gap;
        auto trial = std::make_unique<Factor>();
        if (factor_below_spectrum(*trial, A, M, candidate)) {
          factor = std::move(trial);
          mu = candidate;
          break;
        }
      }
      refined = true;
    }
  }
  if (x.sum() < 0.0) x = -x;
  out.lambda1 = lambda;
  out.vector = std::move(x);
  out.shift = mu;
  return out;
}

std::vector<Point> triangle_gradients(const Mesh& mesh, std::span<const double> v) {
  std::vector<Point> g(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const LocalP1 loc = local_p1(mesh, tri);
    g[t] = v[tri[0]] * loc.grad_phi[0] + v[tri[1]] * loc.grad_phi[1] + v[tri[2]] * loc.grad_phi[2];
  }
  return g;
}

std::vector<Point> recover_gradients(const Mesh& mesh, std::span<const Point> tri_grad) {
  std::vector<Point> acc(mesh.nodes.size());
  std::vector<double> weight(mesh.nodes.size(), 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double a = mesh.signed_area(t);
    for (int k : mesh.triangles[t]) {
      acc[k] = acc[k] + a * tri_grad[t];
      weight[k] += a;
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (weight[i] > 0.0) acc[i] = (1.0 / weight[i]) * acc[i];
  }
  return acc;
}

EigenResult solve(const Mesh& mesh, const RobinPair& robin, const EigenOptions& opts) {
  const System sys = assemble(mesh, robin);
  double hneg = 0.0;
  if (robin.inner.is_finite() && robin.inner.value() < 0.0) hneg = std::max(hneg, -robin.inner.value());
  if (robin.outer.is_finite() && robin.outer.value() < 0.0) hneg = std::max(hneg, -robin.outer.value());
  const bool nonnegative = hneg == 0.0;
  const double margin = 1.0 + 4.0 * hneg * hneg;
  const EigenPair pair = smallest_eig(sys.A, sys.M, margin, nonnegative, opts);

  EigenResult res;
  res.u = sys.prolong(pair.vector);
  const double umax = *std::max_element(res.u.begin(), res.u.end());
  for (double& x : res.u) x /= umax;
  res.iterations = pair.iterations;
  res.residual = pair.residual;
  res.lambda1 = rayleigh_quotient(mesh, robin, res.u);
  res.grad = triangle_gradients(mesh, res.u);
  res.recovered_grad = recover_gradients(mesh, res.grad);
  return res;
}

QuotientParts quotient_parts(const Mesh& mesh, std::span<const double> v) {
  QuotientParts q;
  for (const auto& t : mesh.triangles) {
    const LocalP1 loc = local_p1(mesh, t);
    const double a = v[t[0]];
    const double b = v[t[1]];
    const double c = v[t[2]];
    const Point g = a * loc.grad_phi[0] + b * loc.grad_phi[1] + c * loc.grad_phi[2];
    q.gradient += loc.area * dot(g, g);
    q.l2 += loc.area / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
  }
  auto edge_sum = [&](const std::vector<std::array<int, 2>>& edges) {
    double s = 0.0;
    for (const auto& e : edges) {
      const double len = norm(mesh.nodes[e[1]] - mesh.nodes[e[0]]);
      const double a = v[e[0]];
      const double b = v[e[1]];
      s += len / 3.0 * (a * a + a * b + b * b);
    }
    return s;
  };
  q.inner = edge_sum(mesh.inner_edges);
  q.outer = edge_sum(mesh.outer_edges);
  return q;
}

double rayleigh_quotient(const Mesh& mesh, const RobinPair& robin, std::span<const double> v) {
  if (v.size() != mesh.nodes.size()) throw Error(ErrorCode::InvalidTestFunction, "nodal vector has wrong size");
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const NodeKind k = mesh.node_kinds[i];
    const bool fixed = (k == NodeKind::InnerBoundary && robin.inner.is_dirichlet()) ||
                       (k == NodeKind::OuterBoundary && robin.outer.is_dirichlet());
    if (fixed && std::abs(v[i]) > 1e-12 * vmax) {
      throw Error(ErrorCode::InvalidTestFunction, "test function does not vanish on a Dirichlet node");
    }
  }
  const QuotientParts q = quotient_parts(mesh, v);
  if (!(q.l2 > 0.0)) throw Error(ErrorCode::InvalidTestFunction, "test function has zero L2 norm");
  double num = q.gradient;
  if (robin.inner.is_finite()) num += robin.inner.value() * q.inner;
  if (robin.outer.is_finite()) num += robin.outer.value() * q.outer;
  return num / q.l2;
}

void dump_field(std::ostream& out, const Mesh& mesh, std::span<const double> u) {
  char buf[128];
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "node %.12g %.12g %.12g\n", mesh.nodes[i].x, mesh.nodes[i].y, u[i]);
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "tri " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace rfk::fem
