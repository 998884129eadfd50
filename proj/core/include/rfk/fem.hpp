#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rfk/geometry.hpp"
#include "rfk/robin.hpp"

namespace rfk::fem {

using geometry::Point;
using SparseMatrix = Eigen::SparseMatrix<double>;

enum class NodeKind : std::uint8_t { Interior, InnerBoundary, OuterBoundary };

/// Structured P1 triangulation of a doubly connected star-shaped domain.
/// Node (i, j) sits at index j * n_theta + i; ring j = 0 lies on the inner curve and
/// ring j = n_radial on the outer curve. Triangles are counterclockwise.
struct Mesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> inner_edges;
  std::vector<std::array<int, 2>> outer_edges;
  std::vector<NodeKind> node_kinds;
  int n_theta = 0;
  int n_radial = 0;

  double signed_area(std::size_t tri) const;
  double min_angle_degrees() const;
  double area() const;
  double boundary_length(geometry::Side side) const;
};

/// Staggered: odd rings are shifted by half an angular cell and every triangle has one edge on a
/// ring, which keeps angles near atan(2h/w) for thin layers. QuadSplit: rings aligned and each quad
/// split along its shorter diagonal, angles near atan(h/w).
enum class MeshPattern { Staggered, QuadSplit };

struct MeshOptions {
  MeshPattern pattern = MeshPattern::Staggered;
  /// Ratio between the widest and the narrowest radial layer; layers grow geometrically
  /// from both boundary curves toward the middle.
  double grading = 1.2;
  double min_angle_degrees = 15.0;
};

/// Transfinite mesh: node (i, j) = (1 - s_j) * inner(theta_ij) + s_j * outer(theta_ij) with
/// theta_ij = phase + 2 pi (i + shift_j) / n_theta; triangulation per MeshOptions::pattern. Throws Error(MeshingFailure) on bad requests, inverted
/// triangles (with the offending theta and s indices) or angles below the quality floor.
Mesh build_mesh(const geometry::DomainSpec& domain, int n_theta, int n_radial, const MeshOptions& opts = {});

/// Unconstrained P1 building blocks over all nodes.
struct Components {
  SparseMatrix stiffness;   // K
  SparseMatrix mass;        // M
  SparseMatrix inner_mass;  // B_in, exact edge integrals on the inner cycle
  SparseMatrix outer_mass;  // B_out
};

Components assemble_components(const Mesh& mesh);

/// A = K + h_in B_in + h_out B_out and M with Dirichlet nodes eliminated.
struct System {
  SparseMatrix A;
  SparseMatrix M;
  /// dof index per node, -1 for eliminated (Dirichlet) nodes.
  std::vector<int> dof_of_node;
  std::vector<int> node_of_dof;

  Eigen::VectorXd restrict(std::span<const double> nodal) const;
  std::vector<double> prolong(const Eigen::VectorXd& dofs) const;
};

System assemble(const Mesh& mesh, const RobinPair& robin);

struct EigenOptions {
  double rq_tol = 1e-12;
  double residual_tol = 1e-8;
  int max_iterations = 500;
  int max_shift_retries = 5;
  unsigned seed = 20240611u;
};

struct EigenPair {
  double lambda1 = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
  double shift = 0.0;
  double residual = 0.0;
};

/// Smallest generalized eigenpair of (A, M) by shift-and-invert inverse iteration.
/// `shift_margin` is subtracted from the probe Rayleigh quotients to place the first shift below
/// the spectrum; a sparse LDL^T inertia check certifies every shift. The sign is fixed so the
/// mean entry is positive.
EigenPair smallest_eig(const SparseMatrix& A, const SparseMatrix& M, double shift_margin, bool nonnegative_spectrum,
                       const EigenOptions& opts = {});

struct EigenResult {
  double lambda1 = 0.0;
  /// Nodal values, max = 1, zero on Dirichlet nodes.
  std::vector<double> u;
  /// Constant P1 gradient per triangle.
  std::vector<Point> grad;
  /// Area-weighted average of adjacent triangle gradients per node.
  std::vector<Point> recovered_grad;
  int iterations = 0;
  double residual = 0.0;
};

/// Assembles and solves; lambda1 is the Rayleigh quotient of the returned u.
EigenResult solve(const Mesh& mesh, const RobinPair& robin, const EigenOptions& opts = {});

/// (grad part + boundary parts) / L2 part evaluated element by element.
/// Throws Error(InvalidTestFunction) if v is nonzero on a Dirichlet node or has zero L2 norm.
double rayleigh_quotient(const Mesh& mesh, const RobinPair& robin, std::span<const double> v);

struct QuotientParts {
  double gradient = 0.0;  // int |grad v|^2
  double inner = 0.0;     // int_{dOmega_in} v^2
  double outer = 0.0;     // int_{dOmega_out} v^2
  double l2 = 0.0;        // int v^2
};

QuotientParts quotient_parts(const Mesh& mesh, std::span<const double> v);

std::vector<Point> triangle_gradients(const Mesh& mesh, std::span<const double> v);
std::vector<Point> recover_gradients(const Mesh& mesh, std::span<const Point> tri_grad);

/// Text dump: "node x y u" lines followed by "tri i j k" lines.
void dump_field(std::ostream& out, const Mesh& mesh, std::span<const double> u);

}  // namespace rfk::fem
