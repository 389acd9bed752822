#pragma once

#include "fmcorr/core/mesh.hpp"

#include <vector>

namespace fmcorr {

/// Linear-FEM discretization of the Laplace-Beltrami operator. W holds the
/// cotangent weights (positive semi-definite sign convention: off-diagonals
/// are -(cot a + cot b)/2, diagonal is minus the row's off-diagonal sum),
/// A is the lumped vertex-area mass.
struct LaplaceOperator {
  SparseMatrix stiffness;  // n x n, symmetric
  Vector mass;             // n, diagonal of A
};

inline LaplaceOperator build_fem_laplacian(const TriMesh& mesh) {
  const Index n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.n_faces()) * 12);

  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const int vi[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    for (int corner = 0; corner < 3; ++corner) {
      const int a = vi[corner];
      const int b = vi[(corner + 1) % 3];
      const int c = vi[(corner + 2) % 3];
      const Eigen::RowVector3d e1 = mesh.vertices.row(b) - mesh.vertices.row(a);
      const Eigen::RowVector3d e2 = mesh.vertices.row(c) - mesh.vertices.row(a);
      const double cross = e1.cross(e2).norm();
      const double cot = e1.dot(e2) / cross;  // cross > 0: degenerate faces rejected at load
      const double w = 0.5 * cot;             // weight for edge (b, c), opposite corner a
      trips.emplace_back(b, c, -w);
      trips.emplace_back(c, b, -w);
      trips.emplace_back(b, b, w);
      trips.emplace_back(c, c, w);
    }
  }

  LaplaceOperator op;
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.stiffness.makeCompressed();
  op.mass = mesh.vertex_areas;
  return op;
}

}  // namespace fmcorr
