#pragma once

#include "fmcorr/common.hpp"

#include <cmath>
#include <string>

namespace fmcorr {

/// Immutable triangle mesh with lumped (barycentric) vertex areas: each
/// vertex holds one third of every incident triangle area, so the mass
/// matrix stays diagonal and trivially invertible.
struct TriMesh {
  Points vertices;      // n x 3
  Faces faces;          // m x 3
  Vector vertex_areas;  // n, strictly positive on used vertices
  double total_area = 0.0;

  Index n_vertices() const { return vertices.rows(); }
  Index n_faces() const { return faces.rows(); }
};

inline double triangle_area(const Eigen::RowVector3d& a,
                            const Eigen::RowVector3d& b,
                            const Eigen::RowVector3d& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

/// Validates connectivity and builds the area measures. Throws
/// std::invalid_argument on structural problems and io_error-style messages
/// are left to the parsers; this is the single entry point all loaders use.
inline TriMesh make_tri_mesh(Points vertices, Faces faces) {
  const Index n = vertices.rows();
  const Index m = faces.rows();
  if (n < 3) throw std::invalid_argument("mesh needs at least 3 vertices, got " + std::to_string(n));
  if (m < 1) throw std::invalid_argument("mesh needs at least 1 face");
  if (!vertices.allFinite()) throw std::invalid_argument("non-finite vertex coordinates");

  // Degeneracy threshold relative to the longest edge of the face.
  for (Index f = 0; f < m; ++f) {
    const int i = faces(f, 0), j = faces(f, 1), k = faces(f, 2);
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n)
      throw std::invalid_argument("face " + std::to_string(f) + ": vertex index out of range");
    if (i == j || j == k || i == k)
      throw std::invalid_argument("face " + std::to_string(f) + ": degenerate face (repeated index)");
  }

  Vector areas = Vector::Zero(n);
  double total = 0.0;
  for (Index f = 0; f < m; ++f) {
    const Eigen::RowVector3d a = vertices.row(faces(f, 0));
    const Eigen::RowVector3d b = vertices.row(faces(f, 1));
    const Eigen::RowVector3d c = vertices.row(faces(f, 2));
    const double area = triangle_area(a, b, c);
    const double lmax2 = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
    if (!(area > 1e-14 * lmax2) || !std::isfinite(area))
      throw std::invalid_argument("face " + std::to_string(f) + ": degenerate face (zero area)");
    const double third = area / 3.0;
    areas[faces(f, 0)] += third;
    areas[faces(f, 1)] += third;
    areas[faces(f, 2)] += third;
    total += area;
  }

  TriMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.faces = std::move(faces);
  mesh.vertex_areas = std::move(areas);
  mesh.total_area = total;
  return mesh;
}

/// Area-weighted average of incident face normals, normalized per vertex.
inline Points vertex_normals(const TriMesh& mesh) {
  Points normals = Points::Zero(mesh.n_vertices(), 3);
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const Eigen::RowVector3d a = mesh.vertices.row(mesh.faces(f, 0));
    const Eigen::RowVector3d b = mesh.vertices.row(mesh.faces(f, 1));
    const Eigen::RowVector3d c = mesh.vertices.row(mesh.faces(f, 2));
    const Eigen::RowVector3d weighted = 0.5 * (b - a).cross(c - a);  // area-weighted
    for (int v = 0; v < 3; ++v) normals.row(mesh.faces(f, v)) += weighted;
  }
  for (Index i = 0; i < normals.rows(); ++i) {
    const double len = normals.row(i).norm();
    if (len > 0.0) normals.row(i) /= len;
  }
  return normals;
}

inline double bounding_box_diagonal(const TriMesh& mesh) {
  const Eigen::RowVector3d lo = mesh.vertices.colwise().minCoeff();
  const Eigen::RowVector3d hi = mesh.vertices.colwise().maxCoeff();
  return (hi - lo).norm();
}

}  // namespace fmcorr
