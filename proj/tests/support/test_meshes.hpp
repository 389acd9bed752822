#pragma once

#include "fmcorr/core/mesh.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace fmcorr::testing {

// Icosphere: subdivided icosahedron with vertices pushed onto the unit
// sphere. Levels 0..3 give 12, 42, 162, 642 vertices.
inline TriMesh make_icosphere(int level, double radius = 1.0) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::RowVector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::RowVector3i> faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    const auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::RowVector3d m = (verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized();
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Eigen::RowVector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }

  Points v(static_cast<Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) v.row(static_cast<Index>(i)) = radius * verts[i];
  Faces f(static_cast<Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) f.row(static_cast<Index>(i)) = faces[i];
  return make_tri_mesh(std::move(v), std::move(f));
}

// Planar grid in the xy-plane, rows x cols vertices, unit spacing by default.
inline TriMesh make_grid(int rows, int cols, double spacing = 1.0) {
  Points v(static_cast<Index>(rows) * cols, 3);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      v.row(static_cast<Index>(r) * cols + c) = Eigen::RowVector3d(c * spacing, r * spacing, 0.0);
  std::vector<Eigen::RowVector3i> faces;
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c) {
      const int i00 = r * cols + c, i01 = r * cols + c + 1;
      const int i10 = (r + 1) * cols + c, i11 = (r + 1) * cols + c + 1;
      faces.push_back({i00, i01, i10});
      faces.push_back({i01, i11, i10});
    }
  Faces f(static_cast<Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) f.row(static_cast<Index>(i)) = faces[i];
  return make_tri_mesh(std::move(v), std::move(f));
}

// Two-row ladder strip; the bottom row vertices 0..len-1 are collinear with
// unit spacing, so graph distance along the bottom equals the index gap.
inline TriMesh make_strip(int len) { return make_grid(2, len); }

inline std::string unit_triangle_off() {
  return "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
}

inline std::string unit_cube_off() {
  return "OFF\n8 12 0\n"
         "0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n"
         "3 0 2 1\n3 0 3 2\n"   // bottom
         "3 4 5 6\n3 4 6 7\n"   // top
         "3 0 1 5\n3 0 5 4\n"   // front
         "3 1 2 6\n3 1 6 5\n"   // right
         "3 2 3 7\n3 2 7 6\n"   // back
         "3 3 0 4\n3 3 4 7\n";  // left
}

// Class-I geodesic sphere of arbitrary frequency: the flat barycentric
// lattice on each icosahedron face, projected onto the unit sphere.
// n = 10 f^2 + 2 vertices.
inline TriMesh make_geodesic_sphere(int freq) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::RowVector3d> ico = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : ico) v.normalize();
  const std::vector<Eigen::RowVector3i> base_faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  std::vector<Eigen::RowVector3d> verts;
  std::map<std::array<long, 3>, int> dedup;
  std::vector<Eigen::RowVector3i> tris;
  const auto add = [&](const Eigen::RowVector3d& p) {
    const std::array<long, 3> key = {std::lround(p[0] * 1e9), std::lround(p[1] * 1e9),
                                     std::lround(p[2] * 1e9)};
    const auto it = dedup.find(key);
    if (it != dedup.end()) return it->second;
    verts.push_back(p);
    dedup.emplace(key, static_cast<int>(verts.size()) - 1);
    return static_cast<int>(verts.size()) - 1;
  };
  for (const auto& f : base_faces) {
    const Eigen::RowVector3d a = ico[static_cast<std::size_t>(f[0])];
    const Eigen::RowVector3d b = ico[static_cast<std::size_t>(f[1])];
    const Eigen::RowVector3d c = ico[static_cast<std::size_t>(f[2])];
    const auto point = [&](int i, int j) {
      return Eigen::RowVector3d(((freq - i - j) * a + i * b + j * c).normalized());
    };
    for (int i = 0; i < freq; ++i)
      for (int j = 0; j < freq - i; ++j) {
        const int p0 = add(point(i, j)), p1 = add(point(i + 1, j)), p2 = add(point(i, j + 1));
        tris.push_back({p0, p1, p2});
        if (i + j < freq - 1) {
          const int p3 = add(point(i + 1, j + 1));
          tris.push_back({p1, p3, p2});
        }
      }
  }
  Points v(static_cast<Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) v.row(static_cast<Index>(i)) = verts[i];
  Faces f(static_cast<Index>(tris.size()), 3);
  for (std::size_t i = 0; i < tris.size(); ++i) f.row(static_cast<Index>(i)) = tris[i];
  return make_tri_mesh(std::move(v), std::move(f));
}

// Smooth radial bump field applied to any star-shaped base mesh.
inline TriMesh apply_blob_bumps(const TriMesh& base, std::uint64_t seed, double amplitude) {
  Rng rng(seed);
  const Eigen::RowVector3d a{rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0)};
  const Eigen::RowVector3d phase{rng.uniform(0.0, 6.28), rng.uniform(0.0, 6.28), rng.uniform(0.0, 6.28)};
  Points v = base.vertices;
  for (Index i = 0; i < v.rows(); ++i) {
    const Eigen::RowVector3d p = v.row(i);
    const double bump = std::sin(a[0] * p[0] + phase[0]) + std::sin(a[1] * p[1] + phase[1]) +
                        std::sin(a[2] * p[2] + phase[2]);
    v.row(i) = p * (1.0 + amplitude * bump / 3.0);
  }
  return make_tri_mesh(std::move(v), base.faces);
}

// Random closed blob: icosphere with a smooth radial perturbation. Fixed rng
// keeps tests reproducible.
inline TriMesh make_blob(int level, std::uint64_t seed, double amplitude = 0.25) {
  return apply_blob_bumps(make_icosphere(level), seed, amplitude);
}

// Near-isometric blob pair with identity ground truth: the same bumpy base
// shape, one copy mildly re-deformed by a second low-amplitude bump field.
inline std::pair<TriMesh, TriMesh> make_blob_pair(int freq, std::uint64_t seed,
                                                  double base_amplitude = 0.3,
                                                  double deform_amplitude = 0.08) {
  TriMesh source = apply_blob_bumps(make_geodesic_sphere(freq), seed, base_amplitude);
  TriMesh target = apply_blob_bumps(source, seed + 1, deform_amplitude);
  return {std::move(source), std::move(target)};
}

inline Eigen::Matrix3d rotation_matrix(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

inline TriMesh rigid_transform(const TriMesh& mesh, const Eigen::Matrix3d& rotation,
                               const Eigen::RowVector3d& translation) {
  Points v = (mesh.vertices * rotation.transpose()).rowwise() + translation;
  return make_tri_mesh(std::move(v), mesh.faces);
}

}  // namespace fmcorr::testing
