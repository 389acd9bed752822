#pragma once

#include "fmcorr/core/mesh.hpp"
#include "fmcorr/core/spatial_grid.hpp"

#include <vector>

namespace fmcorr {

/// Fixed SHOT layout: 8 azimuth x 2 elevation x 2 radial shells = 32 spatial
/// volumes, 11 cosine bins each -> 352 entries.
struct ShotConfig {
  double radius_frac = 0.05;  // default support: fraction of the bbox diagonal
  static constexpr int azimuth_bins = 8;
  static constexpr int elevation_bins = 2;
  static constexpr int radial_bins = 2;
  static constexpr int cosine_bins = 11;
  static constexpr int descriptor_size = azimuth_bins * elevation_bins * radial_bins * cosine_bins;
};

struct DescriptorMeta {
  double radius = 0.0;
  int zero_descriptor_count = 0;
};

/// Per-vertex feature matrix (n x q). q = 352 for SHOT.
struct DescriptorField {
  Matrix values;
  int q = 0;
  DescriptorMeta meta;
};

namespace detail {

// Repeatable local reference frame from the radius-weighted covariance of
// neighbor offsets. Sign disambiguation: each axis points where the majority
// of neighbor projections is nonnegative; an exact tie falls back to the
// vertex normal for z and to a largest-entry rule for x.
struct LocalFrame {
  Eigen::RowVector3d x, y, z;
};

inline LocalFrame shot_frame(const Points& vertices, const Eigen::RowVector3d& p,
                             const Eigen::RowVector3d& normal,
                             const std::vector<int>& neighbors, double radius) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double wsum = 0.0;
  for (int j : neighbors) {
    const Eigen::RowVector3d d = vertices.row(j) - p;
    const double w = radius - d.norm();
    cov += w * d.transpose() * d;
    wsum += w;
  }
  if (wsum <= 0.0) {  // every neighbor exactly on the support boundary
    wsum = static_cast<double>(neighbors.size());
    cov.setZero();
    for (int j : neighbors) {
      const Eigen::RowVector3d d = vertices.row(j) - p;
      cov += d.transpose() * d;
    }
  }
  cov /= wsum;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);  // ascending eigenvalues

  LocalFrame f;
  f.x = es.eigenvectors().col(2).transpose();
  f.z = es.eigenvectors().col(0).transpose();

  int pos = 0, neg = 0;
  for (int j : neighbors) {
    const double proj = (vertices.row(j) - p).dot(f.x);
    if (proj > 0) ++pos;
    else if (proj < 0) ++neg;
  }
  if (neg > pos) f.x = -f.x;
  else if (neg == pos) {
    Index arg = 0;
    f.x.cwiseAbs().maxCoeff(&arg);
    if (f.x[arg] < 0) f.x = -f.x;
  }

  pos = neg = 0;
  for (int j : neighbors) {
    const double proj = (vertices.row(j) - p).dot(f.z);
    if (proj > 0) ++pos;
    else if (proj < 0) ++neg;
  }
  if (neg > pos) f.z = -f.z;
  else if (neg == pos && f.z.dot(normal) < 0) f.z = -f.z;

  f.y = f.z.cross(f.x);
  return f;
}

}  // namespace detail

/// SHOT signature at every vertex. Neighborhoods are Euclidean balls over the
/// vertex set; weights are soft-binned quadrilinearly over the cosine,
/// azimuth, elevation and radial coordinates, then each descriptor is
/// l2-normalized (empty neighborhoods give the zero descriptor).
inline DescriptorField compute_shot(const TriMesh& mesh, double radius,
                                    const ShotConfig& config = {}) {
  if (radius <= 0.0) throw std::invalid_argument("compute_shot: radius must be positive");
  const Index n = mesh.n_vertices();
  const Points normals = vertex_normals(mesh);
  const SpatialGrid grid(mesh.vertices, std::max(radius / 2.0, SpatialGrid::default_cell_size(mesh.vertices) / 4.0));

  constexpr int kAzim = ShotConfig::azimuth_bins;
  constexpr int kElev = ShotConfig::elevation_bins;
  constexpr int kRad = ShotConfig::radial_bins;
  constexpr int kCos = ShotConfig::cosine_bins;
  constexpr double kPi = 3.14159265358979323846;

  DescriptorField field;
  field.q = config.descriptor_size;
  field.values = Matrix::Zero(n, field.q);
  field.meta.radius = radius;
  field.meta.zero_descriptor_count = 0;

  std::vector<double> hist(static_cast<std::size_t>(field.q));
  for (Index v = 0; v < n; ++v) {
    const Eigen::RowVector3d p = mesh.vertices.row(v);
    std::vector<int> neighbors;
    for (int j : grid.radius_query(p, radius))
      if (j != static_cast<int>(v)) neighbors.push_back(j);
    if (neighbors.empty()) {
      ++field.meta.zero_descriptor_count;
      continue;
    }

    const auto frame = detail::shot_frame(mesh.vertices, p, normals.row(v), neighbors, radius);
    std::fill(hist.begin(), hist.end(), 0.0);

    for (int j : neighbors) {
      const Eigen::RowVector3d d = mesh.vertices.row(j) - p;
      const double r = d.norm();
      const double u = d.dot(frame.x), w = d.dot(frame.y), h = d.dot(frame.z);

      // Continuous bin coordinates; bin centers sit at i + 0.5.
      const double azim = std::atan2(w, u);                                    // [-pi, pi]
      const double fa = (azim + kPi) / (2.0 * kPi) * kAzim;                    // [0, 8]
      const double fe = (std::asin(std::clamp(h / r, -1.0, 1.0)) / kPi + 0.5) * kElev;  // [0, 2]
      const double fr = r / radius * kRad;                                     // (0, 2]
      const double cosn = std::clamp(normals.row(j).dot(frame.z), -1.0, 1.0);
      const double fc = (cosn + 1.0) / 2.0 * kCos;                             // [0, 11]

      // Quadrilinear soft assignment: each coordinate splits its unit weight
      // between the containing bin and the adjacent one. Azimuth wraps, the
      // other axes clamp at their ends.
      struct Split {
        int bin0, bin1;
        double w0, w1;
      };
      const auto split = [](double f, int bins, bool wrap) {
        Split s;
        int b = std::clamp(static_cast<int>(std::floor(f)), 0, bins - 1);
        const double frac = f - (b + 0.5);  // signed distance to bin center
        int nb = frac >= 0.0 ? b + 1 : b - 1;
        double share = std::abs(frac);
        if (wrap) nb = (nb + bins) % bins;
        else if (nb < 0 || nb >= bins) {
          nb = b;
          share = 0.0;
        }
        s.bin0 = b;
        s.bin1 = nb;
        s.w0 = 1.0 - share;
        s.w1 = share;
        return s;
      };
      const Split sa = split(fa, kAzim, true);
      const Split se = split(fe, kElev, false);
      const Split sr = split(fr, kRad, false);
      const Split sc = split(fc, kCos, false);

      for (const auto& [ab, aw] : {std::pair{sa.bin0, sa.w0}, std::pair{sa.bin1, sa.w1}})
        for (const auto& [eb, ew] : {std::pair{se.bin0, se.w0}, std::pair{se.bin1, se.w1}})
          for (const auto& [rb, rw] : {std::pair{sr.bin0, sr.w0}, std::pair{sr.bin1, sr.w1}})
            for (const auto& [cb, cw] : {std::pair{sc.bin0, sc.w0}, std::pair{sc.bin1, sc.w1}}) {
              const double weight = aw * ew * rw * cw;
              if (weight <= 0.0) continue;
              const int volume = ((ab * kElev) + eb) * kRad + rb;
              hist[static_cast<std::size_t>(volume * kCos + cb)] += weight;
            }
    }

    double norm2 = 0.0;
    for (double x : hist) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (norm > 0.0)
      for (int i = 0; i < field.q; ++i) field.values(v, i) = hist[static_cast<std::size_t>(i)] / norm;
    else
      ++field.meta.zero_descriptor_count;
  }
  return field;
}

inline double default_shot_radius(const TriMesh& mesh, double radius_frac) {
  return radius_frac * bounding_box_diagonal(mesh);
}

}  // namespace fmcorr
