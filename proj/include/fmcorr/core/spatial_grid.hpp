#pragma once

#include "fmcorr/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

namespace fmcorr {

/// Uniform hash grid over 3D points. Nearest-neighbor queries expand
/// Chebyshev cell rings until no closer candidate can exist; ties resolve to
/// the lowest point index, matching a brute-force scan exactly.
class SpatialGrid {
 public:
  SpatialGrid(const Points& points, double cell_size)
      : points_(points), cell_(cell_size > 0 ? cell_size : 1.0) {
    if (points.rows() == 0) throw std::invalid_argument("SpatialGrid: empty point set");
    origin_ = points.colwise().minCoeff();
    lo_cell_ = {0, 0, 0};
    hi_cell_ = {0, 0, 0};
    for (Index i = 0; i < points.rows(); ++i) {
      const auto c = cell_coords(points.row(i));
      for (int a = 0; a < 3; ++a) {
        lo_cell_[a] = std::min(lo_cell_[a], c[a]);
        hi_cell_[a] = std::max(hi_cell_[a], c[a]);
      }
      cells_[pack(c)].push_back(static_cast<int>(i));
    }
    for (auto& [k, v] : cells_) std::sort(v.begin(), v.end());
  }

  /// Aims at O(1) points per cell.
  static double default_cell_size(const Points& points) {
    const Eigen::RowVector3d lo = points.colwise().minCoeff();
    const Eigen::RowVector3d hi = points.colwise().maxCoeff();
    const double diag = (hi - lo).norm();
    if (diag <= 0.0) return 1.0;
    const double per_axis = std::cbrt(static_cast<double>(points.rows()));
    return diag / std::max(per_axis, 1.0);
  }

  int nearest(const Eigen::RowVector3d& q) const {
    const auto center = cell_coords(q);
    long max_ring = 0;
    for (int a = 0; a < 3; ++a)
      max_ring = std::max({max_ring, std::labs(center[a] - lo_cell_[a]),
                           std::labs(hi_cell_[a] - center[a])});
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (long ring = 0; ring <= max_ring; ++ring) {
      if (best >= 0 && ring >= 2) {
        // Any cell at this ring is at least (ring-1)*cell away from q.
        const double lb = static_cast<double>(ring - 1) * cell_;
        if (lb * lb > best_d2) break;
      }
      visit_ring(center, ring, [&](const std::array<long, 3>& c) {
        const auto it = cells_.find(pack(c));
        if (it == cells_.end()) return;
        for (int idx : it->second) {
          const double d2 = (points_.row(idx) - q).squaredNorm();
          if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
            best_d2 = d2;
            best = idx;
          }
        }
      });
    }
    return best;
  }

  /// Indices with ||p_i - q|| <= radius, ascending.
  std::vector<int> radius_query(const Eigen::RowVector3d& q, double radius) const {
    std::vector<int> out;
    const double r2 = radius * radius;
    const auto lo = cell_coords(q - Eigen::RowVector3d::Constant(radius));
    const auto hi = cell_coords(q + Eigen::RowVector3d::Constant(radius));
    std::array<long, 3> c;
    for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0])
      for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1])
        for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2]) {
          const auto it = cells_.find(pack(c));
          if (it == cells_.end()) continue;
          for (int idx : it->second)
            if ((points_.row(idx) - q).squaredNorm() <= r2) out.push_back(idx);
        }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::array<long, 3> cell_coords(const Eigen::RowVector3d& p) const {
    return {static_cast<long>(std::floor((p[0] - origin_[0]) / cell_)),
            static_cast<long>(std::floor((p[1] - origin_[1]) / cell_)),
            static_cast<long>(std::floor((p[2] - origin_[2]) / cell_))};
  }
  static std::uint64_t pack(const std::array<long, 3>& c) {
    const auto u = [](long v) { return static_cast<std::uint64_t>(v + (1L << 20)) & 0x1fffff; };
    return (u(c[0]) << 42) | (u(c[1]) << 21) | u(c[2]);
  }

  template <class F>
  void visit_ring(const std::array<long, 3>& c, long ring, F&& f) const {
    if (ring == 0) {
      f(c);
      return;
    }
    std::array<long, 3> p;
    for (long dx = -ring; dx <= ring; ++dx)
      for (long dy = -ring; dy <= ring; ++dy)
        for (long dz = -ring; dz <= ring; ++dz) {
          if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != ring) continue;
          p = {c[0] + dx, c[1] + dy, c[2] + dz};
          f(p);
        }
  }

  Points points_;
  Eigen::RowVector3d origin_;
  double cell_;
  std::array<long, 3> lo_cell_, hi_cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace fmcorr
