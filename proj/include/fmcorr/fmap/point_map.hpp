#pragma once

#include "fmcorr/fmap/functional_map.hpp"

#include <fstream>
#include <vector>

namespace fmcorr {

/// Dense vertex-to-vertex assignment, source index -> target index.
struct PointMap {
  std::vector<int> assignments;
};

/// Baseline pointwise recovery: each source vertex goes to the target vertex
/// whose spectral embedding row of Psi is nearest to C * Phi(x,:)^T. Ties to
/// the lowest target index.
inline PointMap recover_point_map(const SpectralBasis& src_basis, const SpectralBasis& tgt_basis,
                                  const FunctionalMap& map) {
  if (map.C.cols() != src_basis.k || map.C.rows() != tgt_basis.k)
    throw std::invalid_argument("recover_point_map: C dimensions do not match the bases");
  const Matrix embedded = src_basis.eigenfunctions * map.C.transpose();  // n_X x k
  const Matrix& target = tgt_basis.eigenfunctions;                      // n_Y x k

  PointMap pmap;
  pmap.assignments.resize(static_cast<std::size_t>(embedded.rows()));
  for (Index x = 0; x < embedded.rows(); ++x) {
    const Vector d2 = (target.rowwise() - embedded.row(x)).rowwise().squaredNorm();
    Index best = 0;
    double best_d2 = d2[0];
    for (Index y = 1; y < d2.size(); ++y)
      if (d2[y] < best_d2) {
        best_d2 = d2[y];
        best = y;
      }
    pmap.assignments[static_cast<std::size_t>(x)] = static_cast<int>(best);
  }
  return pmap;
}

inline void save_point_map(const PointMap& map, std::ostream& out) {
  for (int a : map.assignments) out << a << '\n';
}

inline void save_point_map_file(const PointMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  save_point_map(map, out);
}

inline PointMap load_point_map(std::istream& in) {
  PointMap map;
  long v;
  while (in >> v) map.assignments.push_back(static_cast<int>(v));
  return map;
}

inline PointMap load_point_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  return load_point_map(in);
}

}  // namespace fmcorr
