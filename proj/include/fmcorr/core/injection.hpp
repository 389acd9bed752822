#pragma once

#include "fmcorr/core/mesh.hpp"
#include "fmcorr/core/spatial_grid.hpp"

#include <vector>

namespace fmcorr {

/// Maps every vertex of a (low-resolution) source mesh to a vertex of the
/// full-resolution target mesh.
struct Injection {
  Index source_size = 0;
  std::vector<int> target_indices;  // one per source vertex
};

/// Euclidean nearest target vertex per source vertex; ties to lowest index.
inline Injection nearest_neighbor_injection(const TriMesh& source, const TriMesh& target) {
  if (source.n_vertices() == 0 || target.n_vertices() == 0)
    throw std::invalid_argument("nearest_neighbor_injection: empty mesh");
  const SpatialGrid grid(target.vertices, SpatialGrid::default_cell_size(target.vertices));
  Injection inj;
  inj.source_size = source.n_vertices();
  inj.target_indices.resize(static_cast<std::size_t>(source.n_vertices()));
  for (Index i = 0; i < source.n_vertices(); ++i)
    inj.target_indices[static_cast<std::size_t>(i)] = grid.nearest(source.vertices.row(i));
  return inj;
}

}  // namespace fmcorr
