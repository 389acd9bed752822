#pragma once

#include "fmcorr/core/mesh.hpp"

#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

namespace fmcorr {

/// Rows of the geodesic distance matrix at selected source vertices. Only the
/// rows the loss actually reads are ever computed; the full n x n matrix is
/// never materialized.
struct DistanceRows {
  std::vector<int> source_indices;
  Matrix distances;                    // |sources| x n
  std::vector<int> unreachable_count;  // +inf entries per source (disconnected parts)

  bool has_row(int source) const { return lookup_.count(source) > 0; }
  Eigen::RowVectorXd row(int source) const {
    const auto it = lookup_.find(source);
    if (it == lookup_.end())
      throw std::invalid_argument("DistanceRows: no row for vertex " + std::to_string(source));
    return distances.row(it->second);
  }

  void rebuild_lookup() {
    lookup_.clear();
    for (std::size_t i = 0; i < source_indices.size(); ++i)
      lookup_[source_indices[i]] = static_cast<Index>(i);
  }

 private:
  std::unordered_map<int, Index> lookup_;
};

namespace detail {

struct EdgeGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
};

inline EdgeGraph build_edge_graph(const TriMesh& mesh) {
  EdgeGraph g;
  g.adj.resize(static_cast<std::size_t>(mesh.n_vertices()));
  const auto add_edge = [&](int a, int b) {
    for (const auto& [v, w] : g.adj[static_cast<std::size_t>(a)])
      if (v == b) return;
    const double len = (mesh.vertices.row(a) - mesh.vertices.row(b)).norm();
    g.adj[static_cast<std::size_t>(a)].emplace_back(b, len);
    g.adj[static_cast<std::size_t>(b)].emplace_back(a, len);
  };
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    add_edge(mesh.faces(f, 0), mesh.faces(f, 1));
    add_edge(mesh.faces(f, 1), mesh.faces(f, 2));
    add_edge(mesh.faces(f, 2), mesh.faces(f, 0));
  }
  return g;
}

inline Vector dijkstra(const EdgeGraph& g, int source) {
  Vector dist = Vector::Constant(static_cast<Index>(g.adj.size()),
                                 std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : g.adj[static_cast<std::size_t>(u)]) {
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// Shortest-path distances on the edge graph with Euclidean edge lengths
/// (graph-geodesic approximation). Disconnected parts stay at +infinity and
/// are counted per source.
inline DistanceRows geodesic_distances(const TriMesh& mesh, const std::vector<int>& sources) {
  if (sources.empty()) throw std::invalid_argument("geodesic_distances: no sources");
  for (int s : sources)
    if (s < 0 || s >= mesh.n_vertices())
      throw std::invalid_argument("geodesic_distances: source index " + std::to_string(s) + " out of range");

  const auto graph = detail::build_edge_graph(mesh);
  DistanceRows rows;
  rows.source_indices = sources;
  rows.distances.resize(static_cast<Index>(sources.size()), mesh.n_vertices());
  rows.unreachable_count.resize(sources.size(), 0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    rows.distances.row(static_cast<Index>(i)) = detail::dijkstra(graph, sources[i]).transpose();
    int unreachable = 0;
    for (Index v = 0; v < mesh.n_vertices(); ++v)
      if (!std::isfinite(rows.distances(static_cast<Index>(i), v))) ++unreachable;
    rows.unreachable_count[i] = unreachable;
    if (unreachable == mesh.n_vertices() - 1)
      throw numerical_error("geodesic_distances: source " + std::to_string(sources[i]) +
                            " is fully disconnected");
  }
  rows.rebuild_lookup();
  return rows;
}

/// Princeton-protocol geodesic error: d(y, y*) / sqrt(area(Y)).
inline double geodesic_error(int predicted, int truth, const DistanceRows& rows, double target_area) {
  if (target_area <= 0.0) throw std::invalid_argument("geodesic_error: non-positive area");
  return rows.row(truth)[predicted] / std::sqrt(target_area);
}

}  // namespace fmcorr
