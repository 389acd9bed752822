#pragma once

#include "fmcorr/core/fmb.hpp"
#include "fmcorr/fmap/soft_correspondence.hpp"
#include "fmcorr/geodesics/geodesics.hpp"
#include "fmcorr/io/manifest.hpp"

#include <sstream>

namespace fmcorr {

namespace detail {

inline std::string join_indices(const std::vector<int>& indices) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < indices.size(); ++i) ss << (i ? " " : "") << indices[i];
  return ss.str();
}

inline std::vector<int> split_indices(const std::string& text) {
  std::istringstream ss(text);
  std::vector<int> out;
  int v;
  while (ss >> v) out.push_back(v);
  return out;
}

}  // namespace detail

// Distance rows persist as the FMB matrix plus the source index list in the
// sidecar manifest.
inline void save_distance_rows(const DistanceRows& rows, const std::string& path) {
  write_fmb_file(path, rows.distances);
  Manifest manifest;
  manifest.set("kind", "distance_rows");
  manifest.set("source_indices", detail::join_indices(rows.source_indices));
  manifest.write_file(path + ".manifest.txt");
}

inline DistanceRows load_distance_rows(const std::string& path) {
  DistanceRows rows;
  rows.distances = read_fmb_file(path);
  const Manifest manifest = Manifest::read_file(path + ".manifest.txt");
  rows.source_indices = detail::split_indices(manifest.get("source_indices"));
  if (static_cast<Index>(rows.source_indices.size()) != rows.distances.rows())
    throw io_error("distance rows at '" + path + "': index list does not match the matrix");
  rows.unreachable_count.assign(rows.source_indices.size(), 0);
  for (Index r = 0; r < rows.distances.rows(); ++r)
    for (Index c = 0; c < rows.distances.cols(); ++c)
      if (!std::isfinite(rows.distances(r, c)))
        ++rows.unreachable_count[static_cast<std::size_t>(r)];
  rows.rebuild_lookup();
  return rows;
}

// Soft correspondences persist column-major with their source-column list.
inline void save_soft_correspondence(const SoftCorrespondence& soft, const std::string& path) {
  write_fmb_file(path, soft.P);
  Manifest manifest;
  manifest.set("kind", "soft_correspondence");
  manifest.set("columns", detail::join_indices(soft.column_index_map));
  manifest.write_file(path + ".manifest.txt");
}

inline SoftCorrespondence load_soft_correspondence(const std::string& path) {
  SoftCorrespondence soft;
  soft.P = read_fmb_file(path);
  const Manifest manifest = Manifest::read_file(path + ".manifest.txt");
  soft.column_index_map = detail::split_indices(manifest.get("columns"));
  if (static_cast<Index>(soft.column_index_map.size()) != soft.P.cols())
    throw io_error("soft correspondence at '" + path + "': column list does not match the matrix");
  return soft;
}

}  // namespace fmcorr
