#pragma once

#include "fmcorr/core/injection.hpp"
#include "fmcorr/fmap/point_map.hpp"
#include "fmcorr/upscale/admm.hpp"

namespace fmcorr {

/// Fourier coefficients of discrete deltas A^{-1} e_x at the given vertices:
/// column j is Phi(points[j], :)^T.
inline Matrix build_delta_spectra(const SpectralBasis& basis, const std::vector<int>& points) {
  Matrix coeffs(basis.k, static_cast<Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    const int x = points[j];
    if (x < 0 || x >= basis.n_vertices())
      throw std::invalid_argument("build_delta_spectra: vertex index " + std::to_string(x) +
                                  " out of range");
    coeffs.col(static_cast<Index>(j)) = basis.eigenfunctions.row(x).transpose();
  }
  return coeffs;
}

/// Sparse full-resolution match list from a low-resolution map and the two
/// nearest-neighbor injections: (pi_X(i), pi_Y(lowmap(i))) per low vertex.
inline std::vector<std::pair<int, int>> compose_matches(const PointMap& low_map,
                                                        const Injection& inj_src,
                                                        const Injection& inj_tgt) {
  if (low_map.assignments.size() != inj_src.target_indices.size())
    throw std::invalid_argument("compose_matches: low map size does not match source injection");
  std::vector<std::pair<int, int>> matches;
  matches.reserve(low_map.assignments.size());
  for (std::size_t i = 0; i < low_map.assignments.size(); ++i) {
    const int low_tgt = low_map.assignments[i];
    if (low_tgt < 0 || static_cast<std::size_t>(low_tgt) >= inj_tgt.target_indices.size())
      throw std::invalid_argument("compose_matches: low map target out of range");
    matches.emplace_back(inj_src.target_indices[i],
                         inj_tgt.target_indices[static_cast<std::size_t>(low_tgt)]);
  }
  return matches;
}

/// Full upscaling pipeline: compose the sparse match list, fit C* by the
/// robust l2,1 problem over matched delta spectra, then recover a dense
/// full-resolution point map.
inline PointMap upscale_map(const PointMap& low_map, const Injection& inj_src,
                            const Injection& inj_tgt, const SpectralBasis& full_src_basis,
                            const SpectralBasis& full_tgt_basis, const AdmmConfig& cfg = {},
                            AdmmResult* result_out = nullptr) {
  const auto matches = compose_matches(low_map, inj_src, inj_tgt);
  std::vector<int> src_pts, tgt_pts;
  src_pts.reserve(matches.size());
  tgt_pts.reserve(matches.size());
  for (const auto& [s, t] : matches) {
    src_pts.push_back(s);
    tgt_pts.push_back(t);
  }
  UpscaleProblem problem;
  problem.src_delta_coeffs = build_delta_spectra(full_src_basis, src_pts);
  problem.tgt_delta_coeffs = build_delta_spectra(full_tgt_basis, tgt_pts);
  AdmmResult result = solve_l21(problem, cfg);
  result.map.source_basis_id = full_src_basis.id;
  result.map.target_basis_id = full_tgt_basis.id;
  PointMap dense = recover_point_map(full_src_basis, full_tgt_basis, result.map);
  if (result_out) *result_out = std::move(result);
  return dense;
}

}  // namespace fmcorr
