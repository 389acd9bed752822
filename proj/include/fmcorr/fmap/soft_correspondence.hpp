#pragma once

#include "fmcorr/fmap/point_map.hpp"
#include "fmcorr/geodesics/geodesics.hpp"

#include <optional>
#include <vector>

namespace fmcorr {

/// Column-stochastic soft map P = |Psi C Phi^T A|^ (column-wise l1
/// normalization). Column x is a probability distribution over target
/// vertices for source vertex x. Only the requested columns are stored.
struct SoftCorrespondence {
  Matrix P;                          // n_Y x |columns|
  std::vector<int> column_index_map;  // source vertex per stored column
};

inline SoftCorrespondence soft_correspondence(
    const SpectralBasis& src_basis, const SpectralBasis& tgt_basis, const FunctionalMap& map,
    std::optional<std::vector<int>> columns = std::nullopt) {
  if (map.C.cols() != src_basis.k || map.C.rows() != tgt_basis.k)
    throw std::invalid_argument("soft_correspondence: C dimensions do not match the bases");
  if (!map.source_basis_id.empty() && !src_basis.id.empty() && map.source_basis_id != src_basis.id)
    throw std::invalid_argument("soft_correspondence: source basis id mismatch");
  if (!map.target_basis_id.empty() && !tgt_basis.id.empty() && map.target_basis_id != tgt_basis.id)
    throw std::invalid_argument("soft_correspondence: target basis id mismatch");

  std::vector<int> cols;
  if (columns) {
    cols = std::move(*columns);
    for (int c : cols)
      if (c < 0 || c >= src_basis.n_vertices())
        throw std::invalid_argument("soft_correspondence: column index out of range");
  } else {
    cols.resize(static_cast<std::size_t>(src_basis.n_vertices()));
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = static_cast<int>(i);
  }

  SoftCorrespondence soft;
  soft.column_index_map = cols;
  soft.P.resize(tgt_basis.n_vertices(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const int x = cols[j];
    // Column x of Psi C Phi^T A is Psi (C (a_x phi_x)).
    const Vector coeff = map.C * (src_basis.mass[x] * src_basis.eigenfunctions.row(x).transpose());
    Vector col = (tgt_basis.eigenfunctions * coeff).cwiseAbs();
    const double sum = col.sum();
    if (sum <= 0.0)
      throw numerical_error("soft_correspondence: degenerate column for source vertex " +
                            std::to_string(x));
    soft.P.col(static_cast<Index>(j)) = col / sum;
  }
  return soft;
}

enum class SoftErrorForm { weighted_sum, frobenius };

/// Soft error: expected geodesic distance to the ground-truth match under P,
/// averaged over stored columns. The Frobenius variant replaces the per-run
/// sum with the Frobenius norm of P .* D at the same entries.
inline double soft_error_loss(const SoftCorrespondence& soft, const PointMap& truth,
                              const DistanceRows& tgt_rows,
                              SoftErrorForm form = SoftErrorForm::weighted_sum) {
  if (soft.P.cols() == 0) throw std::invalid_argument("soft_error_loss: no stored columns");
  double accum = 0.0;
  for (Index j = 0; j < soft.P.cols(); ++j) {
    const int x = soft.column_index_map[static_cast<std::size_t>(j)];
    if (x < 0 || static_cast<std::size_t>(x) >= truth.assignments.size())
      throw std::invalid_argument("soft_error_loss: truth missing for source vertex " + std::to_string(x));
    const int target = truth.assignments[static_cast<std::size_t>(x)];
    const auto dist = tgt_rows.row(target);
    if (form == SoftErrorForm::weighted_sum)
      accum += soft.P.col(j).dot(dist.transpose());
    else
      accum += soft.P.col(j).cwiseProduct(dist.transpose()).squaredNorm();
  }
  const double count = static_cast<double>(soft.P.cols());
  return form == SoftErrorForm::weighted_sum ? accum / count : std::sqrt(accum) / count;
}

}  // namespace fmcorr
