#pragma once

#include "fmcorr/spectral/projection.hpp"

#include <Eigen/SVD>

namespace fmcorr {

/// k x k spectral representation C of a functional correspondence
/// T: L2(X) -> L2(Y), C acting on source Fourier coefficients.
struct FunctionalMap {
  Matrix C;
  std::string source_basis_id;
  std::string target_basis_id;
};

/// Least-squares functional map from matching descriptor coefficients:
/// min_C ||C F_hat - G_hat||_F. With ridge = 0 this is the minimum-norm
/// solution C = G_hat pinv(F_hat) (singular values below 1e-10 sigma_max are
/// dropped); with ridge > 0, C = G_hat F_hat^T (F_hat F_hat^T + ridge I)^-1.
inline FunctionalMap solve_fmap(const Matrix& src_coeffs, const Matrix& tgt_coeffs,
                                double ridge = 0.0, Index* rank_out = nullptr) {
  if (src_coeffs.cols() != tgt_coeffs.cols())
    throw std::invalid_argument("solve_fmap: descriptor counts differ (" +
                                std::to_string(src_coeffs.cols()) + " vs " +
                                std::to_string(tgt_coeffs.cols()) + ")");
  if (src_coeffs.cols() < 1) throw std::invalid_argument("solve_fmap: need q >= 1");
  if (ridge < 0.0) throw std::invalid_argument("solve_fmap: negative ridge");

  FunctionalMap map;
  if (ridge > 0.0) {
    Matrix M = src_coeffs * src_coeffs.transpose();
    M.diagonal().array() += ridge;
    // M is symmetric positive definite for ridge > 0.
    map.C = M.ldlt().solve(src_coeffs * tgt_coeffs.transpose()).transpose();
    if (rank_out) *rank_out = src_coeffs.rows();
    return map;
  }

  Eigen::JacobiSVD<Matrix> svd(src_coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double cutoff = 1e-10 * (sigma.size() > 0 ? sigma[0] : 0.0);
  Vector inv_sigma = Vector::Zero(sigma.size());
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cutoff && sigma[i] > 0.0) {
      inv_sigma[i] = 1.0 / sigma[i];
      ++rank;
    }
  }
  map.C = tgt_coeffs * svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
  if (rank_out) *rank_out = rank;
  return map;
}

}  // namespace fmcorr
