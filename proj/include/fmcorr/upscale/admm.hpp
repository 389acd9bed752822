#pragma once

#include "fmcorr/fmap/functional_map.hpp"

#include <vector>

namespace fmcorr {

/// Sum of the l2 norms of the columns.
inline double l21_norm(const Matrix& m) {
  double sum = 0.0;
  for (Index c = 0; c < m.cols(); ++c) sum += m.col(c).norm();
  return sum;
}

/// Delta-function pairs for the upscaling fit: columns are the Fourier
/// coefficients of matched deltas in the full-resolution bases.
struct UpscaleProblem {
  Matrix src_delta_coeffs;  // k x p
  Matrix tgt_delta_coeffs;  // k x p
};

struct AdmmConfig {
  double rho = 1.0;
  int max_iter = 1000;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
};

struct AdmmLog {
  std::vector<int> iter;
  std::vector<double> objective, primal_res, dual_res;
};

struct AdmmResult {
  FunctionalMap map;
  bool converged = false;
  bool degenerate = false;  // F_hat was all zero
  int iterations = 0;
  double objective = 0.0;
  AdmmLog log;
};

/// Robust functional-map fit min_C ||C F - G||_{2,1} by ADMM with the
/// splitting Z = C F - G:
///   C-update: ridge-regularized least squares against Z + G - U,
///   Z-update: column-wise block soft-thresholding at 1/rho,
///   U-update: dual ascent on the scaled multiplier.
/// Warm-started at the least-squares solution; returns the best iterate by
/// objective value, so the result never falls behind the warm start.
inline AdmmResult solve_l21(const UpscaleProblem& problem, const AdmmConfig& cfg = {}) {
  const Matrix& F = problem.src_delta_coeffs;
  const Matrix& G = problem.tgt_delta_coeffs;
  if (F.cols() != G.cols() || F.cols() < 1)
    throw std::invalid_argument("solve_l21: need matching, nonempty delta columns");
  if (cfg.rho <= 0.0) throw std::invalid_argument("solve_l21: rho must be positive");
  const Index k_src = F.rows(), k_tgt = G.rows(), p = F.cols();

  AdmmResult result;
  if (F.norm() == 0.0) {
    result.map.C = Matrix::Zero(k_tgt, k_src);
    result.degenerate = true;
    result.objective = l21_norm(-G);
    return result;
  }

  Matrix M = F * F.transpose();
  const double ridge = 1e-10 * (1.0 + M.trace() / static_cast<double>(k_src));
  M.diagonal().array() += ridge;
  const Eigen::LLT<Matrix> factor(M);

  Matrix C = solve_fmap(F, G).C;  // least-squares warm start
  Matrix Z = C * F - G;
  Matrix U = Matrix::Zero(k_tgt, p);

  const auto objective_at = [&](const Matrix& c) { return l21_norm(c * F - G); };
  double best_obj = objective_at(C);
  Matrix best_C = C;

  const double thresh = 1.0 / cfg.rho;
  for (int it = 0; it < cfg.max_iter; ++it) {
    // C-update: min_C ||C F - (G + Z - U)||_F^2  (+ tiny ridge)
    const Matrix rhs = G + Z - U;
    C = factor.solve(F * rhs.transpose()).transpose();

    // Z-update: block soft-threshold columns of V = C F - G + U.
    const Matrix CF_G = C * F - G;
    const Matrix V = CF_G + U;
    Matrix Z_prev = std::move(Z);
    Z.resize(k_tgt, p);
    for (Index c = 0; c < p; ++c) {
      const double nrm = V.col(c).norm();
      const double scale = nrm > thresh ? 1.0 - thresh / nrm : 0.0;
      Z.col(c) = scale * V.col(c);
    }

    U += CF_G - Z;

    const double primal = (CF_G - Z).norm();
    const double dual = cfg.rho * ((Z - Z_prev) * F.transpose()).norm();
    const double obj = objective_at(C);
    result.log.iter.push_back(it);
    result.log.objective.push_back(obj);
    result.log.primal_res.push_back(primal);
    result.log.dual_res.push_back(dual);
    if (obj < best_obj) {
      best_obj = obj;
      best_C = C;
    }
    result.iterations = it + 1;

    const double primal_scale = std::max({CF_G.norm(), Z.norm(), 1.0});
    const double dual_scale = std::max(cfg.rho * (U * F.transpose()).norm(), 1.0);
    if (primal <= cfg.tol_primal * primal_scale && dual <= cfg.tol_dual * dual_scale) {
      result.converged = true;
      break;
    }
  }

  result.map.C = std::move(best_C);
  result.objective = best_obj;
  return result;
}

}  // namespace fmcorr
