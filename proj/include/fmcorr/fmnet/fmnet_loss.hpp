#pragma once

#include "fmcorr/fmap/soft_correspondence.hpp"
#include "fmcorr/fmnet/network.hpp"

#include <optional>
#include <vector>

namespace fmcorr {

/// Everything one shape contributes to a training pair.
struct ShapeBundle {
  SpectralBasis basis;  // holds eigenfunctions + vertex areas (mass)
  Matrix descriptors;   // n x q network inputs
};

struct TrainPair {
  ShapeBundle src, tgt;
  PointMap truth;         // ground-truth map src vertex -> tgt vertex
  DistanceRows tgt_rows;  // distance rows at the ground-truth targets
};

/// Ridge used inside the differentiable functional-map solve. Without an
/// explicit value the ridge follows the data scale,
/// eps = scale * mean(diag(F_hat F_hat^T)), and the gradient includes the
/// dependence of eps on F_hat.
struct RidgePolicy {
  std::optional<double> value;
  double adaptive_scale = 1e-3;
};

struct FmnetCache {
  ForwardTrace src_trace, tgt_trace;
  Matrix phi, psi;        // truncated eigenfunctions
  Vector mass_src, mass_tgt;
  Matrix f_hat, g_hat;    // k x q spectral coefficients
  Eigen::LLT<Matrix> m_llt;  // factor of M = F_hat F_hat^T + eps I
  Matrix c;               // functional map
  double epsilon = 0.0;
  bool adaptive_ridge = false;
  double adaptive_scale = 0.0;
  std::vector<int> sample;          // sampled source vertices
  Matrix raw_columns;               // n_Y x S, v_s = Psi C (a_x phi_x) before |.|
  Matrix prob_columns;              // n_Y x S, normalized
  Vector column_sums;               // S
  Matrix dist_columns;              // n_Y x S, d_Y(., truth(x_s))
  double loss = 0.0;
};

/// Forward pass of the structured-prediction pipeline on one pair: refine
/// descriptors, project, solve the ridge functional map, form the sampled
/// soft-correspondence columns and evaluate the soft error loss. The cache
/// retains every intermediate the backward pass needs.
inline FmnetCache fmnet_forward_loss(const NetworkParams& params, const TrainPair& pair,
                                     const std::vector<int>& sample,
                                     const RidgePolicy& ridge = {}) {
  if (sample.empty()) throw std::invalid_argument("fmnet_forward_loss: empty sample");
  for (int x : sample) {
    if (x < 0 || x >= pair.src.basis.n_vertices())
      throw std::invalid_argument("fmnet_forward_loss: sample index out of range");
    if (static_cast<std::size_t>(x) >= pair.truth.assignments.size())
      throw std::invalid_argument("fmnet_forward_loss: sample outside the truth domain");
  }

  FmnetCache cache;
  cache.src_trace = forward_trace(params, pair.src.descriptors);
  cache.tgt_trace = forward_trace(params, pair.tgt.descriptors);
  cache.phi = pair.src.basis.eigenfunctions;
  cache.psi = pair.tgt.basis.eigenfunctions;
  cache.mass_src = pair.src.basis.mass;
  cache.mass_tgt = pair.tgt.basis.mass;

  cache.f_hat = cache.phi.transpose() * (cache.mass_src.asDiagonal() * cache.src_trace.output);
  cache.g_hat = cache.psi.transpose() * (cache.mass_tgt.asDiagonal() * cache.tgt_trace.output);

  const Index k = cache.f_hat.rows();
  Matrix m = cache.f_hat * cache.f_hat.transpose();
  if (ridge.value) {
    cache.epsilon = *ridge.value;
    cache.adaptive_ridge = false;
  } else {
    cache.epsilon = ridge.adaptive_scale * m.trace() / static_cast<double>(k);
    cache.adaptive_ridge = true;
    cache.adaptive_scale = ridge.adaptive_scale;
  }
  if (ridge.value && *ridge.value <= 0.0)
    throw std::invalid_argument("fmnet_forward_loss: ridge must be positive for a differentiable solve");
  if (cache.epsilon <= 0.0)
    throw numerical_error(
        "fmnet_forward_loss: adaptive ridge collapsed to zero; the descriptor "
        "coefficients are all zero (empty SHOT neighborhoods?)");
  m.diagonal().array() += cache.epsilon;
  cache.m_llt.compute(m);
  // C = G_hat F_hat^T M^{-1}; M symmetric, so use the factored solve.
  cache.c = cache.m_llt.solve(cache.f_hat * cache.g_hat.transpose()).transpose();

  const Index n_tgt = cache.psi.rows();
  const Index s = static_cast<Index>(sample.size());
  cache.sample = sample;
  cache.raw_columns.resize(n_tgt, s);
  cache.prob_columns.resize(n_tgt, s);
  cache.column_sums.resize(s);
  cache.dist_columns.resize(n_tgt, s);

  double loss = 0.0;
  for (Index j = 0; j < s; ++j) {
    const int x = sample[static_cast<std::size_t>(j)];
    const Vector coeff = cache.c * (cache.mass_src[x] * cache.phi.row(x).transpose());
    cache.raw_columns.col(j) = cache.psi * coeff;
    const Vector abs_col = cache.raw_columns.col(j).cwiseAbs();
    const double sum = abs_col.sum();
    if (sum <= 0.0)
      throw numerical_error("fmnet_forward_loss: degenerate soft-correspondence column at vertex " +
                            std::to_string(x));
    cache.column_sums[j] = sum;
    cache.prob_columns.col(j) = abs_col / sum;
    const int target = pair.truth.assignments[static_cast<std::size_t>(x)];
    cache.dist_columns.col(j) = pair.tgt_rows.row(target).transpose();
    loss += cache.prob_columns.col(j).dot(cache.dist_columns.col(j));
  }
  cache.loss = loss / static_cast<double>(s);
  return cache;
}

/// Exact reverse-mode gradient of the cached loss with respect to every
/// network parameter. The linear-solve layer is differentiated with adjoint
/// solves against the same factored system M; |.| uses subgradient 0 at 0 and
/// the l1 normalization follows the quotient rule.
inline NetworkGradients fmnet_backward(const NetworkParams& params, const FmnetCache& cache) {
  const Index s = static_cast<Index>(cache.sample.size());
  const Index k = cache.f_hat.rows();
  const double inv_s = 1.0 / static_cast<double>(s);

  Matrix c_grad = Matrix::Zero(k, k);
  for (Index j = 0; j < s; ++j) {
    const int x = cache.sample[static_cast<std::size_t>(j)];
    const Vector g = inv_s * cache.dist_columns.col(j);
    const double g_dot_p = g.dot(cache.prob_columns.col(j));
    const Vector dw = (g.array() - g_dot_p).matrix() / cache.column_sums[j];
    Vector dv(dw.size());
    for (Index i = 0; i < dw.size(); ++i) {
      const double v = cache.raw_columns(i, j);
      dv[i] = v > 0.0 ? dw[i] : (v < 0.0 ? -dw[i] : 0.0);
    }
    const Vector u = cache.mass_src[x] * cache.phi.row(x).transpose();
    c_grad.noalias() += (cache.psi.transpose() * dv) * u.transpose();
  }

  // C = N M^{-1} with N = G_hat F_hat^T:
  //   dN = dC M^{-1},  dM = -C^T dC M^{-1}.
  const Matrix n_grad = cache.m_llt.solve(c_grad.transpose()).transpose();
  const Matrix m_grad = -cache.m_llt.solve(c_grad.transpose() * cache.c).transpose();

  Matrix f_hat_grad = n_grad.transpose() * cache.g_hat + (m_grad + m_grad.transpose()) * cache.f_hat;
  if (cache.adaptive_ridge)
    f_hat_grad.noalias() +=
        (2.0 * cache.adaptive_scale / static_cast<double>(k)) * m_grad.trace() * cache.f_hat;
  const Matrix g_hat_grad = n_grad * cache.f_hat;

  const Matrix f_grad = cache.mass_src.asDiagonal() * (cache.phi * f_hat_grad);
  const Matrix g_grad = cache.mass_tgt.asDiagonal() * (cache.psi * g_hat_grad);

  NetworkGradients grads = zero_gradients(params);
  backward_trace(params, cache.src_trace, f_grad, grads);
  backward_trace(params, cache.tgt_trace, g_grad, grads);
  return grads;
}

}  // namespace fmcorr
