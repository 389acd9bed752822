#pragma once

#include "fmcorr/fmnet/network.hpp"

#include <utility>
#include <vector>

namespace fmcorr {

/// Metric-learning baseline: contrastive loss over refined descriptors,
///   gamma sum_S ||F(x) - G(x+)||^2 + (1-gamma) sum_D (mu - ||F(x) - G(x-)||)_+^2.
struct SiameseConfig {
  double gamma = 0.5;   // trade-off in (0, 1)
  double margin = 1.0;  // mu > 0
  std::vector<std::pair<int, int>> similar;     // (src vertex, tgt vertex)
  std::vector<std::pair<int, int>> dissimilar;
};

struct SiameseResult {
  double loss = 0.0;
  NetworkGradients grads;
};

inline SiameseResult siamese_loss_and_grad(const NetworkParams& params, const Matrix& src_desc,
                                           const Matrix& tgt_desc, const SiameseConfig& cfg) {
  if (cfg.similar.empty() || cfg.dissimilar.empty())
    throw std::invalid_argument("siamese_loss_and_grad: S and D must both be nonempty");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw std::invalid_argument("siamese_loss_and_grad: gamma must lie in (0, 1)");
  if (cfg.margin <= 0.0) throw std::invalid_argument("siamese_loss_and_grad: margin must be positive");

  const ForwardTrace src_trace = forward_trace(params, src_desc);
  const ForwardTrace tgt_trace = forward_trace(params, tgt_desc);
  const Matrix& f = src_trace.output;
  const Matrix& g = tgt_trace.output;

  Matrix f_grad = Matrix::Zero(f.rows(), f.cols());
  Matrix g_grad = Matrix::Zero(g.rows(), g.cols());
  double loss = 0.0;

  for (const auto& [x, xp] : cfg.similar) {
    const Eigen::RowVectorXd diff = f.row(x) - g.row(xp);
    loss += cfg.gamma * diff.squaredNorm();
    f_grad.row(x) += 2.0 * cfg.gamma * diff;
    g_grad.row(xp) -= 2.0 * cfg.gamma * diff;
  }
  for (const auto& [x, xn] : cfg.dissimilar) {
    const Eigen::RowVectorXd diff = f.row(x) - g.row(xn);
    const double dist = diff.norm();
    const double gap = cfg.margin - dist;
    if (gap <= 0.0) continue;  // hinge inactive
    loss += (1.0 - cfg.gamma) * gap * gap;
    if (dist > 0.0) {  // subgradient 0 at the kink dist = 0
      const Eigen::RowVectorXd d = -2.0 * (1.0 - cfg.gamma) * gap * (diff / dist);
      f_grad.row(x) += d;
      g_grad.row(xn) -= d;
    }
  }

  SiameseResult result;
  result.loss = loss;
  result.grads = zero_gradients(params);
  backward_trace(params, src_trace, f_grad, result.grads);
  backward_trace(params, tgt_trace, g_grad, result.grads);
  return result;
}

}  // namespace fmcorr
