#pragma once

#include "fmcorr/common.hpp"

#include <vector>

namespace fmcorr {

/// One fully-connected residual block: x <- x + W2 elu(W1 x + b1) + b2.
/// The same struct doubles as the per-block gradient / moment container.
struct ResidualBlock {
  Matrix W1, W2;  // q x q
  Vector b1, b2;  // q

  static ResidualBlock zeros(int q) {
    ResidualBlock b;
    b.W1 = Matrix::Zero(q, q);
    b.W2 = Matrix::Zero(q, q);
    b.b1 = Vector::Zero(q);
    b.b2 = Vector::Zero(q);
    return b;
  }
};

struct NetworkParams {
  std::vector<ResidualBlock> blocks;
  int q = 0;
  std::uint64_t seed = 0;
};

using NetworkGradients = std::vector<ResidualBlock>;

inline NetworkGradients zero_gradients(const NetworkParams& params) {
  NetworkGradients g;
  g.reserve(params.blocks.size());
  for (std::size_t i = 0; i < params.blocks.size(); ++i) g.push_back(ResidualBlock::zeros(params.q));
  return g;
}

/// Rectifier-family init: W1 ~ N(0, 2/q), biases zero, and W2 = 0 so the
/// freshly initialized network is exactly the identity map.
inline NetworkParams init_params(int q, std::uint64_t seed, int n_blocks = 7) {
  if (q < 1) throw std::invalid_argument("init_params: q must be >= 1");
  if (n_blocks < 1) throw std::invalid_argument("init_params: need at least one block");
  NetworkParams params;
  params.q = q;
  params.seed = seed;
  Rng rng(seed);
  const double std_dev = std::sqrt(2.0 / static_cast<double>(q));
  params.blocks.resize(static_cast<std::size_t>(n_blocks));
  for (auto& block : params.blocks) {
    block.W1.resize(q, q);
    for (Index i = 0; i < q; ++i)
      for (Index j = 0; j < q; ++j) block.W1(i, j) = std_dev * rng.normal();
    block.W2 = Matrix::Zero(q, q);
    block.b1 = Vector::Zero(q);
    block.b2 = Vector::Zero(q);
  }
  return params;
}

inline double elu(double v) { return v > 0.0 ? v : std::expm1(v); }
inline double elu_derivative(double v) { return v > 0.0 ? 1.0 : std::exp(v); }

/// Intermediates retained for reverse mode: block inputs, pre-activations
/// and hidden activations.
struct ForwardTrace {
  std::vector<Matrix> inputs;  // X entering each block
  std::vector<Matrix> pre;     // Z = X W1^T + 1 b1^T
  std::vector<Matrix> hidden;  // H = elu(Z)
  Matrix output;
};

inline ForwardTrace forward_trace(const NetworkParams& params, const Matrix& descriptors) {
  if (descriptors.cols() != params.q)
    throw std::invalid_argument("forward: descriptor dimension " + std::to_string(descriptors.cols()) +
                                " != network q " + std::to_string(params.q));
  ForwardTrace trace;
  trace.inputs.reserve(params.blocks.size());
  trace.pre.reserve(params.blocks.size());
  trace.hidden.reserve(params.blocks.size());
  Matrix x = descriptors;
  for (const auto& block : params.blocks) {
    trace.inputs.push_back(x);
    Matrix z = x * block.W1.transpose();
    z.rowwise() += block.b1.transpose();
    trace.pre.push_back(z);
    Matrix h = z.unaryExpr([](double v) { return elu(v); });
    trace.hidden.push_back(h);
    x += h * block.W2.transpose();
    x.rowwise() += block.b2.transpose();
  }
  trace.output = std::move(x);
  return trace;
}

/// Pointwise refinement: row i of the output depends only on row i of the
/// input, so the dimension and vertex count are both preserved.
inline Matrix forward(const NetworkParams& params, const Matrix& descriptors) {
  if (descriptors.cols() != params.q)
    throw std::invalid_argument("forward: descriptor dimension " + std::to_string(descriptors.cols()) +
                                " != network q " + std::to_string(params.q));
  Matrix x = descriptors;
  Matrix z, h;
  for (const auto& block : params.blocks) {
    z.noalias() = x * block.W1.transpose();
    z.rowwise() += block.b1.transpose();
    h = z.unaryExpr([](double v) { return elu(v); });
    x.noalias() += h * block.W2.transpose();
    x.rowwise() += block.b2.transpose();
  }
  return x;
}

/// Reverse sweep through the residual chain. Accumulates parameter gradients
/// into `grads` and returns the gradient with respect to the chain input.
inline Matrix backward_trace(const NetworkParams& params, const ForwardTrace& trace,
                             const Matrix& output_grad, NetworkGradients& grads) {
  Matrix d = output_grad;
  for (std::size_t b = params.blocks.size(); b-- > 0;) {
    const auto& block = params.blocks[b];
    auto& grad = grads[b];
    grad.b2 += d.colwise().sum().transpose();
    grad.W2.noalias() += d.transpose() * trace.hidden[b];
    Matrix dz = (d * block.W2).cwiseProduct(
        trace.pre[b].unaryExpr([](double v) { return elu_derivative(v); }));
    grad.W1.noalias() += dz.transpose() * trace.inputs[b];
    grad.b1 += dz.colwise().sum().transpose();
    d.noalias() += dz * block.W1;
  }
  return d;
}

}  // namespace fmcorr
