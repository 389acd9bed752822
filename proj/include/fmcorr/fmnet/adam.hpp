#pragma once

#include "fmcorr/fmnet/network.hpp"

namespace fmcorr {

struct AdamConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  long t = 0;
  std::vector<ResidualBlock> m, v;  // first/second moment accumulators
  AdamConfig hp;
};

inline AdamState make_adam_state(const NetworkParams& params, const AdamConfig& hp = {}) {
  AdamState state;
  state.hp = hp;
  state.m = zero_gradients(params);
  state.v = zero_gradients(params);
  return state;
}

namespace detail {

template <class Tensor>
void adam_update(Tensor& param, Tensor& m, Tensor& v, const Tensor& g, const AdamConfig& hp,
                 double bias1, double bias2) {
  m = hp.beta1 * m + (1.0 - hp.beta1) * g;
  v = hp.beta2 * v + (1.0 - hp.beta2) * g.cwiseProduct(g);
  const auto m_hat = m.array() / bias1;
  const auto v_hat = v.array() / bias2;
  param.array() -= hp.alpha * m_hat / (v_hat.sqrt() + hp.eps);
}

}  // namespace detail

/// Standard bias-corrected ADAM update, in place.
inline void adam_step(AdamState& state, NetworkParams& params, const NetworkGradients& grads) {
  if (grads.size() != params.blocks.size())
    throw std::invalid_argument("adam_step: gradient/parameter shape mismatch");
  ++state.t;
  const double bias1 = 1.0 - std::pow(state.hp.beta1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(state.hp.beta2, static_cast<double>(state.t));
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    detail::adam_update(params.blocks[b].W1, state.m[b].W1, state.v[b].W1, grads[b].W1, state.hp, bias1, bias2);
    detail::adam_update(params.blocks[b].W2, state.m[b].W2, state.v[b].W2, grads[b].W2, state.hp, bias1, bias2);
    detail::adam_update(params.blocks[b].b1, state.m[b].b1, state.v[b].b1, grads[b].b1, state.hp, bias1, bias2);
    detail::adam_update(params.blocks[b].b2, state.m[b].b2, state.v[b].b2, grads[b].b2, state.hp, bias1, bias2);
  }
}

}  // namespace fmcorr
