#pragma once

#include "fmcorr/fmnet/adam.hpp"
#include "fmcorr/fmnet/fmnet_loss.hpp"
#include "fmcorr/fmnet/siamese.hpp"

#include <chrono>

namespace fmcorr {

enum class LossKind { soft_error, siamese };

struct TrainConfig {
  Index k = 0;  // spectral truncation; 0 keeps the pair bases as given
  int batch_matches = 1000;
  int iters = 0;
  std::uint64_t seed = 7;
  RidgePolicy ridge;  // adaptive by default
  LossKind loss = LossKind::soft_error;
  AdamConfig adam;
  int n_blocks = 7;
  double siamese_gamma = 0.5;
  double siamese_margin = 1.0;
};

struct TrainLogEntry {
  int iter = 0;
  double loss = 0.0;
  long long wall_ms = 0;
};

struct TrainResult {
  NetworkParams params;
  std::vector<TrainLogEntry> log;
};

namespace detail {

// Inverse-CDF sampling over vertex areas: matches are drawn with probability
// proportional to the source area element, with replacement.
struct AreaSampler {
  std::vector<double> cumulative;

  explicit AreaSampler(const Vector& areas) {
    cumulative.resize(static_cast<std::size_t>(areas.size()));
    double run = 0.0;
    for (Index i = 0; i < areas.size(); ++i) {
      run += areas[i];
      cumulative[static_cast<std::size_t>(i)] = run;
    }
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1));
  }
};

}  // namespace detail

/// Mini-batch training loop. The pair list is directed: callers list each
/// unordered shape pair once per direction so both orientations get used.
/// Pairs rotate round-robin; every iteration samples ~batch_matches matches
/// area-weighted, runs forward + exact backward for the configured loss, and
/// takes one ADAM step. Single-threaded and bit-deterministic given a seed.
inline TrainResult train(const std::vector<TrainPair>& pairs, const TrainConfig& cfg) {
  if (pairs.empty()) throw std::invalid_argument("train: no training pairs");
  const int q = static_cast<int>(pairs.front().src.descriptors.cols());
  for (const auto& pair : pairs) {
    if (pair.src.descriptors.cols() != q || pair.tgt.descriptors.cols() != q)
      throw std::invalid_argument("train: descriptor dimensions differ across pairs");
    if (cfg.k > 0 && (cfg.k > pair.src.basis.k || cfg.k > pair.tgt.basis.k))
      throw std::invalid_argument("train: k exceeds a pair's basis size");
  }

  // Working copies with the requested truncation.
  std::vector<TrainPair> work;
  if (cfg.k > 0) {
    work.reserve(pairs.size());
    for (const auto& pair : pairs) {
      TrainPair t = pair;
      t.src.basis = truncate_basis(pair.src.basis, cfg.k);
      t.tgt.basis = truncate_basis(pair.tgt.basis, cfg.k);
      work.push_back(std::move(t));
    }
  }
  const std::vector<TrainPair>& train_pairs = cfg.k > 0 ? work : pairs;

  std::vector<detail::AreaSampler> samplers;
  samplers.reserve(train_pairs.size());
  for (const auto& pair : train_pairs) samplers.emplace_back(pair.src.basis.mass);

  TrainResult result;
  result.params = init_params(q, cfg.seed, cfg.n_blocks);
  AdamState adam = make_adam_state(result.params, cfg.adam);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  const auto start = std::chrono::steady_clock::now();
  for (int it = 0; it < cfg.iters; ++it) {
    const auto& pair = train_pairs[static_cast<std::size_t>(it) % train_pairs.size()];
    const auto& sampler = samplers[static_cast<std::size_t>(it) % train_pairs.size()];

    std::vector<int> sample(static_cast<std::size_t>(cfg.batch_matches));
    for (auto& s : sample) s = sampler.draw(rng);

    double loss = 0.0;
    NetworkGradients grads;
    if (cfg.loss == LossKind::soft_error) {
      const FmnetCache cache = fmnet_forward_loss(result.params, pair, sample, cfg.ridge);
      loss = cache.loss;
      grads = fmnet_backward(result.params, cache);
    } else {
      SiameseConfig sia;
      sia.gamma = cfg.siamese_gamma;
      sia.margin = cfg.siamese_margin;
      const Index n_tgt = pair.tgt.basis.n_vertices();
      sia.similar.reserve(sample.size());
      sia.dissimilar.reserve(sample.size());
      for (int x : sample) {
        const int match = pair.truth.assignments[static_cast<std::size_t>(x)];
        sia.similar.emplace_back(x, match);
        int negative = static_cast<int>(rng.uniform_int(n_tgt));
        if (negative == match) negative = (negative + 1) % static_cast<int>(n_tgt);
        sia.dissimilar.emplace_back(x, negative);
      }
      SiameseResult sres =
          siamese_loss_and_grad(result.params, pair.src.descriptors, pair.tgt.descriptors, sia);
      loss = sres.loss;
      grads = std::move(sres.grads);
    }

    adam_step(adam, result.params, grads);
    const auto now = std::chrono::steady_clock::now();
    result.log.push_back(
        {it, loss,
         std::chrono::duration_cast<std::chrono::milliseconds>(now - start).count()});
  }
  return result;
}

}  // namespace fmcorr
