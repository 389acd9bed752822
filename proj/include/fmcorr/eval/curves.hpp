#pragma once

#include "fmcorr/descriptors/shot.hpp"
#include "fmcorr/fmap/point_map.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace fmcorr {

/// Cumulative curve: fractions[i] = share of samples at or below thresholds[i].
struct CurveSeries {
  std::vector<double> thresholds;
  std::vector<double> fractions;
};

/// 256 uniform thresholds on [0, 0.25] normalized geodesic error, the range
/// correspondence benchmarks conventionally plot.
inline std::vector<double> default_error_thresholds(int count = 256, double max_error = 0.25) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    t[static_cast<std::size_t>(i)] = max_error * static_cast<double>(i) / (count - 1);
  return t;
}

/// Princeton-protocol cumulative error curve. "Smaller than" counts as <=,
/// so the zero-error mass is visible at threshold 0.
inline CurveSeries princeton_curve(const std::vector<double>& errors,
                                   const std::vector<double>& thresholds) {
  if (errors.empty()) throw std::invalid_argument("princeton_curve: empty error list");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] <= thresholds[i - 1])
      throw std::invalid_argument("princeton_curve: thresholds must strictly ascend");

  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  CurveSeries curve;
  curve.thresholds = thresholds;
  curve.fractions.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto upper = std::upper_bound(sorted.begin(), sorted.end(), t);
    curve.fractions.push_back(static_cast<double>(upper - sorted.begin()) /
                              static_cast<double>(sorted.size()));
  }
  return curve;
}

/// CMC: fraction of source vertices whose ground-truth target sits among the
/// r nearest target descriptors (l2, ties by index), for r = 1..max_rank.
inline CurveSeries cmc_curve(const DescriptorField& src_desc, const DescriptorField& tgt_desc,
                             const PointMap& truth, int max_rank) {
  const Index n_src = src_desc.values.rows();
  const Index n_tgt = tgt_desc.values.rows();
  if (max_rank < 1 || max_rank > n_tgt)
    throw std::invalid_argument("cmc_curve: max_rank must lie in [1, n_target]");
  if (static_cast<Index>(truth.assignments.size()) < n_src)
    throw std::invalid_argument("cmc_curve: truth does not cover the source vertices");

  std::vector<long> hits(static_cast<std::size_t>(max_rank), 0);
  std::vector<Index> order(static_cast<std::size_t>(n_tgt));
  for (Index x = 0; x < n_src; ++x) {
    const Vector d2 =
        (tgt_desc.values.rowwise() - src_desc.values.row(x)).rowwise().squaredNorm();
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (d2[a] != d2[b]) return d2[a] < d2[b];
      return a < b;
    });
    const int target = truth.assignments[static_cast<std::size_t>(x)];
    for (int r = 0; r < max_rank; ++r) {
      if (order[static_cast<std::size_t>(r)] == target) {
        ++hits[static_cast<std::size_t>(r)];
        break;
      }
    }
  }

  CurveSeries curve;
  curve.thresholds.reserve(static_cast<std::size_t>(max_rank));
  curve.fractions.reserve(static_cast<std::size_t>(max_rank));
  long cumulative = 0;
  for (int r = 0; r < max_rank; ++r) {
    cumulative += hits[static_cast<std::size_t>(r)];
    curve.thresholds.push_back(static_cast<double>(r + 1));
    curve.fractions.push_back(static_cast<double>(cumulative) / static_cast<double>(n_src));
  }
  return curve;
}

struct Histogram {
  double lo = 0.0, hi = 0.0;
  std::vector<long> counts;
};

/// Histogram of descriptor-space distances between ground-truth matches,
/// binned uniformly on [0, max distance].
inline Histogram match_distance_histogram(const DescriptorField& src_desc,
                                          const DescriptorField& tgt_desc, const PointMap& truth,
                                          int bins) {
  if (bins < 1) throw std::invalid_argument("match_distance_histogram: bins must be >= 1");
  const Index n_src = src_desc.values.rows();
  if (static_cast<Index>(truth.assignments.size()) < n_src)
    throw std::invalid_argument("match_distance_histogram: truth does not cover the source");

  std::vector<double> dist(static_cast<std::size_t>(n_src));
  double max_dist = 0.0;
  for (Index x = 0; x < n_src; ++x) {
    const int y = truth.assignments[static_cast<std::size_t>(x)];
    dist[static_cast<std::size_t>(x)] = (src_desc.values.row(x) - tgt_desc.values.row(y)).norm();
    max_dist = std::max(max_dist, dist[static_cast<std::size_t>(x)]);
  }

  Histogram hist;
  hist.lo = 0.0;
  hist.hi = max_dist;
  hist.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = max_dist > 0.0 ? max_dist / bins : 1.0;
  for (double d : dist) {
    int b = static_cast<int>(d / width);
    b = std::clamp(b, 0, bins - 1);
    ++hist.counts[static_cast<std::size_t>(b)];
  }
  return hist;
}

}  // namespace fmcorr
