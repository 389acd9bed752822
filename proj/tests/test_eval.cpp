#include "fmcorr/eval/curves.hpp"
#include "support/test_meshes.hpp"

#include <gtest/gtest.h>

using namespace fmcorr;
namespace ft = fmcorr::testing;

TEST(PrincetonCurve, AllZeroErrors) {
  const CurveSeries curve = princeton_curve({0.0, 0.0, 0.0}, default_error_thresholds());
  for (double f : curve.fractions) EXPECT_EQ(f, 1.0);
}

TEST(PrincetonCurve, HandCountedFractions) {
  const CurveSeries curve = princeton_curve({0.1, 0.3}, {0.0, 0.2, 0.4});
  ASSERT_EQ(curve.fractions.size(), 3u);
  EXPECT_EQ(curve.fractions[0], 0.0);
  EXPECT_EQ(curve.fractions[1], 0.5);
  EXPECT_EQ(curve.fractions[2], 1.0);
}

TEST(PrincetonCurve, ThresholdZeroSeesZeroErrorMass) {
  const CurveSeries curve = princeton_curve({0.0, 0.5}, {0.0, 1.0});
  EXPECT_EQ(curve.fractions[0], 0.5);  // "smaller than" reads as <=
}

TEST(PrincetonCurve, MatchesSortAndCountOracle) {
  Rng rng(1);
  std::vector<double> errors(1000);
  for (auto& e : errors) e = 0.3 * rng.uniform();
  const auto thresholds = default_error_thresholds();
  const CurveSeries curve = princeton_curve(errors, thresholds);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    long count = 0;
    for (double e : errors)
      if (e <= thresholds[i]) ++count;
    EXPECT_EQ(curve.fractions[i], static_cast<double>(count) / static_cast<double>(errors.size()));
  }
}

TEST(PrincetonCurve, MonotoneAndPermutationInvariant) {
  Rng rng(2);
  std::vector<double> errors(200);
  for (auto& e : errors) e = rng.uniform();
  const auto thresholds = default_error_thresholds(64, 1.0);
  const CurveSeries curve = princeton_curve(errors, thresholds);
  for (std::size_t i = 1; i < curve.fractions.size(); ++i)
    EXPECT_GE(curve.fractions[i], curve.fractions[i - 1]);

  std::vector<double> shuffled = errors;
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i)))]);
  const CurveSeries again = princeton_curve(shuffled, thresholds);
  EXPECT_EQ(curve.fractions, again.fractions);
}

TEST(PrincetonCurve, InvalidInputsThrow) {
  EXPECT_THROW(princeton_curve({}, {0.1}), std::invalid_argument);
  EXPECT_THROW(princeton_curve({0.1}, {0.2, 0.2}), std::invalid_argument);
}

namespace {

DescriptorField field_from(const Matrix& values) {
  DescriptorField f;
  f.values = values;
  f.q = static_cast<int>(values.cols());
  return f;
}

}  // namespace

TEST(CmcCurve, PerfectDescriptorsHitRankOne) {
  Rng rng(3);
  Matrix tgt(20, 6);
  for (Index i = 0; i < tgt.size(); ++i) tgt.data()[i] = rng.normal();
  // distinct rows routed through a permutation truth
  PointMap truth;
  truth.assignments.resize(20);
  std::iota(truth.assignments.begin(), truth.assignments.end(), 0);
  std::reverse(truth.assignments.begin(), truth.assignments.end());
  Matrix src(20, 6);
  for (Index x = 0; x < 20; ++x)
    src.row(x) = tgt.row(truth.assignments[static_cast<std::size_t>(x)]);

  const CurveSeries curve = cmc_curve(field_from(src), field_from(tgt), truth, 5);
  EXPECT_EQ(curve.fractions[0], 1.0);
}

TEST(CmcCurve, ReachesOneAtFullRank) {
  Rng rng(4);
  Matrix src(10, 4), tgt(12, 4);
  for (Index i = 0; i < src.size(); ++i) src.data()[i] = rng.normal();
  for (Index i = 0; i < tgt.size(); ++i) tgt.data()[i] = rng.normal();
  PointMap truth;
  truth.assignments.resize(10);
  for (auto& t : truth.assignments) t = static_cast<int>(rng.uniform_int(12));
  const CurveSeries curve = cmc_curve(field_from(src), field_from(tgt), truth, 12);
  EXPECT_EQ(curve.fractions.back(), 1.0);
  for (std::size_t i = 1; i < curve.fractions.size(); ++i)
    EXPECT_GE(curve.fractions[i], curve.fractions[i - 1]);
}

TEST(CmcCurve, MatchesBruteForceRankingOracle) {
  Rng rng(5);
  Matrix src(30, 5), tgt(30, 5);
  for (Index i = 0; i < src.size(); ++i) src.data()[i] = rng.normal();
  for (Index i = 0; i < tgt.size(); ++i) tgt.data()[i] = rng.normal();
  PointMap truth;
  truth.assignments.resize(30);
  for (auto& t : truth.assignments) t = static_cast<int>(rng.uniform_int(30));

  const CurveSeries curve = cmc_curve(field_from(src), field_from(tgt), truth, 30);

  // oracle: full O(n^2) ranking per source vertex
  std::vector<long> hits(30, 0);
  for (Index x = 0; x < 30; ++x) {
    const int target = truth.assignments[static_cast<std::size_t>(x)];
    const double target_d = (src.row(x) - tgt.row(target)).squaredNorm();
    long rank = 0;
    for (Index y = 0; y < 30; ++y) {
      const double d = (src.row(x) - tgt.row(y)).squaredNorm();
      if (d < target_d || (d == target_d && y < target)) ++rank;
    }
    ++hits[static_cast<std::size_t>(rank)];
  }
  long cumulative = 0;
  for (int r = 0; r < 30; ++r) {
    cumulative += hits[static_cast<std::size_t>(r)];
    EXPECT_EQ(curve.fractions[static_cast<std::size_t>(r)], cumulative / 30.0) << "rank " << r;
  }
}

TEST(CmcCurve, RankBoundsChecked) {
  Matrix m = Matrix::Zero(4, 2);
  PointMap truth;
  truth.assignments = {0, 1, 2, 3};
  EXPECT_THROW(cmc_curve(field_from(m), field_from(m), truth, 5), std::invalid_argument);
  EXPECT_THROW(cmc_curve(field_from(m), field_from(m), truth, 0), std::invalid_argument);
}

TEST(Histogram, IdenticalDescriptorsFillFirstBin) {
  Rng rng(6);
  Matrix desc(15, 3);
  for (Index i = 0; i < desc.size(); ++i) desc.data()[i] = rng.normal();
  PointMap truth;
  truth.assignments.resize(15);
  std::iota(truth.assignments.begin(), truth.assignments.end(), 0);
  const Histogram hist = match_distance_histogram(field_from(desc), field_from(desc), truth, 8);
  EXPECT_EQ(hist.counts[0], 15);
  for (std::size_t b = 1; b < hist.counts.size(); ++b) EXPECT_EQ(hist.counts[b], 0);
}

TEST(Histogram, CountsSumToMatches) {
  Rng rng(7);
  Matrix src(25, 3), tgt(25, 3);
  for (Index i = 0; i < src.size(); ++i) src.data()[i] = rng.normal();
  for (Index i = 0; i < tgt.size(); ++i) tgt.data()[i] = rng.normal();
  PointMap truth;
  truth.assignments.resize(25);
  for (auto& t : truth.assignments) t = static_cast<int>(rng.uniform_int(25));
  const Histogram hist = match_distance_histogram(field_from(src), field_from(tgt), truth, 6);
  long total = 0;
  for (long c : hist.counts) total += c;
  EXPECT_EQ(total, 25);
}

TEST(Histogram, TwoBinManualCount) {
  // 5 matches with hand-placed distances: 0, 1, 2, 3, 4 -> max 4, bins [0,2) [2,4]
  Matrix src(5, 1), tgt(5, 1);
  src << 0, 0, 0, 0, 0;
  tgt << 0, 1, 2, 3, 4;
  PointMap truth;
  truth.assignments = {0, 1, 2, 3, 4};
  const Histogram hist = match_distance_histogram(field_from(src), field_from(tgt), truth, 2);
  EXPECT_EQ(hist.counts[0], 2);  // 0, 1
  EXPECT_EQ(hist.counts[1], 3);  // 2, 3, 4 (max lands in the last bin)
  EXPECT_EQ(hist.hi, 4.0);
}
