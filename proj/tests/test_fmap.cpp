#include "fmcorr/fmap/soft_correspondence.hpp"
#include "fmcorr/io/artifacts.hpp"
#include "support/oracles.hpp"
#include "support/test_meshes.hpp"

#include <gtest/gtest.h>

using namespace fmcorr;
namespace ft = fmcorr::testing;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST(SolveFmap, SelfMapIsIdentity) {
  Rng rng(1);
  const Matrix coeffs = random_matrix(6, 10, rng);
  const FunctionalMap map = solve_fmap(coeffs, coeffs, 0.0);
  EXPECT_LT((map.C - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SolveFmap, MatchesPinvOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Index k = 3 + rng.uniform_int(5);
    const Index q = k + rng.uniform_int(8);
    const Matrix f = random_matrix(k, q, rng);
    const Matrix g = random_matrix(k, q, rng);
    const FunctionalMap map = solve_fmap(f, g, 0.0);
    const Matrix expected = g * ft::pinv_oracle(f);
    EXPECT_LT((map.C - expected).cwiseAbs().maxCoeff(), 1e-10) << "trial " << trial;
  }
}

TEST(SolveFmap, RankDeficientMinimumNorm) {
  Rng rng(3);
  Matrix f = random_matrix(6, 10, rng);
  f.row(5) = f.row(4);  // drop the rank
  const Matrix g = random_matrix(6, 10, rng);
  const FunctionalMap map = solve_fmap(f, g, 0.0);
  const Matrix expected = g * ft::pinv_oracle(f);
  EXPECT_LT((map.C - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveFmap, RidgeMatchesNormalEquationsOracle) {
  Rng rng(4);
  const Matrix f = random_matrix(6, 10, rng);
  const Matrix g = random_matrix(6, 10, rng);
  const double ridge = 1e-2;
  const FunctionalMap map = solve_fmap(f, g, ridge);
  Matrix m = f * f.transpose();
  m.diagonal().array() += ridge;
  const Matrix expected = g * f.transpose() * ft::gauss_jordan_inverse(m);
  EXPECT_LT((map.C - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SolveFmap, NormalEquationsResidual) {
  Rng rng(5);
  const Matrix f = random_matrix(5, 12, rng);
  const Matrix g = random_matrix(5, 12, rng);
  const FunctionalMap map = solve_fmap(f, g, 0.0);
  const Matrix residual = (map.C * f - g) * f.transpose();
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-8 * g.norm());
}

TEST(SolveFmap, AllZeroSourceGivesZeroMap) {
  const Matrix f = Matrix::Zero(4, 6);
  Rng rng(6);
  const Matrix g = random_matrix(4, 6, rng);
  Index rank = -1;
  const FunctionalMap map = solve_fmap(f, g, 0.0, &rank);
  EXPECT_EQ(map.C.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(rank, 0);
}

TEST(SolveFmap, DimensionMismatchThrows) {
  EXPECT_THROW(solve_fmap(Matrix::Zero(4, 6), Matrix::Zero(4, 7)), std::invalid_argument);
  EXPECT_THROW(solve_fmap(Matrix::Zero(4, 0), Matrix::Zero(4, 0)), std::invalid_argument);
  EXPECT_THROW(solve_fmap(Matrix::Zero(4, 6), Matrix::Zero(4, 6), -1.0), std::invalid_argument);
}

namespace {

struct SelfPair {
  SpectralBasis basis;
  TriMesh mesh;
};

SelfPair make_self_pair(int level, std::uint64_t seed, Index k) {
  SelfPair sp{.basis = {}, .mesh = ft::make_blob(level, seed)};
  sp.basis = compute_eigenbasis(build_fem_laplacian(sp.mesh), k);
  return sp;
}

}  // namespace

TEST(SoftCorrespondence, CompleteBasisIdentity) {
  const SelfPair sp = make_self_pair(0, 51, 12);  // k = n = 12
  FunctionalMap map;
  map.C = Matrix::Identity(12, 12);
  const SoftCorrespondence soft = soft_correspondence(sp.basis, sp.basis, map);
  // Phi Phi^T A = I when the basis is complete
  EXPECT_LT((soft.P - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SoftCorrespondence, ColumnsAreDistributions) {
  const SelfPair sp = make_self_pair(1, 52, 15);
  Rng rng(7);
  FunctionalMap map;
  map.C = random_matrix(15, 15, rng);
  const SoftCorrespondence soft = soft_correspondence(sp.basis, sp.basis, map);
  EXPECT_GE(soft.P.minCoeff(), 0.0);
  for (Index c = 0; c < soft.P.cols(); ++c) EXPECT_NEAR(soft.P.col(c).sum(), 1.0, 1e-9);
}

TEST(SoftCorrespondence, HalfBasisMostlyIdentity) {
  const TriMesh mesh = ft::make_blob(1, 53);  // 42 vertices
  const Index n = mesh.n_vertices();
  const SpectralBasis basis = compute_eigenbasis(build_fem_laplacian(mesh), n / 2);
  FunctionalMap map;
  map.C = Matrix::Identity(n / 2, n / 2);
  const SoftCorrespondence soft = soft_correspondence(basis, basis, map);
  int correct = 0;
  for (Index c = 0; c < soft.P.cols(); ++c) {
    Index arg;
    soft.P.col(c).maxCoeff(&arg);
    if (arg == c) ++correct;
  }
  // realized fraction on this instance: 42/42
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(n), 0.9);
}

TEST(SoftCorrespondence, ColumnSubsetAndBounds) {
  const SelfPair sp = make_self_pair(1, 54, 10);
  FunctionalMap map;
  map.C = Matrix::Identity(10, 10);
  const SoftCorrespondence soft =
      soft_correspondence(sp.basis, sp.basis, map, std::vector<int>{3, 8, 20});
  EXPECT_EQ(soft.P.cols(), 3);
  EXPECT_EQ(soft.column_index_map, (std::vector<int>{3, 8, 20}));
  EXPECT_THROW(soft_correspondence(sp.basis, sp.basis, map, std::vector<int>{-1}),
               std::invalid_argument);
  EXPECT_THROW(
      soft_correspondence(sp.basis, sp.basis, map, std::vector<int>{static_cast<int>(sp.basis.n_vertices())}),
      std::invalid_argument);
}

TEST(SoftCorrespondence, DegenerateColumnThrows) {
  const SelfPair sp = make_self_pair(0, 55, 5);
  FunctionalMap map;
  map.C = Matrix::Zero(5, 5);
  EXPECT_THROW(soft_correspondence(sp.basis, sp.basis, map), numerical_error);
}

TEST(SoftErrorLoss, PerfectPermutationIsZero) {
  const SelfPair sp = make_self_pair(0, 56, 12);
  FunctionalMap map;
  map.C = Matrix::Identity(12, 12);
  const SoftCorrespondence soft = soft_correspondence(sp.basis, sp.basis, map);
  PointMap truth;
  truth.assignments.resize(12);
  std::iota(truth.assignments.begin(), truth.assignments.end(), 0);
  std::vector<int> all(12);
  std::iota(all.begin(), all.end(), 0);
  const DistanceRows rows = geodesic_distances(sp.mesh, all);
  EXPECT_NEAR(soft_error_loss(soft, truth, rows), 0.0, 1e-12);
}

TEST(SoftErrorLoss, UniformColumnGivesRowMean) {
  const TriMesh mesh = ft::make_blob(0, 57);
  const Index n = mesh.n_vertices();
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  const DistanceRows rows = geodesic_distances(mesh, all);

  SoftCorrespondence soft;
  soft.P = Matrix::Constant(n, 1, 1.0 / static_cast<double>(n));
  soft.column_index_map = {4};
  PointMap truth;
  truth.assignments.assign(static_cast<std::size_t>(n), 0);
  truth.assignments[4] = 9;
  const double expected = rows.row(9).mean();
  EXPECT_NEAR(soft_error_loss(soft, truth, rows), expected, 1e-12);
}

TEST(SoftErrorLoss, MatchesTripleLoopOracle) {
  const TriMesh mesh = ft::make_blob(0, 58);  // 12 vertices <= 20
  const Index n = mesh.n_vertices();
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  const DistanceRows rows = geodesic_distances(mesh, all);

  Rng rng(8);
  SoftCorrespondence soft;
  soft.P.resize(n, n);
  soft.column_index_map.resize(static_cast<std::size_t>(n));
  for (Index c = 0; c < n; ++c) {
    soft.column_index_map[static_cast<std::size_t>(c)] = static_cast<int>(c);
    Vector col(n);
    for (Index r = 0; r < n; ++r) col[r] = rng.uniform();
    soft.P.col(c) = col / col.sum();
  }
  PointMap truth;
  truth.assignments.resize(static_cast<std::size_t>(n));
  for (auto& t : truth.assignments) t = static_cast<int>(rng.uniform_int(n));

  double oracle = 0.0;
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      oracle += soft.P(y, x) * rows.distances(truth.assignments[static_cast<std::size_t>(x)], y);
  oracle /= static_cast<double>(n);

  EXPECT_NEAR(soft_error_loss(soft, truth, rows), oracle, 1e-12);
}

TEST(SoftErrorLoss, LinearInDistances) {
  const TriMesh mesh = ft::make_blob(0, 59);
  const Index n = mesh.n_vertices();
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  DistanceRows rows = geodesic_distances(mesh, all);
  Rng rng(9);
  SoftCorrespondence soft;
  soft.P.resize(n, 3);
  soft.column_index_map = {0, 5, 7};
  for (Index c = 0; c < 3; ++c) {
    Vector col(n);
    for (Index r = 0; r < n; ++r) col[r] = rng.uniform();
    soft.P.col(c) = col / col.sum();
  }
  PointMap truth;
  truth.assignments.assign(static_cast<std::size_t>(n), 2);
  const double base = soft_error_loss(soft, truth, rows);
  rows.distances *= 2.0;
  EXPECT_NEAR(soft_error_loss(soft, truth, rows), 2.0 * base, 1e-12);
}

TEST(SoftErrorLoss, FrobeniusFormDiffers) {
  const TriMesh mesh = ft::make_blob(0, 60);
  const Index n = mesh.n_vertices();
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  const DistanceRows rows = geodesic_distances(mesh, all);
  SoftCorrespondence soft;
  soft.P = Matrix::Constant(n, 1, 1.0 / static_cast<double>(n));
  soft.column_index_map = {0};
  PointMap truth;
  truth.assignments.assign(static_cast<std::size_t>(n), 3);

  const double sum_form = soft_error_loss(soft, truth, rows, SoftErrorForm::weighted_sum);
  const double fro_form = soft_error_loss(soft, truth, rows, SoftErrorForm::frobenius);
  double fro_oracle = 0.0;
  for (Index y = 0; y < n; ++y)
    fro_oracle += std::pow(soft.P(y, 0) * rows.distances(3, y), 2.0);
  EXPECT_NEAR(fro_form, std::sqrt(fro_oracle), 1e-12);
  EXPECT_NE(sum_form, fro_form);
}

TEST(RecoverPointMap, CompleteSelfMapIsIdentity) {
  const SelfPair sp = make_self_pair(0, 61, 12);
  FunctionalMap map;
  map.C = Matrix::Identity(12, 12);
  const PointMap pmap = recover_point_map(sp.basis, sp.basis, map);
  for (Index i = 0; i < 12; ++i) EXPECT_EQ(pmap.assignments[static_cast<std::size_t>(i)], i);
}

TEST(RecoverPointMap, TruncatedSelfMapMostlyIdentity) {
  const TriMesh mesh = ft::make_icosphere(1);  // 42 vertices is the closest desk analogue
  const SpectralBasis basis = compute_eigenbasis(build_fem_laplacian(mesh), 20);
  FunctionalMap map;
  map.C = Matrix::Identity(20, 20);
  const PointMap pmap = recover_point_map(basis, basis, map);
  int exact = 0;
  for (Index i = 0; i < mesh.n_vertices(); ++i)
    if (pmap.assignments[static_cast<std::size_t>(i)] == static_cast<int>(i)) ++exact;
  EXPECT_GE(static_cast<double>(exact) / static_cast<double>(mesh.n_vertices()), 0.95);
}

TEST(RecoverPointMap, MatchesExhaustiveOracle) {
  const TriMesh src_mesh = ft::make_blob(0, 62);
  const TriMesh tgt_mesh = ft::make_blob(0, 63);
  const SpectralBasis src = compute_eigenbasis(build_fem_laplacian(src_mesh), 6);
  const SpectralBasis tgt = compute_eigenbasis(build_fem_laplacian(tgt_mesh), 6);
  Rng rng(10);
  FunctionalMap map;
  map.C = random_matrix(6, 6, rng);
  const PointMap pmap = recover_point_map(src, tgt, map);

  for (Index x = 0; x < src.n_vertices(); ++x) {
    const Vector embedded = map.C * src.eigenfunctions.row(x).transpose();
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index y = 0; y < tgt.n_vertices(); ++y) {
      double d = 0.0;
      for (Index c = 0; c < 6; ++c) d += std::pow(tgt.eigenfunctions(y, c) - embedded[c], 2.0);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(y);
      }
    }
    EXPECT_EQ(pmap.assignments[static_cast<std::size_t>(x)], best);
  }
}

TEST(RecoverPointMap, SignConjugationInvariance) {
  const TriMesh mesh = ft::make_blob(1, 64);
  const SpectralBasis basis = compute_eigenbasis(build_fem_laplacian(mesh), 8);
  Rng rng(11);
  FunctionalMap map;
  map.C = random_matrix(8, 8, rng);
  const PointMap base = recover_point_map(basis, basis, map);

  // flip random signs consistently: Phi -> Phi S, Psi -> Psi S, C -> S C S
  Vector signs(8);
  for (Index i = 0; i < 8; ++i) signs[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  SpectralBasis flipped = basis;
  flipped.eigenfunctions = basis.eigenfunctions * signs.asDiagonal();
  FunctionalMap conjugated;
  conjugated.C = signs.asDiagonal() * map.C * signs.asDiagonal();
  const PointMap flipped_map = recover_point_map(flipped, flipped, conjugated);
  EXPECT_EQ(base.assignments, flipped_map.assignments);
}

TEST(PointMapIo, TextRoundTrip) {
  PointMap map;
  map.assignments = {0, 3, 2, 7, 1};
  std::stringstream buf;
  save_point_map(map, buf);
  const PointMap back = load_point_map(buf);
  EXPECT_EQ(back.assignments, map.assignments);
}

TEST(SoftCorrespondenceIo, RoundTripWithColumnList) {
  const SelfPair sp = make_self_pair(0, 65, 8);
  FunctionalMap map;
  map.C = Matrix::Identity(8, 8);
  const SoftCorrespondence soft =
      soft_correspondence(sp.basis, sp.basis, map, std::vector<int>{1, 4, 9});
  const std::string path = ::testing::TempDir() + "soft.fmb";
  save_soft_correspondence(soft, path);
  const SoftCorrespondence back = load_soft_correspondence(path);
  EXPECT_EQ(back.column_index_map, soft.column_index_map);
  EXPECT_EQ((back.P - soft.P).cwiseAbs().maxCoeff(), 0.0);
}
