#pragma once

#include "fmcorr/spectral/laplacian.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

namespace fmcorr {

/// Truncated generalized eigenbasis of (W, A): W phi = lambda A phi with
/// Phi^T A Phi = I. Eigenvalues ascend; each eigenvector's largest-magnitude
/// entry is positive (ties to the lowest index) so results are reproducible.
struct SpectralBasis {
  Index k = 0;
  Vector eigenvalues;     // k, nondecreasing, >= -1e-10
  Matrix eigenfunctions;  // n x k
  Vector mass;            // n, diagonal of A
  std::string id;         // caller-assigned identifier (e.g. mesh checksum)

  Index n_vertices() const { return eigenfunctions.rows(); }
};

enum class EigsMethod { automatic, dense, lanczos };

struct EigsOptions {
  EigsMethod method = EigsMethod::automatic;
  double shift = -1e-8;  // shift-invert target; slightly below the zero eigenvalue
  int max_iter = 0;      // Lanczos basis cap; 0 picks a heuristic
  double tol = 1e-10;
  std::uint64_t seed = 0x176a7ec7ed5eedULL;
};

namespace detail {

inline void fix_eigenvector_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, c));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

// Repeated eigenvalues carry no intrinsic order; within an exact multiplet we
// order by the sign-fixed eigenvector's first significant entry.
inline void order_multiplets(Vector& values, Matrix& vectors) {
  const auto first_significant = [&](Index c) {
    for (Index i = 0; i < vectors.rows(); ++i)
      if (std::abs(vectors(i, c)) > 1e-8) return i;
    return vectors.rows();
  };
  Index run_start = 0;
  for (Index i = 1; i <= values.size(); ++i) {
    const bool tied = i < values.size() &&
                      values[i] - values[run_start] <= 1e-12 * (1.0 + std::abs(values[run_start]));
    if (tied) continue;
    if (i - run_start > 1) {
      std::vector<Index> order(static_cast<std::size_t>(i - run_start));
      std::iota(order.begin(), order.end(), run_start);
      std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Index fa = first_significant(a), fb = first_significant(b);
        if (fa != fb) return fa < fb;
        return vectors(fa, a) < vectors(fb, b);
      });
      Matrix tmp_v(vectors.rows(), i - run_start);
      Vector tmp_l(i - run_start);
      for (Index j = 0; j < i - run_start; ++j) {
        tmp_v.col(j) = vectors.col(order[static_cast<std::size_t>(j)]);
        tmp_l[j] = values[order[static_cast<std::size_t>(j)]];
      }
      vectors.middleCols(run_start, i - run_start) = tmp_v;
      values.segment(run_start, i - run_start) = tmp_l;
    }
    run_start = i;
  }
}

inline SpectralBasis dense_eigenbasis(const LaplaceOperator& op, Index k) {
  const Matrix W = Matrix(op.stiffness);
  const Matrix A = op.mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(W, A, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw numerical_error("dense generalized eigensolver failed");
  SpectralBasis basis;
  basis.k = k;
  basis.eigenvalues = solver.eigenvalues().head(k);
  basis.eigenfunctions = solver.eigenvectors().leftCols(k);
  basis.mass = op.mass;
  return basis;
}

// Number of pencil eigenvalues strictly below mu, by Sylvester inertia of
// W - mu A. Returns -1 when the indefinite factorization breaks down (no
// pivoting in SimplicialLDLT), in which case the caller skips the check.
inline Index eigenvalue_count_below(const SparseMatrix& stiffness, const Vector& mass, double mu) {
  SparseMatrix shifted = stiffness;
  for (Index i = 0; i < mass.size(); ++i) shifted.coeffRef(i, i) -= mu * mass[i];
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) return -1;
  const Vector d = factor.vectorD();
  if (!d.allFinite()) return -1;
  Index negatives = 0;
  for (Index i = 0; i < d.size(); ++i)
    if (d[i] < 0.0) ++negatives;
  return negatives;
}

// Shift-invert Lanczos on the pencil (W, A) with the A-inner product and full
// reorthogonalization. The operator is x -> (W - shift*A)^{-1} A x; its Ritz
// values theta map back via lambda = shift + 1/theta, and the largest theta
// correspond to the eigenvalues nearest the shift, i.e. the smallest lambda.
//
// Repeated eigenvalues only enter the Krylov space through rounding noise, so
// the stopping rule demands a converged buffer beyond the requested k, and an
// inertia count below the top returned cluster certifies that no copy was
// skipped.
inline SpectralBasis lanczos_eigenbasis(const LaplaceOperator& op, Index k, const EigsOptions& opts) {
  const Index n = op.mass.size();
  SparseMatrix K = op.stiffness;
  for (Index i = 0; i < n; ++i) K.coeffRef(i, i) -= opts.shift * op.mass[i];
  K.makeCompressed();
  Eigen::SimplicialLDLT<SparseMatrix> factor(K);
  if (factor.info() != Eigen::Success)
    throw numerical_error("shift-invert factorization failed (mesh may be degenerate)");

  const auto& A = op.mass;
  const Index buffer = std::min<Index>(n - k, std::max<Index>(8, k));
  const Index wanted = k + buffer;
  const int cap = opts.max_iter > 0
                      ? std::min<int>(opts.max_iter, static_cast<int>(n))
                      : static_cast<int>(std::min<Index>(n, std::max<Index>(6 * wanted, 160)));

  Matrix V(n, cap);
  Vector alpha(cap), beta(cap);
  Rng rng(opts.seed);

  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  v /= std::sqrt(v.dot(A.cwiseProduct(v)));
  V.col(0) = v;

  int m = 0;
  Eigen::SelfAdjointEigenSolver<Matrix> tri;
  for (int j = 0; j < cap; ++j) {
    Vector w = factor.solve(A.cwiseProduct(V.col(j)));
    alpha[j] = w.dot(A.cwiseProduct(V.col(j)));
    w -= alpha[j] * V.col(j);
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector proj = V.leftCols(j + 1).transpose() * A.cwiseProduct(w).matrix();
      w.noalias() -= V.leftCols(j + 1) * proj;
    }
    double b = std::sqrt(std::max(0.0, w.dot(A.cwiseProduct(w))));
    if (b < 1e-14) {
      // Invariant subspace hit: restart with a fresh direction.
      for (Index i = 0; i < n; ++i) w[i] = rng.normal();
      for (int pass = 0; pass < 2; ++pass) {
        const Vector proj = V.leftCols(j + 1).transpose() * A.cwiseProduct(w).matrix();
        w.noalias() -= V.leftCols(j + 1) * proj;
      }
      b = std::sqrt(std::max(0.0, w.dot(A.cwiseProduct(w))));
      if (b < 1e-14) {
        m = j + 1;
        break;
      }
    }
    beta[j] = b;
    m = j + 1;
    if (j + 1 < cap) V.col(j + 1) = w / b;

    if (m >= static_cast<int>(wanted) && (m % 10 == 0 || j + 1 == cap)) {
      Matrix T = Matrix::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      tri.compute(T);
      bool done = true;
      for (Index r = 0; r < wanted && done; ++r) {
        const Index col = m - 1 - r;  // largest theta sit at the back (ascending order)
        const double theta = tri.eigenvalues()[col];
        const double resid = std::abs(beta[m - 1] * tri.eigenvectors()(m - 1, col));
        // strict tolerance for the pairs we return, relaxed for the buffer
        const double tol = r < k ? opts.tol : 1e-4;
        if (resid > tol * std::max(std::abs(theta), 1e-8)) done = false;
      }
      if (done) break;
    }
  }

  if (m < static_cast<int>(k))
    throw numerical_error("Lanczos produced fewer directions than requested eigenpairs");

  Matrix T = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  tri.compute(T);

  SpectralBasis basis;
  basis.k = k;
  basis.eigenvalues.resize(k);
  basis.eigenfunctions.resize(n, k);
  basis.mass = op.mass;
  for (Index r = 0; r < k; ++r) {
    const Index col = m - 1 - r;
    const double theta = tri.eigenvalues()[col];
    basis.eigenvalues[r] = opts.shift + 1.0 / theta;
    basis.eigenfunctions.col(r) = V.leftCols(m) * tri.eigenvectors().col(col);
  }
  // theta descending <=> lambda ascending already; renormalize in the A-norm
  // to clean up the last digits.
  for (Index c = 0; c < k; ++c) {
    const double nrm = std::sqrt(basis.eigenfunctions.col(c).dot(A.cwiseProduct(basis.eigenfunctions.col(c))));
    basis.eigenfunctions.col(c) /= nrm;
  }

  // Completeness certificate: no eigenvalue below the top returned cluster
  // may be missing. Skipped when the indefinite factorization breaks down.
  const double scale = 1.0 + std::abs(basis.eigenvalues[k - 1]);
  const double cluster_gap = 1e-7 * scale;
  Index top_start = k - 1;
  while (top_start > 0 && basis.eigenvalues[top_start] - basis.eigenvalues[top_start - 1] <= cluster_gap)
    --top_start;
  const double mu = basis.eigenvalues[top_start] - 0.5 * cluster_gap;
  const Index below = eigenvalue_count_below(op.stiffness, op.mass, mu);
  if (below >= 0 && below != top_start)
    throw numerical_error("Lanczos missed " + std::to_string(below - top_start) +
                          " eigenvalue(s) below " + std::to_string(mu) +
                          "; raise max_iter or use the dense method");
  return basis;
}

}  // namespace detail

inline SpectralBasis compute_eigenbasis(const LaplaceOperator& op, Index k,
                                        const EigsOptions& opts = {}) {
  const Index n = op.mass.size();
  if (k < 1 || k > n)
    throw std::invalid_argument("compute_eigenbasis: need 1 <= k <= n, got k=" + std::to_string(k) +
                                ", n=" + std::to_string(n));

  EigsMethod method = opts.method;
  if (method == EigsMethod::automatic)
    method = (n <= 500 || 3 * k > n) ? EigsMethod::dense : EigsMethod::lanczos;

  SpectralBasis basis = method == EigsMethod::dense ? detail::dense_eigenbasis(op, k)
                                                    : detail::lanczos_eigenbasis(op, k, opts);
  detail::fix_eigenvector_signs(basis.eigenfunctions);
  detail::order_multiplets(basis.eigenvalues, basis.eigenfunctions);

  // Residual acceptance: ||W phi - lambda A phi|| <= 1e-6 (1 + lambda_k).
  const double bound = 1e-6 * (1.0 + std::abs(basis.eigenvalues[k - 1]));
  for (Index c = 0; c < k; ++c) {
    const Vector r = op.stiffness * basis.eigenfunctions.col(c) -
                     basis.eigenvalues[c] * op.mass.cwiseProduct(basis.eigenfunctions.col(c));
    if (r.norm() > bound) {
      std::ostringstream msg;
      msg << "eigensolver did not converge: column " << c << " residual " << r.norm()
          << " exceeds " << bound;
      throw numerical_error(msg.str());
    }
  }
  return basis;
}

/// Leading-k sub-basis (shares the mass vector by copy).
inline SpectralBasis truncate_basis(const SpectralBasis& basis, Index k) {
  if (k < 1 || k > basis.k) throw std::invalid_argument("truncate_basis: bad k");
  SpectralBasis out;
  out.k = k;
  out.eigenvalues = basis.eigenvalues.head(k);
  out.eigenfunctions = basis.eigenfunctions.leftCols(k);
  out.mass = basis.mass;
  out.id = basis.id;
  return out;
}

}  // namespace fmcorr
