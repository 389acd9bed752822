#pragma once

#include "fmcorr/descriptors/shot.hpp"
#include "fmcorr/spectral/eigensolver.hpp"

namespace fmcorr {

/// Heat kernel signature hks(x, t) = sum_i exp(-lambda_i t) phi_i(x)^2,
/// one column per diffusion time.
inline DescriptorField compute_hks(const SpectralBasis& basis, const std::vector<double>& times) {
  if (basis.k < 2) throw std::invalid_argument("compute_hks: need k >= 2");
  for (double t : times)
    if (t <= 0.0) throw std::invalid_argument("compute_hks: non-positive time");

  const Matrix phi2 = basis.eigenfunctions.cwiseProduct(basis.eigenfunctions);  // n x k
  DescriptorField field;
  field.q = static_cast<int>(times.size());
  field.values.resize(basis.n_vertices(), field.q);
  for (std::size_t c = 0; c < times.size(); ++c) {
    const Vector weights = (-times[c] * basis.eigenvalues.array()).exp().matrix();
    field.values.col(static_cast<Index>(c)) = phi2 * weights;
  }
  return field;
}

}  // namespace fmcorr
