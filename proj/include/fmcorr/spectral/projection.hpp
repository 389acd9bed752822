#pragma once

#include "fmcorr/spectral/eigensolver.hpp"

namespace fmcorr {

/// Analysis: Fourier coefficients Phi^T A F of per-vertex functions F (n x q).
inline Matrix project(const SpectralBasis& basis, const Matrix& functions) {
  if (functions.rows() != basis.n_vertices())
    throw std::invalid_argument("project: function rows (" + std::to_string(functions.rows()) +
                                ") != basis vertex count (" + std::to_string(basis.n_vertices()) + ")");
  return basis.eigenfunctions.transpose() * (basis.mass.asDiagonal() * functions);
}

/// Synthesis: Phi * coeffs, back to per-vertex values.
inline Matrix reconstruct(const SpectralBasis& basis, const Matrix& coeffs) {
  if (coeffs.rows() != basis.k)
    throw std::invalid_argument("reconstruct: coeff rows (" + std::to_string(coeffs.rows()) +
                                ") != basis order k (" + std::to_string(basis.k) + ")");
  return basis.eigenfunctions * coeffs;
}

}  // namespace fmcorr
