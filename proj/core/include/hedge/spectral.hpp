#pragma once

#include "hedge/incidence.hpp"

namespace hedge {

/// Orthonormal eigenbases of the two Laplacians with eigenvalues ascending.
/// Tiny negative eigenvalues from roundoff are clamped to exactly 0, and each
/// eigenvector's largest-magnitude entry is made positive (first such entry on
/// ties) so the decomposition is unique and reproducible.
struct SpectralBasis {
  mat_t node_vectors;       // U, n x n
  mat_t edge_vectors;       // V, m x m
  vec_t node_eigenvalues;   // lambda, ascending, >= 0
  vec_t edge_eigenvalues;   // mu, ascending, >= 0
};

/// Rates below this are treated as exactly relaxing to the conserved subspace.
inline constexpr double kRateZeroTol = 1e-9;

/// Per-mode decay rates of the two-sided heat operator and the spectral gap.
/// rates(i, j) = lambda_i + mu_j; spectral_gap is the smallest rate above
/// kRateZeroTol (0 when every rate is conserved).
struct ModeGrid {
  mat_t rates;
  double spectral_gap = 0.0;
};

SpectralBasis eigendecompose(const NodeLaplacian& lv, const EdgeLaplacian& le);
ModeGrid mode_grid(const SpectralBasis& basis);

/// Mode coordinates U^T X V of a state.
mat_t to_modes(const SpectralBasis& basis, const mat_t& x);

/// Inverse transform U Xm V^T.
mat_t from_modes(const SpectralBasis& basis, const mat_t& xm);

/// Pure heat flow e^{-s L_V} X0 e^{-s L_E}, evaluated mode by mode: coordinate
/// (i, j) decays by e^{-s (lambda_i + mu_j)}.
mat_t heat_kernel_state(const SpectralBasis& basis, const mat_t& x0, double s);

}  // namespace hedge
