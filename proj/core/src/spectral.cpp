#include "hedge/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace hedge {

namespace {

// Eigenvalues far below zero mean the input was not a Laplacian; tiny negative
// values are roundoff and clamp to exactly 0.
constexpr double kNegativeEigTol = 1e-8;

void fix_signs(mat_t& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (vectors(imax, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

void decompose_symmetric(const mat_t& m, mat_t& vectors, vec_t& values) {
  if (m.isZero(0.0)) {
    // A masked-out operator. The identity basis keeps this case deterministic.
    vectors = mat_t::Identity(m.rows(), m.cols());
    values = vec_t::Zero(m.rows());
    return;
  }
  Eigen::SelfAdjointEigenSolver<mat_t> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver did not converge");
  }
  vectors = solver.eigenvectors();
  values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < -kNegativeEigTol) {
      throw std::runtime_error("operator has a significantly negative eigenvalue: " +
                               std::to_string(values[i]));
    }
    if (values[i] < 0.0) values[i] = 0.0;
  }
  fix_signs(vectors);
}

}  // namespace

SpectralBasis eigendecompose(const NodeLaplacian& lv, const EdgeLaplacian& le) {
  SpectralBasis b;
  decompose_symmetric(lv.matrix, b.node_vectors, b.node_eigenvalues);
  decompose_symmetric(le.matrix, b.edge_vectors, b.edge_eigenvalues);
  return b;
}

ModeGrid mode_grid(const SpectralBasis& basis) {
  ModeGrid g;
  const Eigen::Index n = basis.node_eigenvalues.size();
  const Eigen::Index m = basis.edge_eigenvalues.size();
  g.rates.resize(n, m);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double r = basis.node_eigenvalues[i] + basis.edge_eigenvalues[j];
      g.rates(i, j) = r;
      if (r > kRateZeroTol && (gap == 0.0 || r < gap)) gap = r;
    }
  }
  g.spectral_gap = gap;
  return g;
}

mat_t to_modes(const SpectralBasis& basis, const mat_t& x) {
  return basis.node_vectors.transpose() * x * basis.edge_vectors;
}

mat_t from_modes(const SpectralBasis& basis, const mat_t& xm) {
  return basis.node_vectors * xm * basis.edge_vectors.transpose();
}

mat_t heat_kernel_state(const SpectralBasis& basis, const mat_t& x0, double s) {
  if (s < 0.0) throw std::invalid_argument("heat_kernel_state: s must be nonnegative");
  mat_t xm = to_modes(basis, x0);
  for (Eigen::Index j = 0; j < xm.cols(); ++j) {
    for (Eigen::Index i = 0; i < xm.rows(); ++i) {
      xm(i, j) *= std::exp(-s * (basis.node_eigenvalues[i] + basis.edge_eigenvalues[j]));
    }
  }
  return from_modes(basis, xm);
}

}  // namespace hedge
